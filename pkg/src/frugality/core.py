"""Set systems, cheapest-set selection, fairness constraints and witness checks.

Agents are the integers ``0..n-1``. Subsets of agents are ``frozenset`` objects;
costs and bids are :class:`fractions.Fraction` values. Graph-backed systems
number their agents by the order of edges (path systems) or vertices
(vertex-cover systems) in the instance.
"""
from __future__ import annotations

import heapq
import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

import networkx as nx

from . import kernels
from .config import Caps, default_caps
from .errors import CapExceeded, InstanceFormatError, MonopolyDetected, NoFeasibleSet

TU = "TU"
NTU = "NTU"

# --------------------------------------------------------------------------
# Rationals
# --------------------------------------------------------------------------

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    """Parse an integer or a ``"p/q"`` string. Floats and decimals are rejected."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            num, den = m.groups()
            if den is not None and int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den) if den else 1)
    raise ValueError(f"not an exact rational: {value!r}")


def fmt(q) -> str:
    """Exact text form: ``"p/q"`` or an integer."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_costs(values: Sequence) -> tuple[Fraction, ...]:
    costs = tuple(parse_rational(v) for v in values)
    if any(c < 0 for c in costs):
        raise ValueError("costs must be nonnegative")
    return costs


# --------------------------------------------------------------------------
# Families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    directed: bool = False

    @classmethod
    def build(cls, vertices, edges, directed=False) -> "Graph":
        vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(vertices)}
        out = []
        for u, v in edges:
            u = index[u] if isinstance(u, str) else int(u)
            v = index[v] if isinstance(v, str) else int(v)
            out.append((u, v))
        return cls(vertices, tuple(out), directed)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def neighbours(self) -> list[set[int]]:
        nbrs = [set() for _ in self.vertices]
        for u, v in self.edges:
            if u != v:
                nbrs[u].add(v)
                nbrs[v].add(u)
        return nbrs

    def max_degree(self) -> int:
        return max((len(x) for x in self.neighbours()), default=0)

    def edge_label(self, i: int) -> str:
        u, v = self.edges[i]
        return f"{self.vertices[u]}{self.vertices[v]}"

    def to_networkx(self):
        g = nx.MultiDiGraph() if self.directed else nx.MultiGraph()
        g.add_nodes_from(range(self.num_vertices))
        for i, (u, v) in enumerate(self.edges):
            g.add_edge(u, v, key=i)
        return g


@dataclass(frozen=True)
class Explicit:
    sets: tuple[frozenset, ...]


@dataclass(frozen=True)
class PathFamily:
    graph: Graph
    s: int
    t: int


@dataclass(frozen=True)
class VertexCoverFamily:
    graph: Graph


@dataclass(frozen=True)
class Uniform:
    n: int
    k: int


@dataclass(frozen=True)
class Graphic:
    graph: Graph


@dataclass(frozen=True)
class ExplicitBases:
    bases: tuple[frozenset, ...]


MatroidDescriptor = Union[Uniform, Graphic, ExplicitBases]


@dataclass(frozen=True)
class MatroidFamily:
    descriptor: MatroidDescriptor


Family = Union[Explicit, PathFamily, VertexCoverFamily, MatroidFamily]


@dataclass(frozen=True)
class SetSystem:
    n: int
    family: Family
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(self.n)))
        if len(self.labels) != self.n:
            raise ValueError("one label per agent is required")
        fam = self.family
        if isinstance(fam, Explicit):
            if not fam.sets:
                raise NoFeasibleSet("explicit family is empty")
            seen = []
            for s in fam.sets:
                s = frozenset(s)
                if not s or any(not 0 <= e < self.n for e in s):
                    raise ValueError(f"feasible set {sorted(s)} is empty or out of range")
                if s not in seen:
                    seen.append(s)
            object.__setattr__(self, "family", Explicit(tuple(seen)))
        elif isinstance(fam, (PathFamily, VertexCoverFamily)):
            expected = len(fam.graph.edges) if isinstance(fam, PathFamily) else fam.graph.num_vertices
            if expected != self.n:
                raise ValueError(f"graph defines {expected} agents, system has {self.n}")

    # constructors ---------------------------------------------------------

    @classmethod
    def explicit(cls, n, sets, labels=()) -> "SetSystem":
        return cls(n, Explicit(tuple(frozenset(s) for s in sets)), tuple(labels))

    @classmethod
    def paths(cls, graph: Graph, s, t) -> "SetSystem":
        s = graph.vertices.index(s) if isinstance(s, str) else s
        t = graph.vertices.index(t) if isinstance(t, str) else t
        labels = tuple(graph.edge_label(i) for i in range(len(graph.edges)))
        if len(set(labels)) != len(labels):
            labels = tuple(f"{lab}#{i}" for i, lab in enumerate(labels))
        return cls(len(graph.edges), PathFamily(graph, s, t), labels)

    @classmethod
    def vertex_cover(cls, graph: Graph) -> "SetSystem":
        return cls(graph.num_vertices, VertexCoverFamily(graph), graph.vertices)

    @classmethod
    def matroid(cls, descriptor: MatroidDescriptor, labels=()) -> "SetSystem":
        if isinstance(descriptor, Uniform):
            n = descriptor.n
        elif isinstance(descriptor, Graphic):
            n = len(descriptor.graph.edges)
        else:
            n = 1 + max(max(b) for b in descriptor.bases)
        return cls(n, MatroidFamily(descriptor), tuple(labels))

    # helpers --------------------------------------------------------------

    @property
    def kind(self) -> str:
        return {
            Explicit: "explicit",
            PathFamily: "path",
            VertexCoverFamily: "vertex_cover",
            MatroidFamily: "matroid",
        }[type(self.family)]

    @property
    def graph(self) -> Graph | None:
        fam = self.family
        if isinstance(fam, (PathFamily, VertexCoverFamily)):
            return fam.graph
        if isinstance(fam, MatroidFamily) and isinstance(fam.descriptor, Graphic):
            return fam.descriptor.graph
        return None

    def names(self, agents) -> list[str]:
        return [self.labels[e] for e in sorted(agents)]

    def agent(self, label) -> int:
        if isinstance(label, int):
            return label
        return self.labels.index(label)


def _mask(agents) -> int:
    m = 0
    for e in agents:
        m |= 1 << e
    return m


def _unmask(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def lex_key(agents) -> tuple[int, ...]:
    return tuple(sorted(agents))


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------


def _simple_paths(fam: PathFamily, cap: int) -> list[frozenset]:
    g = fam.graph.to_networkx()
    if fam.s == fam.t:
        raise NoFeasibleSet("source and sink coincide")
    found = set()
    for path in nx.all_simple_edge_paths(g, fam.s, fam.t):
        found.add(frozenset(key for _, _, key in path))
        if len(found) > cap:
            raise CapExceeded(f"more than {cap} s-t paths")
    return list(found)


def _spanning_trees(graph: Graph, cap: int) -> list[frozenset]:
    rank = graph.num_vertices - nx.number_connected_components(
        nx.Graph([(u, v) for u, v in graph.edges] + [(v, v) for v in range(graph.num_vertices)])
    )
    out = []
    for combo in itertools.combinations(range(len(graph.edges)), rank):
        parent = list(range(graph.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i in combo:
            u, v = graph.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            out.append(frozenset(combo))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} spanning trees")
    return out


@lru_cache(maxsize=4096)
def _enumerate(system: SetSystem, minimal_only: bool, cap: int) -> tuple[frozenset, ...]:
    fam = system.family
    if isinstance(fam, Explicit):
        sets = list(fam.sets)
        if minimal_only:
            sets = [_unmask(m) for m in kernels.minimal_masks([_mask(s) for s in sets])]
    elif isinstance(fam, VertexCoverFamily):
        if system.n > 26:
            raise CapExceeded("vertex-cover enumeration is limited to 26 vertices")
        edge_masks = [(1 << u) | (1 << v) for u, v in fam.graph.edges]
        masks, exceeded = kernels.vertex_cover_masks(system.n, edge_masks, minimal_only, cap)
        if exceeded:
            raise CapExceeded(f"more than {cap} vertex covers")
        sets = [_unmask(m) for m in masks]
    elif isinstance(fam, PathFamily):
        sets = _simple_paths(fam, cap)
        if not minimal_only and sets:
            if system.n > 26:
                raise CapExceeded("superset enumeration is limited to 26 edges")
            path_masks = [_mask(p) for p in sets]
            sets = []
            for m in range(1 << system.n):
                if any(p & ~m == 0 for p in path_masks):
                    sets.append(_unmask(m))
                    if len(sets) > cap:
                        raise CapExceeded(f"more than {cap} feasible edge sets")
    else:
        d = fam.descriptor
        if isinstance(d, Uniform):
            if d.k > d.n or d.k < 0:
                raise NoFeasibleSet("uniform matroid with k > n")
            sets = [frozenset(c) for c in itertools.combinations(range(d.n), d.k)]
        elif isinstance(d, Graphic):
            sets = _spanning_trees(d.graph, cap)
        else:
            sets = list(dict.fromkeys(frozenset(b) for b in d.bases))
    if not sets:
        raise NoFeasibleSet("the family has no feasible set")
    if len(sets) > cap:
        raise CapExceeded(f"more than {cap} feasible sets")
    return tuple(sorted(sets, key=lex_key))


def enumerate_feasible(system: SetSystem, minimal_only: bool = False,
                       caps: Caps | None = None) -> tuple[frozenset, ...]:
    """Materialize the feasible family, sorted by sorted index sequence."""
    caps = caps or default_caps()
    return _enumerate(system, minimal_only, caps.enumeration)


def candidate_sets(system: SetSystem, caps: Caps | None = None) -> tuple[frozenset, ...]:
    """Sets that compete for the winning set: the listed sets for explicit and
    matroid families, the minimal feasible sets for graph-backed ones."""
    implicit = isinstance(system.family, (PathFamily, VertexCoverFamily))
    return enumerate_feasible(system, minimal_only=implicit, caps=caps)


def set_cost(costs: Sequence, agents) -> Fraction:
    return sum((costs[e] for e in agents), Fraction(0))


def cheapest_sets(system: SetSystem, costs: Sequence, caps: Caps | None = None) -> list[frozenset]:
    """Every cheapest candidate set, in lexicographic order."""
    sets = candidate_sets(system, caps)
    priced = [(set_cost(costs, s), s) for s in sets]
    best = min(p for p, _ in priced)
    return [s for p, s in priced if p == best]


def cheapest_feasible_set(system: SetSystem, costs: Sequence, caps: Caps | None = None) -> frozenset:
    """Cheapest feasible set; ties go to the lexicographically least sorted index sequence."""
    if len(costs) != system.n:
        raise ValueError(f"expected {system.n} costs, got {len(costs)}")
    best = None
    for s in candidate_sets(system, caps):
        key = (set_cost(costs, s), lex_key(s))
        if best is None or key < best[0]:
            best = (key, s)
    return best[1]


def is_monopoly_free(system: SetSystem, caps: Caps | None = None) -> bool:
    sets = enumerate_feasible(system, minimal_only=True, caps=caps)
    return all(any(e not in t for t in sets) for e in range(system.n))


def monopolists(system: SetSystem, caps: Caps | None = None) -> list[int]:
    sets = enumerate_feasible(system, minimal_only=True, caps=caps)
    return [e for e in range(system.n) if all(e in t for t in sets)]


def require_monopoly_free(system: SetSystem, caps: Caps | None = None) -> None:
    bad = monopolists(system, caps)
    if bad:
        raise MonopolyDetected(f"agents {system.names(bad)} appear in every feasible set")


# --------------------------------------------------------------------------
# Fairness constraints
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Type2Constraint:
    """``sum(b[e] for e in lhs) <= rhs``, induced by the feasible set ``origin``."""

    lhs: frozenset
    rhs: Fraction
    origin: frozenset

    def lhs_sum(self, bids: Mapping) -> Fraction:
        return sum((bids[e] for e in self.lhs), Fraction(0))

    def holds(self, bids: Mapping) -> bool:
        return self.lhs_sum(bids) <= self.rhs

    def tight(self, bids: Mapping) -> bool:
        return self.lhs_sum(bids) == self.rhs


def type2_constraints(system: SetSystem, costs: Sequence, S, prune: bool = True,
                      caps: Caps | None = None) -> tuple[Type2Constraint, ...]:
    """Constraints keeping ``S`` cheapest when its members' costs become bids.

    With ``prune`` (the default) vacuous constraints are dropped, equal
    left-hand sides keep the smallest right-hand side, and a constraint is
    dropped when another one has a superset left-hand side and no larger
    right-hand side. Without it, one constraint per feasible set ``T != S``.
    """
    S = frozenset(S)
    raw = []
    for T in candidate_sets(system, caps) if prune else enumerate_feasible(system, caps=caps):
        if T == S:
            continue
        raw.append(Type2Constraint(S - T, set_cost(costs, T - S), T))
    if not prune:
        return tuple(raw)

    by_lhs: dict[frozenset, Type2Constraint] = {}
    for c in raw:
        if not c.lhs:
            continue
        cur = by_lhs.get(c.lhs)
        if cur is None or c.rhs < cur.rhs:
            by_lhs[c.lhs] = c
    order = sorted(by_lhs.values(), key=lambda c: (c.rhs, -len(c.lhs), lex_key(c.lhs)))
    keep = kernels.dominance_keep([_mask(c.lhs) for c in order])
    kept = [c for c, k in zip(order, keep) if k]
    return tuple(sorted(kept, key=lambda c: (lex_key(c.lhs), c.rhs)))


@dataclass(frozen=True)
class WitnessVerdict:
    violated: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violated

    def __bool__(self):
        return self.ok


def verify_witness(system: SetSystem, costs: Sequence, S, bids: Mapping, mode: str = NTU,
                   prune: bool = True, check_tight: bool = True,
                   caps: Caps | None = None) -> WitnessVerdict:
    """Check a bid vector on ``S`` against the fairness conditions.

    Conditions: ``"1"`` (``b >= c``, NTU mode) or ``"1*"`` (``b >= 0``, TU mode),
    ``"2"`` (no feasible set becomes strictly cheaper than ``S``) and, when
    ``check_tight``, ``"3"`` (each winner lies in some tight constraint).
    Violations are reported as ``(condition, agent or feasible set)``.
    """
    S = frozenset(S)
    if set(bids) != set(S):
        raise ValueError("bids must be given for exactly the agents of S")
    if mode not in (TU, NTU):
        raise ValueError(f"unknown mode {mode!r}")
    if check_tight:
        require_monopoly_free(system, caps)
    violated = []
    for e in sorted(S):
        if mode == NTU and bids[e] < costs[e]:
            violated.append(("1", e))
        if mode == TU and bids[e] < 0:
            violated.append(("1*", e))
    constraints = type2_constraints(system, costs, S, prune=prune, caps=caps)
    for c in constraints:
        if not c.holds(bids):
            violated.append(("2", c.origin))
    if check_tight:
        tight_agents = set()
        for c in constraints:
            if c.tight(bids):
                tight_agents |= c.lhs
        for e in sorted(S - tight_agents):
            violated.append(("3", e))
    return WitnessVerdict(tuple(violated))


def separation_oracle(system: SetSystem, costs: Sequence, S, bids: Mapping,
                      caps: Caps | None = None) -> frozenset | None:
    """A feasible set violating condition (2) under ``bids``, or ``None``.

    Path systems use a shortest-path search with weights ``b_e`` on ``S`` and
    ``c_e`` elsewhere; other families scan the enumerated feasible sets.
    """
    S = frozenset(S)
    total = sum((bids[e] for e in S), Fraction(0))
    fam = system.family
    if isinstance(fam, PathFamily):
        path = _cheapest_path(fam, [bids[e] if e in S else costs[e] for e in range(system.n)])
        if path is None:
            raise NoFeasibleSet("source and sink are disconnected")
        weight, edges = path
        return edges if weight < total else None
    for T in candidate_sets(system, caps):
        if sum((bids[e] for e in S - T), Fraction(0)) > set_cost(costs, T - S):
            return T
    return None


def _cheapest_path(fam: PathFamily, weights) -> tuple[Fraction, frozenset] | None:
    g = fam.graph
    adj = [[] for _ in g.vertices]
    for i, (u, v) in enumerate(g.edges):
        adj[u].append((v, i))
        if not g.directed:
            adj[v].append((u, i))
    dist = {fam.s: Fraction(0)}
    via = {fam.s: None}
    heap = [(Fraction(0), fam.s)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == fam.t:
            break
        for v, i in adj[u]:
            nd = d + weights[i]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                via[v] = (u, i)
                heapq.heappush(heap, (nd, v))
    if fam.t not in done:
        return None
    edges = []
    node = fam.t
    while via[node] is not None:
        node, i = via[node]
        edges.append(i)
    return dist[fam.t], frozenset(edges)


# --------------------------------------------------------------------------
# Instance files
# --------------------------------------------------------------------------


def _reject_float(text):
    raise ValueError(f"floating-point literal {text} is not allowed; use \"p/q\"")


def _graph_from_json(doc) -> Graph:
    try:
        return Graph.build(doc["vertices"], doc["edges"], bool(doc.get("directed", False)))
    except (KeyError, ValueError, TypeError) as exc:
        raise InstanceFormatError(f"bad graph payload: {exc}") from exc


def load_instance(text: str) -> tuple[SetSystem, tuple[Fraction, ...], dict]:
    """Parse a JSON instance document into ``(system, costs, document)``."""
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(exc.msg, exc.lineno, exc.colno) from exc
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object", 1, 1)
    kind = doc.get("kind")
    try:
        costs = as_costs(doc["costs"])
    except KeyError:
        raise InstanceFormatError("missing field 'costs'") from None
    except ValueError as exc:
        raise InstanceFormatError(f"bad costs: {exc}") from exc
    labels = tuple(str(x) for x in doc.get("agents", ()))
    try:
        if kind == "explicit":
            index = {lab: i for i, lab in enumerate(labels)}
            sets = []
            for s in doc["feasible_sets"]:
                sets.append(frozenset(index[x] if isinstance(x, str) else int(x) for x in s))
            system = SetSystem.explicit(len(costs), sets, labels)
        elif kind == "path":
            g = _graph_from_json(doc["graph"])
            system = SetSystem.paths(g, doc["graph"]["s"], doc["graph"]["t"])
            if labels:
                system = SetSystem(system.n, system.family, labels)
        elif kind == "vertex_cover":
            system = SetSystem.vertex_cover(_graph_from_json(doc["graph"]))
        elif kind == "matroid":
            m = doc["matroid"]
            if m["type"] == "uniform":
                desc = Uniform(int(m["n"]), int(m["k"]))
            elif m["type"] == "graphic":
                desc = Graphic(_graph_from_json(m["graph"]))
            elif m["type"] == "bases":
                desc = ExplicitBases(tuple(frozenset(int(x) for x in b) for b in m["bases"]))
            else:
                raise InstanceFormatError(f"unknown matroid type {m['type']!r}")
            system = SetSystem.matroid(desc, labels)
        else:
            raise InstanceFormatError(f"unknown kind {kind!r}")
    except KeyError as exc:
        raise InstanceFormatError(f"missing field {exc}") from None
    except (ValueError, TypeError) as exc:
        raise InstanceFormatError(str(exc)) from exc
    if system.n != len(costs):
        raise InstanceFormatError(f"{len(costs)} costs given for {system.n} agents")
    return system, costs, doc


def _graph_to_json(g: Graph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [[g.vertices[u], g.vertices[v]] for u, v in g.edges],
        "directed": g.directed,
    }


def dump_instance(system: SetSystem, costs: Sequence) -> dict:
    doc = {"kind": system.kind, "agents": list(system.labels), "costs": [fmt(c) for c in costs]}
    fam = system.family
    if isinstance(fam, Explicit):
        doc["feasible_sets"] = [[system.labels[e] for e in sorted(s)] for s in fam.sets]
    elif isinstance(fam, PathFamily):
        doc["graph"] = _graph_to_json(fam.graph)
        doc["graph"]["s"] = fam.graph.vertices[fam.s]
        doc["graph"]["t"] = fam.graph.vertices[fam.t]
    elif isinstance(fam, VertexCoverFamily):
        doc["graph"] = _graph_to_json(fam.graph)
    else:
        d = fam.descriptor
        if isinstance(d, Uniform):
            doc["matroid"] = {"type": "uniform", "n": d.n, "k": d.k}
        elif isinstance(d, Graphic):
            doc["matroid"] = {"type": "graphic", "graph": _graph_to_json(d.graph)}
        else:
            doc["matroid"] = {"type": "bases", "bases": [sorted(b) for b in d.bases]}
    return doc
