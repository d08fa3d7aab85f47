"""Instance factories: named example instances, random families, matroid
validation and the exact-cover reduction to the minimum-bid program."""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import networkx as nx

from .core import (
    Graph,
    Graphic,
    SetSystem,
    Uniform,
    as_costs,
    enumerate_feasible,
    is_monopoly_free,
)
from .errors import EmptyFamily, NoFeasibleSet, UnknownInstance, UnsatisfiableParams

# --------------------------------------------------------------------------
# Named instances
# --------------------------------------------------------------------------

DIAMOND_EDGES = (("A", "B"), ("B", "C"), ("C", "D"), ("A", "C"), ("B", "D"))


def diamond(extra_edges=()) -> SetSystem:
    """A-D paths in the diamond; edges AB, BC, CD, AC, BD are agents 0..4.

    Edges are directed away from A so that the three routes ABCD, ABD, ACD
    are the only paths; the undirected route ACBD would only add a
    constraint implied by the others.
    """
    g = Graph.build("ABCD", DIAMOND_EDGES + tuple(extra_edges), directed=True)
    return SetSystem.paths(g, "A", "D")


def clique_tail_graph(n: int) -> Graph:
    """Clique on X1..X(n-1) plus the pendant edge X0-X(n-1)."""
    if n < 3:
        raise UnsatisfiableParams("clique-tail needs n >= 3")
    names = [f"X{i}" for i in range(n)]
    edges = [(i, j) for i in range(1, n) for j in range(i + 1, n)]
    edges.append((0, n - 1))
    return Graph.build(names, edges)


def nonmon_family(n: int, extended: bool = False) -> SetSystem:
    """Agents x, x', y1..yn, z1..zn with sets S = Y+x and T_i = Y-y_i+z_i;
    ``extended`` adds S' = Y+x'."""
    if n < 1:
        raise UnsatisfiableParams("nonmon-family needs n >= 1")
    Y = set(range(2, n + 2))
    sets = [Y | {0}] + [(Y - {1 + i}) | {n + 1 + i} for i in range(1, n + 1)]
    if extended:
        sets.append(Y | {1})
    labels = ["x", "x'"] + [f"y{i}" for i in range(1, n + 1)] + [f"z{i}" for i in range(1, n + 1)]
    return SetSystem.explicit(2 * n + 2, sets, labels)


def bipartite_graph(delta: int) -> Graph:
    """K_{delta,delta} with left part L0.. and right part R0.."""
    if delta < 1:
        raise UnsatisfiableParams("bipartite-lb needs delta >= 1")
    names = [f"L{i}" for i in range(delta)] + [f"R{i}" for i in range(delta)]
    edges = [(i, delta + j) for i in range(delta) for j in range(delta)]
    return Graph.build(names, edges)


def _clique_tail(n, tail_free=False):
    g = clique_tail_graph(n)
    if tail_free:
        costs = [0] + [1] * (n - 1)
    else:
        costs = [1] + [0] * (n - 2) + [1]
    return SetSystem.vertex_cover(g), as_costs(costs)


def _fixed():
    return {
        "diamond-example3": lambda: (diamond(), as_costs([2, 1, 2, 5, 5])),
        "diamond-prop3i": lambda: (diamond(), as_costs([0, 0, 0, 1, 1])),
        "diamond-prop3ii": lambda: (diamond(), as_costs([0, 1, 0, 1, 1])),
        "diamond-prop3iii": lambda: (diamond(), as_costs([1, 0, 1, 1, 1])),
        "double-diamond": lambda: (diamond([("B", "C")]), as_costs([0, 0, 0, 1, 1, 0])),
        "choice-of-s": lambda: (
            SetSystem.explicit(5, [{0, 1}, {1, 2, 3}, {3, 4}], [f"e{i}" for i in range(1, 6)]),
            as_costs([2, 1, 1, 1, 3]),
        ),
        "matroid:u32": lambda: (SetSystem.matroid(Uniform(3, 2)), as_costs([1, 2, 3])),
        "matroid:triangle": lambda: (
            SetSystem.matroid(Graphic(Graph.build("ABC", [("A", "B"), ("B", "C"), ("A", "C")]))),
            as_costs([1, 1, 5]),
        ),
    }


_PARAMETRIC = {
    "clique-tail": lambda n: _clique_tail(n),
    "clique-tail-free": lambda n: _clique_tail(n, tail_free=True),
    "nonmon-family": lambda n: (nonmon_family(n), as_costs([0, 0] + [0] * n + [1] * n)),
    "nonmon-family-plus": lambda n: (nonmon_family(n, True), as_costs([0, 0] + [0] * n + [1] * n)),
    "bipartite-lb": lambda d: (SetSystem.vertex_cover(bipartite_graph(d)), as_costs([1] * (2 * d))),
}

_NAME = re.compile(r"^([a-z0-9-]+)(?::(\d+)|\((\d+)\))$")


def instance_names() -> list[str]:
    return sorted(_fixed()) + [f"{k}:<n>" for k in sorted(_PARAMETRIC)]


def named_instance(name: str):
    """Named instance as ``(system, costs)``.

    Fixed names: the diamond cost vectors, ``double-diamond``, ``choice-of-s``,
    ``matroid:u32`` and ``matroid:triangle``. Parametric names take ``:n`` or
    ``(n)``: ``clique-tail`` (tail endpoints cost 1, clique 0),
    ``clique-tail-free`` (X0 free, the rest cost 1), ``nonmon-family``,
    ``nonmon-family-plus`` (with the extra set) and ``bipartite-lb``.
    """
    fixed = _fixed()
    if name in fixed:
        return fixed[name]()
    m = _NAME.match(name.strip())
    if m and m.group(1) in _PARAMETRIC:
        return _PARAMETRIC[m.group(1)](int(m.group(2) or m.group(3)))
    raise UnknownInstance(f"unknown instance {name!r}; known: {', '.join(instance_names())}")


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------


def _random_costs(rng: random.Random, n: int, cost_range) -> tuple[Fraction, ...]:
    lo, hi = cost_range
    out = []
    for _ in range(n):
        q = rng.choice((1, 1, 2, 3, 4))
        out.append(Fraction(rng.randint(int(lo * q), int(hi * q)), q))
    return tuple(out)


def _random_explicit(rng, n, num_sets):
    lo, hi = num_sets
    sets = []
    for _ in range(rng.randint(lo, hi)):
        size = rng.randint(1, n)
        sets.append(frozenset(rng.sample(range(n), size)))
    return SetSystem.explicit(n, sets)


def _random_path(rng, n):
    # n edges on roughly n/2 + 1 vertices, s = 0, t = last
    k = rng.randint(3, max(3, n // 2 + 1))
    names = [chr(ord("A") + i) for i in range(k)]
    edges = []
    for _ in range(n):
        u, v = rng.sample(range(k), 2)
        edges.append((u, v))
    return SetSystem.paths(Graph.build(names, edges), 0, k - 1)


def _random_graph(rng, n, p, max_degree):
    edges = []
    deg = [0] * n
    pairs = list(itertools.combinations(range(n), 2))
    rng.shuffle(pairs)
    for u, v in pairs:
        if rng.random() < p and (max_degree is None or (deg[u] < max_degree and deg[v] < max_degree)):
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    edges.sort()
    return Graph.build([f"v{i}" for i in range(n)], edges)


def _random_matroid(rng, n):
    if rng.random() < 0.5:
        return SetSystem.matroid(Uniform(n, rng.randint(1, n - 1)))
    # a bridgeless multigraph with n edges keeps every edge out of some tree
    k = rng.randint(2, max(2, n // 2 + 1))
    edges = [(i, (i + 1) % k) for i in range(k)] if k > 2 else [(0, 1), (0, 1)]
    while len(edges) < n:
        edges.append(tuple(rng.sample(range(k), 2)))
    edges = edges[:n]
    return SetSystem.matroid(Graphic(Graph.build([f"v{i}" for i in range(k)], edges)))


def random_instance(kind: str, n: int, seed: int, cost_range=(0, 10), *, num_sets=(2, 8),
                    edge_prob=Fraction(1, 2), max_degree=None, attempts: int = 1000):
    """Reproducible random monopoly-free instance ``(system, costs)``.

    ``kind`` is ``explicit`` (n agents), ``path`` (n edges), ``vertex_cover``
    (n vertices without isolated ones, optional ``max_degree``) or ``matroid`` (n elements; uniform
    or graphic). Draws are repeated until the system is monopoly-free.
    """
    if kind not in ("explicit", "path", "vertex_cover", "matroid"):
        raise UnsatisfiableParams(f"unknown random kind {kind!r}")
    if n < 2 or cost_range[0] < 0 or cost_range[0] > cost_range[1]:
        raise UnsatisfiableParams("need n >= 2 and 0 <= low <= high")
    if kind == "explicit" and num_sets[1] < 2:
        raise UnsatisfiableParams("a monopoly-free explicit family needs at least two sets")
    if kind == "matroid" and n < 2:
        raise UnsatisfiableParams("a monopoly-free matroid needs two elements")
    rng = random.Random(f"{kind}:{n}:{seed}")
    for _ in range(attempts):
        if kind == "explicit":
            system = _random_explicit(rng, n, num_sets)
        elif kind == "path":
            system = _random_path(rng, n)
        elif kind == "vertex_cover":
            g = _random_graph(rng, n, edge_prob, max_degree)
            if not g.edges or not all(g.neighbours()):
                continue
            system = SetSystem.vertex_cover(g)
        else:
            system = _random_matroid(rng, n)
        try:
            if not is_monopoly_free(system):
                continue
        except NoFeasibleSet:
            continue
        return system, _random_costs(rng, n, cost_range)
    raise UnsatisfiableParams(f"no monopoly-free {kind} instance after {attempts} draws")


# --------------------------------------------------------------------------
# Matroids
# --------------------------------------------------------------------------


def validate_matroid(bases: Sequence) -> bool:
    """True iff every ordered pair of bases admits an exchange bijection.

    For bases ``S, T`` there must be a bijection ``f: S-T -> T-S`` with
    ``S - e + f(e)`` a base for every ``e``; this is a perfect matching in the
    bipartite graph of permitted single swaps.
    """
    family = {frozenset(b) for b in bases}
    if not family:
        raise EmptyFamily("no bases given")
    if len({len(b) for b in family}) != 1:
        return False
    for S, T in itertools.permutations(family, 2):
        left, right = sorted(S - T), sorted(T - S)
        g = nx.Graph()
        g.add_nodes_from(("l", e) for e in left)
        g.add_nodes_from(("r", f) for f in right)
        for e in left:
            for f in right:
                if (S - {e}) | {f} in family:
                    g.add_edge(("l", e), ("r", f))
        matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=[("l", e) for e in left])
        if len(matching) // 2 != len(left):
            return False
    return True


# --------------------------------------------------------------------------
# Exact cover by 3-sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class X3CInstance:
    n: int
    triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n % 3:
            raise UnsatisfiableParams("universe size must be a multiple of 3")
        norm = []
        for t in self.triples:
            t = tuple(sorted(t))
            if len(set(t)) != 3 or not all(0 <= g < self.n for g in t):
                raise UnsatisfiableParams(f"{t} is not a 3-subset of the universe")
            norm.append(t)
        object.__setattr__(self, "triples", tuple(norm))

    @classmethod
    def from_json(cls, doc) -> "X3CInstance":
        return cls(int(doc["n"]), tuple(tuple(int(g) for g in t) for t in doc["triples"]))


def x3c_brute(inst: X3CInstance) -> bool:
    """Exhaustive search for n/3 pairwise disjoint triples covering the universe."""
    if len(inst.triples) > 20:
        raise UnsatisfiableParams("exhaustive search is limited to 20 triples")
    by_element = [[t for t in inst.triples if g in t] for g in range(inst.n)]

    def search(covered):
        free = next((g for g in range(inst.n) if g not in covered), None)
        if free is None:
            return True
        for t in by_element[free]:
            if not covered.intersection(t) and search(covered | set(t)):
                return True
        return False

    return search(frozenset())


def min_program_system(num_vars: int, constraints, labels=()):
    """Set system whose minimum-bid program is ``min sum b`` over ``b >= 0``,
    ``sum_{i in L_j} b_i <= a_j`` with some tight constraint for every variable.

    Each variable is a free agent; each constraint ``j`` adds an agent of cost
    ``a_j`` and the feasible sets are all variables, or all variables with
    those of ``L_j`` swapped for constraint agent ``j``.
    """
    base = frozenset(range(num_vars))
    sets = [base]
    for j, (lhs, _) in enumerate(constraints):
        sets.append((base - set(lhs)) | {num_vars + j})
    costs = [0] * num_vars + [rhs for _, rhs in constraints]
    labels = list(labels) or [f"v{i}" for i in range(num_vars)]
    labels += [f"k{j}" for j in range(len(constraints))]
    return SetSystem.explicit(num_vars + len(constraints), sets, labels), as_costs(costs)


def x3c_program(inst: X3CInstance):
    """Variables and constraints of the gadget; returns ``(labels, constraints)``."""
    m = len(inst.triples)
    labels = []
    for i in range(m):
        labels += [f"x{i}", f"xb{i}", f"a{i}", f"b{i}"]
    labels += [f"d{j}" for j in range(inst.n)]
    x, xb, a, b = (lambda i: 4 * i), (lambda i: 4 * i + 1), (lambda i: 4 * i + 2), (lambda i: 4 * i + 3)
    cons = []
    for i in range(m):
        cons += [
            ({x(i), xb(i)}, 1),
            ({x(i), a(i)}, 1),
            ({xb(i), a(i)}, 1),
            ({x(i), b(i)}, 1),
            ({xb(i), b(i)}, 1),
        ]
    for j in range(inst.n):
        cons.append(({4 * m + j} | {x(i) for i, t in enumerate(inst.triples) if j in t}, 1))
    return labels, cons


def x3c_reduce(inst: X3CInstance):
    """``(system, costs, m)``: the minimum bid total equals ``m`` iff an exact cover exists."""
    labels, cons = x3c_program(inst)
    system, costs = min_program_system(len(labels), cons, labels)
    return system, costs, len(inst.triples)


def x3c_instances_up_to_isomorphism(universes=(3, 6, 9), max_triples: int = 4):
    """One representative per isomorphism class of instances (triples may repeat).

    Two instances are isomorphic when a relabelling of elements and triples
    maps one onto the other. Classes with ``m`` triples are grown from the
    classes with ``m - 1`` by adding one triple, then deduplicated by hashing
    the element/triple incidence graph and confirming with an exact test.
    """
    out = []
    for n in universes:
        all_triples = list(itertools.combinations(range(n), 3))
        layer = [()]
        for _ in range(max_triples):
            buckets: dict = {}
            nxt = []
            for base in layer:
                for t in all_triples:
                    combo = tuple(sorted(base + (t,)))
                    g = _incidence(n, combo)
                    h = nx.weisfeiler_lehman_graph_hash(g, node_attr="side")
                    reps = buckets.setdefault(h, [])
                    if any(nx.is_isomorphic(g, r, node_match=_same_side) for r in reps):
                        continue
                    reps.append(g)
                    nxt.append(combo)
            layer = nxt
            out.extend(X3CInstance(n, combo) for combo in layer)
    return out


def _same_side(a, b):
    return a["side"] == b["side"]


def _incidence(n, triples):
    g = nx.Graph()
    g.add_nodes_from((("g", j) for j in range(n)), side="g")
    g.add_nodes_from((("t", i) for i in range(len(triples))), side="t")
    for i, t in enumerate(triples):
        for j in t:
            g.add_edge(("t", i), ("g", j))
    return g
