"""The four payment bounds, cost-vector transforms and vertex-cover witnesses.

``ntumax``/``tumax`` are linear programs over the pruned type-(2) constraints.
``ntumin``/``tumin`` add the disjunctive tightness condition and are solved by
branch and bound over sets of constraints forced to equality: every feasible
bid vector makes, for each winner, some constraint containing it tight, so
branching on "which constraint is tight for the first uncovered winner" is
exhaustive, and the LP with the current equalities is a valid lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .config import Caps, default_caps
from .core import (
    NTU,
    TU,
    Graph,
    SetSystem,
    Type2Constraint,
    cheapest_feasible_set,
    fmt,
    require_monopoly_free,
    set_cost,
    type2_constraints,
    verify_witness,
)
from .errors import (
    BoundChainViolated,
    CapExceeded,
    FrugalityError,
    NotAVertexCover,
    TransferCheckFailed,
)
from .ratlp import INF, FlowNetwork, LinearProgram, WarmLP, augment_from, max_flow, solve_lp


class BoundKind(str, Enum):
    TUMIN = "TUmin"
    NTUMIN = "NTUmin"
    NTUMAX = "NTUmax"
    TUMAX = "TUmax"

    @property
    def mode(self) -> str:
        return TU if self in (BoundKind.TUMIN, BoundKind.TUMAX) else NTU

    @property
    def maximize(self) -> bool:
        return self in (BoundKind.NTUMAX, BoundKind.TUMAX)


CHAIN = (BoundKind.TUMIN, BoundKind.NTUMIN, BoundKind.NTUMAX, BoundKind.TUMAX)


@dataclass(frozen=True)
class PaymentBoundResult:
    kind: BoundKind
    value: Fraction
    witness: Mapping[int, Fraction]
    chosen_set: frozenset
    tight_for: Mapping[int, Type2Constraint] = field(default_factory=dict)

    def to_json(self, system: SetSystem | None = None) -> dict:
        name = (lambda e: system.labels[e]) if system else str
        return {
            "kind": self.kind.value,
            "value": fmt(self.value),
            "chosen_set": [name(e) for e in sorted(self.chosen_set)],
            "witness": {name(e): fmt(b) for e, b in sorted(self.witness.items())},
            "tight_for": {
                name(e): {"lhs": [name(x) for x in sorted(c.lhs)], "rhs": fmt(c.rhs),
                          "origin": [name(x) for x in sorted(c.origin)]}
                for e, c in sorted(self.tight_for.items())
            },
        }


def _lower_bounds(costs, agents, mode):
    return [costs[e] if mode == NTU else Fraction(0) for e in agents]


def _tight_map(constraints, bids) -> dict:
    out = {}
    for c in constraints:
        if c.tight(bids):
            for e in sorted(c.lhs):
                out.setdefault(e, c)
    return out


def _bound_lp(agents, constraints, lower, sense, equal=(), warm=False):
    pos = {e: i for i, e in enumerate(agents)}
    rows = []
    for j, c in enumerate(constraints):
        coeffs = [0] * len(agents)
        for e in c.lhs:
            coeffs[pos[e]] = 1
        rows.append((coeffs, "=" if j in equal else "<=", c.rhs))
    lp = LinearProgram(len(agents), [1] * len(agents), rows, sense=sense, lower_bounds=lower)
    return WarmLP.solve(lp) if warm else solve_lp(lp)


def _prepare(system, costs, S, caps):
    caps = caps or default_caps()
    require_monopoly_free(system, caps)
    S = frozenset(S) if S is not None else cheapest_feasible_set(system, costs, caps)
    return caps, S, sorted(S), type2_constraints(system, costs, S, caps=caps)


def _max_bound(kind, system, costs, S, caps) -> PaymentBoundResult:
    caps, S, agents, cons = _prepare(system, costs, S, caps)
    res = _bound_lp(agents, cons, _lower_bounds(costs, agents, kind.mode), "max")
    if not res.optimal:
        raise FrugalityError(f"{kind.value} program is {res.status.lower()}")
    bids = dict(zip(agents, res.point))
    # every winner sits in some binding constraint at a maximum of sum(b)
    tight = _tight_map(cons, bids)
    if set(tight) != S:
        raise FrugalityError(f"{kind.value} optimum leaves winners without a tight constraint")
    return PaymentBoundResult(kind, res.value, bids, S, tight)


def _components(agents, cons):
    """Split agents and constraints into groups that share no constraint."""
    parent = {e: e for e in agents}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in cons:
        first, *rest = sorted(c.lhs)
        for e in rest:
            parent[find(e)] = find(first)
    groups: dict = {}
    for e in agents:
        groups.setdefault(find(e), ([], []))[0].append(e)
    for c in cons:
        groups[find(min(c.lhs))][1].append(c)
    return [groups[k] for k in sorted(groups)]


class _Budget:
    def __init__(self, kind, cap):
        self.kind, self.cap, self.used = kind, cap, 0

    def spend(self):
        self.used += 1
        if self.used > self.cap:
            raise CapExceeded(f"{self.kind.value} search exceeded {self.cap} subproblems")


def _min_component(agents, cons, lower, budget):
    """Branch and bound for one component; returns ``(value, bids, tight)`` or None.

    A node fixes a set of constraints to equality and rules out others as
    certificates. Branching on an uncovered agent ``e`` with options
    ``j1..jk`` makes child ``i`` fix ``ji`` and rule out ``j1..j(i-1)``, so
    every certified bid vector lies in exactly one subtree. Child programs
    are warm-started from the parent's optimal basis.
    """
    containing = {e: [j for j, c in enumerate(cons) if e in c.lhs] for e in agents}
    budget.spend()
    root = _bound_lp(agents, cons, lower, "min", warm=True)
    if not isinstance(root, WarmLP):
        return None
    # an agent in a single constraint pins that constraint outright
    for js in containing.values():
        if len(js) == 1 and root is not None:
            root = root.tighten(js[0])
    if root is None:
        return None
    best = None
    seen = set()
    stack = [(frozenset(root.fixed), frozenset(), root, None)]
    while stack:
        equal, banned, state, j = stack.pop()
        if (equal, banned) in seen:
            continue
        seen.add((equal, banned))
        covered = set().union(*(cons[i].lhs for i in equal)) if equal else set()
        options = {e: [i for i in containing[e] if i not in banned]
                   for e in agents if e not in covered}
        if any(not js for js in options.values()):
            continue
        if j is not None:
            budget.spend()
            state = state.tighten(j)
            if state is None:
                continue
        value = state.result.value
        if best is not None and value >= best[0]:
            continue
        bids = dict(zip(agents, state.result.point))
        tight = _tight_map(cons, bids)
        if len(tight) == len(agents):
            best = (value, bids, tight)
            continue
        e = min(options, key=lambda x: (len(options[x]), x))
        # constraints already tight keep the optimum unchanged, so they go first
        order = sorted(options[e], key=lambda i: (not cons[i].tight(bids), i))
        for k in reversed(range(len(order))):
            stack.append((equal | {order[k]}, banned | frozenset(order[:k]), state, order[k]))
    return best


def _min_bound(kind, system, costs, S, caps) -> PaymentBoundResult:
    caps, S, agents, cons = _prepare(system, costs, S, caps)
    lower = dict(zip(agents, _lower_bounds(costs, agents, kind.mode)))
    budget = _Budget(kind, caps.covers)
    total, bids, tight = Fraction(0), {}, {}
    for part, part_cons in _components(agents, cons):
        found = _min_component(part, part_cons, [lower[e] for e in part], budget)
        if found is None:
            raise FrugalityError(f"{kind.value} program is infeasible")
        total += found[0]
        bids.update(found[1])
        tight.update(found[2])
    return PaymentBoundResult(kind, total, dict(sorted(bids.items())), S, dict(sorted(tight.items())))


def ntumax(system: SetSystem, costs: Sequence, S=None, caps: Caps | None = None) -> PaymentBoundResult:
    """Largest total bid on ``S`` with ``b >= c`` keeping ``S`` cheapest."""
    return _max_bound(BoundKind.NTUMAX, system, costs, S, caps)


def tumax(system: SetSystem, costs: Sequence, S=None, caps: Caps | None = None) -> PaymentBoundResult:
    return _max_bound(BoundKind.TUMAX, system, costs, S, caps)


def ntumin(system: SetSystem, costs: Sequence, S=None, caps: Caps | None = None) -> PaymentBoundResult:
    """Smallest total bid on ``S`` with ``b >= c``, ``S`` cheapest, and every
    winner pinned by a tight constraint."""
    return _min_bound(BoundKind.NTUMIN, system, costs, S, caps)


def tumin(system: SetSystem, costs: Sequence, S=None, caps: Caps | None = None) -> PaymentBoundResult:
    return _min_bound(BoundKind.TUMIN, system, costs, S, caps)


_SOLVERS = {
    BoundKind.TUMIN: tumin,
    BoundKind.NTUMIN: ntumin,
    BoundKind.NTUMAX: ntumax,
    BoundKind.TUMAX: tumax,
}


def bound(kind: BoundKind, system, costs, S=None, caps=None) -> PaymentBoundResult:
    return _SOLVERS[BoundKind(kind)](system, costs, S, caps)


@dataclass(frozen=True)
class AllBounds:
    chosen_set: frozenset
    results: Mapping[BoundKind, PaymentBoundResult]

    def __getitem__(self, kind) -> PaymentBoundResult:
        return self.results[BoundKind(kind)]

    def values(self) -> tuple[Fraction, ...]:
        return tuple(self.results[k].value for k in CHAIN)

    def to_json(self, system=None) -> dict:
        return {k.value: self.results[k].to_json(system) for k in CHAIN}


def _check_chain(values):
    if not all(a <= b for a, b in zip(values, values[1:])):
        raise BoundChainViolated(f"bound chain violated: {[fmt(v) for v in values]}")


def all_bounds(system: SetSystem, costs: Sequence, S=None, caps: Caps | None = None) -> AllBounds:
    """All four bounds for one chosen set; checks TUmin <= NTUmin <= NTUmax <= TUmax."""
    caps = caps or default_caps()
    require_monopoly_free(system, caps)
    S = frozenset(S) if S is not None else cheapest_feasible_set(system, costs, caps)
    results = {k: _SOLVERS[k](system, costs, S, caps) for k in CHAIN}
    out = AllBounds(S, results)
    _check_chain(out.values())
    return out


def ratio(num: Fraction, den: Fraction) -> Fraction | None:
    """``num / den``, or ``None`` when the denominator is zero."""
    return None if den == 0 else Fraction(num) / den


# --------------------------------------------------------------------------
# Ratio-transfer transforms
# --------------------------------------------------------------------------

_TRANSFER = {
    # which: (witness bound, keep min with cost?, source ratio, target ratio)
    "L1": (BoundKind.TUMAX, True, (BoundKind.TUMAX, BoundKind.NTUMAX), (BoundKind.NTUMAX, BoundKind.NTUMIN)),
    "L2": (BoundKind.NTUMIN, False, (BoundKind.NTUMAX, BoundKind.NTUMIN), (BoundKind.TUMAX, BoundKind.NTUMAX)),
    "L3": (BoundKind.NTUMAX, False, (BoundKind.NTUMAX, BoundKind.NTUMIN), (BoundKind.NTUMIN, BoundKind.TUMIN)),
    "L4": (BoundKind.TUMIN, True, (BoundKind.NTUMIN, BoundKind.TUMIN), (BoundKind.NTUMAX, BoundKind.NTUMIN)),
}


def ratio_shift(system: SetSystem, costs: Sequence, S=None, which: str = "L1", check: bool = True,
                caps: Caps | None = None) -> tuple[Fraction, ...]:
    """Move costs of ``S`` onto a witness bid vector, transferring a bound ratio.

    ``L1``: ``min(c, TUmax witness)`` carries TUmax/NTUmax onto NTUmax/NTUmin.
    ``L2``: the NTUmin witness carries NTUmax/NTUmin onto TUmax/NTUmax.
    ``L3``: the NTUmax witness carries NTUmax/NTUmin onto NTUmin/TUmin.
    ``L4``: ``min(c, TUmin witness)`` carries NTUmin/TUmin onto NTUmax/NTUmin.
    Costs outside ``S`` are unchanged. With ``check`` the target ratio on the
    new costs is recomputed and must be at least the source ratio.
    """
    if which not in _TRANSFER:
        raise ValueError(f"unknown transform {which!r}")
    caps = caps or default_caps()
    S = frozenset(S) if S is not None else cheapest_feasible_set(system, costs, caps)
    wkind, clip, (sn, sd), (tn, td) = _TRANSFER[which]
    witness = bound(wkind, system, costs, S, caps).witness
    new = list(costs)
    for e in S:
        new[e] = min(costs[e], witness[e]) if clip else witness[e]
    new = tuple(new)
    if check:
        if set_cost(new, S) > min(set_cost(new, T) for T in _competitors(system, caps)):
            raise TransferCheckFailed(f"{which}: S is no longer cheapest")
        a = bound(sn, system, costs, S, caps).value
        b = bound(sd, system, costs, S, caps).value
        x = bound(tn, system, new, S, caps).value
        y = bound(td, system, new, S, caps).value
        if not ratio_at_least(x, y, a, b):
            raise TransferCheckFailed(
                f"{which}: {tn.value}/{td.value} = {fmt(x)}/{fmt(y)} < {sn.value}/{sd.value} = {fmt(a)}/{fmt(b)}"
            )
    return new


def _competitors(system, caps):
    from .core import candidate_sets

    return candidate_sets(system, caps)


def ratio_at_least(num1, den1, num2, den2) -> bool:
    """Compare nonnegative ratios exactly, reading x/0 as +inf (x > 0) and 0/0 as 1."""

    def norm(n, d):
        if d == 0:
            return (1, 0) if n > 0 else (1, 1)
        return (n, d)

    n1, d1 = norm(num1, den1)
    n2, d2 = norm(num2, den2)
    if d1 == 0:
        return True
    if d2 == 0:
        return False
    return n1 * d2 >= n2 * d1


# --------------------------------------------------------------------------
# Vertex-cover witnesses
# --------------------------------------------------------------------------


def _require_cover(graph: Graph, S):
    for u, v in graph.edges:
        if u not in S and v not in S:
            raise NotAVertexCover(f"edge {graph.vertices[u]}-{graph.vertices[v]} is uncovered")


def vc_tumax_witness(graph: Graph, costs: Sequence, S) -> dict[int, Fraction]:
    """Spread each outside vertex's cost evenly over its neighbours in ``S``.

    The bids sum to ``c(V \\ S)`` and keep ``S`` cheapest, so they certify
    ``TUmax(c, S) >= c(V \\ S)`` for a minimum-cost cover ``S``.
    """
    S = frozenset(S)
    _require_cover(graph, S)
    nbrs = graph.neighbours()
    bids = {v: Fraction(0) for v in S}
    for w in range(graph.num_vertices):
        if w in S:
            continue
        inside = [v for v in nbrs[w] if v in S]
        for v in inside:
            bids[v] += Fraction(costs[w]) / len(inside)
    return bids


def vc_ntumax_witness(graph: Graph, costs: Sequence, S) -> dict[int, Fraction]:
    """Bids with ``b >= c`` keeping ``S`` cheapest and summing to at least ``c(V \\ S)``.

    Built from a minimum cut of the network source -> S -> V\\S -> sink with
    vertex costs on the outer arcs: winners on the source side bid their cost,
    the others bid the flow they carry once the sink side is re-saturated.
    """
    S = frozenset(S)
    _require_cover(graph, S)
    V = range(graph.num_vertices)
    outside = [w for w in V if w not in S]
    if set_cost(costs, S) >= set_cost(costs, outside):
        return {v: Fraction(costs[v]) for v in S}

    src, sink = graph.num_vertices, graph.num_vertices + 1
    nbrs = graph.neighbours()
    arcs = [(src, v, Fraction(costs[v])) for v in sorted(S)]
    arcs += [(v, w, INF) for v in sorted(S) for w in sorted(nbrs[v]) if w not in S]
    arcs += [(w, sink, Fraction(costs[w])) for w in outside]
    net = FlowNetwork(graph.num_vertices + 2, tuple(arcs), src, sink)
    flow = max_flow(net)
    near = flow.source_side  # contains src, S', W'

    far = {x for x in V if x not in near} | {src, sink}
    keep = [i for i, (u, v, _) in enumerate(arcs) if u in far and v in far]
    sub_arcs = []
    for i in keep:
        u, v, cap = arcs[i]
        sub_arcs.append((u, v, INF if u == src else cap))
    sub = FlowNetwork(graph.num_vertices + 2, tuple(sub_arcs), src, sink)
    raised = augment_from(sub, [flow.arc_flows[i] for i in keep])

    bids = {v: Fraction(costs[v]) for v in S if v in near}
    for (u, v, _), f in zip(sub_arcs, raised.arc_flows):
        if u == src:
            bids[v] = f
    for v in S:
        bids.setdefault(v, Fraction(costs[v]))
    return bids


# --------------------------------------------------------------------------
# Matroids
# --------------------------------------------------------------------------


def matroid_bounds(system: SetSystem, costs: Sequence, caps: Caps | None = None) -> AllBounds:
    """All four bounds of a matroid system, which coincide; one LP suffices."""
    from .core import enumerate_feasible
    from .errors import NotAMatroid
    from .generators import validate_matroid

    caps = caps or default_caps()
    if not validate_matroid(enumerate_feasible(system, caps=caps)):
        raise NotAMatroid("the feasible sets are not the bases of a matroid")
    top = ntumax(system, costs, caps=caps)
    results = {
        k: PaymentBoundResult(k, top.value, top.witness, top.chosen_set, top.tight_for) for k in CHAIN
    }
    for k in CHAIN:
        verdict = verify_witness(system, costs, top.chosen_set, top.witness, k.mode, caps=caps)
        if not verdict.ok:
            raise FrugalityError(f"matroid witness fails {k.value}: {verdict.violated}")
    return AllBounds(top.chosen_set, results)
