"""Truthful set-system auctions: allocation rules, threshold payments and
frugality measurements.

Threshold bids are found exactly. For VCG there is a closed form. For the
other rules the deviating agent's bid is replaced by a symbolic linear
function of a probe value ``x``; every comparison the rule makes reports the
value of ``x`` at which its outcome could flip. The allocation is therefore
constant between consecutive recorded breakpoints, and a bracketing search
that snaps to breakpoints lands on the threshold itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .bounds import CHAIN, AllBounds, BoundKind, all_bounds, ntumin, ratio
from .config import Caps, default_caps
from .core import (
    Graph,
    SetSystem,
    VertexCoverFamily,
    candidate_sets,
    cheapest_feasible_set,
    fmt,
    require_monopoly_free,
    set_cost,
)
from .errors import (
    AuditFailed,
    NotAVertexCover,
    NotAWinner,
    NotMonotone,
    ThresholdSearchFailed,
)
from .generators import bipartite_graph

# --------------------------------------------------------------------------
# Symbolic bids
# --------------------------------------------------------------------------


class _Probe:
    def __init__(self, x0: Fraction):
        self.x0 = x0
        self.breaks: set[Fraction] = set()


class Linear:
    """``const + slope * x`` evaluated at the probe's ``x0``.

    Arithmetic with numbers stays symbolic; comparisons are decided at ``x0``
    and record the root of the compared difference as a breakpoint.
    """

    __slots__ = ("const", "slope", "probe")

    def __init__(self, const, slope, probe: _Probe):
        self.const = Fraction(const)
        self.slope = Fraction(slope)
        self.probe = probe

    def _parts(self, other):
        if isinstance(other, Linear):
            return other.const, other.slope
        return Fraction(other), Fraction(0)

    def __add__(self, other):
        c, s = self._parts(other)
        return Linear(self.const + c, self.slope + s, self.probe)

    __radd__ = __add__

    def __sub__(self, other):
        c, s = self._parts(other)
        return Linear(self.const - c, self.slope - s, self.probe)

    def __rsub__(self, other):
        c, s = self._parts(other)
        return Linear(c - self.const, s - self.slope, self.probe)

    def __neg__(self):
        return Linear(-self.const, -self.slope, self.probe)

    def __mul__(self, k):
        if isinstance(k, Linear):
            raise TypeError("bids are only scaled by constants")
        return Linear(self.const * k, self.slope * k, self.probe)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, Linear):
            raise TypeError("bids are only divided by constants")
        return Linear(self.const / k, self.slope / k, self.probe)

    def _diff(self, other) -> Fraction:
        c, s = self._parts(other)
        dc, ds = self.const - c, self.slope - s
        if ds:
            self.probe.breaks.add(-dc / ds)
        return dc + ds * self.probe.x0

    def __lt__(self, other):
        return self._diff(other) < 0

    def __le__(self, other):
        return self._diff(other) <= 0

    def __gt__(self, other):
        return self._diff(other) > 0

    def __ge__(self, other):
        return self._diff(other) >= 0

    def __eq__(self, other):
        return self._diff(other) == 0

    def __ne__(self, other):
        return self._diff(other) != 0

    __hash__ = None

    def __repr__(self):
        return f"Linear({self.const} + {self.slope}x @ {self.probe.x0})"


# --------------------------------------------------------------------------
# Allocation rules
# --------------------------------------------------------------------------

VCG = "vcg"
GREEDY = "greedy"
LOCAL_RATIO = "local-ratio"
COMPOSED = "composed"

_DISPLAY = {VCG: "VCG", GREEDY: "GreedyVC", LOCAL_RATIO: "LocalRatioVC"}


@dataclass(frozen=True)
class AllocationRule:
    """A bid-independent allocation rule.

    ``kind`` is ``vcg``, ``greedy``, ``local-ratio`` or ``composed``; a
    composed rule runs ``inner`` and then the locally-optimal transform.
    ``edge_order`` optionally fixes the local-ratio edge sequence (edge
    indices); the default is by (smaller endpoint, larger endpoint).
    """

    kind: str
    inner: "AllocationRule | None" = None
    edge_order: tuple | None = None

    def __post_init__(self):
        if self.kind not in (VCG, GREEDY, LOCAL_RATIO, COMPOSED):
            raise ValueError(f"unknown rule {self.kind!r}")
        if (self.kind == COMPOSED) != (self.inner is not None):
            raise ValueError("exactly the composed rule takes an inner rule")

    @property
    def name(self) -> str:
        if self.kind == COMPOSED:
            return f"Composed({self.inner.name}, transform)"
        return _DISPLAY[self.kind]

    @property
    def slug(self) -> str:
        return f"{self.inner.slug}+transform" if self.kind == COMPOSED else self.kind


def composed(rule: AllocationRule) -> AllocationRule:
    return AllocationRule(COMPOSED, rule)


RULE_VCG = AllocationRule(VCG)
RULE_GREEDY = AllocationRule(GREEDY)
RULE_LOCAL_RATIO = AllocationRule(LOCAL_RATIO)


def parse_rule(text: str) -> AllocationRule:
    """``vcg``, ``greedy``, ``local-ratio``, or any of them with ``+transform``."""
    text = text.strip().lower()
    if text.endswith("+transform"):
        return composed(parse_rule(text[: -len("+transform")]))
    if text in (VCG, GREEDY, LOCAL_RATIO):
        return AllocationRule(text)
    raise ValueError(f"unknown rule {text!r}; expected vcg, greedy, local-ratio[+transform]")


def _vc_graph(system: SetSystem) -> Graph:
    if not isinstance(system.family, VertexCoverFamily):
        raise ValueError("this rule applies to vertex-cover systems only")
    return system.family.graph


def _lex_edges(graph: Graph):
    return sorted(range(len(graph.edges)), key=lambda i: (min(graph.edges[i]), max(graph.edges[i]), i))


def _greedy(graph: Graph, bids) -> frozenset:
    uncovered = set(range(len(graph.edges)))
    cover = set()
    while uncovered:
        deg = [0] * graph.num_vertices
        for i in uncovered:
            u, v = graph.edges[i]
            deg[u] += 1
            if v != u:
                deg[v] += 1
        best = None
        for v in range(graph.num_vertices):
            if deg[v] and (best is None or bids[v] / deg[v] < best[0]):
                best = (bids[v] / deg[v], v)
        v = best[1]
        cover.add(v)
        uncovered = {i for i in uncovered if v not in graph.edges[i]}
    return frozenset(cover)


def _local_ratio(graph: Graph, bids, order) -> frozenset:
    residual = list(bids)
    for i in order:
        u, v = graph.edges[i]
        eps = min(residual[u], residual[v])
        residual[u] = residual[u] - eps
        residual[v] = residual[v] - eps
    return frozenset(v for v in range(graph.num_vertices) if residual[v] == 0)


def _neighbour_sums(graph: Graph, bids):
    nbrs = graph.neighbours()
    return nbrs, [sum((bids[u] for u in sorted(nbrs[v])), Fraction(0)) for v in range(graph.num_vertices)]


def _require_cover(graph: Graph, cover):
    for u, v in graph.edges:
        if u not in cover and v not in cover:
            raise NotAVertexCover(f"edge {graph.vertices[u]}-{graph.vertices[v]} is uncovered")


def locally_optimal_transform(graph: Graph, bids: Sequence, cover) -> frozenset:
    """One pass in vertex order: drop ``v`` for its neighbours when ``b_v`` exceeds their total."""
    cover = set(cover)
    _require_cover(graph, cover)
    nbrs, sums = _neighbour_sums(graph, bids)
    for v in range(graph.num_vertices):
        if v in cover and bids[v] > sums[v]:
            cover.discard(v)
            cover |= nbrs[v]
    return frozenset(cover)


def is_locally_optimal(graph: Graph, bids: Sequence, cover) -> bool:
    """No chosen vertex bids more than the total of its neighbours."""
    _require_cover(graph, cover)
    _, sums = _neighbour_sums(graph, bids)
    return not any(bids[v] > sums[v] for v in cover)


def allocate(rule: AllocationRule, system: SetSystem, bids: Sequence, caps: Caps | None = None) -> frozenset:
    """The feasible set the rule selects under ``bids``."""
    if len(bids) != system.n:
        raise ValueError(f"expected {system.n} bids, got {len(bids)}")
    if rule.kind == VCG:
        return cheapest_feasible_set(system, bids, caps)
    graph = _vc_graph(system)
    if rule.kind == GREEDY:
        return _greedy(graph, bids)
    if rule.kind == LOCAL_RATIO:
        order = rule.edge_order if rule.edge_order is not None else _lex_edges(graph)
        return _local_ratio(graph, bids, order)
    return locally_optimal_transform(graph, bids, allocate(rule.inner, system, bids, caps))


# --------------------------------------------------------------------------
# Threshold payments
# --------------------------------------------------------------------------


def vcg_threshold(system: SetSystem, bids: Sequence, e: int, caps: Caps | None = None) -> Fraction:
    """``min over feasible T without e of c(T)``, minus the other winners' bids."""
    S = cheapest_feasible_set(system, bids, caps)
    if e not in S:
        raise NotAWinner(f"agent {system.labels[e]} does not win")
    others = [set_cost(bids, T) for T in candidate_sets(system, caps) if e not in T]
    if not others:
        raise ThresholdSearchFailed(f"agent {system.labels[e]} is a monopolist")
    return min(others) - (set_cost(bids, S) - bids[e])


def _outcome(rule, system, bids, e, x0, caps):
    probe = _Probe(x0)
    trial = list(bids)
    trial[e] = Linear(0, 1, probe)
    return e in allocate(rule, system, trial, caps), probe.breaks


def _search_threshold(rule, system, bids, e, caps) -> Fraction:
    def wins_at(x):
        trial = list(bids)
        trial[e] = x
        return e in allocate(rule, system, trial, caps)

    lo = Fraction(bids[e])  # e wins here, so the threshold is at least lo
    hi = 2 * lo + 1 + sum((Fraction(b) for i, b in enumerate(bids) if i != e), Fraction(0))
    for _ in range(64):
        if not wins_at(hi):
            break
        hi *= 2
    else:
        raise ThresholdSearchFailed(f"agent {system.labels[e]} wins at every tried bid")

    for _ in range(caps.bisection):
        if lo == hi:
            return lo
        x0 = (lo + hi) / 2
        win, breaks = _outcome(rule, system, bids, e, x0, caps)
        if x0 in breaks:
            lo, hi = (x0, hi) if win else (lo, x0)
        elif win:
            above = min((p for p in breaks if p > x0), default=None)
            if above is None or above > hi:
                raise NotMonotone(f"agent {system.labels[e]} wins beyond a losing bid")
            lo = above
        else:
            below = max((p for p in breaks if p < x0), default=None)
            if below is None or below < lo:
                raise NotMonotone(f"agent {system.labels[e]} loses below a winning bid")
            hi = below
    if lo == hi:
        return lo
    raise ThresholdSearchFailed(
        f"threshold of {system.labels[e]} still in [{fmt(lo)}, {fmt(hi)}] after {caps.bisection} probes"
    )


def threshold_payment(rule: AllocationRule, system: SetSystem, bids: Sequence, e: int,
                      caps: Caps | None = None, method: str = "auto") -> Fraction:
    """Supremum of the bids with which ``e`` still wins, others fixed.

    ``method`` is ``auto`` (closed form for VCG, search otherwise),
    ``closed`` or ``search``.
    """
    caps = caps or default_caps()
    bids = tuple(Fraction(b) for b in bids)
    if e not in allocate(rule, system, bids, caps):
        raise NotAWinner(f"agent {system.labels[e]} does not win")
    if method == "closed" or (method == "auto" and rule.kind == VCG):
        if rule.kind != VCG:
            raise ValueError("the closed form applies to VCG only")
        return vcg_threshold(system, bids, e, caps)
    return _search_threshold(rule, system, bids, e, caps)


@dataclass(frozen=True)
class MechanismOutcome:
    rule: str
    selected: frozenset
    payments: Mapping[int, Fraction]
    total: Fraction
    allocation_cost: Fraction

    def to_json(self, system: SetSystem | None = None) -> dict:
        name = (lambda e: system.labels[e]) if system else str
        return {
            "rule": self.rule,
            "selected": [name(e) for e in sorted(self.selected)],
            "payments": {name(e): fmt(p) for e, p in sorted(self.payments.items())},
            "total": fmt(self.total),
            "allocation_cost": fmt(self.allocation_cost),
        }


def run_mechanism(rule: AllocationRule, system: SetSystem, costs: Sequence,
                  caps: Caps | None = None, method: str = "auto") -> MechanismOutcome:
    """Truthful run: bids equal costs, winners receive their thresholds."""
    caps = caps or default_caps()
    require_monopoly_free(system, caps)
    costs = tuple(Fraction(c) for c in costs)
    selected = allocate(rule, system, costs, caps)
    payments = {e: threshold_payment(rule, system, costs, e, caps, method) for e in sorted(selected)}
    total = sum(payments.values(), Fraction(0))
    return MechanismOutcome(rule.name, selected, payments, total, set_cost(costs, selected))


# --------------------------------------------------------------------------
# Frugality
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FrugalityReport:
    """Payment over each bound, plus the vertex-cover inequality checks.

    A ratio is None when its bound is zero; that kind is listed in
    ``degenerate`` and the ratio reads as +inf (or 1 for a zero payment).
    """

    rule: str
    outcome: MechanismOutcome
    bounds: AllBounds
    ratios: Mapping[BoundKind, Fraction | None]
    degenerate: tuple[BoundKind, ...] = ()
    delta: int | None = None
    checks: Mapping[str, bool] = field(default_factory=dict)

    def ratio_text(self, kind: BoundKind) -> str:
        r = self.ratios[BoundKind(kind)]
        if r is None:
            return "inf" if self.outcome.total > 0 else "1"
        return fmt(r)

    def to_json(self, system: SetSystem | None = None) -> dict:
        return {
            "rule": self.rule,
            "outcome": self.outcome.to_json(system),
            "bounds": {k.value: fmt(self.bounds[k].value) for k in CHAIN},
            "ratios": {k.value: self.ratio_text(k) for k in CHAIN},
            "degenerate": [k.value for k in self.degenerate],
            "delta": self.delta,
            "checks": dict(self.checks),
        }


CSV_HEADER = ("instance", "rule", "delta", "total", "tumin", "ntumin", "ntumax", "tumax",
              "phi_tumin", "phi_ntumin", "phi_ntumax", "phi_tumax")


def csv_row(instance: str, report: FrugalityReport) -> tuple[str, ...]:
    return (
        instance,
        report.outcome.rule,
        "" if report.delta is None else str(report.delta),
        fmt(report.outcome.total),
        *(fmt(report.bounds[k].value) for k in CHAIN),
        *(report.ratio_text(k) for k in CHAIN),
    )


def frugality(rule: AllocationRule, system: SetSystem, costs: Sequence,
              caps: Caps | None = None) -> FrugalityReport:
    """Run the mechanism and divide its payment by each bound.

    On vertex-cover systems also checks ``total <= delta * c(V)`` when the
    selected cover is locally optimal, ``NTUmin >= max(c(S), c(V - S))`` and
    ``total <= 2 * delta * NTUmin``; a failed check raises AuditFailed.
    """
    caps = caps or default_caps()
    costs = tuple(Fraction(c) for c in costs)
    outcome = run_mechanism(rule, system, costs, caps)
    bounds = all_bounds(system, costs, caps=caps)
    ratios = {k: ratio(outcome.total, bounds[k].value) for k in CHAIN}
    degenerate = tuple(k for k in CHAIN if bounds[k].value == 0)
    delta = None
    checks = {}
    if isinstance(system.family, VertexCoverFamily):
        graph = system.family.graph
        delta = graph.max_degree()
        S = bounds.chosen_set
        # isolated vertices lie in no constraint, so the cost bounds skip them
        active = [v for v, nb in enumerate(graph.neighbours()) if nb]
        c_all = set_cost(costs, active)
        c_out = set_cost(costs, [v for v in active if v not in S])
        nmin = bounds[BoundKind.NTUMIN].value
        local = is_locally_optimal(graph, costs, outcome.selected)
        checks["locally_optimal"] = local
        if local:
            checks["total<=delta*c(V)"] = outcome.total <= delta * set_cost(costs, range(system.n))
        checks["ntumin>=max(c(S),c(V-S))"] = nmin >= max(set_cost(costs, S), c_out)
        checks["ntumin>=c(V)/2"] = 2 * nmin >= c_all
        checks["total<=2*delta*ntumin"] = outcome.total <= 2 * delta * nmin
        failed = [k for k, ok in checks.items() if not ok and k != "locally_optimal"]
        if failed:
            raise AuditFailed(f"vertex-cover inequalities fail: {failed}")
    return FrugalityReport(rule.name, outcome, bounds, ratios, degenerate, delta, checks)


# --------------------------------------------------------------------------
# Lower-bound audit on the complete bipartite graph
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditResult:
    delta: int
    costs: tuple[Fraction, ...]
    outcome: MechanismOutcome
    ntumin: Fraction
    ratio: Fraction
    witnesses: tuple[int, ...]

    def to_json(self, system: SetSystem | None = None) -> dict:
        name = (lambda e: system.labels[e]) if system else str
        return {
            "delta": self.delta,
            "costs": [fmt(c) for c in self.costs],
            "outcome": self.outcome.to_json(system),
            "ntumin": fmt(self.ntumin),
            "ratio": fmt(self.ratio),
            "witnesses": [name(v) for v in self.witnesses],
        }


def audit_lower_bound(rule: AllocationRule, delta: int, caps: Caps | None = None) -> AuditResult:
    """Find a cost vector on K(delta, delta) where the rule pays at least delta/2 times NTUmin.

    Every two-hot cost vector ``y`` (one unit-cost vertex per side) is run;
    the side the rule buys entirely points ``y`` at the one-hot vector that
    zeroes the cost of that side's unit vertex. Some one-hot ``x`` collects at
    least delta/2 such pointers; each pointing vertex must still win under
    ``x`` and is paid at least 1 there.
    """
    if delta < 2:
        raise ValueError("delta must be at least 2")
    caps = caps or default_caps()
    graph = bipartite_graph(delta)
    system = SetSystem.vertex_cover(graph)
    left, right = set(range(delta)), set(range(delta, 2 * delta))
    n = 2 * delta

    def unit(*vs):
        return tuple(Fraction(1) if v in vs else Fraction(0) for v in range(n))

    pointers: dict[int, list[int]] = {v: [] for v in range(n)}  # x index -> changed vertices
    for l in sorted(left):
        for r in sorted(right):
            chosen = allocate(rule, system, unit(l, r), caps)
            if left <= chosen:
                pointers[r].append(l)  # x has only r costly; l changed
            if right <= chosen:
                pointers[l].append(r)
            if not (left <= chosen or right <= chosen):
                raise AuditFailed("the rule returned a set that is not a vertex cover")
    x_vertex = max(range(n), key=lambda v: (len(pointers[v]), -v))
    witnesses = tuple(pointers[x_vertex])
    if 2 * len(witnesses) < delta:
        raise AuditFailed("no one-hot vector collects delta/2 pointers")
    x = unit(x_vertex)
    outcome = run_mechanism(rule, system, x, caps)
    missing = [v for v in witnesses if v not in outcome.selected]
    if missing:
        raise AuditFailed(f"monotonicity step fails for {system.names(missing)}")
    low = [v for v in witnesses if outcome.payments[v] < 1]
    if low:
        raise AuditFailed(f"thresholds below 1 for {system.names(low)}")
    value = ntumin(system, x, caps=caps).value
    if value > 1 or value == 0:
        raise AuditFailed(f"NTUmin of the audit vector is {fmt(value)}")
    r = outcome.total / value
    if 2 * r < delta:
        raise AuditFailed(f"ratio {fmt(r)} is below delta/2")
    return AuditResult(delta, x, outcome, value, r, witnesses)
