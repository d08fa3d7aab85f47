"""End-to-end experiments, one per acceptance check.

Each experiment returns a :class:`CheckResult` with a pass flag, a short
detail line and CSV rows of the measured ratios. The CLI ``suite`` command
and the acceptance tests both run these functions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bounds import (
    CHAIN,
    BoundKind,
    all_bounds,
    bound,
    ratio_shift,
    ntumin,
    ratio,
    ratio_at_least,
    tumax,
    tumin,
    vc_ntumax_witness,
    vc_tumax_witness,
)
from .config import Caps, default_caps
from .core import NTU, TU, cheapest_sets, fmt, set_cost, verify_witness
from .generators import (
    named_instance,
    random_instance,
    x3c_brute,
    x3c_instances_up_to_isomorphism,
    x3c_reduce,
)
from .mechanisms import (
    RULE_GREEDY,
    RULE_LOCAL_RATIO,
    RULE_VCG,
    AllocationRule,
    audit_lower_bound,
    composed,
    csv_row,
    frugality,
    run_mechanism,
)

DEFAULT_INSTANCES = 500


@dataclass
class CheckResult:
    number: int
    key: str
    title: str
    passed: bool
    detail: str
    rows: list = field(default_factory=list)
    table: list = field(default_factory=list)  # extra report lines, table format only

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.number:>2} {self.key}: {self.title} ({self.detail})"


def _values(b) -> str:
    return "(" + ", ".join(fmt(v) for v in b.values()) + ")"


# --------------------------------------------------------------------------
# Named examples
# --------------------------------------------------------------------------

# Bid vectors on (AB, BC, CD) printed for the diamond example.
DIAMOND_WITNESSES = {
    BoundKind.TUMAX: (5, 0, 5),
    BoundKind.NTUMAX: (4, 1, 4),
    BoundKind.NTUMIN: (2, 3, 2),
    BoundKind.TUMIN: (0, 5, 0),
}


def check_golden(caps: Caps | None = None, **_) -> CheckResult:
    system, costs = named_instance("diamond-example3")
    b = all_bounds(system, costs, caps=caps)
    ok = b.values() == (5, 7, 9, 10)
    notes = []
    for kind, vec in DIAMOND_WITNESSES.items():
        bids = dict(zip((0, 1, 2), map(Fraction, vec)))
        given = verify_witness(system, costs, b.chosen_set, bids, kind.mode, caps=caps)
        ours = verify_witness(system, costs, b.chosen_set, dict(b[kind].witness), kind.mode, caps=caps)
        same_value = sum(bids.values()) == b[kind].value
        ok = ok and given.ok and ours.ok and same_value
        if b[kind].witness != bids:
            notes.append(f"{kind.value} witness is an alternative optimum")
    detail = f"bounds {_values(b)}" + (f"; {', '.join(notes)}" if notes else "; witnesses as printed")
    return CheckResult(1, "golden", "diamond example bounds and witnesses", ok, detail)


def check_separations(caps: Caps | None = None, **_) -> CheckResult:
    cases = [
        ("diamond-prop3i", BoundKind.NTUMAX, BoundKind.NTUMIN),
        ("diamond-prop3ii", BoundKind.TUMAX, BoundKind.NTUMAX),
        ("diamond-prop3iii", BoundKind.NTUMIN, BoundKind.TUMIN),
    ]
    ok, parts = True, []
    for name, num, den in cases:
        system, costs = named_instance(name)
        b = all_bounds(system, costs, caps=caps)
        r = ratio(b[num].value, b[den].value)
        ok = ok and r == 2
        parts.append(f"{name} {num.value}/{den.value}={fmt(r) if r is not None else 'inf'}")
    return CheckResult(2, "separations", "diamond ratio separations equal 2", ok, "; ".join(parts))


def check_clique_tail(caps: Caps | None = None, sizes=range(4, 11), **_) -> CheckResult:
    ok, worst = True, []
    for n in sizes:
        system, costs = named_instance(f"clique-tail:{n}")
        b = all_bounds(system, costs, caps=caps)
        base = b[BoundKind.TUMAX].value >= (n - 2) * b[BoundKind.NTUMAX].value
        c1 = ratio_shift(system, costs, b.chosen_set, "L1", caps=caps)
        c3 = ratio_shift(system, c1, b.chosen_set, "L3", caps=caps)
        b1 = all_bounds(system, c1, b.chosen_set, caps=caps)
        b3 = all_bounds(system, c3, b.chosen_set, caps=caps)
        s1 = ratio_at_least(b1[BoundKind.NTUMAX].value, b1[BoundKind.NTUMIN].value, n - 2, 1)
        s3 = ratio_at_least(b3[BoundKind.NTUMIN].value, b3[BoundKind.TUMIN].value, n - 2, 1)
        ok = ok and base and s1 and s3
        if not (base and s1 and s3):
            worst.append(f"n={n}: {base}/{s1}/{s3}")
    detail = f"n={min(sizes)}..{max(sizes)}" + (f"; failing {worst}" if worst else "")
    return CheckResult(3, "clique-tail", "TUmax/NTUmax, shifted NTUmax/NTUmin and NTUmin/TUmin >= n-2", ok, detail)


# --------------------------------------------------------------------------
# Random sweeps
# --------------------------------------------------------------------------

_CHAIN_KINDS = (("explicit", 7), ("path", 9), ("matroid", 6))


def chain_instances(count: int = DEFAULT_INSTANCES):
    """``count`` monopoly-free instances split evenly over the three families."""
    per = -(-count // len(_CHAIN_KINDS))
    out = []
    for kind, top in _CHAIN_KINDS:
        for seed in range(per):
            n = 2 + seed % (top - 1)
            system, costs = random_instance(kind, n, seed)
            out.append((f"random:{kind},n={n},seed={seed}", system, costs))
    return out


def check_chain(caps: Caps | None = None, instances: int = DEFAULT_INSTANCES, **_) -> CheckResult:
    bad = []
    data = chain_instances(instances)
    for label, system, costs in data:
        b = all_bounds(system, costs, caps=caps)
        lo, _, _, hi = b.values()
        size = len(b.chosen_set)
        good = hi <= size * lo
        if system.kind == "path":
            good = good and hi <= 2 * lo
        if system.kind == "matroid":
            good = good and hi == lo
        if not good:
            bad.append(label)
    detail = f"{len(data)} instances" + (f"; failing {bad[:5]}" if bad else "")
    return CheckResult(4, "chain", "bound chain, TUmax/TUmin <= |S|, <= 2 on paths, = 1 on matroids",
                       not bad, detail)


def vc_instances(count: int = DEFAULT_INSTANCES, max_degree: int = 6):
    out = []
    for seed in range(count):
        n = 3 + seed % 8
        system, costs = random_instance("vertex_cover", n, seed, max_degree=max_degree)
        out.append((f"random:vc,n={n},seed={seed}", system, costs))
    return out


def brute_force_optimum(system, costs) -> Fraction:
    """Cheapest vertex cover by trying every subset."""
    g = system.graph
    best = None
    for r in range(g.num_vertices + 1):
        for sub in itertools.combinations(range(g.num_vertices), r):
            chosen = set(sub)
            if all(u in chosen or v in chosen for u, v in g.edges):
                c = set_cost(costs, chosen)
                best = c if best is None or c < best else best
    return best


def check_vertex_cover(caps: Caps | None = None, instances: int = DEFAULT_INSTANCES, **_) -> CheckResult:
    bad, rows = [], []
    for label, system, costs in vc_instances(instances):
        rep = frugality(RULE_LOCAL_RATIO, system, costs, caps)
        delta = rep.delta
        opt = brute_force_optimum(system, costs)
        nmin = rep.bounds[BoundKind.NTUMIN].value
        S = rep.bounds.chosen_set
        c_all = set_cost(costs, range(system.n))
        good = (
            rep.outcome.allocation_cost <= 2 * opt
            and rep.outcome.total <= delta * c_all
            and nmin >= max(set_cost(costs, S), c_all - set_cost(costs, S))
            and rep.outcome.total <= 2 * delta * nmin
        )
        if not good:
            bad.append(label)
        rows.append(csv_row(label, rep))
    detail = f"{instances} graphs" + (f"; failing {bad[:5]}" if bad else "")
    return CheckResult(5, "vertex-cover", "local-ratio cost <= 2 OPT, payment <= delta c(V) <= 2 delta NTUmin",
                       not bad, detail, rows)


def check_witnesses(caps: Caps | None = None, instances: int = DEFAULT_INSTANCES, **_) -> CheckResult:
    bad = []
    for label, system, costs in vc_instances(instances):
        g = system.graph
        S = cheapest_sets(system, costs, caps)[0]
        outside = set_cost(costs, [v for v in range(system.n) if v not in S])
        tu = vc_tumax_witness(g, costs, S)
        ntu = vc_ntumax_witness(g, costs, S)
        good = (
            sum(tu.values()) == outside
            and verify_witness(system, costs, S, tu, TU, check_tight=False, caps=caps).ok
            and sum(ntu.values()) >= outside
            and verify_witness(system, costs, S, ntu, NTU, check_tight=False, caps=caps).ok
        )
        if not good:
            bad.append(label)
    detail = f"{instances} graphs" + (f"; failing {bad[:5]}" if bad else "")
    return CheckResult(6, "witnesses", "vertex-cover TUmax and NTUmax witness constructions", not bad, detail)


AUDIT_RULES = (RULE_VCG, RULE_LOCAL_RATIO, composed(RULE_GREEDY))


def check_audit(caps: Caps | None = None, deltas=(2, 3, 4), rules=AUDIT_RULES, **_) -> CheckResult:
    ok, parts, rows = True, [], []
    for d in deltas:
        for rule in rules:
            res = audit_lower_bound(rule, d, caps)
            ok = ok and 2 * res.ratio >= d
            unit = [f"L{v}" if v < d else f"R{v - d}" for v, c in enumerate(res.costs) if c]
            parts.append(f"{rule.slug} delta={d} x: {unit[0]}=1 ratio={fmt(res.ratio)}")
            rows.append((f"audit:delta={d}", res.outcome.rule, str(d), fmt(res.outcome.total),
                         "", fmt(res.ntumin), "", "", "", fmt(res.ratio), "", ""))
    return CheckResult(7, "audit", "bipartite audit ratio >= delta/2", ok, "; ".join(parts), rows)


def check_vcg(caps: Caps | None = None, instances: int = DEFAULT_INSTANCES, **_) -> CheckResult:
    bad, rows = [], []
    data = chain_instances(instances)
    for label, system, costs in data:
        rep = frugality(RULE_VCG, system, costs, caps)
        if rep.outcome.total < rep.bounds[BoundKind.NTUMAX].value:
            bad.append(label)
        rows.append(csv_row(label, rep))
    system, costs = named_instance("clique-tail:7")
    total = run_mechanism(RULE_VCG, system, costs, caps).total
    big = tumax(system, costs, caps=caps).value
    ok = not bad and total == 1 and big >= 5
    detail = f"{len(data)} instances; clique-tail:7 VCG total {fmt(total)}, TUmax {fmt(big)}"
    if bad:
        detail += f"; failing {bad[:5]}"
    return CheckResult(8, "vcg", "NTUmax <= VCG payment; clique-tail VCG pays 1 against TUmax >= 5",
                       ok, detail, rows)


def check_nonmonotone(caps: Caps | None = None, sizes=range(2, 7), **_) -> CheckResult:
    ok, parts = True, []
    for n in sizes:
        before = ntumin(*named_instance(f"nonmon-family:{n}"), caps=caps).value
        after = ntumin(*named_instance(f"nonmon-family-plus:{n}"), caps=caps).value
        ok = ok and before == 1 and after == n
        parts.append(f"n={n}: {fmt(before)}->{fmt(after)}")
    before = ntumin(*named_instance("diamond-prop3i"), caps=caps).value
    after = ntumin(*named_instance("double-diamond"), caps=caps).value
    ok = ok and before == 1 and after == 2
    parts.append(f"diamond: {fmt(before)}->{fmt(after)}")
    return CheckResult(9, "nonmonotone", "NTUmin grows when a feasible set is added", ok, "; ".join(parts))


def check_x3c(caps: Caps | None = None, **_) -> CheckResult:
    insts = x3c_instances_up_to_isomorphism()
    bad, yes = [], 0
    table = [f"{'n':>3} {'m':>2}  {'cover':5}  {'NTUmin':>6}  triples"]
    for inst in insts:
        system, costs, m = x3c_reduce(inst)
        value = ntumin(system, costs, caps=caps).value
        cover = x3c_brute(inst)
        yes += cover
        if cover != (value == m):
            bad.append(inst)
        triples = " ".join("".join(map(str, t)) for t in inst.triples)
        table.append(f"{inst.n:>3} {m:>2}  {'yes' if cover else 'no':5}  {fmt(value):>6}  {triples}")
    detail = f"{len(insts)} instances up to isomorphism, {yes} with an exact cover"
    if bad:
        detail += f"; failing {len(bad)}"
    return CheckResult(10, "x3c", "exact cover exists iff NTUmin of the reduction equals m", not bad, detail,
                       table=table)


def check_choice_of_s(caps: Caps | None = None, **_) -> CheckResult:
    system, costs = named_instance("choice-of-s")
    S1, S2 = frozenset({0, 1}), frozenset({1, 2, 3})
    sets = cheapest_sets(system, costs, caps)
    same = all(
        len({bound(k, system, costs, S, caps).value for S in sets}) == 1
        for k in (BoundKind.NTUMIN, BoundKind.NTUMAX)
    )
    t1, t2 = tumax(system, costs, S1, caps).value, tumax(system, costs, S2, caps).value
    m1, m2 = tumin(system, costs, S1, caps).value, tumin(system, costs, S2, caps).value
    ok = same and set(sets) == {S1, S2} and t1 <= 4 < 5 <= t2 and m1 == 4 > m2
    detail = f"TUmax {fmt(t1)} vs {fmt(t2)}, TUmin {fmt(m1)} vs {fmt(m2)}, NTU bounds set-independent: {same}"
    return CheckResult(11, "choice-of-s", "TU bounds depend on the chosen cheapest set", ok, detail)


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "golden": check_golden,
    "separations": check_separations,
    "clique-tail": check_clique_tail,
    "chain": check_chain,
    "vertex-cover": check_vertex_cover,
    "witnesses": check_witnesses,
    "audit": check_audit,
    "vcg": check_vcg,
    "nonmonotone": check_nonmonotone,
    "x3c": check_x3c,
    "choice-of-s": check_choice_of_s,
}


def run_suite(only=None, caps: Caps | None = None, **options) -> list[CheckResult]:
    caps = caps or default_caps()
    keys = list(CHECKS) if not only else list(only)
    unknown = [k for k in keys if k not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; known: {', '.join(CHECKS)}")
    return [CHECKS[k](caps=caps, **options) for k in keys]


__all__ = ["CHECKS", "CheckResult", "run_suite", "chain_instances", "vc_instances",
           "brute_force_optimum", "DIAMOND_WITNESSES", "AUDIT_RULES", "DEFAULT_INSTANCES",
           "AllocationRule", "CHAIN"]
