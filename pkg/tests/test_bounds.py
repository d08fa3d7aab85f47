from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import explicit_systems, vc_instances
from frugality.bounds import (
    CHAIN,
    BoundKind,
    all_bounds,
    bound,
    ratio_shift,
    matroid_bounds,
    ntumax,
    ntumin,
    ratio,
    ratio_at_least,
    tumax,
    tumin,
    vc_ntumax_witness,
    vc_tumax_witness,
)
from frugality.config import Caps
from frugality.core import (
    NTU,
    TU,
    Graph,
    SetSystem,
    Uniform,
    as_costs,
    cheapest_feasible_set,
    cheapest_sets,
    enumerate_feasible,
    set_cost,
    verify_witness,
)
from frugality.errors import CapExceeded, MonopolyDetected, NotAMatroid, NotAVertexCover
from frugality.generators import clique_tail_graph, named_instance, random_instance
from oracles import all_covers, payment_bound

AB, BC, CD = 0, 1, 2


def bids_of(result):
    return tuple(result.witness[e] for e in sorted(result.witness))


# --------------------------------------------------------------------------
# Named examples
# --------------------------------------------------------------------------


def test_diamond_example():
    system, costs = named_instance("diamond-example3")
    b = all_bounds(system, costs)
    assert b.values() == (5, 7, 9, 10)
    assert bids_of(b[BoundKind.TUMAX]) == (5, 0, 5)
    assert bids_of(b[BoundKind.NTUMAX]) == (4, 1, 4)
    assert bids_of(b[BoundKind.NTUMIN]) == (2, 3, 2)
    assert bids_of(b[BoundKind.TUMIN]) == (0, 5, 0)
    for k in CHAIN:
        assert verify_witness(system, costs, b.chosen_set, b[k].witness, k.mode).ok
        assert sum(b[k].witness.values()) == b[k].value


def test_diamond_separation_instances():
    assert all_bounds(*named_instance("diamond-prop3i")).values() == (1, 1, 2, 2)
    assert ntumin(*named_instance("diamond-prop3i")).witness == {AB: 0, BC: 1, CD: 0}
    assert all_bounds(*named_instance("diamond-prop3ii")).values() == (1, 1, 1, 2)
    assert all_bounds(*named_instance("diamond-prop3iii")).values() == (1, 2, 2, 2)


def test_parallel_edges():
    g = Graph.build("st", [("s", "t"), ("s", "t")])
    system = SetSystem.paths(g, "s", "t")
    costs = as_costs([1, 3])
    res = ntumax(system, costs)
    assert res.value == 3 and res.witness == {0: 3}


def test_clique_tail():
    system, costs = named_instance("clique-tail:7")
    assert ntumax(system, costs).value == 1
    assert tumax(system, costs).value >= 5
    free, free_costs = named_instance("clique-tail-free:7")
    assert tumin(free, free_costs).value <= 1


def test_nonmonotone_family():
    for n in range(2, 5):
        assert ntumin(*named_instance(f"nonmon-family:{n}")).value == 1
        assert ntumin(*named_instance(f"nonmon-family-plus:{n}")).value == n


def test_matroid_examples():
    assert all_bounds(*named_instance("matroid:u32")).values() == (6, 6, 6, 6)
    tri = all_bounds(*named_instance("matroid:triangle"))
    assert tri.values() == (10, 10, 10, 10) and tri[BoundKind.NTUMAX].witness == {0: 5, 1: 5}
    u21 = SetSystem.matroid(Uniform(2, 1))
    assert matroid_bounds(u21, as_costs([0, 7])).values() == (7, 7, 7, 7)


def test_matroid_bounds_rejects_non_matroid():
    from frugality.core import ExplicitBases

    system = SetSystem.matroid(ExplicitBases((frozenset({0, 1}), frozenset({2, 3}))))
    with pytest.raises(NotAMatroid):
        matroid_bounds(system, as_costs([1, 1, 1, 1]))


def test_single_set_is_a_monopoly():
    with pytest.raises(MonopolyDetected):
        all_bounds(SetSystem.explicit(2, [{0, 1}]), as_costs([1, 1]))


def test_choice_of_set():
    system, costs = named_instance("choice-of-s")
    S1, S2 = frozenset({0, 1}), frozenset({1, 2, 3})
    assert all_bounds(system, costs, S1).values() == (4, 4, 4, 4)
    assert all_bounds(system, costs, S2).values() == (3, 4, 4, 5)


def test_search_budget_is_enforced():
    system, costs = random_instance("explicit", 7, 64)  # needs several subproblems
    with pytest.raises(CapExceeded):
        ntumin(system, costs, caps=Caps(covers=2))
    assert ntumin(system, costs).value >= 0


def test_ratio_helpers():
    assert ratio(Fraction(3), Fraction(0)) is None
    assert ratio(Fraction(3), Fraction(2)) == Fraction(3, 2)
    assert ratio_at_least(1, 0, 100, 1) and ratio_at_least(0, 0, 1, 1)
    assert not ratio_at_least(0, 0, 2, 1) and not ratio_at_least(1, 1, 1, 0)


# --------------------------------------------------------------------------
# Oracle equivalence
# --------------------------------------------------------------------------


def oracle_bounds(system, costs, S):
    sets = enumerate_feasible(system)
    return tuple(payment_bound(sets, costs, S, tu=k.mode == TU, maximize=k.maximize) for k in CHAIN)


@given(explicit_systems())
def test_explicit_bounds_match_vertex_oracle(inst):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    assume(len(S) <= 5)
    assert all_bounds(system, costs).values() == oracle_bounds(system, costs, S)


@given(explicit_systems(integer=False))
def test_rational_bounds_match_vertex_oracle(inst):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    assume(len(S) <= 5)
    assert all_bounds(system, costs).values() == oracle_bounds(system, costs, S)


@given(vc_instances(max_n=6))
def test_vertex_cover_bounds_match_vertex_oracle(inst):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    assume(len(S) <= 5)
    sets = all_covers(system.n, system.graph.edges)  # every cover, not only minimal ones
    expected = tuple(payment_bound(sets, costs, S, tu=k.mode == TU, maximize=k.maximize) for k in CHAIN)
    assert all_bounds(system, costs).values() == expected


@pytest.mark.parametrize("seed", range(12))
def test_path_bounds_match_vertex_oracle(seed):
    system, costs = random_instance("path", 3 + seed % 5, seed)
    S = cheapest_feasible_set(system, costs)
    assert all_bounds(system, costs).values() == oracle_bounds(system, costs, S)


# --------------------------------------------------------------------------
# Structural properties
# --------------------------------------------------------------------------


@given(explicit_systems(max_n=7, integer=False))
def test_witnesses_certify_their_values(inst):
    system, costs = inst
    b = all_bounds(system, costs)
    for k in CHAIN:
        assert verify_witness(system, costs, b.chosen_set, b[k].witness, k.mode).ok
        assert sum(b[k].witness.values()) == b[k].value
        for e, c in b[k].tight_for.items():
            assert e in c.lhs and c.tight(b[k].witness)


@given(explicit_systems(max_n=7, integer=False))
def test_size_bound(inst):
    system, costs = inst
    b = all_bounds(system, costs)
    assert b[BoundKind.TUMAX].value <= len(b.chosen_set) * b[BoundKind.TUMIN].value


@pytest.mark.parametrize("seed", range(25))
def test_path_and_matroid_ratio_bounds(seed):
    system, costs = random_instance("path", 2 + seed % 8, seed)
    b = all_bounds(system, costs)
    assert b[BoundKind.TUMAX].value <= 2 * b[BoundKind.TUMIN].value
    system, costs = random_instance("matroid", 2 + seed % 5, seed)
    values = all_bounds(system, costs).values()
    assert len(set(values)) == 1
    assert matroid_bounds(system, costs).values() == values


@given(explicit_systems(max_n=6, integer=False))
def test_ntu_bounds_do_not_depend_on_the_cheapest_set(inst):
    system, costs = inst
    sets = cheapest_sets(system, costs)
    for k in (BoundKind.NTUMIN, BoundKind.NTUMAX):
        assert len({bound(k, system, costs, S).value for S in sets}) == 1


@given(explicit_systems(max_n=6), st.frozensets(st.integers(0, 5), min_size=1))
def test_adding_a_set_never_raises_max_bounds(inst, extra):
    system, costs = inst
    extra = frozenset(e for e in extra if e < system.n)
    assume(extra)
    S = cheapest_feasible_set(system, costs)
    bigger = SetSystem.explicit(system.n, list(system.family.sets) + [extra])
    assume(cheapest_feasible_set(bigger, costs) == S)
    for fn in (ntumax, tumax):
        assert fn(bigger, costs, S).value <= fn(system, costs, S).value


# --------------------------------------------------------------------------
# Ratio transfers
# --------------------------------------------------------------------------


@pytest.mark.parametrize("n", range(4, 9))
def test_clique_tail_transfers(n):
    system, costs = named_instance(f"clique-tail:{n}")
    S = cheapest_feasible_set(system, costs)
    c1 = ratio_shift(system, costs, S, "L1")
    assert all(c1[e] == costs[e] for e in range(system.n) if e not in S)
    b1 = all_bounds(system, c1, S)
    assert b1[BoundKind.NTUMAX].value >= (n - 2) * b1[BoundKind.NTUMIN].value
    c3 = ratio_shift(system, c1, S, "L3")
    b3 = all_bounds(system, c3, S)
    assert b3[BoundKind.NTUMIN].value >= (n - 2) * b3[BoundKind.TUMIN].value


@given(explicit_systems(max_n=6, integer=False), st.sampled_from(["L1", "L2", "L3", "L4"]))
def test_transfers_hold_instance_by_instance(inst, which):
    system, costs = inst
    new = ratio_shift(system, costs, which=which)  # raises if the transfer fails
    S = cheapest_feasible_set(system, costs)
    assert set_cost(new, S) <= min(set_cost(new, T) for T in enumerate_feasible(system))


def test_transfer_on_matroid_is_trivial():
    system, costs = named_instance("matroid:u32")
    for which in ("L1", "L2", "L3", "L4"):
        ratio_shift(system, costs, which=which)


# --------------------------------------------------------------------------
# Vertex-cover witnesses
# --------------------------------------------------------------------------


def test_tumax_witness_pendant_clique():
    g = clique_tail_graph(4)  # clique X1 X2 X3, pendant X0-X3
    costs = as_costs([1, 0, 0, 1])
    b = vc_tumax_witness(g, costs, {0, 1, 2})
    assert b == {0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)}


def test_tumax_witness_all_vertices():
    g = Graph.build("abc", [("a", "b"), ("b", "c")])
    assert vc_tumax_witness(g, as_costs([1, 2, 3]), {0, 1, 2}) == {0: 0, 1: 0, 2: 0}


def test_ntumax_witness_examples():
    g = Graph.build("uv", [("u", "v")])
    assert vc_ntumax_witness(g, as_costs([1, 1]), {0}) == {0: 1}
    star = Graph.build("xabc", [("x", "a"), ("x", "b"), ("x", "c")])
    costs = as_costs([3, 2, 2, 2])
    b = vc_ntumax_witness(star, costs, {0})
    assert b == {0: 6}
    assert verify_witness(SetSystem.vertex_cover(star), costs, {0}, b, NTU, check_tight=False).ok


def test_witnesses_need_a_cover():
    g = Graph.build("abc", [("a", "b"), ("b", "c")])
    with pytest.raises(NotAVertexCover):
        vc_tumax_witness(g, as_costs([1, 1, 1]), {0})
    with pytest.raises(NotAVertexCover):
        vc_ntumax_witness(g, as_costs([1, 1, 1]), {2})


@given(vc_instances(max_n=8))
def test_vertex_cover_witness_properties(inst):
    system, costs = inst
    g = system.graph
    S = cheapest_feasible_set(system, costs)
    outside = set_cost(costs, [v for v in range(system.n) if v not in S])
    tu = vc_tumax_witness(g, costs, S)
    assert sum(tu.values()) == outside
    assert verify_witness(system, costs, S, tu, TU, check_tight=False).ok
    ntu = vc_ntumax_witness(g, costs, S)
    assert sum(ntu.values()) >= outside
    assert verify_witness(system, costs, S, ntu, NTU, check_tight=False).ok
    b = all_bounds(system, costs)
    assert b[BoundKind.TUMAX].value >= outside
    assert b[BoundKind.NTUMAX].value >= outside
    assert b[BoundKind.NTUMIN].value >= max(set_cost(costs, S), outside)
