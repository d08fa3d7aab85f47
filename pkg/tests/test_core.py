import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import explicit_systems
from frugality.core import (
    NTU,
    TU,
    Graph,
    SetSystem,
    as_costs,
    cheapest_feasible_set,
    dump_instance,
    enumerate_feasible,
    fmt,
    is_monopoly_free,
    load_instance,
    parse_rational,
    separation_oracle,
    set_cost,
    type2_constraints,
    verify_witness,
)
from frugality.errors import CapExceeded, InstanceFormatError, MonopolyDetected, NoFeasibleSet
from frugality.generators import clique_tail_graph, diamond, named_instance
from oracles import all_covers, simple_paths

AB, BC, CD, AC, BD = range(5)


def names(system, sets):
    return {"".join(sorted(system.names(s))) for s in sets}


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------


def test_diamond_minimal_sets_are_three_paths():
    system = diamond()
    assert set(enumerate_feasible(system, minimal_only=True)) == {
        frozenset({AB, BC, CD}), frozenset({AB, BD}), frozenset({AC, CD})}


def test_explicit_identity():
    system = SetSystem.explicit(2, [{0, 1}])
    assert enumerate_feasible(system) == (frozenset({0, 1}),)
    assert enumerate_feasible(system, minimal_only=True) == (frozenset({0, 1}),)


def test_triangle_minimal_covers_match_brute_force():
    g = Graph.build("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    covers = all_covers(3, g.edges)
    minimal = {c for c in covers if not any(d < c for d in covers)}
    assert set(enumerate_feasible(SetSystem.vertex_cover(g), minimal_only=True)) == minimal
    assert len(minimal) == 3


def test_vertex_cover_enumeration_matches_brute_force():
    g = clique_tail_graph(6)
    assert set(enumerate_feasible(SetSystem.vertex_cover(g))) == set(all_covers(6, g.edges))


def test_path_enumeration_matches_depth_first_search():
    system = diamond([("B", "C")])
    g = system.family.graph
    assert set(enumerate_feasible(system, minimal_only=True)) == set(
        simple_paths(4, g.edges, 0, 3, directed=True))


def test_enumeration_cap_and_empty_family():
    g = clique_tail_graph(8)
    from frugality.config import Caps

    with pytest.raises(CapExceeded):
        enumerate_feasible(SetSystem.vertex_cover(g), caps=Caps(enumeration=3))
    with pytest.raises(NoFeasibleSet):
        SetSystem.explicit(2, [])
    disconnected = SetSystem.paths(Graph.build("st", []), "s", "t")
    with pytest.raises(NoFeasibleSet):
        enumerate_feasible(disconnected)


# --------------------------------------------------------------------------
# Cheapest sets and monopolies
# --------------------------------------------------------------------------


def test_cheapest_diamond():
    system, costs = named_instance("diamond-example3")
    S = cheapest_feasible_set(system, costs)
    assert S == {AB, BC, CD} and set_cost(costs, S) == 5


def test_cheapest_tie_break_is_lexicographic():
    system = SetSystem.explicit(2, [{1}, {0}])
    assert cheapest_feasible_set(system, as_costs([1, 1])) == {0}


def test_cheapest_clique_tail():
    system, costs = named_instance("clique-tail:7")
    S = cheapest_feasible_set(system, costs)
    assert system.names(S) == [f"X{i}" for i in range(6)] and set_cost(costs, S) == 1


def test_monopoly_freeness():
    assert is_monopoly_free(diamond())
    assert not is_monopoly_free(SetSystem.explicit(3, [{0, 1}, {0, 2}]))
    assert is_monopoly_free(SetSystem.vertex_cover(Graph.build("uv", [("u", "v")])))


@given(explicit_systems(integer=False))
def test_cheapest_is_cheapest_and_stable(inst):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    assert all(set_cost(costs, S) <= set_cost(costs, T) for T in enumerate_feasible(system))
    assert cheapest_feasible_set(system, costs) == S


@given(explicit_systems(integer=False), st.integers(1, 5))
def test_raising_an_outside_cost_keeps_the_cheapest_set(inst, bump):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    for e in range(system.n):
        if e not in S:
            raised = list(costs)
            raised[e] += bump
            assert cheapest_feasible_set(system, raised) == S


# --------------------------------------------------------------------------
# Fairness constraints and witnesses
# --------------------------------------------------------------------------


def as_pairs(cons):
    return {(c.lhs, c.rhs) for c in cons}


def test_constraints_prop3i():
    system, costs = named_instance("diamond-prop3i")
    cons = type2_constraints(system, costs, {AB, BC, CD})
    assert as_pairs(cons) == {(frozenset({AB, BC}), 1), (frozenset({BC, CD}), 1)}


def test_constraints_singletons():
    system = SetSystem.explicit(2, [{0}, {1}])
    cons = type2_constraints(system, as_costs([0, 5]), {0})
    assert as_pairs(cons) == {(frozenset({0}), 5)}


def test_constraints_clique_tail():
    system, costs = named_instance("clique-tail:7")
    cons = type2_constraints(system, costs, frozenset(range(6)))
    assert as_pairs(cons) == {(frozenset({0, i}), 1) for i in range(1, 6)}


def test_verify_diamond_witnesses():
    system, costs = named_instance("diamond-example3")
    S = {AB, BC, CD}
    bids = lambda a, b, c: {AB: Fraction(a), BC: Fraction(b), CD: Fraction(c)}
    assert verify_witness(system, costs, S, bids(2, 3, 2), NTU).ok
    assert verify_witness(system, costs, S, bids(5, 0, 5), TU).ok
    bad = verify_witness(system, costs, S, bids(5, 0, 5), NTU)
    assert bad.violated == (("1", BC),)


def test_verify_slack_bids_violate_tightness_only():
    # both constraints read b_AB + b_BC <= 5 and b_BC + b_CD <= 5; sums of 4 are slack
    system, costs = named_instance("diamond-example3")
    S = {AB, BC, CD}
    verdict = verify_witness(system, costs, S, {AB: Fraction(2), BC: Fraction(2), CD: Fraction(2)}, NTU)
    assert set(verdict.violated) == {("3", AB), ("3", BC), ("3", CD)}


def test_verify_requires_monopoly_freedom():
    system = SetSystem.explicit(2, [{0, 1}])
    with pytest.raises(MonopolyDetected):
        verify_witness(system, as_costs([1, 1]), {0, 1}, {0: Fraction(1), 1: Fraction(1)})


@given(explicit_systems(max_n=8, max_sets=20, integer=False), st.data())
def test_pruning_is_sound(inst, data):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    for _ in range(10):
        bids = {e: data.draw(st.fractions(0, 8, max_denominator=3)) for e in S}
        for mode in (TU, NTU):
            pruned = verify_witness(system, costs, S, bids, mode, prune=True)
            full = verify_witness(system, costs, S, bids, mode, prune=False)
            assert pruned.ok == full.ok
            if not any(v[0] == "2" for v in full.violated):
                assert pruned.violated == full.violated


# --------------------------------------------------------------------------
# Separation oracle
# --------------------------------------------------------------------------


def test_separation_diamond():
    system, costs = named_instance("diamond-prop3i")
    S = {AB, BC, CD}
    one = lambda a, b, c: {AB: Fraction(a), BC: Fraction(b), CD: Fraction(c)}
    assert separation_oracle(system, costs, S, one(1, 1, 1)) is not None
    assert separation_oracle(system, costs, S, one(0, 0, 0)) is None
    assert separation_oracle(system, costs, S, one(1, 0, 1)) is None


def test_separation_returns_violating_path():
    system, costs = named_instance("diamond-prop3i")
    T = separation_oracle(system, costs, {AB, BC, CD}, {AB: Fraction(1), BC: Fraction(1), CD: Fraction(1)})
    assert T in ({AB, BD}, {AC, CD})


@given(explicit_systems(integer=False), st.data())
def test_separation_agrees_with_constraints(inst, data):
    system, costs = inst
    S = cheapest_feasible_set(system, costs)
    bids = {e: data.draw(st.fractions(0, 6, max_denominator=2)) for e in S}
    holds = all(c.holds(bids) for c in type2_constraints(system, costs, S, prune=False))
    assert (separation_oracle(system, costs, S, bids) is None) == holds


@given(st.data())
def test_path_separation_agrees_with_constraints(data):
    from frugality.generators import random_instance

    system, costs = random_instance("path", data.draw(st.integers(2, 8)), data.draw(st.integers(0, 10**6)))
    S = cheapest_feasible_set(system, costs)
    bids = {e: data.draw(st.fractions(0, 12, max_denominator=2)) for e in S}
    holds = all(c.holds(bids) for c in type2_constraints(system, costs, S, prune=False))
    T = separation_oracle(system, costs, S, bids)
    assert (T is None) == holds
    if T is not None:
        assert sum(bids[e] for e in S - T) > set_cost(costs, T - S)


# --------------------------------------------------------------------------
# Rationals and instance files
# --------------------------------------------------------------------------


def test_parse_rational():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(4) == 4
    assert fmt(Fraction(6, 3)) == "2" and fmt(Fraction(-1, 3)) == "-1/3"
    with pytest.raises((ValueError, TypeError)):
        parse_rational(0.5)
    with pytest.raises(ValueError):
        as_costs(["-1"])


@pytest.mark.parametrize("name", ["diamond-example3", "double-diamond", "choice-of-s", "clique-tail:5",
                                  "matroid:u32", "matroid:triangle"])
def test_json_round_trip(name):
    system, costs = named_instance(name)
    text = json.dumps(dump_instance(system, costs))
    system2, costs2, _ = load_instance(text)
    assert costs2 == costs
    assert system2.labels == system.labels
    assert set(enumerate_feasible(system2, minimal_only=True)) == set(enumerate_feasible(system, minimal_only=True))


def test_malformed_json_reports_position():
    with pytest.raises(InstanceFormatError) as info:
        load_instance('{"kind": "explicit",\n "costs": [1, }')
    assert info.value.line == 2 and info.value.column is not None


@pytest.mark.parametrize("doc", [
    '{"kind": "explicit", "costs": [0.5], "feasible_sets": [[0]]}',
    '{"kind": "nope", "costs": [1]}',
    '{"kind": "explicit", "feasible_sets": [[0]]}',
    '{"kind": "explicit", "agents": ["a"], "costs": [1, 2], "feasible_sets": [["a"]]}',
    '[1, 2]',
])
def test_malformed_documents(doc):
    with pytest.raises(InstanceFormatError):
        load_instance(doc)
