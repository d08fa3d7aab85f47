from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from frugality.errors import DimensionMismatch, InfeasibleBase, UnboundedFlow
from frugality.ratlp import INF, FlowNetwork, LinearProgram, WarmLP, augment_from, max_flow, solve_lp
from oracles import lp_optimum


def test_single_variable():
    res = solve_lp(LinearProgram(1, [1], [([1], "<=", 3)]))
    assert res.status == "Optimal" and res.value == 3 and res.point == (3,)


def test_diamond_max_program():
    rows = [([1, 1, 0], "<=", 1), ([0, 1, 1], "<=", 1)]
    res = solve_lp(LinearProgram(3, [1, 1, 1], rows))
    assert res.value == 2 and res.point == (1, 0, 1)


def test_infeasible_and_unbounded():
    assert solve_lp(LinearProgram(1, [1], [([1], "=", 1)], "min", [2])).status == "Infeasible"
    assert solve_lp(LinearProgram(1, [1], [([1], ">=", 1)], "max")).status == "Unbounded"


def test_dimension_mismatch_and_floats():
    with pytest.raises(DimensionMismatch):
        LinearProgram(2, [1], [])
    with pytest.raises(DimensionMismatch):
        LinearProgram(2, [1, 1], [([1], "<=", 1)])
    with pytest.raises(TypeError):
        solve_lp(LinearProgram(1, [0.5], [([1], "<=", 1)]))


def test_negative_lower_bounds_and_equalities():
    lp = LinearProgram(2, [1, 2], [([1, 1], "=", 1), ([1, -1], "<=", 3)], "min", [-5, -5])
    res = solve_lp(lp)
    assert res.value == lp_optimum(2, [1, 2], lp.rows, "min", [-5, -5]) == 0


@st.composite
def bounded_lps(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(0, 6))
    coef = st.integers(-3, 3)
    rows = []
    for _ in range(m):
        rows.append((draw(st.lists(coef, min_size=n, max_size=n)), draw(st.sampled_from(["<=", ">=", "="])),
                     draw(st.integers(-4, 8))))
    for i in range(n):  # box keeps the program bounded
        rows.append(([1 if j == i else 0 for j in range(n)], "<=", draw(st.integers(0, 6))))
    lower = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    return LinearProgram(n, draw(st.lists(coef, min_size=n, max_size=n)), rows,
                         draw(st.sampled_from(["min", "max"])), lower)


@given(bounded_lps())
def test_simplex_matches_vertex_enumeration(lp):
    res = solve_lp(lp)
    expected = lp_optimum(lp.num_vars, lp.objective, lp.rows, lp.sense, lp.lower_bounds)
    if expected is None:
        assert res.status == "Infeasible"
    else:
        assert res.status == "Optimal" and res.value == expected
        for coeffs, rel, rhs in lp.rows:
            lhs = sum(Fraction(a) * x for a, x in zip(coeffs, res.point))
            assert {"<=": lhs <= rhs, ">=": lhs >= rhs, "=": lhs == rhs}[rel]
        assert sum(Fraction(c) * x for c, x in zip(lp.objective, res.point)) == res.value


@st.composite
def packing_lps(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(1, 6))
    rows = [([draw(st.integers(0, 1)) for _ in range(n)], "<=", draw(st.integers(0, 6))) for _ in range(m)]
    rows += [([1 if j == i else 0 for j in range(n)], "<=", 9) for i in range(n)]
    lower = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    return LinearProgram(n, [1] * n, rows, draw(st.sampled_from(["min", "max"])), lower)


@given(packing_lps(), st.data())
def test_warm_tightening_matches_cold_solve(lp, data):
    warm = WarmLP.solve(lp)
    assume(isinstance(warm, WarmLP))
    order = data.draw(st.permutations(range(len(lp.rows))))
    fixed = []
    for k in order[: data.draw(st.integers(1, len(order)))]:
        fixed.append(k)
        rows = [(c, "=" if i in fixed else rel, rhs) for i, (c, rel, rhs) in enumerate(lp.rows)]
        cold = solve_lp(LinearProgram(lp.num_vars, lp.objective, rows, lp.sense, lp.lower_bounds))
        warm = warm.tighten(k)
        if warm is None:
            assert cold.status == "Infeasible"
            return
        assert cold.status == "Optimal" and warm.result.value == cold.value


# --------------------------------------------------------------------------
# Max flow
# --------------------------------------------------------------------------


def test_single_arc():
    assert max_flow(FlowNetwork(2, ((0, 1, Fraction(5)),), 0, 1)).value == 5


def test_single_edge_cover_network():
    net = FlowNetwork(4, ((2, 0, Fraction(1)), (0, 1, INF), (1, 3, Fraction(1))), 2, 3)
    res = max_flow(net)
    assert res.value == 1 == res.cut_capacity(net)


def test_augment_from_saturated_source_arcs():
    # source arcs raised to infinity: the sink arcs alone bound the flow
    net = FlowNetwork(4, ((2, 0, INF), (0, 1, INF), (1, 3, Fraction(3))), 2, 3)
    res = augment_from(net, [Fraction(1), Fraction(1), Fraction(1)])
    assert res.value == 3 and res.arc_flows[0] >= 1


def test_unbounded_and_infeasible_base():
    with pytest.raises(UnboundedFlow):
        max_flow(FlowNetwork(2, ((0, 1, INF),), 0, 1))
    net = FlowNetwork(2, ((0, 1, Fraction(1)),), 0, 1)
    with pytest.raises(InfeasibleBase):
        augment_from(net, [Fraction(2)])


@st.composite
def networks(draw):
    n = draw(st.integers(2, 6))
    arcs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, 9)),
                         max_size=14))
    arcs = tuple((u, v, Fraction(c)) for u, v, c in arcs if u != v)
    return FlowNetwork(n, arcs, 0, n - 1)


@given(networks())
def test_max_flow_matches_networkx(net):
    res = max_flow(net)
    g = nx.DiGraph()
    g.add_nodes_from(range(net.num_nodes))
    for u, v, c in net.arcs:
        if g.has_edge(u, v):
            g[u][v]["capacity"] += int(c)
        else:
            g.add_edge(u, v, capacity=int(c))
    assert res.value == nx.maximum_flow_value(g, 0, net.num_nodes - 1)
    assert res.value == res.cut_capacity(net)
    for (u, v, c), f in zip(net.arcs, res.arc_flows):
        assert 0 <= f <= c
    for x in range(1, net.num_nodes - 1):
        assert sum(f for (u, _, _), f in zip(net.arcs, res.arc_flows) if u == x) == \
            sum(f for (_, v, _), f in zip(net.arcs, res.arc_flows) if v == x)


@given(networks())
def test_augment_from_zero_is_max_flow(net):
    zero = [Fraction(0)] * len(net.arcs)
    assert augment_from(net, zero).value == max_flow(net).value


@given(networks(), st.data())
def test_augment_from_keeps_source_flows(net, data):
    base = max_flow(FlowNetwork(net.num_nodes, tuple((u, v, c / 2) for u, v, c in net.arcs), 0, net.sink))
    res = augment_from(net, base)
    assert res.value == max_flow(net).value
    for (u, _, _), before, after in zip(net.arcs, base.arc_flows, res.arc_flows):
        if u == net.source:
            assert after >= before
