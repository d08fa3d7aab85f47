import os
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from frugality.core import SetSystem, is_monopoly_free
from frugality.errors import NoFeasibleSet

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def rationals(max_num=10, max_den=4):
    return st.builds(Fraction, st.integers(0, max_num), st.integers(1, max_den))


@st.composite
def explicit_systems(draw, max_n=6, max_sets=8, max_cost=4, integer=True):
    """Monopoly-free explicit systems with nonnegative costs."""
    n = draw(st.integers(2, max_n))
    subsets = st.frozensets(st.integers(0, n - 1), min_size=1, max_size=n)
    sets = draw(st.lists(subsets, min_size=2, max_size=max_sets, unique=True))
    system = SetSystem.explicit(n, sets)
    try:
        ok = is_monopoly_free(system)
    except NoFeasibleSet:
        ok = False
    from hypothesis import assume

    assume(ok)
    cost = st.integers(0, max_cost).map(Fraction) if integer else rationals(max_cost)
    costs = tuple(draw(st.lists(cost, min_size=n, max_size=n)))
    return system, costs


@st.composite
def graphs(draw, min_n=2, max_n=7, max_degree=None):
    """Simple undirected graphs with at least one edge and no isolated vertex."""
    from frugality.core import Graph

    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    from hypothesis import assume

    deg = [0] * n
    for u, v in chosen:
        deg[u] += 1
        deg[v] += 1
    assume(all(deg))
    if max_degree is not None:
        assume(max(deg) <= max_degree)
    return Graph.build([f"v{i}" for i in range(n)], sorted(chosen))


@st.composite
def vc_instances(draw, max_n=7, max_degree=None, max_cost=6):
    g = draw(graphs(max_n=max_n, max_degree=max_degree))
    costs = tuple(draw(st.lists(rationals(max_cost, 3), min_size=g.num_vertices, max_size=g.num_vertices)))
    return SetSystem.vertex_cover(g), costs
