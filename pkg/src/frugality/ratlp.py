"""Exact rational optimization: a dictionary simplex and a max-flow solver.

Both solvers work over :class:`fractions.Fraction` and never touch floating
point. The simplex uses Bland's smallest-index rule, so it terminates on
degenerate programs; the max-flow solver is Edmonds-Karp with a dedicated
infinite-capacity sentinel.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, InfeasibleBase, UnboundedFlow

__all__ = [
    "INF",
    "LinearProgram",
    "LPResult",
    "FlowNetwork",
    "FlowResult",
    "solve_lp",
    "WarmLP",
    "max_flow",
    "augment_from",
]

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating-point values are not accepted")
    return x if isinstance(x, Fraction) else Fraction(x)


# The simplex runs on gmpy2 rationals when available; results are always
# handed back as Fractions.
try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None

if _mpq is not None and not os.environ.get("FRUGALITY_PURE"):
    def _num(x):
        x = _frac(x)
        return _mpq(x.numerator, x.denominator)

    def _out(q) -> Fraction:
        return Fraction(int(q.numerator), int(q.denominator))
else:
    _num = _frac

    def _out(q) -> Fraction:
        return q


# --------------------------------------------------------------------------
# Linear programming
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` the objective ``c.x`` subject to ``rows`` and ``x >= lower_bounds``.

    Each row is ``(coefficients, relation, rhs)`` with relation one of
    ``"<="``, ``">="``, ``"="``.
    """

    num_vars: int
    objective: Sequence
    rows: Sequence = ()
    sense: str = "max"
    lower_bounds: Sequence | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if len(self.objective) != self.num_vars:
            raise DimensionMismatch("objective length differs from num_vars")
        if self.lower_bounds is not None and len(self.lower_bounds) != self.num_vars:
            raise DimensionMismatch("lower_bounds length differs from num_vars")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != self.num_vars:
                raise DimensionMismatch("row length differs from num_vars")
            if rel not in ("<=", ">=", "="):
                raise ValueError(f"unknown relation {rel!r}")


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Dictionary:
    """Chvátal-style dictionary: ``basic_i = const_i + sum_j a_ij * nonbasic_j``."""

    def __init__(self, rows, consts, nonbasic, basic):
        self.rows = rows          # list[list[Fraction]] over nonbasic positions
        self.consts = consts      # list[Fraction]
        self.nonbasic = nonbasic  # list[int] variable ids per column
        self.basic = basic        # list[int] variable ids per row
        self.obj = None
        self.obj_const = 0

    def pivot(self, r, col):
        row = self.rows[r]
        inv = 1 / row[col]
        # solve row r for the entering variable; column ``col`` becomes the leaving one
        new_row = [-x * inv for x in row]
        new_row[col] = inv
        new_const = -self.consts[r] * inv
        self.rows[r] = new_row
        self.consts[r] = new_const

        def substitute(target, f):
            for j, x in enumerate(new_row):
                if j == col:
                    target[j] = f * x
                elif x:
                    target[j] += f * x

        for i, other in enumerate(self.rows):
            if i != r and other[col] != 0:
                f = other[col]
                substitute(other, f)
                self.consts[i] += f * new_const
        if self.obj is not None and self.obj[col] != 0:
            f = self.obj[col]
            substitute(self.obj, f)
            self.obj_const += f * new_const
        self.basic[r], self.nonbasic[col] = self.nonbasic[col], self.basic[r]

    def run(self):
        """Maximize the current objective with Bland's rule."""
        while True:
            entering = None
            for j, d in enumerate(self.obj):
                if d > 0 and (entering is None or self.nonbasic[j] < self.nonbasic[entering]):
                    entering = j
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a < 0:
                    ratio = self.consts[i] / -a
                    key = (ratio, self.basic[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def _optimal_dictionary(lp: LinearProgram):
    """Run both simplex phases; returns ``(status, dictionary, lower bounds, slack ids)``.

    ``slack ids[k]`` is the variable id of the slack of row ``k`` when that row
    is a ``<=`` row, else None.
    """
    n = lp.num_vars
    zero, one = _num(0), _num(1)
    lb = [_num(x) for x in lp.lower_bounds] if lp.lower_bounds is not None else [zero] * n
    cost = [_num(x) for x in lp.objective]
    if lp.sense == "min":
        cost = [-x for x in cost]

    # shift x = lb + y and bring every row to "a.y <= r"
    le_rows = []
    slack_ids = []
    for coeffs, rel, rhs in lp.rows:
        a = [_num(x) for x in coeffs]
        r = _num(rhs) - sum((ai * li for ai, li in zip(a, lb)), zero)
        slack_ids.append(n + len(le_rows) if rel == "<=" else None)
        if rel in ("<=", "="):
            le_rows.append((a, r))
        if rel in (">=", "="):
            le_rows.append(([-x for x in a], -r))

    m = len(le_rows)
    aux = n + m  # id of the phase-one variable
    rows = [[-x for x in a] for a, _ in le_rows]
    consts = [r for _, r in le_rows]
    d = _Dictionary(rows, consts, list(range(n)), list(range(n, n + m)))

    if any(r < 0 for r in consts):
        for row in d.rows:
            row.append(one)
        d.nonbasic.append(aux)
        d.obj = [zero] * n + [-one]
        d.obj_const = zero
        worst = min(range(m), key=lambda i: (d.consts[i], d.basic[i]))
        d.pivot(worst, n)
        d.run()
        if d.obj_const < 0:
            return INFEASIBLE, None, lb, slack_ids
        if aux in d.basic:
            r = d.basic.index(aux)
            col = next((j for j, x in enumerate(d.rows[r]) if x != 0), None)
            if col is None:
                # the row is identically zero: a redundant constraint
                del d.rows[r], d.consts[r], d.basic[r]
            else:
                d.pivot(r, col)
        col = d.nonbasic.index(aux)
        for row in d.rows:
            del row[col]
        del d.nonbasic[col]

    # objective in terms of the current nonbasics
    d.obj = [zero] * len(d.nonbasic)
    d.obj_const = zero
    for var, c in enumerate(cost):
        if c == 0:
            continue
        if var in d.nonbasic:
            d.obj[d.nonbasic.index(var)] += c
        else:
            r = d.basic.index(var)
            d.obj_const += c * d.consts[r]
            for j, x in enumerate(d.rows[r]):
                d.obj[j] += c * x
    return d.run(), d, lb, slack_ids


def _read_point(lp, d, lb) -> LPResult:
    y = [_num(0)] * lp.num_vars
    for i, var in enumerate(d.basic):
        if var < lp.num_vars:
            y[var] = d.consts[i]
    point = tuple(_out(li + yi) for li, yi in zip(lb, y))
    value = sum((_frac(c) * x for c, x in zip(lp.objective, point)), Fraction(0))
    return LPResult(OPTIMAL, value, point)


def solve_lp(lp: LinearProgram) -> LPResult:
    status, d, lb, _ = _optimal_dictionary(lp)
    if status != OPTIMAL:
        return LPResult(status)
    return _read_point(lp, d, lb)


class WarmLP:
    """An optimal simplex dictionary whose ``<=`` rows can be forced to equality.

    ``tighten(k)`` returns the optimum of the program with row ``k`` turned
    into an equality, reached from the current basis by dual simplex pivots,
    or None when that program is infeasible. The receiver is not modified.
    """

    def __init__(self, lp, d, lb, slack_ids, fixed=frozenset()):
        self.lp, self._d, self._lb, self._slack, self.fixed = lp, d, lb, slack_ids, fixed
        self.result = _read_point(lp, d, lb)

    @classmethod
    def solve(cls, lp: LinearProgram) -> "WarmLP | LPResult":
        """Optimal warm state, or the non-optimal LPResult."""
        status, d, lb, slack_ids = _optimal_dictionary(lp)
        if status != OPTIMAL:
            return LPResult(status)
        return cls(lp, d, lb, slack_ids)

    def tighten(self, k: int) -> "WarmLP | None":
        var = self._slack[k]
        if var is None:
            raise ValueError(f"row {k} is not a '<=' row")
        if k in self.fixed:
            return self
        src = self._d
        d = _Dictionary([list(r) for r in src.rows], list(src.consts), list(src.nonbasic), list(src.basic))
        d.obj, d.obj_const = list(src.obj), src.obj_const
        if var in d.basic:
            r = d.basic.index(var)
            col = _dual_entering(d, r, decreasing=True)
            if col is None and d.consts[r] == 0:
                col = _dual_entering(d, r, decreasing=False)
            if col is not None:
                d.pivot(r, col)
            elif d.consts[r] != 0:
                return None
            else:
                # slack is identically zero already
                del d.rows[r], d.consts[r], d.basic[r]
        if var in d.nonbasic:
            col = d.nonbasic.index(var)
            for row in d.rows:
                del row[col]
            del d.obj[col]
            del d.nonbasic[col]
        if not _dual_simplex(d):
            return None
        return WarmLP(self.lp, d, self._lb, self._slack, self.fixed | {k})


def _dual_entering(d, r, decreasing):
    """Entering column for a dual pivot on row ``r`` keeping reduced costs <= 0.

    ``decreasing`` asks to lower the basic variable of row ``r`` (its
    coefficient must be negative); otherwise to raise it.
    """
    best = None
    for j, a in enumerate(d.rows[r]):
        if (a < 0) if decreasing else (a > 0):
            key = (abs(d.obj[j] / a), d.nonbasic[j])
            if best is None or key < best[0]:
                best = (key, j)
    return None if best is None else best[1]


def _dual_simplex(d) -> bool:
    """Restore primal feasibility with dual pivots; False if infeasible."""
    while True:
        neg = [i for i, c in enumerate(d.consts) if c < 0]
        if not neg:
            return True
        r = min(neg, key=lambda i: d.basic[i])
        col = _dual_entering(d, r, decreasing=False)
        if col is None:
            return False
        d.pivot(r, col)


# --------------------------------------------------------------------------
# Max flow
# --------------------------------------------------------------------------


class _Infinity:
    """Infinite capacity. Absorbs addition and subtraction of finite values."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("frugality.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("INF - INF is undefined")
        return self


INF = _Infinity()


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network on nodes ``0..num_nodes-1``; arcs are ``(u, v, capacity)``."""

    num_nodes: int
    arcs: tuple
    source: int
    sink: int

    def __post_init__(self):
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for u, v, cap in self.arcs:
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise ValueError(f"arc ({u}, {v}) has an unknown endpoint")
            if cap is not INF and cap < 0:
                raise ValueError("capacities must be nonnegative")

    def capacity(self, i):
        return self.arcs[i][2]


@dataclass(frozen=True)
class FlowResult:
    value: Fraction
    arc_flows: tuple[Fraction, ...]
    source_side: frozenset = field(default_factory=frozenset)

    def sink_side(self, net: FlowNetwork) -> frozenset:
        return frozenset(range(net.num_nodes)) - self.source_side

    def cut_capacity(self, net: FlowNetwork):
        total = Fraction(0)
        for u, v, cap in net.arcs:
            if u in self.source_side and v not in self.source_side:
                total = total + cap
        return total


def _residual_search(net, flows, adj):
    """BFS for a shortest augmenting path; returns parent arcs or the reached set."""
    parent = {net.source: None}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for idx, forward in adj[u]:
            a, b, cap = net.arcs[idx]
            if forward:
                nxt = b
                room = cap - flows[idx] if cap is not INF else INF
            else:
                nxt = a
                room = flows[idx]
            if nxt in parent or not (room is INF or room > 0):
                continue
            parent[nxt] = (idx, forward)
            if nxt == net.sink:
                return parent, True
            queue.append(nxt)
    return parent, False


def _augment(net: FlowNetwork, flows: list) -> FlowResult:
    adj = [[] for _ in range(net.num_nodes)]
    for idx, (u, v, _) in enumerate(net.arcs):
        adj[u].append((idx, True))
        adj[v].append((idx, False))
    while True:
        parent, found = _residual_search(net, flows, adj)
        if not found:
            break
        path = []
        node = net.sink
        bottleneck = INF
        while node != net.source:
            idx, forward = parent[node]
            a, b, cap = net.arcs[idx]
            room = (INF if cap is INF else cap - flows[idx]) if forward else flows[idx]
            bottleneck = room if bottleneck is INF else (bottleneck if room is INF else min(bottleneck, room))
            path.append((idx, forward))
            node = a if forward else b
        if bottleneck is INF:
            raise UnboundedFlow("an s-t path of infinite-capacity arcs exists")
        for idx, forward in path:
            flows[idx] += bottleneck if forward else -bottleneck
    value = Fraction(0)
    for idx, (u, v, _) in enumerate(net.arcs):
        if u == net.source:
            value += flows[idx]
        if v == net.source:
            value -= flows[idx]
    return FlowResult(value, tuple(flows), frozenset(parent))


def max_flow(net: FlowNetwork) -> FlowResult:
    """Maximum s-t flow and a minimum cut (source side = residual reach of s)."""
    return _augment(net, [Fraction(0)] * len(net.arcs))


def augment_from(net: FlowNetwork, base) -> FlowResult:
    """Grow a feasible flow into a maximum one by shortest augmenting paths.

    Augmenting paths never re-enter the source, so flow on arcs leaving the
    source never decreases.
    """
    flows = list(base.arc_flows if isinstance(base, FlowResult) else base)
    if len(flows) != len(net.arcs):
        raise InfeasibleBase("base flow has the wrong number of arcs")
    flows = [_frac(f) for f in flows]
    balance = [Fraction(0)] * net.num_nodes
    for idx, (u, v, cap) in enumerate(net.arcs):
        f = flows[idx]
        if f < 0 or (cap is not INF and f > cap):
            raise InfeasibleBase(f"arc {idx} violates its capacity")
        balance[u] -= f
        balance[v] += f
    for node, bal in enumerate(balance):
        if node not in (net.source, net.sink) and bal != 0:
            raise InfeasibleBase(f"flow is not conserved at node {node}")
    return _augment(net, flows)
