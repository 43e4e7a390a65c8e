"""A small dense two-phase simplex method with Bland's anti-cycling rule.

Solves ``min cost @ x`` subject to ``A_ge @ x >= b_ge``, ``A_eq @ x == b_eq`` and
``x >= 0``. The tableau runs either in double precision or, with
``exact=True``, over :class:`fractions.Fraction` (numpy object arrays), in
which case every comparison is exact.

Sizes here are tiny (a dozen variables, a few thousand rows at most), so the
method favours determinism over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from fractions import Fraction

import numpy as np

from .errors import EmptyPolytope, Unbounded

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
# floats are snapped to the simplest rational this close to them
SNAP_TOL = Fraction(1, 10**12)


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    pivots: int


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in ``[lo, hi]`` (``0 <= lo <= hi``)."""
    n = math.floor(lo)
    if n == lo:
        return Fraction(n)
    if n + 1 <= hi:
        return Fraction(n + 1)
    return n + 1 / _simplest_between(1 / (hi - n), 1 / (lo - n))


def to_fraction(v) -> Fraction:
    """Exact rational for a number.

    Floats become the simplest rational within ``1e-12``, which undoes the
    round-off of float sums: ``0.1 + 0.2`` maps to ``3/10``.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    x = Fraction(float(v))
    if x < 0:
        return -_simplest_between(max(-x - SNAP_TOL, Fraction(0)), -x + SNAP_TOL)
    return _simplest_between(max(x - SNAP_TOL, Fraction(0)), x + SNAP_TOL)


def _as_array(a, exact: bool, ndim: int, ncols: int | None = None):
    if a is None:
        shape = (0, ncols) if ndim == 2 else (0,)
        return np.zeros(shape, dtype=object if exact else float)
    if exact:
        arr = np.array(a, dtype=object)
        return np.vectorize(to_fraction, otypes=[object])(arr) if arr.size else arr.reshape(
            (0, ncols) if ndim == 2 else (0,))
    arr = np.asarray(a, dtype=float)
    if arr.size == 0:
        arr = arr.reshape((0, ncols) if ndim == 2 else (0,))
    return arr


class _Tableau:
    def __init__(self, T, basis, exact):
        self.T = T
        self.basis = basis
        self.exact = exact
        self.eps = 0 if exact else PIVOT_TOL
        self.pivots = 0

    def pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.pivots += 1

    def run(self, ncols):
        """Bland's rule on the last row (reduced costs); columns ``< ncols`` may enter."""
        T, eps = self.T, self.eps
        while True:
            cand = np.flatnonzero(T[-1, :ncols] < -eps)
            if cand.size == 0:
                return
            entering = int(cand[0])
            col = T[:-1, entering]
            rows = np.flatnonzero(col > eps)
            if rows.size == 0:
                raise Unbounded("objective is unbounded below")
            ratios = T[rows, -1] / col[rows]
            rmin = ratios.min()
            if self.exact:
                ties = rows[ratios == rmin]
            else:
                ties = rows[ratios <= rmin + 1e-13]
            best = min(ties, key=lambda i: self.basis[i])
            self.pivot(int(best), entering)


def linprog_min(cost, A_ge=None, b_ge=None, A_eq=None, b_eq=None, exact: bool = False) -> LPResult:
    """Minimise ``cost @ x`` over ``{x >= 0 : A_ge x >= b_ge, A_eq x = b_eq}``.

    Raises :class:`EmptyPolytope` when infeasible and :class:`Unbounded` when
    the objective has no lower bound.
    """
    cost = _as_array(cost, exact, 1)
    nv = cost.shape[0]
    A_ge = _as_array(A_ge, exact, 2, nv)
    b_ge = _as_array(b_ge, exact, 1)
    A_eq = _as_array(A_eq, exact, 2, nv)
    b_eq = _as_array(b_eq, exact, 1)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    dtype = object if exact else float

    # rows: A_ge x - s = b_ge ; A_eq x = b_eq.  Rows with b_ge <= 0 are negated
    # so their slack starts basic; all others get an artificial variable.
    m_ge, m_eq = A_ge.shape[0], A_eq.shape[0]
    m = m_ge + m_eq
    ns = m_ge
    rows: list = []
    rhs: list = []
    slack_sign: list = []
    for i in range(m_ge):
        if b_ge[i] <= 0:
            rows.append(-A_ge[i])
            rhs.append(-b_ge[i])
            slack_sign.append(one)
        else:
            rows.append(A_ge[i])
            rhs.append(b_ge[i])
            slack_sign.append(-one)
    for i in range(m_eq):
        if b_eq[i] < 0:
            rows.append(-A_eq[i])
            rhs.append(-b_eq[i])
        else:
            rows.append(A_eq[i])
            rhs.append(b_eq[i])
    need_art = [i for i in range(m) if i >= m_ge or slack_sign[i] < 0]
    na = len(need_art)
    N = nv + ns + na
    T = np.full((m + 1, N + 1), zero, dtype=dtype)
    basis = [0] * m
    for i in range(m):
        T[i, :nv] = rows[i]
        T[i, -1] = rhs[i]
        if i < m_ge:
            T[i, nv + i] = slack_sign[i]
            if slack_sign[i] > 0:
                basis[i] = nv + i
    for k, i in enumerate(need_art):
        T[i, nv + ns + k] = one
        basis[i] = nv + ns + k

    tab = _Tableau(T, basis, exact)
    if na:
        # phase 1: minimise the sum of artificials
        T[-1, :] = zero
        T[-1, nv + ns:N] = one
        for i in need_art:
            T[-1] -= T[i]
        tab.run(N)
        infeas = -T[-1, -1]
        if infeas > (0 if exact else FEAS_TOL):
            raise EmptyPolytope(f"infeasible (phase-one residual {float(infeas):.3g})")
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if basis[i] >= nv + ns:
                row = T[i, :nv + ns]
                cand = [j for j in range(nv + ns) if abs(row[j]) > tab.eps]
                if cand:
                    tab.pivot(i, cand[0])
                    keep.append(i)
            else:
                keep.append(i)
        T = np.concatenate([T[keep][:, :nv + ns], T[keep][:, -1:]], axis=1)
        T = np.concatenate([T, np.full((1, nv + ns + 1), zero, dtype=dtype)], axis=0)
        basis = [basis[i] for i in keep]
        tab = _Tableau(T, basis, exact)
        tab.pivots = 0
    # phase 2
    ncols = nv + ns
    T = tab.T
    T[-1, :] = zero
    T[-1, :nv] = cost
    for i, bv in enumerate(tab.basis):
        if bv < nv and cost[bv] != 0:
            T[-1] -= cost[bv] * T[i]
    tab.run(ncols)
    x = np.full(nv, zero, dtype=dtype)
    for i, bv in enumerate(tab.basis):
        if bv < nv:
            x[bv] = T[i, -1]
    value = -T[-1, -1]
    return LPResult(value, x, tab.pivots)
