"""Exact ground truth by linear programming over the credal polytope.

The polytope lives on atom probabilities ``p`` and collects

* the simplex ``p >= 0, sum(p) = 1``,
* one row ``p(x) >= b(x)`` per subset with a positive bound,
* one row ``p(x & y) - c(x, y) p(y) >= 0`` per generating rule value.

Every quantity the engines approximate, from tight lower probabilities to
lower conditional probabilities, is answered here exactly by small LPs
solved with the bundled simplex method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ._dense import TOL
from .errors import (
    AntecedentImpossible,
    EmptyAntecedent,
    EmptyPolytope,
    FrameMismatch,
    FrameTooLarge,
)
from .evidence import ENVELOPE, SupportFunction
from .interval import ConsistencyReport, Violation
from .lattice import Frame, PropSet
from .rules import RuleBase, generators
from .simplex import linprog_min, to_fraction

MAX_ATOMS = 12
EXACT_MAX_ATOMS = 6


@dataclass(frozen=True)
class ProbabilityVector:
    frame: Frame
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != self.frame.n:
            raise ValueError(f"need {self.frame.n} weights, got {len(self.weights)}")
        if min(self.weights) < -TOL or abs(sum(self.weights) - 1.0) > TOL:
            raise ValueError("weights must be nonnegative and sum to 1")

    def prob(self, x: PropSet) -> float:
        return sum(w for i, w in enumerate(self.weights) if x.mask >> i & 1)


@dataclass(eq=False)
class CredalPolytope:
    frame: Frame
    bounds: tuple[tuple[int, float], ...]
    rules: tuple[tuple[int, int, float], ...]
    _rows: dict = field(default_factory=dict, repr=False)
    _empty: dict = field(default_factory=dict, repr=False)

    def rows(self, exact: bool = False):
        """``(A, r)`` with every constraint written ``A @ p >= r``."""
        got = self._rows.get(exact)
        if got is None:
            n = self.frame.n
            conv = to_fraction if exact else float
            zero, one = conv(0), conv(1)
            A, r = [], []
            for x, v in self.bounds:
                A.append([one if x >> i & 1 else zero for i in range(n)])
                r.append(conv(v))
            for x, y, v in self.rules:
                cv = conv(v)
                A.append([(one if x >> i & 1 else zero) - (cv if y >> i & 1 else zero)
                          for i in range(n)])
                r.append(zero)
            dtype = object if exact else float
            got = (np.array(A, dtype=dtype).reshape(len(A), n), np.array(r, dtype=dtype))
            self._rows[exact] = got
        return got

    def solution(self, exact: bool = False) -> Optional[ProbabilityVector]:
        """Some feasible point, or ``None`` when the polytope is empty."""
        n = self.frame.n
        A, r = self.rows(exact)
        try:
            res = linprog_min(np.zeros(n), A, r, np.ones((1, n)), [1], exact=exact)
        except EmptyPolytope:
            return None
        return ProbabilityVector(self.frame, tuple(float(w) for w in res.x))

    def is_empty(self, exact: bool = False) -> bool:
        if exact not in self._empty:
            self._empty[exact] = self.solution(exact) is None
        return self._empty[exact]

    def contains(self, p: ProbabilityVector, tol: float = TOL) -> bool:
        A, r = self.rows(False)
        w = np.asarray(p.weights)
        return bool(np.all(A @ w >= r - tol))


def _check_exact(frame: Frame, exact: bool):
    if exact and frame.n > EXACT_MAX_ATOMS:
        raise FrameTooLarge(f"exact mode supports at most {EXACT_MAX_ATOMS} atoms")


def build_polytope(b: SupportFunction, c: RuleBase | None = None) -> CredalPolytope:
    frame = b.frame
    if frame.n > MAX_ATOMS:
        raise FrameTooLarge(f"the oracle supports at most {MAX_ATOMS} atoms")
    full = frame.full_mask
    bounds = tuple((x, float(b.values[x])) for x in range(1, full) if b.values[x] > 0.0)
    rules = []
    if c is not None:
        if c.frame != frame:
            raise FrameMismatch(f"{c.frame!r} vs {frame!r}")
        for y in c.antecedents:
            rules.extend((x, y, v) for x, v in generators(c, y))
    return CredalPolytope(frame, bounds, tuple(rules))


def _indicator(mask: int, n: int, exact: bool):
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return np.array([one if mask >> i & 1 else zero for i in range(n)],
                    dtype=object if exact else float)


def min_prob(poly: CredalPolytope, x: PropSet, exact: bool = False):
    """``min p(x)`` over the polytope; a :class:`Fraction` in exact mode."""
    if x.frame != poly.frame:
        raise FrameMismatch("subset and polytope frames differ")
    _check_exact(poly.frame, exact)
    n = poly.frame.n
    if poly.is_empty(exact):
        raise EmptyPolytope("the credal polytope is empty")
    if x.is_empty:
        return Fraction(0) if exact else 0.0
    if x.is_full:
        return Fraction(1) if exact else 1.0
    A, r = poly.rows(exact)
    res = linprog_min(_indicator(x.mask, n, exact), A, r,
                      np.ones((1, n), dtype=object if exact else float),
                      [Fraction(1) if exact else 1.0], exact=exact)
    return res.value if exact else float(res.value)


def max_prob(poly: CredalPolytope, x: PropSet, exact: bool = False):
    return 1 - min_prob(poly, ~x, exact)


def min_conditional(poly: CredalPolytope, x: PropSet, y: PropSet, exact: bool = False):
    """Infimum of ``p(x & y) / p(y)`` over feasible ``p`` with ``p(y) > 0``.

    Homogenised as one LP: with ``q = p / p(y)`` and ``t = 1 / p(y)``, minimise
    ``q(x & y)`` subject to ``q(y) = 1``, ``sum(q) = t`` and every original row
    scaled by ``t``.
    """
    if x.frame != poly.frame or y.frame != poly.frame:
        raise FrameMismatch("subset and polytope frames differ")
    if y.is_empty:
        raise EmptyAntecedent("cannot condition on the empty set")
    _check_exact(poly.frame, exact)
    if poly.is_empty(exact):
        raise EmptyPolytope("the credal polytope is empty")
    n = poly.frame.n
    A, r = poly.rows(exact)
    dtype = object if exact else float
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    A_h = np.concatenate([A, -r.reshape(-1, 1)], axis=1) if A.shape[0] else np.zeros((0, n + 1), dtype)
    A_eq = np.array([list(_indicator(y.mask, n, exact)) + [zero],
                     [one] * n + [-one]], dtype=dtype)
    cost = np.concatenate([_indicator((x & y).mask, n, exact), np.array([zero], dtype=dtype)])
    try:
        res = linprog_min(cost, A_h, np.zeros(A_h.shape[0], dtype=dtype), A_eq,
                          np.array([one, zero], dtype=dtype), exact=exact)
    except EmptyPolytope:
        raise AntecedentImpossible(f"p({y}) = 0 throughout the polytope") from None
    return res.value if exact else float(res.value)


def is_envelope(b: SupportFunction, tol: float = TOL) -> bool:
    """True iff every bound of ``b`` is attained by some ``p >= b``."""
    poly = build_polytope(b)
    if poly.is_empty():
        return False
    for x in range(1, b.frame.full_mask):
        if min_prob(poly, PropSet(b.frame, x)) > b.values[x] + tol:
            return False
    return True


def check_consistency_definition(b: SupportFunction, c: RuleBase, *, exact: bool = False,
                                 tol: float = TOL) -> ConsistencyReport:
    """Compare ``min p(x | y)`` over ``{p >= b}`` with ``c(x, y)`` for every rule pair."""
    if b.frame != c.frame:
        raise FrameMismatch(f"{b.frame!r} vs {c.frame!r}")
    poly = build_polytope(b)
    if poly.is_empty(exact):
        raise EmptyPolytope("the prior bounds admit no probability")
    frame = b.frame
    out = []
    for y in c.antecedents:
        table = c.tables[y]
        ys = PropSet(frame, y)
        for x in range(y + 1):
            if x & ~y or x == y or table[x] <= 0.0:
                continue
            try:
                got = min_conditional(poly, PropSet(frame, x), ys, exact)
            except AntecedentImpossible:
                break
            if got < table[x] - tol:
                out.append(Violation(PropSet(frame, x), ys, float(table[x]), float(got)))
    return ConsistencyReport.from_violations(out)


def natural_extension(b: SupportFunction, c: RuleBase | None = None, *,
                      exact: bool = False) -> SupportFunction:
    """Tightest lower probabilities implied jointly by ``b`` and ``c``."""
    poly = build_polytope(b, c)
    _check_exact(b.frame, exact)
    if poly.is_empty(exact):
        raise EmptyPolytope("prior bounds and rules admit no probability")
    frame = b.frame
    v = np.array(b.values)
    for x in range(1, frame.full_mask):
        v[x] = max(v[x], float(min_prob(poly, PropSet(frame, x), exact)))
    return SupportFunction(frame, v, ENVELOPE)
