"""Interval-probability engines: the generalised Bayes bound, the optimistic
(Dempster-conditioning) regime, the unrestricted general regime, and a cheap
coherence closure.

All refinements are Kleene iterations of monotone operators on the dense
bound array: synchronous sweeps over every subset, stopping once the largest
change drops below ``1e-12``. Each sweep takes a max over all constraints, so
the result does not depend on rule order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _dense
from ._dense import EPS, TOL
from .errors import (
    CertainComplement,
    EmptyAntecedent,
    EmptyInterval,
    FrameMismatch,
    FrameTooLarge,
    Inconsistent,
    NonConvergence,
    NotABeliefFunction,
)
from .evidence import BELIEF, RAW, SupportFunction
from .lattice import PropSet
from .rules import RuleBase

CLOSURE_MAX_ATOMS = 12
MIN_SWEEP_CAP = 10_000


@dataclass(frozen=True)
class ProbabilityInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper + EPS:
            raise EmptyInterval(f"[{self.lower}, {self.upper}] is empty")

    def __contains__(self, p: float) -> bool:
        return self.lower - EPS <= p <= self.upper + EPS


@dataclass(frozen=True)
class Violation:
    x: PropSet
    y: PropSet
    required: float
    achieved: float


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    violations: tuple[Violation, ...] = field(default=())

    @classmethod
    def from_violations(cls, violations) -> ConsistencyReport:
        violations = tuple(violations)
        return cls(not violations, violations)

    def pairs(self) -> set[tuple[int, int]]:
        return {(v.x.mask, v.y.mask) for v in self.violations}


def _check_inputs(b: SupportFunction, c: RuleBase):
    if b.frame != c.frame:
        raise FrameMismatch(f"{b.frame!r} vs {c.frame!r}")


def _check_coherent(v: np.ndarray, full: int, tol: float):
    idx = _dense.indices(full.bit_length())
    excess = v + v[full ^ idx] - 1.0
    k = int(np.argmax(excess))
    if excess[k] > tol or v.max() > 1.0 + tol:
        raise Inconsistent(
            f"bounds on subset {k:#x} and its complement sum to {1.0 + excess[k]:.9g} > 1"
        )


def _raised(old: np.ndarray, new: np.ndarray) -> np.ndarray:
    # round-off sized raises are dropped so exact identities stay exact
    return np.where(new > old + EPS, new, old)


def default_sweeps(n: int) -> int:
    # some fixpoints are only reached geometrically, so the cap has a floor
    return max(10 * (1 << n), MIN_SWEEP_CAP)


def _finish(b: SupportFunction, v: np.ndarray, sweeps: int, full_output: bool):
    if np.array_equal(v, b.values):
        out = b
    else:
        out = SupportFunction(b.frame, np.clip(v, 0.0, 1.0), RAW)
    return (out, sweeps) if full_output else out


# -- generalised Bayes identity ---------------------------------------------

def alpha_interval(b: SupportFunction, y: PropSet) -> ProbabilityInterval:
    """Admissible values of ``p(y)``: ``[b(y), 1 - b(not y)]``."""
    return ProbabilityInterval(b[y], 1.0 - b[~y])


def bayes_lower_bound(b: SupportFunction, c: RuleBase, x: PropSet, y: PropSet) -> float:
    """``min over alpha`` of ``c(x, y) alpha + c(x, not y) (1 - alpha)``.

    ``alpha`` ranges over ``[b(y), 1 - b(not y)]``; the minimum of a linear
    function sits at one endpoint. For an unconditional rule (``y`` the whole
    frame) the interval collapses to ``alpha = 1`` and the bound is ``c(x, y)``.
    """
    _check_inputs(b, c)
    if y.is_empty:
        raise EmptyAntecedent("the Bayes bound needs a nonempty antecedent")
    if y.is_full:
        return c.value(x.mask, y.mask)
    lo, hi = b[y], 1.0 - b[~y]
    if lo > hi + TOL:
        raise EmptyInterval(f"b({y}) = {lo} exceeds 1 - b(not y) = {hi}")
    cy = c.value(x.mask, y.mask)
    cn = c.value(x.mask, (~y).mask)
    if cy >= cn:
        return cy * lo + cn * (1.0 - lo)
    return cy * hi + cn * (1.0 - hi)


def _bayes_vector(v: np.ndarray, c: RuleBase, y: int, full: int, tol: float) -> np.ndarray:
    if y == full:
        return c.dense(full)
    yb = full ^ y
    lo, hi = v[y], 1.0 - v[yb]
    if lo > hi + tol:
        raise EmptyInterval(f"interval for p of subset {y:#x} is empty: [{lo}, {hi}]")
    hi = max(hi, lo)
    cy, cn = c.dense(y), c.dense(yb)
    return np.minimum(cy * lo + cn * (1.0 - lo), cy * hi + cn * (1.0 - hi))


def check_bayes(b: SupportFunction, c: RuleBase, tol: float = TOL) -> ConsistencyReport:
    """Every pair ``(x, y)`` where ``b(x)`` falls below the Bayes bound."""
    _check_inputs(b, c)
    frame, full, v = b.frame, b.frame.full_mask, b.values
    ys = list(range(1, full))
    if full in c.antecedents:
        ys.append(full)
    out = []
    for y in ys:
        bound = _bayes_vector(v, c, y, full, tol)
        for x in np.nonzero(v < bound - tol)[0]:
            out.append(Violation(PropSet(frame, int(x)), PropSet(frame, y),
                                 float(bound[x]), float(v[x])))
    return ConsistencyReport.from_violations(out)


def _bayes_antecedents(c: RuleBase, full: int) -> list[int]:
    # y and its complement give the same bound, so one of each pair suffices
    ys = set()
    for y in c.antecedents:
        if y == full:
            ys.add(full)
        else:
            ys.add(min(y, full ^ y))
    return sorted(ys)


def refine_bayes(b: SupportFunction, c: RuleBase, *, max_sweeps: int | None = None,
                 tol: float = TOL, full_output: bool = False):
    """Least fixpoint of ``b(x) <- max(b(x), Bayes bounds)`` with monotone closure."""
    _check_inputs(b, c)
    full = b.frame.full_mask
    ys = _bayes_antecedents(c, full)
    if not ys:
        return _finish(b, b.values, 0, full_output)
    max_sweeps = default_sweeps(b.frame.n) if max_sweeps is None else max_sweeps
    v = np.array(b.values)
    for sweep in range(1, max_sweeps + 1):
        new = v.copy()
        try:
            for y in ys:
                np.maximum(new, _bayes_vector(v, c, y, full, tol), out=new)
        except EmptyInterval as exc:
            raise Inconsistent(str(exc)) from exc
        new = _raised(v, _dense.monotone_closure(new))
        _check_coherent(new, full, tol)
        delta = float(np.max(new - v))
        v = new
        if delta < EPS:
            break
    else:
        raise NonConvergence(f"Bayes refinement still moving after {max_sweeps} sweeps")
    return _finish(b, v, sweep, full_output)


# -- optimistic regime -------------------------------------------------------

def optimistic_lower_conditional(b: SupportFunction, x: PropSet, y: PropSet) -> float:
    """``(b(x | not y) - b(not y)) / (1 - b(not y))``, i.e. Dempster conditioning on ``y``."""
    if x.frame != b.frame or y.frame != b.frame:
        raise FrameMismatch("subset and support function frames differ")
    if y.is_empty:
        raise EmptyAntecedent("cannot condition on the empty set")
    yb = ~y
    byb = b[yb]
    if byb >= 1.0 - EPS:
        raise CertainComplement(f"b(not {y}) = {byb}")
    return (b[x | yb] - byb) / (1.0 - byb)


def check_optimistic(b: SupportFunction, c: RuleBase, tol: float = TOL) -> ConsistencyReport:
    """Pairs violating the optimistic consistency condition.

    Only antecedents with rules can fail (trivial bounds are always met), and
    the condition depends on ``x`` only through ``x & y``, so violations are
    reported with that canonical consequent.
    """
    _check_inputs(b, c)
    frame, full, v = b.frame, b.frame.full_mask, b.values
    out = []
    for y in c.antecedents:
        yb = full ^ y
        byb = v[yb]
        if byb >= 1.0 - EPS:
            continue
        xs = _dense.submasks(y, frame.n)
        lhs = (v[xs | yb] - byb) / (1.0 - byb)
        req = c.tables[y][xs]
        for i in np.nonzero(lhs < req - tol)[0]:
            out.append(Violation(PropSet(frame, int(xs[i])), PropSet(frame, y),
                                 float(req[i]), float(lhs[i])))
    return ConsistencyReport.from_violations(out)


def _optimistic_sweeps(v, c, frame, max_sweeps, tol):
    full, n = frame.full_mask, frame.n
    for sweep in range(1, max_sweeps + 1):
        new = v.copy()
        for y in c.antecedents:
            yb = full ^ y
            byb = v[yb]
            if byb >= 1.0 - EPS:
                continue
            xs = _dense.submasks(y, n)
            cv = c.tables[y][xs]
            zs = xs | yb
            new[zs] = np.maximum(new[zs], byb * (1.0 - cv) + cv)
        new = _raised(v, _dense.monotone_closure(new))
        _check_coherent(new, full, tol)
        delta = float(np.max(new - v))
        v = new
        if delta < EPS:
            return v, sweep
    raise NonConvergence(f"optimistic refinement still moving after {max_sweeps} sweeps")


def refine_optimistic(b: SupportFunction, c: RuleBase, *, max_sweeps: int | None = None,
                      tol: float = TOL, full_output: bool = False):
    """Least specific bounds above ``b`` that satisfy optimistic consistency.

    Rearranging the consistency condition for the pair ``(x, y)`` with
    ``z = x | not y`` gives ``b(z) >= b(not y) (1 - c(z & y, y)) + c(z & y, y)``
    for every antecedent ``y`` containing the complement of ``z``.
    """
    _check_inputs(b, c)
    if c.is_vacuous():
        return _finish(b, b.values, 0, full_output)
    max_sweeps = default_sweeps(b.frame.n) if max_sweeps is None else max_sweeps
    v, sweeps = _optimistic_sweeps(np.array(b.values), c, b.frame, max_sweeps, tol)
    return _finish(b, v, sweeps, full_output)


# -- general regime ----------------------------------------------------------

def _require_belief(b: SupportFunction):
    if b.kind != BELIEF and _dense.mobius(b.values).min() < -TOL:
        raise NotABeliefFunction("the general regime is exact only for belief functions")


def _general_lhs(num: np.ndarray, pl: np.ndarray) -> np.ndarray:
    # pl = plausibility of (y minus x); when it vanishes every admissible p
    # puts all of p(y) on x & y and the conditional is 1
    den = num + pl
    safe = np.where(den > EPS, den, 1.0)
    return np.where(pl <= EPS, 1.0, np.where(num <= 0.0, 0.0, num / safe))


def general_lower_conditional(b: SupportFunction, x: PropSet, y: PropSet) -> float:
    """Smallest ``p(x | y)`` over all ``p >= b`` for a belief function ``b``.

    Equal to ``b(x & y) / (b(x & y) + 1 - b(x | not y))``.
    """
    if x.frame != b.frame or y.frame != b.frame:
        raise FrameMismatch("subset and support function frames differ")
    if y.is_empty:
        raise EmptyAntecedent("cannot condition on the empty set")
    _require_belief(b)
    yb = ~y
    if b[yb] >= 1.0 - EPS:
        raise CertainComplement(f"b(not {y}) = {b[yb]}")
    num = np.array([b[x & y]])
    pl = np.array([1.0 - b[x | yb]])
    return float(_general_lhs(num, pl)[0])


def check_general(b: SupportFunction, c: RuleBase, tol: float = TOL) -> ConsistencyReport:
    _check_inputs(b, c)
    _require_belief(b)
    frame, full, v = b.frame, b.frame.full_mask, b.values
    out = []
    for y in c.antecedents:
        yb = full ^ y
        if v[yb] >= 1.0 - EPS:
            continue
        xs = _dense.submasks(y, frame.n)
        lhs = _general_lhs(v[xs], 1.0 - v[xs | yb])
        req = c.tables[y][xs]
        for i in np.nonzero(lhs < req - tol)[0]:
            out.append(Violation(PropSet(frame, int(xs[i])), PropSet(frame, y),
                                 float(req[i]), float(lhs[i])))
    return ConsistencyReport.from_violations(out)


# -- coherence closure -------------------------------------------------------

def _closure_sweeps(v, n, max_sweeps, tol):
    full = (1 << n) - 1
    X, Y = _dense.disjoint_pairs(n)
    XY = X | Y
    for sweep in range(1, max_sweeps + 1):
        new = _dense.monotone_closure(v)
        # p(x | y) = p(x) + p(y) for disjoint x, y
        np.maximum.at(new, XY, v[X] + v[Y])
        # p(x) = p(x | y) - p(y) >= b(x | y) - (1 - b(not y))
        np.maximum.at(new, X, v[XY] + v[full ^ Y] - 1.0)
        new = _raised(v, new)
        _check_coherent(new, full, tol)
        delta = float(np.max(new - v))
        v = new
        if delta < EPS:
            return v, sweep
    raise NonConvergence(f"closure still moving after {max_sweeps} sweeps")


def cheap_closure(b: SupportFunction, *, max_sweeps: int | None = None, tol: float = TOL,
                  full_output: bool = False):
    """Sound tightening by monotonicity and additivity on disjoint pairs.

    Never exceeds the lower envelope of ``{p : p >= b}``.
    """
    n = b.frame.n
    if n > CLOSURE_MAX_ATOMS:
        raise FrameTooLarge(f"closure enumerates 3**n pairs; n = {n} > {CLOSURE_MAX_ATOMS}")
    max_sweeps = default_sweeps(n) if max_sweeps is None else max_sweeps
    v, sweeps = _closure_sweeps(np.array(b.values), n, max_sweeps, tol)
    return _finish(b, v, sweeps, full_output)


def refine_optimistic_closed(b: SupportFunction, c: RuleBase, *, max_rounds: int = MIN_SWEEP_CAP,
                             max_sweeps: int | None = None, tol: float = TOL,
                             full_output: bool = False):
    """Alternate :func:`refine_optimistic` and :func:`cheap_closure` to a joint fixpoint.

    The alternation is what lets optimistic refinement draw contrapositive
    (modus tollens) conclusions.
    """
    _check_inputs(b, c)
    n = b.frame.n
    if n > CLOSURE_MAX_ATOMS:
        raise FrameTooLarge(f"closure enumerates 3**n pairs; n = {n} > {CLOSURE_MAX_ATOMS}")
    max_sweeps = default_sweeps(n) if max_sweeps is None else max_sweeps
    v = np.array(b.values)
    for rounds in range(1, max_rounds + 1):
        w = v
        if not c.is_vacuous():
            w, _ = _optimistic_sweeps(w, c, b.frame, max_sweeps, tol)
        w, _ = _closure_sweeps(w, n, max_sweeps, tol)
        delta = float(np.max(w - v))
        v = w
        if delta < EPS:
            break
    else:
        raise NonConvergence(f"alternation still moving after {max_rounds} rounds")
    return _finish(b, v, rounds, full_output)
