"""Conditional support functions ``c(x, y)`` built from interval rules.

A rule ``Rule(x, y, v)`` states that ``p(x | y) >= v``. For each antecedent
``y`` the rule base stores the least monotone completion of the supplied
bounds on the subsets of ``y``, with ``c(y, y) = 1`` and ``c(empty, y) = 0``.
Lookups honour ``c(x, y) = c(x & y, y)``; antecedents with no rules fall back
to the trivial value ``1 if y <= x else 0``. Upper bounds are written as lower
bounds on the complement: ``p(x | y) <= beta`` is ``Rule(~x, y, 1 - beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import _dense
from ._dense import TOL
from .errors import (
    EmptyAntecedent,
    FrameMismatch,
    InconsistentRule,
    InvalidBound,
    NotABeliefFunction,
)
from .evidence import MassFunction
from .lattice import Frame, PropSet


@dataclass(frozen=True)
class Rule:
    """Lower bound ``lower`` on ``p(consequent | antecedent)``.

    An antecedent equal to the whole frame is only accepted with
    ``unconditional=True``; it then encodes the plain bound ``p(x) >= lower``.
    """

    consequent: PropSet
    antecedent: PropSet
    lower: float
    unconditional: bool = False

    def __post_init__(self):
        if self.consequent.frame != self.antecedent.frame:
            raise FrameMismatch("consequent and antecedent live on different frames")
        lower = float(self.lower)
        if not 0.0 <= lower <= 1.0:
            raise InvalidBound(f"lower bound {lower} outside [0, 1]")
        object.__setattr__(self, "lower", lower)
        if self.antecedent.is_empty:
            raise EmptyAntecedent("a rule needs a nonempty antecedent")
        if self.antecedent.is_full and not self.unconditional:
            raise InvalidBound(
                "antecedent equals the whole frame; pass unconditional=True "
                "to state an unconditional bound"
            )


@dataclass(frozen=True)
class ConditionalMass:
    antecedent: PropSet
    mass: MassFunction


@dataclass(frozen=True, eq=False)
class RuleBase:
    frame: Frame
    rules: tuple[Rule, ...]
    # antecedent mask -> dense c(., y) over every subset of the frame
    tables: dict = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def antecedents(self) -> tuple[int, ...]:
        """Masks of the antecedents that carry rules, ascending."""
        return tuple(self.tables)

    def is_vacuous(self) -> bool:
        return not self.tables

    def dense(self, y: int) -> np.ndarray:
        """``c(x, y)`` for every ``x``, trivial default when ``y`` has no rules."""
        table = self.tables.get(y)
        if table is not None:
            return table
        return _trivial(y, self.frame.n)

    def value(self, x: int, y: int) -> float:
        if y == 0:
            raise EmptyAntecedent("c(x, empty) is undefined")
        table = self.tables.get(y)
        if table is None:
            return 1.0 if x & y == y else 0.0
        return float(table[x & y])

    def dense_mass(self, y: int) -> np.ndarray:
        """Dense Mobius transform of ``c(., y)``: the conditional mass ``m_y``."""
        out = self._cache.get(y)
        if out is None:
            table = self.tables.get(y)
            if table is None:
                out = np.zeros(self.frame.size)
                out[y] = 1.0
            else:
                out = _dense.mobius(table)
                # entries outside the subsets of y cancel exactly in theory
                out[(_dense.indices(self.frame.n) & ~y) != 0] = 0.0
                lo = out.min()
                if lo < -TOL:
                    k = int(out.argmin())
                    raise NotABeliefFunction(
                        f"c(., {PropSet(self.frame, y)}) has Mobius weight {lo:.3g} "
                        f"on {PropSet(self.frame, k)}"
                    )
                out[out < 0] = 0.0
                out /= out.sum()
            out.flags.writeable = False
            self._cache[y] = out
        return out

    def __repr__(self):
        return f"RuleBase({len(self.rules)} rules on {len(self.tables)} antecedents)"


@lru_cache(maxsize=65536)
def _trivial(y: int, n: int) -> np.ndarray:
    out = _dense.indicator_superset(y, n)
    out.flags.writeable = False
    return out


def make_rulebase(frame: Frame, rules: Iterable[Rule] = ()) -> RuleBase:
    """Build ``c`` as the least monotone completion of the supplied rules."""
    rules = tuple(rules)
    supplied: dict[int, np.ndarray] = {}
    for r in rules:
        if r.consequent.frame != frame or r.antecedent.frame != frame:
            raise FrameMismatch(f"rule {r} is not on {frame!r}")
        y = r.antecedent.mask
        x = r.consequent.mask & y
        if x == 0 and r.lower > 0.0:
            raise InconsistentRule(
                f"p({r.consequent} | {r.antecedent}) >= {r.lower} but the sets are disjoint"
            )
        g = supplied.setdefault(y, np.zeros(frame.size))
        g[x] = max(g[x], r.lower)

    tables = {}
    for y in sorted(supplied):
        g = supplied[y]
        g[y] = 1.0
        table = _dense.monotone_closure(g)
        # disjoint parts of y must leave room for each other
        subs = _dense.submasks(y, frame.n)
        slack = table[subs] + table[y & ~subs] - 1.0
        worst = int(np.argmax(slack))
        if slack[worst] > TOL:
            x = int(subs[worst])
            raise InconsistentRule(
                f"bounds on {PropSet(frame, x)} and {PropSet(frame, y & ~x)} given "
                f"{PropSet(frame, y)} sum to {1.0 + slack[worst]:.6g} > 1"
            )
        table.flags.writeable = False
        tables[y] = table
    return RuleBase(frame, rules, tables)


def vacuous_rulebase(frame: Frame) -> RuleBase:
    return make_rulebase(frame, ())


def lookup(c: RuleBase, x: PropSet, y: PropSet) -> float:
    if x.frame != c.frame or y.frame != c.frame:
        raise FrameMismatch("subset and rule base frames differ")
    return c.value(x.mask, y.mask)


def conditional_mass(c: RuleBase, y: PropSet) -> ConditionalMass:
    """Mass function ``m_y`` whose belief is ``c(., y)`` on the subsets of ``y``."""
    if y.frame != c.frame:
        raise FrameMismatch("subset and rule base frames differ")
    if y.is_empty:
        raise EmptyAntecedent("conditional mass on the empty set is undefined")
    return ConditionalMass(y, MassFunction.from_dense(c.frame, c.dense_mass(y.mask)))


def generators(c: RuleBase, y: int) -> list[tuple[int, float]]:
    """Minimal ``(x, c(x, y))`` pairs whose monotone closure is ``c(., y)``.

    Only strict, nonempty subsets of ``y`` whose value exceeds that of every
    subset one atom smaller are kept; ``y`` itself (value 1) is omitted.
    """
    table = c.tables.get(y)
    if table is None:
        return []
    out = []
    bits = [1 << i for i in range(c.frame.n) if y >> i & 1]
    for x in _dense.submasks(y, c.frame.n):
        x = int(x)
        v = float(table[x])
        if x == y or v <= 0.0:
            continue
        below = max((float(table[x & ~bit]) for bit in bits if x & bit), default=0.0)
        if v > below:
            out.append((x, v))
    return out
