"""Mass and support functions with Dempster's rule of combination."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping, Union

import numpy as np

from . import _dense
from ._dense import EPS, TOL
from .errors import (
    FrameMismatch,
    InvalidMass,
    InvalidSupport,
    InvalidWeight,
    NotABeliefFunction,
    TotalConflict,
)
from .lattice import Frame, PropSet

BELIEF = "belief"
ENVELOPE = "envelope"
RAW = "raw"
KINDS = (BELIEF, ENVELOPE, RAW)

SetKey = Union[PropSet, int]


def _mask(frame: Frame, x: SetKey) -> int:
    if isinstance(x, PropSet):
        if x.frame != frame:
            raise FrameMismatch(f"{x.frame!r} vs {frame!r}")
        return x.mask
    mask = int(x)
    if not 0 <= mask <= frame.full_mask:
        raise InvalidMass(f"mask {mask:#x} outside {frame!r}")
    return mask


def _same_frame(a, b):
    if a.frame != b.frame:
        raise FrameMismatch(f"{a.frame!r} vs {b.frame!r}")


@dataclass(frozen=True, eq=False)
class MassFunction:
    """A basic probability assignment stored sparsely by focal element.

    ``weights`` may be keyed by :class:`PropSet` or by raw bitmask. Zero
    weights are dropped; the result is validated to be nonnegative, zero on
    the empty set, and to sum to one within ``1e-9``.
    """

    frame: Frame
    weights: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[int, float] = {}
        for key, w in self.weights.items():
            mask = _mask(self.frame, key)
            w = float(w)
            if not math.isfinite(w):
                raise InvalidMass(f"non-finite weight {w!r}")
            clean[mask] = clean.get(mask, 0.0) + w
        for mask, w in list(clean.items()):
            if w < -EPS:
                raise InvalidMass(f"negative weight {w} on {self.frame.names(mask)}")
            if w <= EPS:
                del clean[mask]
        if 0 in clean:
            raise InvalidMass(f"the empty set carries weight {clean[0]}")
        total = math.fsum(clean.values())
        if abs(total - 1.0) > TOL:
            raise InvalidMass(f"weights sum to {total}, not 1")
        ordered = {k: clean[k] for k in sorted(clean)}
        object.__setattr__(self, "weights", MappingProxyType(ordered))

    @classmethod
    def vacuous(cls, frame: Frame) -> MassFunction:
        return cls(frame, {frame.full_mask: 1.0})

    @classmethod
    def from_dense(cls, frame: Frame, values: np.ndarray) -> MassFunction:
        return cls(frame, {int(i): float(v) for i, v in enumerate(values) if v != 0.0})

    def __getitem__(self, x: SetKey) -> float:
        return self.weights.get(_mask(self.frame, x), 0.0)

    def __iter__(self) -> Iterator[PropSet]:
        return (PropSet(self.frame, k) for k in self.weights)

    def __len__(self):
        return len(self.weights)

    @property
    def focal(self) -> tuple[PropSet, ...]:
        return tuple(self)

    def items(self) -> Iterator[tuple[PropSet, float]]:
        for k, w in self.weights.items():
            yield PropSet(self.frame, k), w

    def dense(self) -> np.ndarray:
        out = np.zeros(self.frame.size)
        for k, w in self.weights.items():
            out[k] = w
        return out

    def is_vacuous(self) -> bool:
        return list(self.weights) == [self.frame.full_mask]

    def isclose(self, other: MassFunction, tol: float = TOL) -> bool:
        _same_frame(self, other)
        return bool(np.all(np.abs(self.dense() - other.dense()) <= tol))

    def __repr__(self):
        body = ", ".join(f"{PropSet(self.frame, k)}: {w:.6g}" for k, w in self.weights.items())
        return f"MassFunction({{{body}}})"


@dataclass(frozen=True, eq=False)
class SupportFunction:
    """Lower bounds ``b(x)`` stored densely for every subset of the frame.

    ``kind`` is one of ``"belief"``, ``"envelope"`` or ``"raw"``. Beliefs must
    have a nonnegative Mobius transform; beliefs and envelopes must be
    monotone. Raw bounds only need ``b(empty) = 0``, ``b(frame) = 1`` and values
    in ``[0, 1]``.
    """

    frame: Frame
    values: np.ndarray
    kind: str = RAW

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSupport(f"unknown kind {self.kind!r}")
        v = np.array(self.values, dtype=float)
        if v.shape != (self.frame.size,):
            raise InvalidSupport(f"expected {self.frame.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidSupport("non-finite bound")
        if v.min() < -TOL or v.max() > 1 + TOL:
            raise InvalidSupport("bounds must lie in [0, 1]")
        if abs(v[0]) > TOL or abs(v[-1] - 1.0) > TOL:
            raise InvalidSupport("need b(empty) = 0 and b(frame) = 1")
        np.clip(v, 0.0, 1.0, out=v)
        v[0], v[-1] = 0.0, 1.0
        if self.kind in (BELIEF, ENVELOPE):
            if np.any(_dense.monotone_closure(v) > v + TOL):
                raise InvalidSupport(f"a {self.kind} must be monotone")
        if self.kind == BELIEF and _dense.mobius(v).min() < -TOL:
            raise NotABeliefFunction("Mobius transform has negative weights")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def vacuous(cls, frame: Frame) -> SupportFunction:
        v = np.zeros(frame.size)
        v[-1] = 1.0
        return cls(frame, v, BELIEF)

    @classmethod
    def from_bounds(cls, frame: Frame, bounds: Mapping[SetKey, float], kind: str = RAW) -> SupportFunction:
        """Build from a sparse map of lower bounds; unspecified subsets get 0."""
        v = np.zeros(frame.size)
        for key, val in bounds.items():
            mask = _mask(frame, key)
            v[mask] = max(v[mask], float(val))
        v[-1] = 1.0
        return cls(frame, v, kind)

    def __getitem__(self, x: SetKey) -> float:
        return float(self.values[_mask(self.frame, x)])

    def items(self) -> Iterator[tuple[PropSet, float]]:
        for k in range(self.frame.size):
            yield PropSet(self.frame, k), float(self.values[k])

    def with_values(self, values: np.ndarray, kind: str = RAW) -> SupportFunction:
        return SupportFunction(self.frame, values, kind)

    def isclose(self, other: SupportFunction, tol: float = TOL) -> bool:
        _same_frame(self, other)
        return bool(np.all(np.abs(self.values - other.values) <= tol))

    def __repr__(self):
        nz = ", ".join(
            f"{PropSet(self.frame, k)}: {val:.6g}"
            for k, val in enumerate(self.values)
            if val > 0 and k != self.frame.full_mask
        )
        return f"SupportFunction[{self.kind}]({{{nz}}})"


def belief_from_mass(m: MassFunction) -> SupportFunction:
    if not isinstance(m, MassFunction):
        raise InvalidMass(f"expected a MassFunction, got {type(m).__name__}")
    return SupportFunction(m.frame, _dense.zeta(m.dense()), BELIEF)


def mass_from_belief(b: SupportFunction) -> MassFunction:
    """Mobius inversion; fails if ``b`` is not a belief function."""
    if abs(b.values[0]) > TOL or abs(b.values[-1] - 1.0) > TOL:
        raise NotABeliefFunction("need b(empty) = 0 and b(frame) = 1")
    w = _dense.mobius(b.values)
    lo = w.min()
    if lo < -TOL:
        k = int(w.argmin())
        raise NotABeliefFunction(
            f"Mobius weight {lo:.3g} on {PropSet(b.frame, k)}; not a belief function"
        )
    w[w < 0] = 0.0
    w[0] = 0.0
    w /= w.sum()
    return MassFunction.from_dense(b.frame, w)


def plausibility(b: SupportFunction, x: PropSet) -> float:
    mask = _mask(b.frame, x)
    return 1.0 - float(b.values[b.frame.full_mask & ~mask])


def is_more_specific(b1: SupportFunction, b2: SupportFunction) -> bool:
    """True iff ``b1 >= b2`` pointwise (up to 1e-12)."""
    _same_frame(b1, b2)
    return bool(np.all(b1.values >= b2.values - EPS))


def simple_support(y: PropSet, s: float) -> MassFunction:
    """Mass ``s`` on ``y`` and ``1 - s`` on the whole frame."""
    if y.is_empty:
        raise InvalidWeight("a simple support function cannot focus on the empty set")
    if not 0.0 <= s <= 1.0:
        raise InvalidWeight(f"weight {s} outside [0, 1]")
    frame = y.frame
    if y.is_full:
        return MassFunction.vacuous(frame)
    return MassFunction(frame, {y.mask: s, frame.full_mask: 1.0 - s})


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: conjunctive combination renormalised by the conflict."""
    _same_frame(m1, m2)
    joint: dict[int, float] = {}
    conflict = 0.0
    for u, wu in m1.weights.items():
        for v, wv in m2.weights.items():
            x = u & v
            if x == 0:
                conflict += wu * wv
            else:
                joint[x] = joint.get(x, 0.0) + wu * wv
    if conflict >= 1.0 - EPS:
        raise TotalConflict(f"conflict {conflict} leaves nothing to normalise")
    scale = 1.0 - conflict
    return MassFunction(m1.frame, {x: w / scale for x, w in joint.items()})


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    _same_frame(m1, m2)
    return math.fsum(
        wu * wv for u, wu in m1.weights.items() for v, wv in m2.weights.items() if u & v == 0
    )
