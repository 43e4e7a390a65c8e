"""Belief-based conditionalization: partition bounds and mass redistribution.

Both engines fold over set partitions streamed by
:func:`evkernel.lattice.iter_partition_masks`; for each partition the work is
vectorised across every target subset at once, so a frame of ``n`` atoms
costs ``Bell(n)`` small numpy reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dense
from ._dense import EPS, TOL
from .errors import FrameMismatch, FrameTooLarge, NegativeMass, NonConvergence
from .evidence import RAW, MassFunction, SupportFunction
from .interval import default_sweeps
from .lattice import PARTITION_CAP, PropSet, iter_partition_masks
from .rules import RuleBase


@dataclass(frozen=True)
class TransferCoefficient:
    source: PropSet
    target: PropSet
    value: float


def _check(frame, c: RuleBase, cap: int):
    if frame != c.frame:
        raise FrameMismatch(f"{frame!r} vs {c.frame!r}")
    if frame.n > cap:
        raise FrameTooLarge(f"{frame.n} atoms exceeds the partition cap of {cap}")


def _stack(arrays: dict, cells: tuple[int, ...]) -> np.ndarray:
    return np.stack([arrays[u] for u in cells])


def _partition_sup(v: np.ndarray, c: RuleBase, cap: int) -> np.ndarray:
    """``sup over partitions P`` of ``sum b(u) c(., u) + rho(P) min c(., u)`` for every target."""
    n = c.frame.n
    full = c.frame.full_mask
    tables = {u: c.dense(u) for u in range(1, full + 1)}
    best = np.zeros(1 << n)
    for cells in iter_partition_masks(full, cap):
        C = _stack(tables, cells)
        bs = v[list(cells)]
        rho = max(0.0, 1.0 - float(bs.sum()))
        val = bs @ C
        if rho > 0.0:
            val += rho * C.min(axis=0)
        np.maximum(best, val, out=best)
    return best


def partition_bound(b: SupportFunction, c: RuleBase, x: PropSet, cap: int = PARTITION_CAP) -> float:
    """Best lower bound on ``p(x)`` obtained from one partition of the frame.

    For a partition ``P`` with slack ``rho = 1 - sum b(u)``, total probability
    gives ``p(x) >= sum b(u) c(x, u) + rho min c(x, u)``. The result is the max
    of ``b(x)`` and the best partition.
    """
    _check(b.frame, c, cap)
    if x.frame != b.frame:
        raise FrameMismatch("subset and support function frames differ")
    if x.is_empty:
        return 0.0
    return max(b[x], float(_partition_sup(b.values, c, cap)[x.mask]))


def refine_partition(b: SupportFunction, c: RuleBase, *, iterate: bool = False,
                     cap: int = PARTITION_CAP, max_sweeps: int | None = None,
                     full_output: bool = False):
    """Apply :func:`partition_bound` at every subset.

    By default this is a single pass whose right-hand side always reads the
    input ``b``. With ``iterate=True`` passes repeat until nothing moves.
    """
    _check(b.frame, c, cap)
    if c.is_vacuous():
        return (b, 0) if full_output else b
    v = np.array(b.values)
    max_sweeps = default_sweeps(b.frame.n) if max_sweeps is None else max_sweeps
    passes = 0
    while True:
        passes += 1
        new = np.maximum(v, _partition_sup(v, c, cap))
        new = np.where(new > v + EPS, new, v)
        new[0] = 0.0
        delta = float(np.max(new - v))
        v = new
        if not iterate or delta < EPS:
            break
        if passes >= max_sweeps:
            raise NonConvergence(f"partition refinement still moving after {passes} passes")
    out = b if np.array_equal(v, b.values) else SupportFunction(b.frame, np.clip(v, 0, 1), RAW)
    return (out, passes) if full_output else out


def transfer_kernel(c: RuleBase, y: int, cap: int = PARTITION_CAP) -> np.ndarray:
    """Dense ``K(y -> x)`` over every ``x``; zero unless ``x`` is a strict subset of ``y``.

    ``K(y -> x) = max over partitions P of y of min over cells u of m_u(x & u)``
    where ``m_u`` is the conditional mass of antecedent ``u`` (vacuous when no
    rule mentions ``u``).
    """
    cache = c._cache
    key = ("kernel", y)
    got = cache.get(key)
    if got is not None:
        return got
    n = c.frame.n
    xs = _dense.submasks(y, n)
    gathered: dict[int, np.ndarray] = {}
    best = np.zeros(xs.size)
    for cells in iter_partition_masks(y, cap):
        for u in cells:
            if u not in gathered:
                gathered[u] = c.dense_mass(u)[xs & u]
        np.maximum(best, _stack(gathered, cells).min(axis=0), out=best)
    out = np.zeros(1 << n)
    out[xs] = best
    out[y] = 0.0
    out[0] = 0.0
    out.flags.writeable = False
    cache[key] = out
    return out


def transfer_coefficient(c: RuleBase, y: PropSet, x: PropSet, cap: int = PARTITION_CAP) -> float:
    if x.frame != c.frame or y.frame != c.frame:
        raise FrameMismatch("subset and rule base frames differ")
    if not x < y:
        raise ValueError(f"{x} must be a strict subset of {y}")
    if len(y) > cap:
        raise FrameTooLarge(f"|y| = {len(y)} exceeds the partition cap of {cap}")
    return float(transfer_kernel(c, y.mask, cap)[x.mask])


def transfer_coefficients(c: RuleBase, y: PropSet, cap: int = PARTITION_CAP) -> list[TransferCoefficient]:
    """Nonzero coefficients out of ``y``, in canonical target order."""
    if len(y) > cap:
        raise FrameTooLarge(f"|y| = {len(y)} exceeds the partition cap of {cap}")
    k = transfer_kernel(c, y.mask, cap)
    return [TransferCoefficient(y, PropSet(c.frame, int(x)), float(k[x]))
            for x in np.flatnonzero(k > 0.0)]


def conditionalize_mass(m: MassFunction, c: RuleBase, cap: int = PARTITION_CAP,
                        tol: float = TOL) -> MassFunction:
    """Single-pass redistribution of each focal mass onto its strict subsets.

    ``m'(x) = m(x) + sum_{y > x} m(y) K(y -> x) - m(x) sum_{z < x} K(x -> z)``.
    The inflow and outflow use the same kernel, so total mass is conserved.
    Raises :class:`NegativeMass` when some focal set would give away more than
    all of its mass.
    """
    _check(m.frame, c, cap)
    if c.is_vacuous():
        return m
    out = np.zeros(m.frame.size)
    for y, w in m.weights.items():
        if y & (y - 1) == 0:
            out[y] += w
            continue
        k = transfer_kernel(c, y, cap)
        outflow = float(k.sum())
        if outflow > 1.0 + tol:
            raise NegativeMass(
                f"{PropSet(m.frame, y)} would transfer {outflow:.6g} of its mass",
                witness=PropSet(m.frame, y), outflow=outflow,
            )
        out += w * k
        out[y] += w * max(0.0, 1.0 - outflow)
    return MassFunction.from_dense(m.frame, out)
