"""Dense set-function helpers over arrays indexed by subset bitmask.

An array ``f`` of length ``2**n`` stores ``f[mask]`` for every subset of an
``n``-atom frame. All transforms run in ``O(n 2**n)`` by sweeping one atom at
a time over the axis that carries that atom's bit.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

#: comparison tolerance at API boundaries
TOL = 1e-9
#: internal tolerance (transform round-off, fixpoint stopping)
EPS = 1e-12


def _bit_view(f: np.ndarray, i: int) -> np.ndarray:
    return f.reshape(-1, 2, 1 << i)


def zeta(m: np.ndarray) -> np.ndarray:
    """Subset sums: ``out[x] = sum(m[u] for u subset of x)``."""
    f = np.array(m, dtype=float)
    n = f.size.bit_length() - 1
    for i in range(n):
        v = _bit_view(f, i)
        v[:, 1, :] += v[:, 0, :]
    return f


def mobius(f: np.ndarray) -> np.ndarray:
    """Inverse of :func:`zeta`."""
    m = np.array(f, dtype=float)
    n = m.size.bit_length() - 1
    for i in range(n):
        v = _bit_view(m, i)
        v[:, 1, :] -= v[:, 0, :]
    return m


def monotone_closure(f: np.ndarray) -> np.ndarray:
    """Least monotone function above ``f``: ``out[x] = max(f[z] for z subset of x)``."""
    g = np.array(f, dtype=float)
    n = g.size.bit_length() - 1
    for i in range(n):
        v = _bit_view(g, i)
        np.maximum(v[:, 1, :], v[:, 0, :], out=v[:, 1, :])
    return g


@lru_cache(maxsize=None)
def indices(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    idx.flags.writeable = False
    return idx


@lru_cache(maxsize=4096)
def submasks(mask: int, n: int) -> np.ndarray:
    """All submasks of ``mask`` in ascending order."""
    idx = indices(n)
    out = idx[(idx & ~mask) == 0]
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    idx = indices(n)
    out = np.zeros(idx.size, dtype=np.int64)
    for i in range(n):
        out += (idx >> i) & 1
    out.flags.writeable = False
    return out


@lru_cache(maxsize=16)
def disjoint_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(X, Y)`` listing every ordered pair of disjoint nonempty subsets."""
    full = (1 << n) - 1
    xs, ys = [], []
    for x in range(1, full + 1):
        rest = full & ~x
        y = rest
        while y:
            xs.append(x)
            ys.append(y)
            y = (y - 1) & rest
    X = np.array(xs, dtype=np.int64)
    Y = np.array(ys, dtype=np.int64)
    X.flags.writeable = False
    Y.flags.writeable = False
    return X, Y


def indicator_superset(mask: int, n: int) -> np.ndarray:
    """``out[x] = 1.0 if mask is a subset of x else 0.0``."""
    idx = indices(n)
    return ((idx & mask) == mask).astype(float)
