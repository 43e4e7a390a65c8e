"""Frames of discernment with the lattice and partitions of their subsets.

A :class:`Frame` fixes an ordered list of atoms. Every subset of the frame is a
:class:`PropSet` whose canonical index is the bitmask with bit ``i`` set when
atom ``i`` is a member. Iteration over the lattice is always in ascending
index order, which keeps every downstream result order-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    DuplicateAtom,
    EmptyCarrier,
    EmptyFrame,
    FrameMismatch,
    FrameTooLarge,
    UnknownAtom,
)

MAX_ATOMS = 16
PARTITION_CAP = 10


@dataclass(frozen=True)
class Frame:
    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise EmptyFrame("a frame needs at least one atom")
        if len(self.atoms) > MAX_ATOMS:
            raise FrameTooLarge(f"{len(self.atoms)} atoms exceeds the cap of {MAX_ATOMS}")
        seen = set()
        for a in self.atoms:
            if not isinstance(a, str) or not a:
                raise EmptyFrame(f"atom names must be nonempty strings, got {a!r}")
            if a in seen:
                raise DuplicateAtom(a)
            seen.add(a)

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def size(self) -> int:
        """Number of subsets, ``2**n``."""
        return 1 << len(self.atoms)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.atoms)) - 1

    @property
    def empty(self) -> PropSet:
        return PropSet(self, 0)

    @property
    def full(self) -> PropSet:
        return PropSet(self, self.full_mask)

    def index(self, atom: str) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise UnknownAtom(f"{atom!r} is not an atom of {list(self.atoms)}") from None

    def subset(self, names: Iterable[str]) -> PropSet:
        if isinstance(names, str):
            names = [names]
        mask = 0
        for a in names:
            mask |= 1 << self.index(a)
        return PropSet(self, mask)

    def propset(self, mask: int) -> PropSet:
        return PropSet(self, mask)

    def subsets(self) -> Iterator[PropSet]:
        """Every element of the lattice in ascending canonical order."""
        for mask in range(self.size):
            yield PropSet(self, mask)

    def names(self, mask: int) -> list[str]:
        return [a for i, a in enumerate(self.atoms) if mask >> i & 1]

    def __repr__(self):
        return f"Frame({list(self.atoms)})"


def make_frame(names: Sequence[str]) -> Frame:
    return Frame(tuple(names))


@dataclass(frozen=True)
class PropSet:
    """A proposition of the lattice, i.e. a subset of the frame."""

    frame: Frame
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.frame.full_mask:
            raise UnknownAtom(f"mask {self.mask:#x} addresses atoms outside {self.frame!r}")

    def _check(self, other: PropSet):
        if not isinstance(other, PropSet):
            raise TypeError(f"expected a PropSet, got {type(other).__name__}")
        if other.frame != self.frame:
            raise FrameMismatch(f"{self.frame!r} vs {other.frame!r}")

    def __and__(self, other: PropSet) -> PropSet:
        self._check(other)
        return PropSet(self.frame, self.mask & other.mask)

    def __or__(self, other: PropSet) -> PropSet:
        self._check(other)
        return PropSet(self.frame, self.mask | other.mask)

    def __sub__(self, other: PropSet) -> PropSet:
        self._check(other)
        return PropSet(self.frame, self.mask & ~other.mask)

    def __invert__(self) -> PropSet:
        return PropSet(self.frame, self.frame.full_mask & ~self.mask)

    def __le__(self, other: PropSet) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: PropSet) -> bool:
        return self <= other and self.mask != other.mask

    def __ge__(self, other: PropSet) -> bool:
        return other <= self

    def __gt__(self, other: PropSet) -> bool:
        return other < self

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[str]:
        return iter(self.frame.names(self.mask))

    def __contains__(self, atom: str) -> bool:
        return bool(self.mask >> self.frame.index(atom) & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == self.frame.full_mask

    def __str__(self):
        if self.mask == 0:
            return "{}"
        return "{" + ",".join(self) + "}"

    def __repr__(self):
        return f"PropSet({self})"


def meet(x: PropSet, y: PropSet) -> PropSet:
    return x & y


def join(x: PropSet, y: PropSet) -> PropSet:
    return x | y


def complement(x: PropSet) -> PropSet:
    return ~x


def is_subset(x: PropSet, y: PropSet) -> bool:
    return x <= y


@dataclass(frozen=True)
class Partition:
    carrier: PropSet
    cells: tuple[PropSet, ...]

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)


def bell_number(n: int) -> int:
    """Bell number via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def restricted_growth_strings(k: int) -> Iterator[list[int]]:
    """Restricted growth strings of length ``k`` in lexicographic order.

    ``a[0] = 0`` and ``a[i] <= 1 + max(a[:i])``. The same list object is
    yielded each time and mutated in place.
    """
    if k == 0:
        return
    a = [0] * k
    # top[i] = 1 + max(a[:i]): the largest value a[i] may take
    top = [0] + [1] * (k - 1)
    while True:
        yield a
        i = k - 1
        while i > 0 and a[i] == top[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, k):
            a[j] = 0
            top[j] = max(top[j - 1], a[j - 1] + 1)


def iter_partition_masks(mask: int, cap: int = PARTITION_CAP) -> Iterator[tuple[int, ...]]:
    """Stream every set partition of the atoms in ``mask`` as a tuple of cell masks."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    if not bits:
        raise EmptyCarrier("cannot partition the empty set")
    if len(bits) > cap:
        raise FrameTooLarge(f"carrier of {len(bits)} atoms exceeds partition cap {cap}")
    for rgs in restricted_growth_strings(len(bits)):
        cells = [0] * (max(rgs) + 1)
        for bit, block in zip(bits, rgs):
            cells[block] |= bit
        yield tuple(cells)


def enumerate_partitions(carrier: PropSet, cap: int = PARTITION_CAP) -> Iterator[Partition]:
    """Lazily yield every partition of ``carrier`` exactly once, in RGS order."""
    frame = carrier.frame
    for cells in iter_partition_masks(carrier.mask, cap):
        yield Partition(carrier, tuple(PropSet(frame, c) for c in cells))
