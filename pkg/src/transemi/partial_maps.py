"""Value-semantic partial transformations of a finite carrier {0..n-1}.

A partial map is stored as a tuple of length n whose entry at a is either
None (undefined) or the image of a. Treated as a subset of A x A it is
automatically functional. All values are immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import CarrierMismatchError


@dataclass(frozen=True)
class Subset:
    """A subset of {0..base_size-1} encoded as an int bitset."""

    base_size: int
    bits: int

    def __post_init__(self):
        if self.base_size < 1:
            raise ValueError("base_size must be positive")
        if self.bits < 0 or self.bits >> self.base_size:
            raise ValueError("subset members out of range")

    @classmethod
    def from_members(cls, base_size: int, members: Iterable[int]) -> "Subset":
        bits = 0
        for a in members:
            if not 0 <= a < base_size:
                raise ValueError(f"member {a} out of range for carrier of size {base_size}")
            bits |= 1 << a
        return cls(base_size, bits)

    @classmethod
    def empty(cls, base_size: int) -> "Subset":
        return cls(base_size, 0)

    @classmethod
    def full(cls, base_size: int) -> "Subset":
        return cls(base_size, (1 << base_size) - 1)

    def members(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.base_size) if (self.bits >> a) & 1)

    def __contains__(self, a: int) -> bool:
        return 0 <= a < self.base_size and bool((self.bits >> a) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __and__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.base_size, self.bits & other.bits)

    def __or__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.base_size, self.bits | other.bits)

    def issubset(self, other: "Subset") -> bool:
        self._check(other)
        return not (self.bits & ~other.bits)

    def _check(self, other: "Subset") -> None:
        if self.base_size != other.base_size:
            raise CarrierMismatchError(
                f"carrier mismatch: {self.base_size} vs {other.base_size}"
            )


@dataclass(frozen=True)
class PartialMap:
    """A partial transformation; entries[a] is the image of a or None."""

    entries: tuple[Optional[int], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 1:
            raise ValueError("base_size must be positive")
        for a, b in enumerate(self.entries):
            if b is not None and not 0 <= b < n:
                raise ValueError(f"image {b} of element {a} out of range")

    @property
    def base_size(self) -> int:
        return len(self.entries)

    @classmethod
    def from_pairs(cls, base_size: int, pairs: Iterable[tuple[int, int]]) -> "PartialMap":
        """Build from (element, image) pairs, rejecting non-functional lists."""
        entries: list[Optional[int]] = [None] * base_size
        for a, b in pairs:
            if not 0 <= a < base_size:
                raise ValueError(f"element {a} out of range for carrier of size {base_size}")
            if not 0 <= b < base_size:
                raise ValueError(f"image {b} of element {a} out of range")
            if entries[a] is not None and entries[a] != b:
                raise ValueError(f"element {a} mapped to both {entries[a]} and {b}")
            entries[a] = b
        return cls(tuple(entries))

    @classmethod
    def identity(cls, base_size: int) -> "PartialMap":
        return cls(tuple(range(base_size)))

    @classmethod
    def empty(cls, base_size: int) -> "PartialMap":
        return cls((None,) * base_size)

    def defined_at(self, a: int) -> bool:
        return 0 <= a < self.base_size and self.entries[a] is not None

    def __call__(self, a: int) -> Optional[int]:
        return self.entries[a]

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((a, b) for a, b in enumerate(self.entries) if b is not None)

    def issubmap(self, other: "PartialMap") -> bool:
        """True when self, as a set of pairs, is contained in other."""
        _check_carrier(self, other)
        return all(b is None or other.entries[a] == b for a, b in enumerate(self.entries))

    def restrict(self, subset: Subset) -> "PartialMap":
        if subset.base_size != self.base_size:
            raise CarrierMismatchError(
                f"carrier mismatch: {self.base_size} vs {subset.base_size}"
            )
        return PartialMap(
            tuple(b if a in subset else None for a, b in enumerate(self.entries))
        )

    def __mul__(self, other: "PartialMap") -> "PartialMap":
        """g * f composes as apply-f-first."""
        return compose(self, other)

    def __and__(self, other: "PartialMap") -> "PartialMap":
        return intersect(self, other)

    def __repr__(self) -> str:
        body = ",".join(f"{a}>{b}" for a, b in self.pairs())
        return f"PartialMap(n={self.base_size}; {body})"


def _check_carrier(f: PartialMap, g: PartialMap) -> None:
    if f.base_size != g.base_size:
        raise CarrierMismatchError(f"carrier mismatch: {f.base_size} vs {g.base_size}")


def compose(g: PartialMap, f: PartialMap) -> PartialMap:
    """The map a -> g(f(a)), defined where both stages are."""
    _check_carrier(g, f)
    entries = []
    for b in f.entries:
        entries.append(None if b is None else g.entries[b])
    return PartialMap(tuple(entries))


def intersect(f: PartialMap, g: PartialMap) -> PartialMap:
    """Set-theoretic intersection of the two maps as subsets of A x A."""
    _check_carrier(f, g)
    entries = tuple(
        b if b is not None and b == g.entries[a] else None
        for a, b in enumerate(f.entries)
    )
    return PartialMap(entries)


def identity_on(subset: Subset) -> PartialMap:
    """The identity map defined exactly on the given subset."""
    return PartialMap(
        tuple(a if a in subset else None for a in range(subset.base_size))
    )


def domain(f: PartialMap) -> Subset:
    return Subset.from_members(
        f.base_size, (a for a, b in enumerate(f.entries) if b is not None)
    )


def image(f: PartialMap) -> Subset:
    return Subset.from_members(
        f.base_size, (b for b in f.entries if b is not None)
    )


def semicompatible(f: PartialMap, g: PartialMap) -> bool:
    """True when f and g agree wherever both are defined."""
    _check_carrier(f, g)
    return all(
        b is None or g.entries[a] is None or b == g.entries[a]
        for a, b in enumerate(f.entries)
    )


def semiadjacent(f: PartialMap, g: PartialMap) -> bool:
    """True when the image of f is contained in the domain of g."""
    _check_carrier(f, g)
    return all(b is None or g.entries[b] is not None for b in f.entries)
