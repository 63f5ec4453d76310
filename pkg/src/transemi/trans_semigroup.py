"""Intersection-closed semigroups of partial transformations.

`generate` saturates a seed set under composition and intersection and
computes, eagerly, the index tables for both operations plus three boolean
relations: containment (zeta), agreement on common domains (xi), and
image-inside-domain (delta). `to_abstract` re-encodes the result as an
AbstractSystem; the abstract product x.y is the transformation y o x
(apply x first), so the abstract table is the transpose of the concrete
composition table.
"""

from __future__ import annotations

import threading
import time
from typing import Iterable, Sequence

import numpy as np

from .abstract_system import AbstractSystem
from .bitsets import bits_of, iter_bits
from .errors import CapExceededError, CarrierMismatchError
from .partial_maps import PartialMap, compose, domain, image, intersect, semiadjacent, semicompatible
from .reports import Report


class TransSystem:
    """A closed set of partial maps with its tables and relation matrices."""

    def __init__(self, base_size: int, elements: Sequence[PartialMap]):
        self.base_size = base_size
        self.elements = tuple(elements)
        self.index = {f: i for i, f in enumerate(self.elements)}
        k = len(self.elements)

        mul = np.empty((k, k), dtype=np.int64)
        meet = np.empty((k, k), dtype=np.int64)
        for i, f in enumerate(self.elements):
            for j, g in enumerate(self.elements):
                mul[i, j] = self.index[compose(f, g)]
                meet[i, j] = self.index[intersect(f, g)]
        mul.flags.writeable = False
        meet.flags.writeable = False
        self.mul_table = mul
        self.meet_table = meet

        self.dom_bits = tuple(domain(f).bits for f in self.elements)
        self.img_bits = tuple(image(f).bits for f in self.elements)

        zeta = np.empty((k, k), dtype=bool)
        xi = np.empty((k, k), dtype=bool)
        delta = np.empty((k, k), dtype=bool)
        for i, f in enumerate(self.elements):
            for j, g in enumerate(self.elements):
                zeta[i, j] = f.issubmap(g)
                xi[i, j] = semicompatible(f, g)
                delta[i, j] = semiadjacent(f, g)
        for a in (zeta, xi, delta):
            a.flags.writeable = False
        self.zeta = zeta
        self.xi = xi
        self.delta = delta

        self._lock = threading.Lock()
        self._abstract: AbstractSystem | None = None

    @property
    def size(self) -> int:
        return len(self.elements)

    def abstract(self) -> AbstractSystem:
        with self._lock:
            if self._abstract is None:
                self._abstract = AbstractSystem(
                    self.mul_table.T, self.meet_table, self.xi, self.delta
                )
            return self._abstract

    def __repr__(self) -> str:
        return f"TransSystem(base_size={self.base_size}, size={self.size})"


def generate(seeds: Iterable[PartialMap], cap: int) -> TransSystem:
    """Least set containing the seeds closed under compose and intersect.

    Saturation is a deterministic worklist: seeds in given order, then
    discovery order. Raises when the closure grows past `cap`.
    """
    seed_list = list(seeds)
    if not seed_list:
        raise ValueError("at least one seed map is required")
    n = seed_list[0].base_size
    for f in seed_list:
        if f.base_size != n:
            raise CarrierMismatchError(f"carrier mismatch: {n} vs {f.base_size}")
    if cap < len(set(seed_list)):
        raise ValueError("cap smaller than the seed set")

    elements: list[PartialMap] = []
    seen: set[PartialMap] = set()
    for f in seed_list:
        if f not in seen:
            seen.add(f)
            elements.append(f)

    def admit(f: PartialMap) -> None:
        if f not in seen:
            seen.add(f)
            elements.append(f)
            if len(elements) > cap:
                raise CapExceededError(f"cap exceeded: closure grew past {cap}")

    grown = True
    while grown:
        grown = False
        k = len(elements)
        for i in range(k):
            for j in range(k):
                before = len(elements)
                admit(compose(elements[i], elements[j]))
                admit(intersect(elements[i], elements[j]))
                if len(elements) != before:
                    grown = True
    return TransSystem(n, elements)


def xi_rel(sys: TransSystem) -> np.ndarray:
    """Matrix of pairs agreeing on the intersection of their domains."""
    return sys.xi.copy()


def delta_rel(sys: TransSystem) -> np.ndarray:
    """Matrix of pairs whose first image lies inside the second domain."""
    return sys.delta.copy()


def to_abstract(sys: TransSystem) -> AbstractSystem:
    return sys.abstract()


def check_adjacency_laws(sys: TransSystem) -> Report:
    """Both structural laws of the image-inside-domain relation.

    First: (f,g) adjacent iff composing g after f keeps the whole domain of
    f. Second: adjacency survives precomposition. Expected to hold on every
    generated system; violations are reported with the offending tuples.
    """
    k = sys.size
    report = Report("adjacency laws")

    t0 = time.perf_counter()
    bad_iff = []
    for i in range(k):
        di = sys.dom_bits[i]
        for j in range(k):
            composed = int(sys.mul_table[j, i])  # g o f
            grows = not (di & ~sys.dom_bits[composed])
            if bool(sys.delta[i, j]) != grows:
                bad_iff.append({"f": i, "g": j})
    report.add(
        "adjacency-iff-domain-kept",
        not bad_iff,
        bad_iff[:10],
        "" if not bad_iff else f"{len(bad_iff)} pairs",
        time.perf_counter() - t0,
    )

    t0 = time.perf_counter()
    # delta[f,g] must imply delta[f o h, g] for every h; blocked over f.
    n_viol = 0
    witnesses = []
    for lo in range(0, k, 32):
        hi = min(k, lo + 32)
        viol = sys.delta[lo:hi, None, :] & ~sys.delta[sys.mul_table[lo:hi]]
        if viol.any():
            idx = np.argwhere(viol)
            n_viol += len(idx)
            for f, h, g in idx[: max(0, 10 - len(witnesses))]:
                witnesses.append({"f": lo + int(f), "h": int(h), "g": int(g)})
    report.add(
        "adjacency-precompose-stable",
        n_viol == 0,
        witnesses,
        "" if not n_viol else f"{n_viol} triples",
        time.perf_counter() - t0,
    )
    return report


def check_domain_meet(sys: TransSystem, h_indices: Iterable[int]) -> Report:
    """Common domain of a subset versus domains across its closure.

    Every member of the closure generated by H (computed in the abstract
    encoding) must keep the intersection of the domains of H inside its own
    domain.
    """
    idx = sorted(set(h_indices))
    if not idx:
        raise ValueError("subset of elements must be nonempty")
    for i in idx:
        if not 0 <= i < sys.size:
            raise ValueError(f"element index {i} out of range")
    common = (1 << sys.base_size) - 1
    for i in idx:
        common &= sys.dom_bits[i]

    ab = sys.abstract()
    closed = ab.closures.closed_bits(bits_of(idx))
    bad = []
    for phi in iter_bits(closed):
        if common & ~sys.dom_bits[phi]:
            bad.append({"subset": idx, "member": phi})
    report = Report("domain meet bound")
    report.add(
        "closure-domain-bound",
        not bad,
        bad[:10],
        "" if not bad else f"{len(bad)} members",
    )
    return report
