"""Small helpers for int-encoded bitsets over {0..m-1}."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


def bits_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def members(bits: int) -> tuple[int, ...]:
    return tuple(iter_bits(bits))


def full_mask(m: int) -> int:
    return (1 << m) - 1


def bits_to_bool(bits: int, m: int) -> np.ndarray:
    out = np.zeros(m, dtype=bool)
    for i in iter_bits(bits):
        out[i] = True
    return out


def bool_to_bits(arr: np.ndarray) -> int:
    out = 0
    for i in np.nonzero(arr)[0]:
        out |= 1 << int(i)
    return out
