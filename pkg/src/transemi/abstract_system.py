"""Finite algebraic systems (G, ., meet, xi, delta) and their hypothesis checks.

The carrier is {0..m-1}. `mul` and `meet` are m x m index tables, `xi` and
`delta` are m x m boolean matrices. The natural semilattice order `zeta`
(x <= y iff x meet y = x) is derived eagerly. A `StarView` extends the
system read-only by an adjoined identity at index m with the fixed
conventions: e.e = e on products, e <= e, e |- e and x |- e for every x in
G, and no other pair involving e in any of the three relations.

Law checks over triples are evaluated in row blocks so peak memory stays
near block * m^2 even on carriers of a few hundred elements.
"""

from __future__ import annotations

import threading
import time
from typing import TYPE_CHECKING, Callable

import numpy as np

from .errors import MalformedSystemError
from .reports import Report

if TYPE_CHECKING:
    from .closure import ClosureCache

_WITNESS_CAP = 10
_BLOCK = 32


def _as_table(name: str, table, m: int) -> np.ndarray:
    arr = np.asarray(table, dtype=np.int64)
    if arr.shape != (m, m):
        raise MalformedSystemError(f"malformed system: {name} is not {m}x{m}")
    if arr.size and (arr.min() < 0 or arr.max() >= m):
        raise MalformedSystemError(f"malformed system: {name} entry out of range")
    arr.flags.writeable = False
    return arr


def _as_relation(name: str, rel, m: int) -> np.ndarray:
    arr = np.asarray(rel, dtype=bool)
    if arr.shape != (m, m):
        raise MalformedSystemError(f"malformed system: {name} is not {m}x{m}")
    arr.flags.writeable = False
    return arr


class AbstractSystem:
    """Immutable tables and relations of one finite system."""

    def __init__(self, mul, meet, xi, delta):
        mul = np.asarray(mul, dtype=np.int64)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] < 1:
            raise MalformedSystemError("malformed system: mul is not a square table")
        m = mul.shape[0]
        self.size = m
        self.mul = _as_table("mul", mul, m)
        self.meet = _as_table("meet", meet, m)
        self.xi = _as_relation("xi", xi, m)
        self.delta = _as_relation("delta", delta, m)

        zeta = self.meet == np.arange(m)[:, None]
        zeta.flags.writeable = False
        self.zeta = zeta

        # G* tables: index m is the adjoined identity e.
        star = np.empty((m + 1, m + 1), dtype=np.int64)
        star[:m, :m] = self.mul
        star[m, :] = np.arange(m + 1)
        star[:, m] = np.arange(m + 1)
        star.flags.writeable = False
        self.mul_star = star

        dstar = np.ones((m, m + 1), dtype=bool)
        dstar[:, :m] = self.delta
        dstar.flags.writeable = False
        self.delta_star = dstar

        self._lock = threading.Lock()
        self._closures: "ClosureCache | None" = None

    @property
    def e(self) -> int:
        return self.size

    @property
    def star(self) -> "StarView":
        return StarView(self)

    @property
    def closures(self) -> "ClosureCache":
        with self._lock:
            if self._closures is None:
                from .closure import ClosureCache

                self._closures = ClosureCache(self)
            return self._closures

    def leq(self, x: int, y: int) -> bool:
        return bool(self.zeta[x, y])

    def __repr__(self) -> str:
        return f"AbstractSystem(size={self.size})"


class StarView:
    """Read-only view of a system extended by the identity e = size.

    The meet operation is deliberately not extended to e.
    """

    def __init__(self, sys: AbstractSystem):
        self.sys = sys
        self.e = sys.size
        self.size = sys.size + 1

    def mul(self, a: int, b: int) -> int:
        return int(self.sys.mul_star[a, b])

    def leq(self, a: int, b: int) -> bool:
        e = self.e
        if a == e or b == e:
            return a == e and b == e
        return bool(self.sys.zeta[a, b])

    def xi(self, a: int, b: int) -> bool:
        e = self.e
        if a == e or b == e:
            return False
        return bool(self.sys.xi[a, b])

    def delta(self, a: int, b: int) -> bool:
        if b == self.e:
            return True
        if a == self.e:
            return False
        return bool(self.sys.delta[a, b])


def natural_order(sys: AbstractSystem) -> np.ndarray:
    """The order matrix of the meet semilattice: (x,y) iff x meet y = x."""
    return sys.zeta.copy()


def _scan_blocks(m: int, violations_of: Callable[[int, int], np.ndarray]):
    """Count violations of a blocked triple law and keep a few witnesses.

    `violations_of(lo, hi)` returns a boolean array whose first axis runs
    over rows lo..hi-1; witness tuples are re-based to absolute indices.
    """
    count = 0
    witnesses: list[tuple[int, ...]] = []
    for lo in range(0, m, _BLOCK):
        hi = min(m, lo + _BLOCK)
        viol = violations_of(lo, hi)
        if viol.any():
            idx = np.argwhere(viol)
            count += len(idx)
            room = _WITNESS_CAP - len(witnesses)
            for row in idx[:room]:
                witnesses.append((lo + int(row[0]),) + tuple(int(v) for v in row[1:]))
    return count, witnesses


def _add_scan(report: Report, check_id: str, m: int, violations_of, names: tuple[str, ...]) -> None:
    t0 = time.perf_counter()
    count, witnesses = _scan_blocks(m, violations_of)
    report.add(
        check_id,
        count == 0,
        [dict(zip(names, w)) for w in witnesses],
        "" if not count else f"{count} violating tuples",
        time.perf_counter() - t0,
    )


def validate(sys: AbstractSystem) -> Report:
    """Check every hypothesis the representation machinery relies on.

    One result per condition, each failure with witness tuples. All
    conditions are checked; nothing stops at the first failure.
    """
    m = sys.size
    mul, meet, xi, delta, zeta = sys.mul, sys.meet, sys.xi, sys.delta, sys.zeta
    report = Report("system hypotheses")

    _add_scan(
        report, "mul-associative", m,
        lambda lo, hi: mul[mul[lo:hi], :] != mul[lo:hi][:, mul],
        ("x", "y", "z"),
    )

    t0 = time.perf_counter()
    bad_diag = np.nonzero(meet.diagonal() != np.arange(m))[0]
    report.add("meet-idempotent", not len(bad_diag),
               [{"x": int(x)} for x in bad_diag[:_WITNESS_CAP]],
               "" if not len(bad_diag) else f"{len(bad_diag)} elements",
               time.perf_counter() - t0)
    t0 = time.perf_counter()
    bad_comm = np.argwhere(meet != meet.T)
    report.add("meet-commutative", not len(bad_comm),
               [{"x": int(a), "y": int(b)} for a, b in bad_comm[:_WITNESS_CAP]],
               "" if not len(bad_comm) else f"{len(bad_comm)} pairs",
               time.perf_counter() - t0)
    _add_scan(
        report, "meet-associative", m,
        lambda lo, hi: meet[meet[lo:hi], :] != meet[lo:hi][:, meet],
        ("x", "y", "z"),
    )

    t0 = time.perf_counter()
    bad_zx = np.argwhere(zeta & ~xi)
    report.add("order-contained-in-xi", not len(bad_zx),
               [{"x": int(a), "y": int(b)} for a, b in bad_zx[:_WITNESS_CAP]],
               "" if not len(bad_zx) else f"{len(bad_zx)} pairs",
               time.perf_counter() - t0)

    # (u,v) in xi implies (xu, xv) in xi.
    _add_scan(
        report, "xi-left-regular", m,
        lambda lo, hi: xi[None, :, :]
        & ~xi[mul[lo:hi][:, :, None], mul[lo:hi][:, None, :]],
        ("x", "u", "v"),
    )

    # (x,y) in delta implies (ux, y) in delta.
    _add_scan(
        report, "delta-left-ideal", m,
        lambda lo, hi: delta[None, :, :] & ~delta[mul[lo:hi]],
        ("u", "x", "y"),
    )

    # x(y meet z) = xy meet xz.
    _add_scan(
        report, "mul-distributes-over-meet", m,
        lambda lo, hi: mul[lo:hi][:, meet]
        != meet[mul[lo:hi][:, :, None], mul[lo:hi][:, None, :]],
        ("x", "y", "z"),
    )

    # x <= y, u <= v and (y,v) in xi force (u,x) in xi.
    t0 = time.perf_counter()
    zf = zeta.astype(np.float64)
    premise = (zf @ xi.astype(np.float64) @ zf.T) > 0.5
    viol_xu = premise & ~xi.T
    witnesses = []
    for x, u in np.argwhere(viol_xu)[:_WITNESS_CAP]:
        x, u = int(x), int(u)
        found = None
        for y in range(m):
            if not zeta[x, y]:
                continue
            for v in range(m):
                if zeta[u, v] and xi[y, v]:
                    found = {"x": x, "y": y, "u": u, "v": v}
                    break
            if found:
                break
        witnesses.append(found)
    n_viol = int(viol_xu.sum())
    report.add("xi-downward-compatible", n_viol == 0, witnesses,
               "" if not n_viol else f"{n_viol} violating pairs",
               time.perf_counter() - t0)

    # (x,y) in xi implies (x meet y)u = xu meet yu.
    _add_scan(
        report, "xi-meet-right-distributive", m,
        lambda lo, hi: xi[lo:hi][:, :, None]
        & (mul[meet[lo:hi]] != meet[mul[lo:hi][:, None, :], mul[None, :, :]]),
        ("x", "y", "u"),
    )

    return report


def derived_props(sys: AbstractSystem) -> Report:
    """Consequences of the hypotheses; a failure here indicates a bug upstream
    or an input that never passed `validate`."""
    m = sys.size
    mul, xi, zeta = sys.mul, sys.xi, sys.zeta
    report = Report("derived properties")

    t0 = time.perf_counter()
    bad_refl = np.nonzero(~xi.diagonal())[0]
    report.add("xi-reflexive", not len(bad_refl),
               [{"x": int(x)} for x in bad_refl[:_WITNESS_CAP]],
               "" if not len(bad_refl) else f"{len(bad_refl)} elements",
               time.perf_counter() - t0)
    t0 = time.perf_counter()
    bad_sym = np.argwhere(xi != xi.T)
    report.add("xi-symmetric", not len(bad_sym),
               [{"x": int(a), "y": int(b)} for a, b in bad_sym[:_WITNESS_CAP]],
               "" if not len(bad_sym) else f"{len(bad_sym)} pairs",
               time.perf_counter() - t0)

    _add_scan(
        report, "order-left-regular", m,
        lambda lo, hi: zeta[None, :, :]
        & ~zeta[mul[lo:hi][:, :, None], mul[lo:hi][:, None, :]],
        ("z", "x", "y"),
    )
    mt = np.ascontiguousarray(mul.T)
    _add_scan(
        report, "order-right-regular", m,
        lambda lo, hi: zeta[None, :, :]
        & ~zeta[mt[lo:hi][:, :, None], mt[lo:hi][:, None, :]],
        ("z", "x", "y"),
    )

    return report
