"""Instance files: one YAML document per system, hand-editable.

Two kinds. "transformations" carries a carrier size and seed maps as pair
lists; the closure is computed on load. "abstract" carries row-major index
tables and sparse relation pair lists. Parsing failures raise
InstanceFormatError with a key-path tag; write followed by parse is the
identity on instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml

from .abstract_system import AbstractSystem
from .errors import InstanceFormatError
from .partial_maps import PartialMap
from .trans_semigroup import TransSystem, generate


@dataclass(frozen=True)
class TransInstance:
    base_size: int
    maps: tuple[tuple[tuple[int, int], ...], ...]
    name: Optional[str] = None
    seed: Optional[int] = None

    kind = "transformations"

    def build(self, cap: int = 256) -> TransSystem:
        seeds = [
            PartialMap.from_pairs(self.base_size, pairs) for pairs in self.maps
        ]
        return generate(seeds, cap)


@dataclass(frozen=True)
class AbstractInstance:
    size: int
    mul: tuple[tuple[int, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    xi: tuple[tuple[int, int], ...]
    delta: tuple[tuple[int, int], ...]
    name: Optional[str] = None
    seed: Optional[int] = None

    kind = "abstract"

    def build(self) -> AbstractSystem:
        m = self.size
        xi = [[False] * m for _ in range(m)]
        delta = [[False] * m for _ in range(m)]
        for x, y in self.xi:
            xi[x][y] = True
        for x, y in self.delta:
            delta[x][y] = True
        return AbstractSystem(
            [list(r) for r in self.mul], [list(r) for r in self.meet], xi, delta
        )


Instance = TransInstance | AbstractInstance


def _want(data: dict, key: str, where: str):
    if key not in data:
        raise InstanceFormatError(f"{where}: missing key {key!r}")
    return data[key]


def _int_at(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InstanceFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _pair_list(value, where: str, bound: int) -> tuple[tuple[int, int], ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise InstanceFormatError(f"{where}: expected a list of pairs")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, list) or len(item) != 2:
            raise InstanceFormatError(f"{where}[{i}]: expected a pair [a, b]")
        a = _int_at(item[0], f"{where}[{i}][0]")
        b = _int_at(item[1], f"{where}[{i}][1]")
        if not (0 <= a < bound and 0 <= b < bound):
            raise InstanceFormatError(f"{where}[{i}]: index out of range 0..{bound - 1}")
        out.append((a, b))
    return tuple(out)


def _table(value, where: str, m: int) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or len(value) != m:
        raise InstanceFormatError(f"{where}: expected {m} rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != m:
            raise InstanceFormatError(f"{where}[{i}]: expected {m} entries")
        vals = []
        for j, v in enumerate(row):
            v = _int_at(v, f"{where}[{i}][{j}]")
            if not 0 <= v < m:
                raise InstanceFormatError(f"{where}[{i}][{j}]: entry out of range")
            vals.append(v)
        rows.append(tuple(vals))
    return tuple(rows)


def instance_from_dict(data, where: str = "instance") -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError(f"{where}: expected a mapping at top level")
    kind = _want(data, "kind", where)
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise InstanceFormatError(f"{where}.name: expected a string")
    seed = data.get("seed")
    if seed is not None:
        seed = _int_at(seed, f"{where}.seed")

    if kind == "transformations":
        n = _int_at(_want(data, "base_size", where), f"{where}.base_size")
        if n < 1:
            raise InstanceFormatError(f"{where}.base_size: must be positive")
        raw_maps = _want(data, "maps", where)
        if not isinstance(raw_maps, list) or not raw_maps:
            raise InstanceFormatError(f"{where}.maps: expected a nonempty list")
        maps = []
        for i, pairs in enumerate(raw_maps):
            plist = _pair_list(pairs, f"{where}.maps[{i}]", n)
            seen: dict[int, int] = {}
            for a, b in plist:
                if a in seen and seen[a] != b:
                    raise InstanceFormatError(
                        f"{where}.maps[{i}]: element {a} mapped to both {seen[a]} and {b}"
                    )
                seen[a] = b
            maps.append(plist)
        return TransInstance(n, tuple(maps), name, seed)

    if kind == "abstract":
        m = _int_at(_want(data, "size", where), f"{where}.size")
        if m < 1:
            raise InstanceFormatError(f"{where}.size: must be positive")
        return AbstractInstance(
            m,
            _table(_want(data, "mul", where), f"{where}.mul", m),
            _table(_want(data, "meet", where), f"{where}.meet", m),
            _pair_list(data.get("xi"), f"{where}.xi", m),
            _pair_list(data.get("delta"), f"{where}.delta", m),
            name,
            seed,
        )

    raise InstanceFormatError(f"{where}.kind: unknown kind {kind!r}")


def instance_to_dict(inst: Instance) -> dict:
    out: dict = {"kind": inst.kind}
    if inst.name is not None:
        out["name"] = inst.name
    if inst.seed is not None:
        out["seed"] = inst.seed
    if isinstance(inst, TransInstance):
        out["base_size"] = inst.base_size
        out["maps"] = [[list(p) for p in pairs] for pairs in inst.maps]
    else:
        out["size"] = inst.size
        out["mul"] = [list(r) for r in inst.mul]
        out["meet"] = [list(r) for r in inst.meet]
        out["xi"] = [list(p) for p in inst.xi]
        out["delta"] = [list(p) for p in inst.delta]
    return out


def parse_instance_text(text: str, where: str = "instance") -> Instance:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InstanceFormatError(f"{where}: not valid YAML: {exc}") from exc
    return instance_from_dict(data, where)


def parse_instance(path: str | Path) -> Instance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
    return parse_instance_text(text, str(path))


def render_instance(inst: Instance) -> str:
    return yaml.safe_dump(instance_to_dict(inst), sort_keys=False, default_flow_style=None)


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(render_instance(inst))


def trans_instance_from_system(sys: TransSystem, name: Optional[str] = None,
                               seed: Optional[int] = None,
                               seeds_only: Optional[list[PartialMap]] = None) -> TransInstance:
    maps = seeds_only if seeds_only is not None else list(sys.elements)
    return TransInstance(
        sys.base_size, tuple(f.pairs() for f in maps), name, seed
    )


def abstract_instance_from_system(sys: AbstractSystem, name: Optional[str] = None,
                                  seed: Optional[int] = None) -> AbstractInstance:
    m = sys.size
    xi = tuple((x, y) for x in range(m) for y in range(m) if sys.xi[x, y])
    delta = tuple((x, y) for x in range(m) for y in range(m) if sys.delta[x, y])
    return AbstractInstance(
        m,
        tuple(tuple(int(v) for v in row) for row in sys.mul),
        tuple(tuple(int(v) for v in row) for row in sys.meet),
        xi,
        delta,
        name,
        seed,
    )
