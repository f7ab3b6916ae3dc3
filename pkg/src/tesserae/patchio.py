"""Plain-text patch files.

::

    TESSERAE-PATCH v1
    prototiles 2
    prototile A "label" 3 0 0 1 0 0 1
    ...
    tiles 5
    A 1 0 0 1 0.5 0
    ...

Each tile record is ``id a b c d tx ty``: the placement x -> [[a, b], [c, d]] x + (tx, ty)
of prototile ``id``.  Reals are written with 17 significant digits so a
round trip is exact.  Records are in canonical order; an empty patch is
the header line alone.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .geometry import GeometryError, LinearMap, Patch, Point2, Polygon, Prototile, RigidMotion, Tile

MAGIC = "TESSERAE-PATCH"
VERSION = "v1"
HEADER = f"{MAGIC} {VERSION}"


class PatchFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _g(x: float) -> str:
    s = f"{float(x):.17g}"
    return "0" if s == "-0" else s


def dumps(patch: Patch) -> str:
    if len(patch) == 0:
        return HEADER + "\n"
    patch = patch.canonical()
    used = {t.proto.id for t in patch}
    protos = [p for p in patch.prototiles if p.id in used]
    lines = [HEADER, f"prototiles {len(protos)}"]
    for p in protos:
        coords = " ".join(f"{_g(v.x)} {_g(v.y)}" for v in p.shape.vertices)
        lines.append(f"prototile {p.id} {json.dumps(p.label)} {len(p.shape.vertices)} {coords}")
    lines.append(f"tiles {len(patch)}")
    for t in patch:
        m = t.placement
        L = m.linear
        lines.append(
            " ".join([t.proto.id] + [_g(v) for v in (L.a, L.b, L.c, L.d, m.translation.x, m.translation.y)])
        )
    return "\n".join(lines) + "\n"


def save(patch: Patch, path) -> None:
    Path(path).write_text(dumps(patch))


def _floats(parts: list[str], lineno: int) -> list[float]:
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise PatchFormatError("malformed number", lineno) from None
    if not all(math.isfinite(v) for v in vals):
        raise PatchFormatError("non-finite number", lineno)
    return vals


def _count(line: str, keyword: str, lineno: int) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != keyword or not parts[1].isdigit():
        raise PatchFormatError(f"expected '{keyword} <count>'", lineno)
    return int(parts[1])


def loads(text: str) -> Patch:
    lines = text.splitlines()
    # (line number, content) skipping blank lines
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise PatchFormatError("empty file: missing header", 1)
    lineno, head = rows[0]
    parts = head.split()
    if not parts or parts[0] != MAGIC:
        raise PatchFormatError(f"not a patch file (expected '{HEADER}')", lineno)
    if len(parts) != 2 or parts[1] != VERSION:
        found = parts[1] if len(parts) > 1 else "none"
        raise PatchFormatError(f"unsupported version {found} (this reader handles {VERSION})", lineno)
    if len(rows) == 1:
        return Patch(())
    pos = 1
    lineno, line = rows[pos]
    n_proto = _count(line, "prototiles", lineno)
    pos += 1
    protos: dict[str, Prototile] = {}
    for _ in range(n_proto):
        if pos >= len(rows):
            raise PatchFormatError("truncated prototile table", len(lines))
        lineno, line = rows[pos]
        pos += 1
        if not line.startswith("prototile "):
            raise PatchFormatError("malformed prototile record", lineno)
        rest = line[len("prototile ") :].lstrip()
        pid, _, rest = rest.partition(" ")
        try:
            label, end = json.JSONDecoder().raw_decode(rest.lstrip())
        except ValueError:
            raise PatchFormatError("malformed prototile label", lineno) from None
        if not isinstance(label, str):
            raise PatchFormatError("prototile label must be a string", lineno)
        nums = rest.lstrip()[end:].split()
        if not nums or not nums[0].isdigit():
            raise PatchFormatError("malformed prototile record", lineno)
        k = int(nums[0])
        coords = _floats(nums[1:], lineno)
        if len(coords) != 2 * k:
            raise PatchFormatError(f"prototile {pid}: expected {k} vertices", lineno)
        if pid in protos:
            raise PatchFormatError(f"duplicate prototile {pid}", lineno)
        try:
            shape = Polygon(tuple((coords[2 * i], coords[2 * i + 1]) for i in range(k)))
            protos[pid] = Prototile(pid, shape, label)
        except GeometryError as err:
            raise PatchFormatError(f"prototile {pid}: {err}", lineno) from None
    if pos >= len(rows):
        raise PatchFormatError("missing tile table", len(lines))
    lineno, line = rows[pos]
    n_tiles = _count(line, "tiles", lineno)
    pos += 1
    tiles = []
    for _ in range(n_tiles):
        if pos >= len(rows):
            raise PatchFormatError(f"truncated tile table (expected {n_tiles} records)", len(lines))
        lineno, line = rows[pos]
        pos += 1
        parts = line.split()
        if len(parts) != 7:
            raise PatchFormatError("malformed record: expected 'id a b c d tx ty'", lineno)
        proto = protos.get(parts[0])
        if proto is None:
            raise PatchFormatError(f"malformed record: unknown prototile {parts[0]}", lineno)
        a, b, c, d, tx, ty = _floats(parts[1:], lineno)
        try:
            motion = RigidMotion(LinearMap(a, b, c, d), Point2(tx, ty))
        except GeometryError as err:
            raise PatchFormatError(f"malformed record: {err}", lineno) from None
        tiles.append(Tile(proto, motion))
    if pos < len(rows):
        raise PatchFormatError("trailing data after tile table", rows[pos][0])
    return Patch(tuple(tiles), tuple(protos.values()))


def load(path) -> Patch:
    return loads(Path(path).read_text())
