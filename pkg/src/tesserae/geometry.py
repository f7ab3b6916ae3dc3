"""Planar geometry kernel: linear maps, rigid motions, polygons, tiles and patches.

Coordinates are doubles.  Comparisons use an absolute tolerance scaled by the
local feature size (tile diameter); hashing of placements quantizes to
``QUANTUM``.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
import shapely

EPS = 1e-9
QUANTUM = 1e-6
ORTHO_TOL = 1e-12
DEGENERATE_AREA = 1e-15


DEFAULT_TILE_CAP = 2_000_000


class TileCapExceeded(RuntimeError):
    pass


def tile_cap() -> int:
    """Maximum tiles one patch may materialise; ``TESSERAE_TILE_CAP`` overrides the default."""
    raw = os.environ.get("TESSERAE_TILE_CAP")
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            pass
    return DEFAULT_TILE_CAP


class GeometryError(ValueError):
    pass


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scaled(self, s: float) -> Point2:
        return Point2(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def _point(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite point ({x}, {y})")
    return Point2(x, y)


def quantize(v: float, quantum: float = QUANTUM) -> int:
    return int(round(v / quantum))


@dataclass(frozen=True)
class LinearMap:
    """2x2 matrix ``[[a, b], [c, d]]`` acting as (x, y) -> (ax+by, cx+dy)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if not math.isfinite(v):
                raise GeometryError(f"non-finite matrix entry {name}={v}")

    @classmethod
    def identity(cls) -> LinearMap:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def scale(cls, s: float) -> LinearMap:
        return cls(s, 0.0, 0.0, s)

    @classmethod
    def rotation(cls, theta: float) -> LinearMap:
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    @classmethod
    def from_rows(cls, rows) -> LinearMap:
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))

    def rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.a, self.b), (self.c, self.d))

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows(), dtype=float)

    def __call__(self, p) -> Point2:
        x, y = p
        return Point2(self.a * x + self.b * y, self.c * x + self.d * y)

    def __matmul__(self, other: LinearMap) -> LinearMap:
        return LinearMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> LinearMap:
        if n < 0:
            return self.inverse() ** (-n)
        out = LinearMap.identity()
        for _ in range(n):
            out = self @ out
        return out

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> LinearMap:
        det = self.det
        if det == 0.0:
            raise GeometryError("singular linear map")
        return LinearMap(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.to_numpy())

    def is_expanding(self) -> bool:
        return bool(np.all(np.abs(self.eigenvalues()) > 1.0))

    def orthogonality_defect(self) -> float:
        # columns unit length and mutually perpendicular
        return max(
            abs(self.a * self.a + self.c * self.c - 1.0),
            abs(self.b * self.b + self.d * self.d - 1.0),
            abs(self.a * self.b + self.c * self.d),
        )

    def is_orthogonal(self, tol: float = ORTHO_TOL) -> bool:
        return self.orthogonality_defect() <= tol

    def is_similarity(self, tol: float = 1e-12) -> bool:
        s = math.sqrt(abs(self.det))
        if s == 0.0:
            return False
        return LinearMap(self.a / s, self.b / s, self.c / s, self.d / s).is_orthogonal(tol)


@dataclass(frozen=True)
class RigidMotion:
    """Isometry x -> linear(x) + translation; reflections are allowed."""

    linear: LinearMap
    translation: Point2 = Point2(0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "translation", _point(self.translation))
        if not self.linear.is_orthogonal(ORTHO_TOL):
            raise GeometryError(
                f"linear part is not orthogonal (defect {self.linear.orthogonality_defect():.3g})"
            )

    @classmethod
    def _trusted(cls, linear: LinearMap, translation: Point2) -> RigidMotion:
        obj = object.__new__(cls)
        object.__setattr__(obj, "linear", linear)
        object.__setattr__(obj, "translation", translation)
        return obj

    @classmethod
    def identity(cls) -> RigidMotion:
        return cls._trusted(LinearMap.identity(), Point2(0.0, 0.0))

    @classmethod
    def translate(cls, x: float, y: float) -> RigidMotion:
        return cls(LinearMap.identity(), Point2(float(x), float(y)))

    @classmethod
    def rotation(cls, theta: float, translation=(0.0, 0.0)) -> RigidMotion:
        return cls(LinearMap.rotation(theta), translation)

    def __call__(self, p) -> Point2:
        x, y = p
        L = self.linear
        return Point2(L.a * x + L.b * y + self.translation.x, L.c * x + L.d * y + self.translation.y)

    def __matmul__(self, other: RigidMotion) -> RigidMotion:
        linear = self.linear @ other.linear
        return RigidMotion(linear, self(other.translation))

    def inverse(self) -> RigidMotion:
        inv = self.linear.inverse()
        t = inv(self.translation)
        return RigidMotion(inv, Point2(-t.x, -t.y))

    def conjugate(self, phi: LinearMap) -> RigidMotion:
        """The motion phi . self . phi^-1 (orthogonality re-checked)."""
        return RigidMotion(phi @ self.linear @ phi.inverse(), phi(self.translation))

    @property
    def is_reflection(self) -> bool:
        return self.linear.det < 0

    @property
    def angle(self) -> float:
        """Angle of the image of the x axis, in [0, 2pi)."""
        L = self.linear
        return math.atan2(L.c, L.a) % (2 * math.pi)

    def homogeneous(self) -> np.ndarray:
        L = self.linear
        return np.array(
            [[L.a, L.b, self.translation.x], [L.c, L.d, self.translation.y], [0.0, 0.0, 1.0]]
        )


def compose(m1: RigidMotion, m2: RigidMotion) -> RigidMotion:
    """The motion applying ``m2`` first, then ``m1``."""
    return m1 @ m2


def _signed_area(pts: Sequence[Point2]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _segments_cross(p, q, r, s) -> bool:
    # proper or touching intersection of closed segments pq and rs
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return min(a[0], b[0]) - 1e-15 <= c[0] <= max(a[0], b[0]) + 1e-15 and min(
            a[1], b[1]
        ) - 1e-15 <= c[1] <= max(a[1], b[1]) + 1e-15

    d1, d2 = orient(r, s, p), orient(r, s, q)
    d3, d4 = orient(p, q, r), orient(p, q, s)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    if d1 == 0 and on_seg(r, s, p):
        return True
    if d2 == 0 and on_seg(r, s, q):
        return True
    if d3 == 0 and on_seg(p, q, r):
        return True
    if d4 == 0 and on_seg(p, q, s):
        return True
    return False


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertex order."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        pts = tuple(_point(p) for p in self.vertices)
        object.__setattr__(self, "vertices", pts)
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        area = _signed_area(pts)
        if abs(area) < DEGENERATE_AREA:
            raise GeometryError("degenerate polygon (zero area)")
        if area < 0:
            raise GeometryError("polygon vertices must be counterclockwise")
        n = len(pts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                    raise GeometryError(f"polygon edges {i} and {j} intersect")

    @classmethod
    def _trusted(cls, vertices: tuple[Point2, ...]) -> Polygon:
        obj = object.__new__(cls)
        object.__setattr__(obj, "vertices", vertices)
        return obj

    @classmethod
    def rectangle(cls, x0: float, y0: float, w: float, h: float) -> Polygon:
        return cls(((x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        return _signed_area(self.vertices)

    def edges(self) -> Iterator[tuple[Point2, Point2]]:
        v = self.vertices
        for i in range(len(v)):
            yield v[i], v[(i + 1) % len(v)]

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        return max(math.dist(p, q) for i, p in enumerate(v) for q in v[i + 1 :])

    def transformed(self, m) -> Polygon:
        """Image under a RigidMotion or LinearMap; orientation is restored to CCW."""
        pts = tuple(m(p) for p in self.vertices)
        det = m.det if isinstance(m, LinearMap) else m.linear.det
        if det < 0:
            pts = (pts[0],) + tuple(reversed(pts[1:]))
        return Polygon._trusted(pts)

    def to_shapely(self) -> shapely.Polygon:
        return shapely.Polygon(self.vertices)

    def contains_point(self, p, tol: float = 0.0) -> bool:
        return bool(shapely.contains_xy(self.to_shapely().buffer(tol) if tol else self.to_shapely(), p[0], p[1]))


def polygon_area(p: Polygon) -> float:
    area = p.signed_area
    if area < DEGENERATE_AREA:
        raise GeometryError("degenerate polygon")
    return area


@dataclass(frozen=True)
class Prototile:
    id: str
    shape: Polygon
    label: str = ""

    def __post_init__(self):
        if not self.id or any(ch.isspace() for ch in self.id):
            raise GeometryError(f"invalid prototile id {self.id!r}")
        if not any(abs(p.x) <= EPS and abs(p.y) <= EPS for p in self.shape.vertices):
            raise GeometryError(f"prototile {self.id}: no reference vertex at the origin")
        if not self.label:
            object.__setattr__(self, "label", self.id)

    @property
    def area(self) -> float:
        return polygon_area(self.shape)


@dataclass(frozen=True)
class Tile:
    proto: Prototile
    placement: RigidMotion = field(default_factory=RigidMotion.identity)

    @cached_property
    def support(self) -> Polygon:
        return self.shape_under(self.placement)

    def shape_under(self, m: RigidMotion) -> Polygon:
        return self.proto.shape.transformed(m)

    @property
    def id(self) -> str:
        return self.proto.id

    @property
    def area(self) -> float:
        return self.proto.area

    @property
    def bbox(self):
        return self.support.bbox

    @property
    def diameter(self) -> float:
        return self.proto.shape.diameter

    def moved(self, m: RigidMotion) -> Tile:
        return Tile(self.proto, m @ self.placement)

    def sort_key(self) -> tuple:
        m = self.placement
        return (
            self.proto.id,
            quantize(m.translation.y),
            quantize(m.translation.x),
            quantize(m.angle) % quantize(2 * math.pi),
            m.is_reflection,
        )


@dataclass(frozen=True)
class Patch:
    """Finite collection of tiles; interiors are checked on demand, not here."""

    tiles: tuple[Tile, ...] = ()
    prototiles: tuple[Prototile, ...] = ()

    def __post_init__(self):
        tiles = tuple(self.tiles)
        object.__setattr__(self, "tiles", tiles)
        protos = list(self.prototiles)
        seen = {p.id for p in protos}
        for t in tiles:
            if t.proto.id not in seen:
                protos.append(t.proto)
                seen.add(t.proto.id)
        object.__setattr__(self, "prototiles", tuple(protos))

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self) -> Iterator[Tile]:
        return iter(self.tiles)

    def __getitem__(self, i: int) -> Tile:
        return self.tiles[i]

    def canonical(self) -> Patch:
        return Patch(tuple(sorted(self.tiles, key=Tile.sort_key)), self.prototiles)

    def counts(self) -> dict[str, int]:
        out = {p.id: 0 for p in self.prototiles}
        for t in self.tiles:
            out[t.proto.id] += 1
        return out

    def count_vector(self, ids: Sequence[str]) -> list[int]:
        c = self.counts()
        return [c.get(i, 0) for i in ids]

    @property
    def area(self) -> float:
        return sum(t.area for t in self.tiles)

    @cached_property
    def vertex_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Tile supports as a padded (k, m, 2) array (CCW, last vertex repeated) and vertex counts."""
        k = len(self.tiles)
        m = max((len(t.proto.shape) for t in self.tiles), default=3)
        out = np.zeros((k, m, 2))
        nv = np.zeros(k, dtype=int)
        lin = np.array([(t.placement.linear.a, t.placement.linear.b, t.placement.linear.c, t.placement.linear.d) for t in self.tiles], dtype=float).reshape(k, 2, 2)
        tr = np.array([t.placement.translation for t in self.tiles]).reshape(k, 2)
        by_proto: dict[str, list[int]] = defaultdict(list)
        for i, t in enumerate(self.tiles):
            by_proto[t.proto.id].append(i)
        shapes = {p.id: p.shape for p in self.prototiles}
        for t in self.tiles:
            shapes.setdefault(t.proto.id, t.proto.shape)
        for pid, idx in by_proto.items():
            idx = np.asarray(idx)
            v = np.asarray(shapes[pid].vertices, dtype=float)
            img = np.einsum("kij,vj->kvi", lin[idx], v) + tr[idx][:, None, :]
            refl = np.linalg.det(lin[idx]) < 0
            if refl.any():
                order = np.r_[0, np.arange(len(v) - 1, 0, -1)]
                img[refl] = img[refl][:, order]
            out[idx, : len(v)] = img
            out[idx, len(v) :] = img[:, -1:, :]
            nv[idx] = len(v)
        return out, nv

    @cached_property
    def bboxes(self) -> np.ndarray:
        v, _ = self.vertex_array
        return np.concatenate([v.min(axis=1), v.max(axis=1)], axis=1).reshape(-1, 4)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        boxes = self.bboxes
        return (
            float(boxes[:, 0].min()),
            float(boxes[:, 1].min()),
            float(boxes[:, 2].max()),
            float(boxes[:, 3].max()),
        )

    @property
    def max_diameter(self) -> float:
        return max((p.shape.diameter for p in self.prototiles), default=0.0)

    def moved(self, m: RigidMotion) -> Patch:
        return Patch(tuple(t.moved(m) for t in self.tiles), self.prototiles)

    def support(self) -> shapely.Geometry:
        return shapely.union_all(shapely_polygons(self), grid_size=None)

    def is_connected(self, tol: float = EPS) -> bool:
        if len(self) <= 1:
            return True
        adj = defaultdict(list)
        for i, j, _ in adjacent_pairs(self, tol):
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for k in adj[stack.pop()]:
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        return len(seen) == len(self)


def shapely_polygons(tiles) -> np.ndarray:
    if isinstance(tiles, Patch):
        v, nv = tiles.vertex_array
        out = np.empty(len(tiles), dtype=object)
        for k in np.unique(nv):
            idx = np.nonzero(nv == k)[0]
            out[idx] = shapely.polygons(v[idx, :k])
        return out
    return np.array([shapely.Polygon(t.support.vertices) for t in tiles], dtype=object)


def patches_equal(p: Patch, q: Patch, tol: float = EPS) -> bool:
    """Same tiles up to ordering: matching prototile ids and supports within ``tol``."""
    if len(p) != len(q):
        return False

    a = sorted(p.tiles, key=Tile.sort_key)
    b = sorted(q.tiles, key=Tile.sort_key)
    for s, t in zip(a, b):
        if s.proto.id != t.proto.id:
            return False
        vs = sorted(s.support.vertices)
        vt = sorted(t.support.vertices)
        if len(vs) != len(vt):
            return False
        if any(math.dist(u, w) > tol for u, w in zip(vs, vt)):
            return False
    return True


def intersection_areas(a, b, scale: float) -> np.ndarray:
    """Pairwise intersection areas of shapely polygons.

    GEOS overlay can misreport tiles that share an edge whose endpoints
    differ in the last bits; a second overlay on a fine snapping grid does
    not, and true overlaps survive both, so the smaller value is kept.
    """
    raw = shapely.area(shapely.intersection(a, b))
    suspect = raw > 0
    if np.any(suspect):
        snapped = shapely.area(shapely.intersection(np.asarray(a)[suspect], np.asarray(b)[suspect], grid_size=1e-9 * scale))
        raw = np.array(raw, dtype=float)
        raw[suspect] = np.minimum(raw[suspect], snapped)
    return raw


def interiors_disjoint(t1: Tile, t2: Tile, tol: float = EPS) -> bool:
    """True iff the supports overlap in less than ``tol`` times the smaller area."""
    a, b = t1.support.to_shapely(), t2.support.to_shapely()
    scale = max(t1.diameter, t2.diameter, *map(abs, t1.bbox + t2.bbox))
    inter = float(intersection_areas(np.array([a]), np.array([b]), scale)[0])
    return inter < tol * min(t1.area, t2.area)


def _edge_overlap(p, q, r, s, eps: float) -> float:
    dx, dy = q[0] - p[0], q[1] - p[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        return 0.0
    ux, uy = dx / length, dy / length
    # perpendicular offsets of r and s from the line through p, q
    dr = (r[0] - p[0]) * uy - (r[1] - p[1]) * ux
    ds = (s[0] - p[0]) * uy - (s[1] - p[1]) * ux
    if abs(dr) > eps or abs(ds) > eps:
        return 0.0
    tr = (r[0] - p[0]) * ux + (r[1] - p[1]) * uy
    ts = (s[0] - p[0]) * ux + (s[1] - p[1]) * uy
    lo = max(0.0, min(tr, ts))
    hi = min(length, max(tr, ts))
    return hi - lo if hi - lo > eps else 0.0


def shared_boundary_length(t1: Tile, t2: Tile, tol: float = EPS) -> float:
    """Length of the one-dimensional part of the boundary intersection."""
    eps = tol * max(t1.diameter, t2.diameter)
    total = 0.0
    for p, q in t1.support.edges():
        for r, s in t2.support.edges():
            total += _edge_overlap(p, q, r, s, eps)
    return total


class SpatialIndex:
    """Uniform grid hash; each tile is registered in every cell its bounding box meets."""

    def __init__(self, patch: Patch, cell_size: float | None = None):
        self.cell_size = float(cell_size or patch.max_diameter or 1.0)
        self.boxes = patch.bboxes if len(patch) else np.zeros((0, 4))
        self.cells: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i, box in enumerate(self.boxes):
            for cell in self._cells_for(box, 0.0):
                self.cells[cell].append(i)

    def __len__(self) -> int:
        return len(self.boxes)

    def _cells_for(self, box, pad: float) -> Iterator[tuple[int, int]]:
        h = self.cell_size
        x0, y0 = math.floor((box[0] - pad) / h), math.floor((box[1] - pad) / h)
        x1, y1 = math.floor((box[2] + pad) / h), math.floor((box[3] + pad) / h)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                yield cx, cy

    def query(self, box, pad: float = 0.0) -> list[int]:
        """Indices of tiles whose bounding box meets ``box`` grown by ``pad``."""
        out = set()
        for cell in self._cells_for(box, pad):
            out.update(self.cells.get(cell, ()))
        bx = self.boxes
        return sorted(
            i
            for i in out
            if bx[i, 0] <= box[2] + pad
            and bx[i, 2] >= box[0] - pad
            and bx[i, 1] <= box[3] + pad
            and bx[i, 3] >= box[1] - pad
        )

    def candidate_pairs(self, pad: float = 0.0) -> np.ndarray:
        """All pairs i < j whose bounding boxes meet (within ``pad``), as an (k, 2) array."""
        bx = self.boxes
        n = len(bx)
        if n < 2:
            return np.zeros((0, 2), dtype=int)
        h = self.cell_size
        lo = np.floor((bx[:, :2] - pad) / h).astype(np.int64)
        hi = np.floor((bx[:, 2:] + pad) / h).astype(np.int64)
        span = hi - lo + 1
        reps = span[:, 0] * span[:, 1]
        tile = np.repeat(np.arange(n), reps)
        local = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        cx = lo[tile, 0] + local // span[tile, 1]
        cy = lo[tile, 1] + local % span[tile, 1]
        cell = (cx - cx.min()) * (cy.max() - cy.min() + 1) + (cy - cy.min())
        order = np.lexsort((tile, cell))
        cell, tile = cell[order], tile[order]
        bounds = np.flatnonzero(np.diff(cell)) + 1
        group_end = np.append(bounds, len(cell))
        ends = np.repeat(group_end, np.diff(np.r_[0, group_end]))
        counts = ends - np.arange(len(cell)) - 1
        first = np.repeat(np.arange(len(cell)), counts)
        second = first + 1 + np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        a, b = tile[first], tile[second]
        ok = (
            (bx[a, 0] <= bx[b, 2] + pad)
            & (bx[b, 0] <= bx[a, 2] + pad)
            & (bx[a, 1] <= bx[b, 3] + pad)
            & (bx[b, 1] <= bx[a, 3] + pad)
            & (a != b)
        )
        i, j = np.minimum(a[ok], b[ok]), np.maximum(a[ok], b[ok])
        code = np.unique(i * n + j)
        return np.stack([code // n, code % n], axis=1)


def _edge_arrays(patch: Patch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v, nv = patch.vertex_array
    m = v.shape[1]
    valid = np.arange(m)[None, :] < nv[:, None]
    nxt = (np.arange(m)[None, :] + 1) % nv[:, None]
    ends = np.take_along_axis(v, nxt[:, :, None].repeat(2, axis=2), axis=1)
    return v, ends, valid


def shared_boundary_lengths(patch: Patch, pairs: np.ndarray, tol: float = EPS, chunk: int = 20000) -> np.ndarray:
    """Vectorised :func:`shared_boundary_length` over index pairs of one patch."""
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    out = np.zeros(len(pairs))
    if len(pairs) == 0:
        return out
    starts, ends, valid = _edge_arrays(patch)
    diam = np.array([t.diameter for t in patch.tiles])
    for k0 in range(0, len(pairs), chunk):
        pr = pairs[k0 : k0 + chunk]
        i, j = pr[:, 0], pr[:, 1]
        eps = (tol * np.maximum(diam[i], diam[j]))[:, None, None]
        p = starts[i][:, :, None, :]
        q = ends[i][:, :, None, :]
        r = starts[j][:, None, :, :]
        s = ends[j][:, None, :, :]
        d = q - p
        length = np.hypot(d[..., 0], d[..., 1])
        safe = np.where(length > 0, length, 1.0)
        ux, uy = d[..., 0] / safe, d[..., 1] / safe
        dr = (r[..., 0] - p[..., 0]) * uy - (r[..., 1] - p[..., 1]) * ux
        ds = (s[..., 0] - p[..., 0]) * uy - (s[..., 1] - p[..., 1]) * ux
        tr = (r[..., 0] - p[..., 0]) * ux + (r[..., 1] - p[..., 1]) * uy
        ts = (s[..., 0] - p[..., 0]) * ux + (s[..., 1] - p[..., 1]) * uy
        lo = np.maximum(0.0, np.minimum(tr, ts))
        hi = np.minimum(length, np.maximum(tr, ts))
        ov = hi - lo
        ok = (np.abs(dr) <= eps) & (np.abs(ds) <= eps) & (ov > eps) & (length > 0)
        ok &= valid[i][:, :, None] & valid[j][:, None, :]
        out[k0 : k0 + chunk] = np.where(ok, ov, 0.0).sum(axis=(1, 2))
    return out


def adjacent_pairs(patch: Patch, tol: float = EPS, index: SpatialIndex | None = None) -> list[tuple[int, int, float]]:
    """Pairs (i, j, length), i < j, sharing a boundary of positive length."""
    if len(patch) < 2:
        return []
    index = index or SpatialIndex(patch)
    pad = tol * max(patch.max_diameter, 1.0)
    cand = index.candidate_pairs(pad)
    lengths = shared_boundary_lengths(patch, cand, tol)
    thresh = tol * max(patch.max_diameter, 1.0)
    keep = lengths > thresh
    return [(int(a), int(b), float(l)) for (a, b), l in zip(cand[keep], lengths[keep])]


def neighbors(idx: SpatialIndex, patch: Patch, i: int, tol: float = EPS) -> list[int]:
    """Tiles sharing a boundary of positive length with tile ``i``."""
    t = patch.tiles[i]
    pad = tol * max(patch.max_diameter, 1.0)
    out = []
    for j in idx.query(t.bbox, pad):
        if j != i and shared_boundary_length(t, patch.tiles[j], tol) > pad:
            out.append(j)
    return out


def overlapping_pairs(patch: Patch, tol: float = EPS, index: SpatialIndex | None = None) -> list[tuple[int, int, float]]:
    """Pairs (i, j, area) whose interiors overlap by at least ``tol`` times the smaller area."""
    if len(patch) < 2:
        return []
    index = index or SpatialIndex(patch)
    cand = index.candidate_pairs(0.0)
    if len(cand) == 0:
        return []
    geoms = shapely_polygons(patch)
    areas = np.array([t.area for t in patch.tiles])
    x0, y0, x1, y1 = patch.bbox
    scale = max(patch.max_diameter, abs(x0), abs(y0), abs(x1), abs(y1))
    inter = intersection_areas(geoms[cand[:, 0]], geoms[cand[:, 1]], scale)
    limit = tol * np.minimum(areas[cand[:, 0]], areas[cand[:, 1]])
    bad = inter >= limit
    return [(int(a), int(b), float(x)) for (a, b), x in zip(cand[bad], inter[bad])]


def patch_from_arrays(prototiles, ids, lin, trans) -> tuple[Patch, np.ndarray]:
    """Canonically ordered patch from placement arrays, plus the permutation applied."""
    protos = tuple(prototiles)
    ids = np.asarray(ids, dtype=int)
    if len(ids) == 0:
        return Patch((), protos), np.zeros(0, dtype=int)
    id_rank = np.argsort(np.argsort([p.id for p in protos]))
    angle = np.mod(np.arctan2(lin[:, 1, 0], lin[:, 0, 0]), 2 * math.pi)
    refl = (lin[:, 0, 0] * lin[:, 1, 1] - lin[:, 0, 1] * lin[:, 1, 0]) < 0
    qa = np.round(angle / QUANTUM)
    qa = np.where(qa == round(2 * math.pi / QUANTUM), 0, qa)
    order = np.lexsort((refl, qa, np.round(trans[:, 0] / QUANTUM), np.round(trans[:, 1] / QUANTUM), id_rank[ids]))
    lin = np.array(lin, dtype=float)
    defect = np.abs(np.einsum("kji,kjl->kil", lin, lin) - np.eye(2)).max(axis=(1, 2))
    for k in np.nonzero(defect > ORTHO_TOL)[0]:
        # snap accumulated round-off back onto the orthogonal group
        u, _, vt = np.linalg.svd(lin[k])
        lin[k] = u @ vt
    if np.abs(np.einsum("kji,kjl->kil", lin, lin) - np.eye(2)).max() > ORTHO_TOL:
        raise GeometryError("placement is not a rigid motion")
    L = lin[order].reshape(-1, 4).tolist()
    T = trans[order].tolist()
    I = ids[order].tolist()
    tiles = [
        Tile(protos[i], RigidMotion._trusted(LinearMap(*l), Point2(*t))) for i, l, t in zip(I, L, T)
    ]
    return Patch(tuple(tiles), protos), order
