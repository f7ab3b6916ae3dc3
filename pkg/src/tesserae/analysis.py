"""Tiling diagnostics: adjacency census, dual graph, fault lines, admitted patches, rescaled limits."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import shapely
from shapely import affinity

from .geometry import (
    EPS,
    QUANTUM,
    LinearMap,
    Patch,
    Polygon,
    SpatialIndex,
    Tile,
    adjacent_pairs,
    overlapping_pairs,
    shapely_polygons,
)

MODES = ("translation", "isometry")


def generate(rule, seed: str, n: int) -> Patch:
    """Level-n patch of ``seed`` for any rule kind."""
    from .combrule import CombinatorialRule
    from .georule import GeometricRule, inflate, validate
    from .symbolic import GridRule, grid_patch

    if isinstance(rule, GeometricRule):
        if not rule.validated:
            validate(rule)
        return inflate(rule, seed, n)
    if isinstance(rule, CombinatorialRule):
        return rule.level_patch(seed, n)
    if isinstance(rule, GridRule):
        return grid_patch(rule, seed, n)
    raise TypeError(f"cannot generate patches from {type(rule).__name__}")


def rule_ids(rule) -> list[str]:
    from .symbolic import GridRule

    if isinstance(rule, GridRule):
        return list(rule.alphabet)
    return list(rule.ids)


def equivalence_mode(rule) -> str:
    return getattr(rule, "equivalence", "translation")


# keys ---------------------------------------------------------------------


def _q(a: np.ndarray) -> np.ndarray:
    return np.round(np.asarray(a) / QUANTUM).astype(np.int64)


def shape_symmetries(poly: Polygon, tol: float = 1e-9) -> list[tuple[np.ndarray, np.ndarray]]:
    """Isometries (L, t) mapping the polygon onto itself, reflections included."""
    v = np.asarray(poly.vertices, dtype=float)
    k = len(v)
    scale = max(poly.diameter, 1.0)
    e0 = v[1] - v[0]
    out = []
    for j in range(k):
        for step in (1, -1):
            a, b = v[j], v[(j + step) % k]
            e1 = b - a
            if abs(np.linalg.norm(e1) - np.linalg.norm(e0)) > tol * scale:
                continue
            c, s = e0 / np.linalg.norm(e0), e1 / np.linalg.norm(e1)
            R0 = np.array([[c[0], -c[1]], [c[1], c[0]]])
            R1 = np.array([[s[0], -s[1]], [s[1], s[0]]])
            if step == 1:
                L = R1 @ R0.T
            else:
                # reflect across the edge direction before rotating onto the reversed edge
                F = np.array([[1.0, 0.0], [0.0, -1.0]])
                L = R1 @ F @ R0.T
            t = a - L @ v[0]
            img = v @ L.T + t
            gap = np.linalg.norm(img[:, None, :] - v[None, :, :], axis=2).min(axis=1)
            if gap.max() < 100 * tol * scale:
                out.append((L, t))
    uniq = []
    for L, t in out:
        if not any(np.allclose(L, L2, atol=1e-9) and np.allclose(t, t2, atol=1e-9 * scale) for L2, t2 in uniq):
            uniq.append((L, t))
    return uniq


def _verts(t: Tile) -> np.ndarray:
    return np.asarray(t.support.vertices, dtype=float)


def _sorted_key(q: np.ndarray) -> tuple:
    return tuple(sorted(map(tuple, q.tolist())))


def _anchored(v: np.ndarray, origin: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Least vertex (absolute, float) and the quantized shape relative to it.

    Differences are taken in floating point before quantizing, so congruent
    tiles far apart get identical signatures.
    """
    rel = _q(v - origin)
    order = sorted(range(len(rel)), key=lambda k: tuple(rel[k]))
    r = rel[order[0]]
    sig = tuple((int(x - r[0]), int(y - r[1])) for x, y in rel[order])
    return v[order[0]], sig


def translation_key(t1: Tile, t2: Tile) -> tuple:
    """Class of the ordered pair under translations: ids, shapes and the offset between least vertices."""
    o1, o2 = np.array(t1.placement.translation), np.array(t2.placement.translation)
    r1, s1 = _anchored(_verts(t1), o1)
    r2, s2 = _anchored(_verts(t2), o2)
    d = _q(r2 - r1)
    return (t1.id, t2.id, s1, s2, (int(d[0]), int(d[1])))


def isometry_key(t1: Tile, t2: Tile, symmetries) -> tuple:
    """Class of the ordered pair under isometries: move t1 to its prototile pose, least over its symmetries."""
    m = t1.placement
    Linv = m.linear.inverse().to_numpy()
    base = (_verts(t2) - np.array(m.translation)) @ Linv.T
    best = None
    for L, t in symmetries:
        img = base @ L.T + t
        key = (t1.id, t2.id, _sorted_key(_q(img)))
        if best is None or key < best:
            best = key
    return best


class _Keyer:
    def __init__(self, patch: Patch, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown equivalence mode {mode!r}")
        self.mode = mode
        self.sym = {}
        if mode == "isometry":
            for p in patch.prototiles:
                self.sym[p.id] = shape_symmetries(p.shape)

    def ordered(self, t1: Tile, t2: Tile) -> tuple:
        if self.mode == "translation":
            return translation_key(t1, t2)
        return isometry_key(t1, t2, self.sym[t1.id])

    def __call__(self, t1: Tile, t2: Tile) -> tuple:
        return min(self.ordered(t1, t2), self.ordered(t2, t1))


def pair_key(t1: Tile, t2: Tile, mode: str = "translation", patch: Patch | None = None) -> tuple:
    """Canonical AdjacencyClass key of an unordered pair."""
    protos = patch.prototiles if patch is not None else (t1.proto, t2.proto)
    return _Keyer(Patch((), tuple(dict.fromkeys(protos))), mode)(t1, t2)


def _translation_signatures(patch: Patch):
    """Per tile: least vertex (float) and the quantized shape relative to it."""
    v, nv = patch.vertex_array
    refs, sigs = [], []
    for i, t in enumerate(patch.tiles):
        r, sig = _anchored(v[i, : nv[i]], np.array(t.placement.translation))
        refs.append(r)
        sigs.append(sig)
    return np.array(refs).reshape(-1, 2), sigs


def pair_keys(patch: Patch, pairs, mode: str = "translation") -> list[tuple]:
    """Keys of many unordered pairs of one patch.

    In translation mode the key (ids, own shapes, offset between reference
    vertices) carries the same information as :func:`translation_key` but is
    assembled from per-tile signatures.
    """
    if mode != "translation":
        keyer = _Keyer(patch, mode)
        return [keyer(patch.tiles[i], patch.tiles[j]) for i, j in pairs]
    refs, sigs = _translation_signatures(patch)
    ids = [t.id for t in patch.tiles]
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    d = _q(refs[pairs[:, 1]] - refs[pairs[:, 0]]).tolist()
    out = []
    for (i, j), (dx, dy) in zip(pairs.tolist(), d):
        a = (ids[i], ids[j], sigs[i], sigs[j], (dx, dy))
        b = (ids[j], ids[i], sigs[j], sigs[i], (-dx, -dy))
        out.append(min(a, b))
    return out


def adjacency_classes(patch: Patch, mode: str = "translation", tol: float = EPS) -> set[tuple]:
    return set(pair_keys(patch, [(i, j) for i, j, _ in adjacent_pairs(patch, tol)], mode))


@dataclass
class CensusReport:
    seed: str
    mode: str
    counts: list[tuple[int, int]] = field(default_factory=list)

    @property
    def stable_from(self) -> int | None:
        """Least level n with count(n) == count(n+1) == ... through the last level, if any."""
        if len(self.counts) < 2:
            return None
        vals = [c for _, c in self.counts]
        k = len(vals) - 1
        while k > 0 and vals[k - 1] == vals[-1]:
            k -= 1
        return self.counts[k][0] if k < len(vals) - 1 else None

    @property
    def strictly_increasing(self) -> bool:
        vals = [c for _, c in self.counts]
        return all(a < b for a, b in zip(vals, vals[1:]))

    def summary(self) -> str:
        s = self.stable_from
        if s is None:
            return f"not stable through level {self.counts[-1][0]}" if self.counts else "no levels"
        return f"stable through level {self.counts[-1][0]} (from level {s})"


def adjacency_census(rule, seed: str, levels, mode: str | None = None, tol: float = EPS) -> CensusReport:
    """Distinct adjacent two-tile classes in the level-n patch, for each requested n."""
    mode = mode or equivalence_mode(rule)
    if isinstance(levels, int):
        levels = range(0, levels + 1)
    rep = CensusReport(seed, mode)
    for n in levels:
        rep.counts.append((n, len(adjacency_classes(generate(rule, seed, n), mode, tol))))
    return rep


# dual graph ----------------------------------------------------------------


@dataclass
class DualGraph:
    labels: list[str]
    edges: list[tuple[int, int, tuple]]

    @property
    def edge_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.edges}

    def degree(self, i: int) -> int:
        return sum(1 for a, b, _ in self.edges if i in (a, b))

    def class_count(self) -> int:
        return len({k for _, _, k in self.edges})


def dual_graph(patch: Patch, mode: str = "translation", tol: float = EPS) -> DualGraph:
    """Vertex per tile (canonical order), edge per positive-length shared boundary."""
    patch = patch.canonical()
    pairs = [(i, j) for i, j, _ in adjacent_pairs(patch, tol)]
    edges = [(i, j, k) for (i, j), k in zip(pairs, pair_keys(patch, pairs, mode))]
    return DualGraph([t.id for t in patch.tiles], sorted(edges, key=lambda e: (e[0], e[1])))


# fault lines ------------------------------------------------------------------


@dataclass
class FaultSegment:
    direction: tuple[float, float]
    start: tuple[float, float]
    end: tuple[float, float]
    length: float
    mismatch: bool


@dataclass
class FaultReport:
    segments: list[FaultSegment]
    threshold: float
    min_length_factor: float
    tol: float

    def directions(self, mismatched_only: bool = False) -> set[tuple[float, float]]:
        return {s.direction for s in self.segments if s.mismatch or not mismatched_only}

    @property
    def any_mismatch(self) -> bool:
        return any(s.mismatch for s in self.segments)


def _covered(intervals: list[tuple[float, float]], x: float, eps: float) -> bool:
    return any(a + eps < x < b - eps for a, b in intervals)


def _merge(intervals: list[tuple[float, float]], eps: float) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + eps:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def fault_candidates(patch: Patch, min_length_factor: float = 3.0, tol: float = EPS) -> FaultReport:
    """Maximal straight runs of tile edges longer than ``min_length_factor`` tile diameters.

    A run is flagged as mismatched when a tile vertex on one side sits a
    positive distance short of the shortest edge length from every vertex on
    the other side, i.e. the two sides can slide against each other.
    """
    if len(patch) == 0:
        return FaultReport([], 0.0, min_length_factor, tol)
    diam = patch.max_diameter
    threshold = min_length_factor * diam
    eps = max(tol * diam, 1e-12)
    starts, ends = [], []
    for t in patch.tiles:
        v = np.asarray(t.support.vertices)
        starts.append(v)
        ends.append(np.roll(v, -1, axis=0))
    P = np.concatenate(starts)
    Q = np.concatenate(ends)
    d = Q - P
    lengths = np.hypot(d[:, 0], d[:, 1])
    min_edge = float(lengths.min())
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2 * math.pi)
    # interior lies to the left of each CCW edge; fold directions onto [0, pi) and remember the side
    flip = ang >= math.pi - 1e-12
    ang = np.where(flip, ang - math.pi, ang)
    ang = np.where(ang >= math.pi - 1e-9, 0.0, ang)
    ux, uy = np.cos(ang), np.sin(ang)
    offset = P[:, 0] * (-uy) + P[:, 1] * ux
    s0 = P[:, 0] * ux + P[:, 1] * uy
    s1 = Q[:, 0] * ux + Q[:, 1] * uy
    lo, hi = np.minimum(s0, s1), np.maximum(s0, s1)
    keys = np.stack([np.round(ang / 1e-9), np.round(offset / (eps * 10))], axis=1).astype(np.int64)
    order = np.lexsort((keys[:, 1], keys[:, 0]))
    segments = []
    k = 0
    while k < len(order):
        j = k
        while j < len(order) and np.all(keys[order[j]] == keys[order[k]]):
            j += 1
        grp = order[k:j]
        k = j
        if hi[grp].max() - lo[grp].min() < threshold:
            continue
        sides = {True: [], False: []}
        verts = {True: [], False: []}
        for e in grp:
            sides[bool(flip[e])].append((lo[e], hi[e]))
            verts[bool(flip[e])].extend((lo[e], hi[e]))
        for a, b in _merge([(lo[e], hi[e]) for e in grp], eps):
            if b - a < threshold:
                continue
            mismatch = False
            for side in (True, False):
                other = not side
                ov = np.array(sorted(verts[other]))
                if len(ov) == 0:
                    continue
                cover = _merge(sides[other], eps)
                for x in verts[side]:
                    if not (a - eps <= x <= b + eps) or not _covered(cover, x, eps):
                        continue
                    gap = float(np.min(np.abs(ov - x)))
                    if eps < gap < min_edge - eps:
                        mismatch = True
                        break
                if mismatch:
                    break
            a0 = int(grp[0])
            u = (float(ux[a0]), float(uy[a0]))
            off = float(offset[a0])
            n_ = (-u[1], u[0])
            segments.append(
                FaultSegment(
                    (round(u[0], 12) + 0.0, round(u[1], 12) + 0.0),
                    (a * u[0] + off * n_[0], a * u[1] + off * n_[1]),
                    (b * u[0] + off * n_[0], b * u[1] + off * n_[1]),
                    float(b - a),
                    mismatch,
                )
            )
    segments.sort(key=lambda s: (s.direction, s.start))
    return FaultReport(segments, threshold, min_length_factor, tol)


# admitted patches ------------------------------------------------------------


@dataclass
class AdmissionResult:
    found: bool
    level: int | None = None
    seed: str | None = None
    max_level: int = 0

    def __str__(self) -> str:
        if self.found:
            return f"found at level {self.level} (seed {self.seed})"
        return f"not found up to level {self.max_level}"


class _SupportIndex:
    """Tile supports hashed by centroid cell; lookups compare vertex sets within a tolerance."""

    def __init__(self, patch: Patch, tol: float):
        v, nv = patch.vertex_array
        self.cell = max(patch.max_diameter, 1.0) * 1e-3
        self.tol = tol * max(patch.max_diameter, 1.0)
        self.table: dict[tuple, list[np.ndarray]] = defaultdict(list)
        for i, t in enumerate(patch.tiles):
            pts = v[i, : nv[i]]
            self.table[(t.id, *self._cell(pts))].append(self._sorted(pts))

    def _cell(self, pts: np.ndarray) -> tuple[int, int]:
        c = pts.mean(axis=0) / self.cell
        return int(np.floor(c[0])), int(np.floor(c[1]))

    @staticmethod
    def _sorted(pts: np.ndarray) -> np.ndarray:
        return pts[np.lexsort((pts[:, 1], np.round(pts[:, 0], 6)))]

    def __contains__(self, item) -> bool:
        pid, pts = item
        cx, cy = self._cell(pts)
        want = self._sorted(pts)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for got in self.table.get((pid, cx + dx, cy + dy), ()):
                    if len(got) == len(want) and _same_vertex_set(got, want, self.tol):
                        return True
        return False


def _same_vertex_set(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def is_admitted(rule, candidate: Patch, max_level: int, mode: str | None = None, tol: float = EPS) -> AdmissionResult:
    """Search level-n patches of every seed, n <= max_level, for a copy of ``candidate``."""
    if len(candidate) == 0:
        raise ValueError("candidate patch is empty")
    if overlapping_pairs(candidate, tol):
        raise ValueError("invalid candidate: tiles overlap")
    mode = mode or equivalence_mode(rule)
    anchor = candidate.tiles[0]
    a_inv = anchor.placement.inverse()
    A_L = a_inv.linear.to_numpy()
    A_t = np.array(a_inv.translation)
    cand_local = [(t.id, (_verts(t) @ A_L.T) + A_t) for t in candidate.tiles]
    sym_cache: dict[str, list] = {}
    for n in range(max_level + 1):
        for seed in rule_ids(rule):
            patch = generate(rule, seed, n)
            if len(patch) < len(candidate):
                continue
            index = _SupportIndex(patch, 1e-6)
            for T in patch.tiles:
                if T.id != anchor.id:
                    continue
                if mode == "translation":
                    if not np.allclose(T.placement.linear.to_numpy(), anchor.placement.linear.to_numpy(), atol=1e-9):
                        continue
                    syms = [(np.eye(2), np.zeros(2))]
                else:
                    if T.id not in sym_cache:
                        sym_cache[T.id] = shape_symmetries(T.proto.shape)
                    syms = sym_cache[T.id]
                M = T.placement.linear.to_numpy()
                mt = np.array(T.placement.translation)
                for L, t in syms:
                    ok = True
                    for pid, local in cand_local:
                        img = (local @ L.T + t) @ M.T + mt
                        if (pid, img) not in index:
                            ok = False
                            break
                    if ok:
                        return AdmissionResult(True, n, seed, max_level)
    return AdmissionResult(False, None, None, max_level)


# replace and rescale -----------------------------------------------------------


@dataclass
class LimitShape:
    prototile: str
    supports: list  # shapely geometries, index n-1 for level n
    table: list[tuple[int, float]]  # (n, d_H(level n, level n+1))
    to_prototile: list[float]
    converged: bool

    @property
    def levels(self) -> int:
        return len(self.supports)


def _boundary_samples(geom, k: int) -> np.ndarray:
    b = geom.boundary
    pts = shapely.line_interpolate_point(b, np.linspace(0.0, 1.0, k, endpoint=False), normalized=True)
    return pts


def hausdorff(g1, g2, samples: int = 512) -> float:
    """Boundary Hausdorff distance from ``samples`` points on each boundary to the other boundary."""
    p1 = _boundary_samples(g1, samples)
    p2 = _boundary_samples(g2, samples)
    return float(max(shapely.distance(p1, g2.boundary).max(), shapely.distance(p2, g1.boundary).max()))


def rescale_limit(rule, proto: str, N: int, expansion: LinearMap, tol: float = 1e-6) -> LimitShape:
    """phi^-n applied to the support of the level-n patch, n = 1..N, with Hausdorff table."""
    from .spectral import perron

    lam = perron(rule.substitution_matrix()).eigenvalue
    det = abs(expansion.det)
    if abs(det - lam) > tol * lam:
        raise ValueError(
            f"|det expansion| = {det:.10g} but the Perron eigenvalue is {lam:.10g}; "
            "the volume expansion of a self-similar rule must equal the Perron eigenvalue"
        )
    base = _proto_shape(rule, proto).to_shapely()
    supports = []
    for n in range(1, N + 1):
        patch = generate(rule, proto, n)
        inv = (expansion**n).inverse()
        sup = patch_support(patch)
        sup = affinity.affine_transform(sup, [inv.a, inv.b, inv.c, inv.d, 0.0, 0.0])
        supports.append(sup)
    table = [(n, hausdorff(supports[n - 1], supports[n])) for n in range(1, N)]
    to_proto = [hausdorff(s, base) for s in supports]
    dists = [d for _, d in table]
    converged = bool(dists) and (max(dists[-3:]) < 1e-9 or (len(dists) > 1 and dists[-1] < dists[0]))
    return LimitShape(proto, supports, table, to_proto, converged)


def patch_support(patch: Patch):
    """Union of tile supports; tiles of a valid patch form a coverage, which unions fast."""
    polys = shapely_polygons(patch)
    try:
        sup = shapely.coverage_union_all(polys)
    except shapely.errors.GEOSException:
        # T-junctions (not edge-to-edge) are not a valid coverage
        return shapely.union_all(polys)
    if sup.is_empty or not sup.is_valid or abs(sup.area - patch.area) > 1e-9 * patch.area:
        sup = shapely.union_all(polys)
    return sup


def _proto_shape(rule, pid: str) -> Polygon:
    from .symbolic import GridRule

    if isinstance(rule, GridRule):
        return Polygon.rectangle(0, 0, 1, 1)
    return rule.proto(pid).shape


@dataclass
class LengthTable:
    perron_value: float
    limit: tuple[float, ...]  # k1 * v1
    rows: list[tuple[int, tuple[float, ...], float]]  # (n, rescaled lengths, sup-norm error)

    @property
    def errors(self) -> list[float]:
        return [e for _, _, e in self.rows]


def length_table(rule1d, N: int, start: int = 0) -> LengthTable:
    """Rescaled block-length vectors lambda^-n (1..1) M^n against their limit k1 v1.

    (1..1) is expanded in left eigenvectors of M; the Perron component k1 v1
    is the limit and the other components decay like (|lambda_2| / lambda)^n.
    """
    M = np.array(rule1d.substitution_matrix().rows, dtype=float)
    w, V = np.linalg.eig(M.T)
    top = int(np.argmax(w.real))
    lam = float(w[top].real)
    k = np.linalg.solve(V, np.ones(len(M), dtype=complex))
    limit = np.real(k[top] * V[:, top])
    rows = []
    letters = list(rule1d.alphabet)
    for n in range(start, N + 1):
        lengths = rule1d.block_lengths(n)
        vec = np.array([lengths[a] for a in letters], dtype=float) / lam**n
        rows.append((n, tuple(float(x) for x in vec), float(np.max(np.abs(vec - limit)))))
    return LengthTable(lam, tuple(float(x) for x in limit), rows)
