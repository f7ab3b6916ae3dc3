"""Combinatorial substitutions: level-n patches assembled from placed level-(n-1) patches.

S^n(p) is the union over the children t of S^1(p) of g(p, n, t)(S^{n-1}(t)).
Placements may change with n, so the tiles need not keep a fixed shape under
any expanding map.  Every level built is checked for overlaps between the
placed sub-patches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import shapely

from .geometry import (
    EPS,
    Patch,
    Polygon,
    Prototile,
    RigidMotion,
    SpatialIndex,
    TileCapExceeded,
    intersection_areas,
    patch_from_arrays,
    shapely_polygons,
    tile_cap,
)
from .symbolic import CHACON, FIBONACCI, NONPISOT, SubstitutionMatrix, SymbolicRule1D, _count_matrix

_TERM = r"([+-]?)(?:(\d+)\*?)?([WH])\(([^()+\-*\s]+)\)"
_TERM_RE = re.compile(_TERM)
_OFFSET_RE = re.compile(rf"(?:{_TERM})+")

Placement = Callable[[str, int, int], RigidMotion]


class PackingError(RuntimeError):
    def __init__(self, prototile: str, level: int, pair: tuple[int, int], area: float):
        self.prototile = prototile
        self.level = level
        self.pair = pair
        self.area = area
        super().__init__(
            f"placed sub-patches of S^{level}({prototile}) overlap: tiles {pair[0]} and {pair[1]} share area {area:.6g}"
        )


@dataclass
class _Level:
    ids: np.ndarray
    lin: np.ndarray
    trans: np.ndarray
    paths: np.ndarray  # (k, n) child indices, outermost choice first


@dataclass(frozen=True)
class LevelPatch:
    """A level patch in canonical order with the lineage path of each tile."""

    patch: Patch
    paths: tuple[tuple[int, ...], ...]

    def descendants(self, prefix: tuple[int, ...]) -> list[int]:
        k = len(prefix)
        return [i for i, p in enumerate(self.paths) if p[:k] == prefix]


def _rect_like(protos: Sequence[Prototile]) -> bool:
    for p in protos:
        v = p.shape.vertices
        if len(v) != 4 or abs(p.shape.signed_area - _bbox_area(p.shape)) > 1e-12 * _bbox_area(p.shape):
            return False
    return True


def _bbox_area(poly: Polygon) -> float:
    x0, y0, x1, y1 = poly.bbox
    return (x1 - x0) * (y1 - y0)


def _overlap_areas(patch: Patch, pairs: np.ndarray, axis_aligned: bool) -> np.ndarray:
    if len(pairs) == 0:
        return np.zeros(0)
    if axis_aligned:
        bx = patch.bboxes
        a, b = bx[pairs[:, 0]], bx[pairs[:, 1]]
        w = np.minimum(a[:, 2], b[:, 2]) - np.maximum(a[:, 0], b[:, 0])
        h = np.minimum(a[:, 3], b[:, 3]) - np.maximum(a[:, 1], b[:, 1])
        return np.clip(w, 0, None) * np.clip(h, 0, None)
    geoms = shapely_polygons(patch)
    x0, y0, x1, y1 = patch.bbox
    scale = max(patch.max_diameter, abs(x0), abs(y0), abs(x1), abs(y1))
    return intersection_areas(geoms[pairs[:, 0]], geoms[pairs[:, 1]], scale)


class CombinatorialRule:
    """Prototiles, the child word of each prototile, and placements g(p, n, i).

    ``placement(p, n, i)`` positions the level-(n-1) patch of the i-th child
    of ``p`` inside the level-n patch of ``p``; S^1(p) is its value at n = 1.
    """

    def __init__(
        self,
        name: str,
        prototiles: Sequence[Prototile],
        children: Mapping[str, Sequence[str]],
        placement: Placement,
        tol: float = EPS,
    ):
        self.name = name
        self.prototiles = tuple(prototiles)
        self.ids = [p.id for p in self.prototiles]
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate prototile ids")
        self._by_id = {p.id: p for p in self.prototiles}
        self.children = {}
        for pid in self.ids:
            kids = tuple(children.get(pid, ()))
            if not kids:
                raise ValueError(f"S^1({pid}) is empty")
            for c in kids:
                if c not in self._by_id:
                    raise ValueError(f"unknown child prototile {c} in S^1({pid})")
            self.children[pid] = kids
        self.placement = placement
        self.tol = tol
        self._memo: dict[tuple[str, int], _Level] = {}
        self._axis_aligned = _rect_like(self.prototiles)
        for pid in self.ids:
            s1 = self.level_patch(pid, 1)
            if not s1.is_connected(tol):
                raise ValueError(f"S^1({pid}) is not connected")

    def proto(self, pid: str) -> Prototile:
        try:
            return self._by_id[pid]
        except KeyError:
            raise KeyError(f"unknown prototile {pid}") from None

    def substitution_matrix(self) -> SubstitutionMatrix:
        return _count_matrix(self.ids, [[self.ids.index(c) for c in self.children[p]] for p in self.ids])

    def predicted_count(self, pid: str, n: int) -> int:
        return sum(self.substitution_matrix().power(n).column(self.ids.index(pid)))

    @property
    def level1(self) -> dict[str, Patch]:
        return {pid: self.level_patch(pid, 1) for pid in self.ids}

    def _axis_ok(self, lin: np.ndarray) -> bool:
        return self._axis_aligned and bool(np.all(np.abs(lin - np.eye(2)) < 1e-12))

    def _build(self, pid: str, n: int) -> _Level:
        key = (pid, n)
        if key in self._memo:
            return self._memo[key]
        if n == 0:
            lv = _Level(
                np.array([self.ids.index(pid)]), np.eye(2)[None], np.zeros((1, 2)), np.zeros((1, 0), dtype=int)
            )
            self._memo[key] = lv
            return lv
        parts = []
        for i, c in enumerate(self.children[pid]):
            sub = self._build(c, n - 1)
            g = self.placement(pid, n, i)
            G = g.linear.to_numpy()
            t = np.array(g.translation)
            parts.append(
                _Level(
                    sub.ids,
                    G @ sub.lin,
                    sub.trans @ G.T + t,
                    np.concatenate([np.full((len(sub.ids), 1), i), sub.paths], axis=1),
                )
            )
        lv = _Level(
            np.concatenate([p.ids for p in parts]),
            np.concatenate([p.lin for p in parts]),
            np.concatenate([p.trans for p in parts]),
            np.concatenate([p.paths for p in parts]),
        )
        if len(parts) > 1:
            self._check_cross(pid, n, lv)
        self._memo[key] = lv
        return lv

    def _check_cross(self, pid: str, n: int, lv: _Level) -> None:
        """Overlaps between tiles coming from different placed sub-patches."""
        patch, order = patch_from_arrays(self.prototiles, lv.ids, lv.lin, lv.trans)
        group = lv.paths[order, 0]
        cand = SpatialIndex(patch).candidate_pairs(0.0)
        cand = cand[group[cand[:, 0]] != group[cand[:, 1]]] if len(cand) else cand
        areas = _overlap_areas(patch, cand, self._axis_ok(lv.lin))
        if len(areas):
            tile_area = np.array([t.area for t in patch.tiles])
            limit = self.tol * np.minimum(tile_area[cand[:, 0]], tile_area[cand[:, 1]])
            bad = np.nonzero(areas > limit)[0]
            if len(bad):
                k = int(bad[0])
                raise PackingError(pid, n, (int(cand[k, 0]), int(cand[k, 1])), float(areas[k]))

    def level_patch(self, pid: str, n: int, lineage: bool = False):
        """S^n(pid) in canonical order; with ``lineage`` also the child-index path of each tile."""
        if n < 0:
            raise ValueError("level must be >= 0")
        self.proto(pid)
        expected = self.predicted_count(pid, n)
        if expected > tile_cap():
            raise TileCapExceeded(f"S^{n}({pid}) has {expected} tiles, cap is {tile_cap()}")
        lv = self._build(pid, n)
        patch, order = patch_from_arrays(self.prototiles, lv.ids, lv.lin, lv.trans)
        if not lineage:
            return patch
        return LevelPatch(patch, tuple(tuple(int(x) for x in lv.paths[k]) for k in order))


def level_patch(rule: CombinatorialRule, p: str, n: int) -> Patch:
    return rule.level_patch(p, n)


# recurrence rules ---------------------------------------------------------


def unit_square(pid: str, label: str = "") -> Prototile:
    """Unit square with its lower-right corner at the origin."""
    return Prototile(pid, Polygon(((-1, 0), (0, 0), (0, 1), (-1, 1))), label)


class RecurrenceRule(CombinatorialRule):
    """Translation placements from an integer linear recurrence.

    Every image has one or two letters.  The first child is placed by the
    identity, the second by the translation v_n, with v_0 .. v_{k-1} given
    and v_n = sum of coefficient * v_{n - lag}.
    """

    def __init__(
        self,
        name: str,
        images: Mapping[str, Sequence[str]],
        seeds: Sequence[tuple[int, int]],
        recurrence: Mapping[int, int],
        prototiles: Sequence[Prototile] | None = None,
        tol: float = EPS,
    ):
        self.images = {k: tuple(v) for k, v in images.items()}
        for k, v in self.images.items():
            if not 1 <= len(v) <= 2:
                raise ValueError(f"image of {k} must have one or two letters")
        self.seeds = tuple((int(x), int(y)) for x, y in seeds)
        self.recurrence = {int(k): int(c) for k, c in recurrence.items()}
        if not self.seeds:
            raise ValueError("at least one seed vector is required")
        lags = list(self.recurrence)
        if any(l < 1 for l in lags) or (lags and max(lags) > len(self.seeds)):
            raise ValueError("recurrence lags must lie in 1..number of seeds")
        self._vec: dict[int, tuple[int, int]] = dict(enumerate(self.seeds))
        if prototiles is None:
            prototiles = [unit_square(k) for k in self.images]
        super().__init__(name, prototiles, self.images, self._place, tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RecurrenceRule):
            return NotImplemented
        return (self.name, self.images, self.seeds, self.recurrence, self.prototiles) == (
            other.name,
            other.images,
            other.seeds,
            other.recurrence,
            other.prototiles,
        )

    __hash__ = CombinatorialRule.__hash__

    def vector(self, n: int) -> tuple[int, int]:
        if n < 0:
            raise ValueError("index must be >= 0")
        for k in range(len(self._vec), n + 1):
            x = sum(c * self._vec[k - lag][0] for lag, c in self.recurrence.items())
            y = sum(c * self._vec[k - lag][1] for lag, c in self.recurrence.items())
            self._vec[k] = (x, y)
        return self._vec[n]

    def _place(self, p: str, n: int, i: int) -> RigidMotion:
        if i == 0:
            return RigidMotion.identity()
        return RigidMotion.translate(*self.vector(n))


def rauzy() -> RecurrenceRule:
    """1 -> 1 2, 2 -> 3, 3 -> 1 on unit squares, v_n = v_{n-3} - v_{n-2}."""
    return RecurrenceRule(
        "rauzy",
        {"1": ("1", "2"), "2": ("3",), "3": ("1",)},
        [(0, 0), (0, 1), (-1, 0)],
        {3: 1, 2: -1},
    )


_RAUZY_SEEDS = ((0, 0), (0, 1), (-1, 0))


def rauzy_vectors(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("index must be >= 0")
    v = list(_RAUZY_SEEDS)
    while len(v) <= n:
        a, b = v[-3], v[-2]
        v.append((a[0] - b[0], a[1] - b[1]))
    return v[n]


# direct product variations -------------------------------------------------


@dataclass(frozen=True)
class Offset:
    """Integer combination of level-(n-1) block widths W(x) and heights H(y)."""

    terms: tuple[tuple[str, str, int], ...] = ()  # (kind W|H, letter, coefficient)

    @classmethod
    def parse(cls, text: str) -> Offset:
        """Parse e.g. ``W(a) + 2*W(b) - H(a)`` or ``0``."""
        body = text.replace(" ", "")
        if body in ("", "0"):
            return cls()
        if not _OFFSET_RE.fullmatch(body):
            raise ValueError(f"cannot parse offset {text!r}")
        acc: dict[tuple[str, str], int] = {}
        for sign, coef, kind, letter in _TERM_RE.findall(body):
            c = int(coef or 1) * (-1 if sign == "-" else 1)
            acc[(kind, letter)] = acc.get((kind, letter), 0) + c
        return cls(tuple((k, l, c) for (k, l), c in sorted(acc.items()) if c))

    def evaluate(self, W: Mapping[str, float], H: Mapping[str, float]):
        total = 0
        for kind, letter, c in self.terms:
            total += c * (W[letter] if kind == "W" else H[letter])
        return total

    def letters(self) -> set[tuple[str, str]]:
        return {(k, l) for k, l, _ in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, (kind, letter, c) in enumerate(self.terms):
            mag = abs(c)
            body = f"{kind}({letter})" if mag == 1 else f"{mag}*{kind}({letter})"
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


def W(letter: str, c: int = 1) -> Offset:
    return Offset((("W", letter, c),))


def H(letter: str, c: int = 1) -> Offset:
    return Offset((("H", letter, c),))


def offset_sum(*parts: Offset) -> Offset:
    acc: dict[tuple[str, str], int] = {}
    for p in parts:
        for k, l, c in p.terms:
            acc[(k, l)] = acc.get((k, l), 0) + c
    return Offset(tuple((k, l, c) for (k, l), c in sorted(acc.items()) if c))


Arrangement = Mapping[tuple[str, str], Sequence[tuple[tuple[str, str], tuple[Offset, Offset]]]]


def product_id(x: str, y: str, single: bool = True) -> str:
    return f"{x}{y}" if single else f"{x}.{y}"


def plain_arrangement(horizontal: SymbolicRule1D, vertical: SymbolicRule1D, letter: tuple[str, str]):
    """Direct-product layout: sigma(x) left to right, sigma(y) bottom to top."""
    x, y = letter
    out = []
    hy = vertical.images[y]
    hx = horizontal.images[x]
    for j, cy in enumerate(hy):
        oy = offset_sum(*(H(c) for c in hy[:j]))
        for i, cx in enumerate(hx):
            ox = offset_sum(*(W(c) for c in hx[:i]))
            out.append(((cx, cy), (ox, oy)))
    return out


class DPVRule(CombinatorialRule):
    """Rearranged direct product of a horizontal and a vertical 1D substitution.

    Product letters (x, y) are ordered row-major over the two alphabets.  Tile
    (x, y) is a W0(x) by H0(y) rectangle: unit sides by default, Perron
    lengths when ``rescaled``.  ``arrangement`` overrides the plain layout for
    some letters; it must keep the direct-product child multiset.
    """

    def __init__(
        self,
        name: str,
        horizontal: SymbolicRule1D,
        vertical: SymbolicRule1D,
        arrangement: Arrangement | None = None,
        rescaled: bool = False,
        tol: float = EPS,
    ):
        self.horizontal = horizontal
        self.vertical = vertical
        self.rescaled = rescaled
        hx, vy = list(horizontal.alphabet), list(vertical.alphabet)
        single = all(len(a) == 1 for a in hx + vy)
        self.letters = [(x, y) for x in hx for y in vy]
        self._pid = {xy: product_id(*xy, single) for xy in self.letters}
        self._letter = {v: k for k, v in self._pid.items()}
        if rescaled:
            from .spectral import perron

            lx = perron(horizontal.substitution_matrix()).left_eigenvector
            ly = perron(vertical.substitution_matrix()).left_eigenvector
            self.lam_x = perron(horizontal.substitution_matrix()).eigenvalue
            self.lam_y = perron(vertical.substitution_matrix()).eigenvalue
            self.width0 = {x: lx[i] / min(lx) for i, x in enumerate(hx)}
            self.height0 = {y: ly[i] / min(ly) for i, y in enumerate(vy)}
        else:
            self.width0 = {x: 1 for x in hx}
            self.height0 = {y: 1 for y in vy}
        arrangement = dict(arrangement or {})
        for key in arrangement:
            if tuple(key) not in self._pid:
                raise ValueError(f"arrangement given for unknown product letter {key}")
        self.arrangement = {}
        self.custom = set()
        for xy in self.letters:
            plain = plain_arrangement(horizontal, vertical, xy)
            if xy in arrangement:
                given = [(tuple(c), (o[0], o[1])) for c, o in arrangement[xy]]
                if sorted(c for c, _ in given) != sorted(c for c, _ in plain):
                    raise ValueError(
                        f"arrangement for {xy} changes the child multiset of the direct product"
                    )
                for c, (ox, oy) in given:
                    for k, l in ox.letters() | oy.letters():
                        ok = l in (horizontal.alphabet if k == "W" else vertical.alphabet)
                        if not ok:
                            raise ValueError(f"offset term {k}({l}) refers to an unknown letter")
                self.arrangement[xy] = given
                if given != plain:
                    self.custom.add(xy)
            else:
                self.arrangement[xy] = plain
        self._sizes: dict[int, tuple[dict, dict]] = {}
        protos = [
            Prototile(self._pid[(x, y)], Polygon.rectangle(0, 0, self.width0[x], self.height0[y]), f"({x},{y})")
            for x, y in self.letters
        ]
        children = {self._pid[xy]: [self._pid[c] for c, _ in self.arrangement[xy]] for xy in self.letters}
        super().__init__(name, protos, children, self._place, tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DPVRule):
            return NotImplemented
        return (self.name, self.horizontal, self.vertical, self.arrangement, self.rescaled) == (
            other.name,
            other.horizontal,
            other.vertical,
            other.arrangement,
            other.rescaled,
        )

    __hash__ = CombinatorialRule.__hash__

    def letter_of(self, pid: str) -> tuple[str, str]:
        return self._letter[pid]

    def pid(self, x: str, y: str) -> str:
        return self._pid[(x, y)]

    def block_sizes(self, n: int) -> tuple[dict, dict]:
        """Level-n block widths and heights; exact integers for unit tiles."""
        if n not in self._sizes:
            if self.rescaled:
                self._sizes[n] = (
                    {x: w * self.lam_x**n for x, w in self.width0.items()},
                    {y: h * self.lam_y**n for y, h in self.height0.items()},
                )
            else:
                self._sizes[n] = (self.horizontal.block_lengths(n), self.vertical.block_lengths(n))
        return self._sizes[n]

    def _place(self, p: str, n: int, i: int) -> RigidMotion:
        W_, H_ = self.block_sizes(n - 1)
        _, (ox, oy) = self.arrangement[self._letter[p]][i]
        return RigidMotion.translate(float(ox.evaluate(W_, H_)), float(oy.evaluate(W_, H_)))

    def bounding_sides(self, pid: str, n: int):
        x, y = self._letter[pid]
        W_, H_ = self.block_sizes(n)
        return W_[x], H_[y]


def dpv_level(rule: DPVRule, t: str, n: int) -> Patch:
    return rule.level_patch(t, n)


# packing and separation -----------------------------------------------------


@dataclass
class PackingReport:
    rule: str
    depth: int
    passed: bool
    levels_checked: int = 0
    max_overlap: float = 0.0
    max_area_defect: float = 0.0
    witness: str = ""

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def check_packing(rule: CombinatorialRule, depth: int, tol: float = EPS) -> PackingReport:
    """Build levels 1..depth of every prototile; DPV blocks must also fill their rectangle."""
    rep = PackingReport(rule.name, depth, True)
    for n in range(1, depth + 1):
        for pid in rule.ids:
            try:
                patch = rule.level_patch(pid, n)
            except PackingError as err:
                rep.passed = False
                rep.max_overlap = max(rep.max_overlap, err.area)
                rep.witness = str(err)
                return rep
            if isinstance(rule, DPVRule):
                w, h = rule.bounding_sides(pid, n)
                x0, y0, x1, y1 = patch.bbox
                box = float(w) * float(h)
                defect = abs(patch.area - box) / box
                frame = max(abs(x0), abs(y0), abs(x1 - float(w)), abs(y1 - float(h))) / max(float(w), float(h))
                defect = max(defect, frame)
                rep.max_area_defect = max(rep.max_area_defect, defect)
                if defect > tol:
                    rep.passed = False
                    rep.witness = f"S^{n}({pid}) does not fill its {w} x {h} rectangle (defect {defect:.3g})"
                    return rep
        rep.levels_checked = n
    return rep


@dataclass
class SeparationReport:
    prototile: str
    level: int
    pairs: list[tuple[tuple[int, ...], tuple[int, ...], float]] = field(default_factory=list)

    @property
    def maximum(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)


def adjacency_separation(rule: CombinatorialRule, p: str, n: int, tol: float = EPS) -> SeparationReport:
    """For adjacent tiles of S^n(p), distance between what they become in S^{n+1}(p).

    A tile with lineage path P in S^n(p) becomes the tiles whose path in
    S^{n+1}(p) starts with P.
    """
    from .geometry import adjacent_pairs

    rep = SeparationReport(p, n)
    cur = rule.level_patch(p, n, lineage=True)
    if len(cur.patch) < 2:
        return rep
    nxt = rule.level_patch(p, n + 1, lineage=True)
    groups: dict[tuple[int, ...], list[int]] = {}
    for k, path in enumerate(nxt.paths):
        groups.setdefault(path[:n], []).append(k)
    polys = shapely_polygons(nxt.patch)
    multi = {key: shapely.multipolygons(polys[idx]) for key, idx in groups.items()}
    pairs = adjacent_pairs(cur.patch, tol)
    if not pairs:
        return rep
    left = [cur.paths[i] for i, _, _ in pairs]
    right = [cur.paths[j] for _, j, _ in pairs]
    d = shapely.distance(
        np.array([multi[a] for a in left], dtype=object), np.array([multi[b] for b in right], dtype=object)
    )
    rep.pairs = [(a, b, float(x)) for a, b, x in zip(left, right, d)]
    return rep


# catalog ------------------------------------------------------------------


def _fib_dpv_arrangement():
    return {
        ("a", "a"): [
            (("b", "b"), (Offset(), Offset())),
            (("a", "b"), (W("b"), Offset())),
            (("b", "a"), (Offset(), H("b"))),
            (("a", "a"), (W("b"), H("b"))),
        ]
    }


def _nonpisot_arrangement():
    a_b = offset_sum(W("a"), W("b"))
    a_2b = offset_sum(W("a"), W("b", 2))
    rows = [offset_sum(H("a"), H("b")), offset_sum(H("a"), H("b", 2))]
    out = [
        (("b", "b"), (Offset(), Offset())),
        (("a", "b"), (W("b"), Offset())),
        (("b", "a"), (Offset(), H("b"))),
        (("a", "a"), (W("b"), H("b"))),
        (("b", "a"), (a_b, Offset())),
        (("b", "b"), (a_b, H("a"))),
        (("b", "a"), (a_2b, Offset())),
        (("b", "b"), (a_2b, H("a"))),
    ]
    for oy in rows:
        out += [
            (("a", "b"), (Offset(), oy)),
            (("b", "b"), (W("a"), oy)),
            (("b", "b"), (a_b, oy)),
            (("b", "b"), (a_2b, oy)),
        ]
    return {("a", "a"): out}


def fibonacci_product(rescaled: bool = False) -> DPVRule:
    return DPVRule("fibonacci_product" + ("_rescaled" if rescaled else ""), FIBONACCI, FIBONACCI, None, rescaled)


def fibonacci_dpv(rescaled: bool = False) -> DPVRule:
    """Fibonacci squared with the four children of (a,a) rotated a half-turn within the block."""
    return DPVRule("fibonacci_dpv" + ("_rescaled" if rescaled else ""), FIBONACCI, FIBONACCI, _fib_dpv_arrangement(), rescaled)


def nonpisot_dpv(rescaled: bool = False) -> DPVRule:
    """(a -> abbb, b -> a) squared; (a,a) swaps its lower-left 2x2 block so rows and columns shear."""
    return DPVRule("nonpisot_dpv" + ("_rescaled" if rescaled else ""), NONPISOT, NONPISOT, _nonpisot_arrangement(), rescaled)


def nonpisot_product(rescaled: bool = False) -> DPVRule:
    return DPVRule("nonpisot_product" + ("_rescaled" if rescaled else ""), NONPISOT, NONPISOT, None, rescaled)


def chacon_product() -> DPVRule:
    return DPVRule("chacon_product", CHACON, CHACON, None)


_BUILDERS: dict[str, Callable[[], CombinatorialRule]] = {
    "rauzy": rauzy,
    "fibonacci_product": fibonacci_product,
    "fibonacci_dpv": fibonacci_dpv,
    "nonpisot_product": nonpisot_product,
    "nonpisot_dpv": nonpisot_dpv,
    "chacon_product": chacon_product,
}


def builtin_names() -> list[str]:
    return list(_BUILDERS)


def builtin(name: str) -> CombinatorialRule:
    if name not in _BUILDERS:
        raise KeyError(f"unknown builtin combinatorial rule {name!r}; known: {', '.join(_BUILDERS)}")
    return _BUILDERS[name]()
