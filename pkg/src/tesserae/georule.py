"""Inflate-and-subdivide rules: definition, validation, iteration and a builtin catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import shapely

from .geometry import (
    EPS,
    ORTHO_TOL,
    GeometryError,
    LinearMap,
    Patch,
    Point2,
    Polygon,
    Prototile,
    RigidMotion,
    SpatialIndex,
    TileCapExceeded,
    overlapping_pairs,
    patch_from_arrays,
    tile_cap,
    quantize,
)
from .symbolic import SubstitutionMatrix, _count_matrix

GOLDEN = (1 + math.sqrt(5)) / 2
EQUIVALENCE_MODES = ("translation", "isometry")


class RuleNotValidatedError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class GeometricRule:
    """Expansion map plus, per prototile, the placed children tiling its inflated image.

    ``dimension=1`` marks interval rules drawn as unit-height strips; the
    expansion then acts on x only and must be ``diag(s, 1)``.
    """

    name: str
    prototiles: tuple[Prototile, ...]
    expansion: LinearMap
    children: Mapping[str, tuple[tuple[str, RigidMotion], ...]]
    equivalence: str = "translation"
    dimension: int = 2
    area_tol: float = 1e-6

    def __post_init__(self):
        protos = tuple(self.prototiles)
        object.__setattr__(self, "prototiles", protos)
        ids = [p.id for p in protos]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate prototile ids")
        if self.equivalence not in EQUIVALENCE_MODES:
            raise ValueError(f"unknown equivalence mode {self.equivalence!r}")
        if not self.is_expanding():
            raise ValueError("expansion map is not expanding")
        kids = {}
        for pid in ids:
            if pid not in self.children:
                raise ValueError(f"prototile {pid} has no subdivision")
            entries = tuple((str(c), m) for c, m in self.children[pid])
            if not entries:
                raise ValueError(f"prototile {pid} has an empty subdivision")
            for c, _ in entries:
                if c not in ids:
                    raise ValueError(f"unknown child prototile {c} in subdivision of {pid}")
            kids[pid] = entries
        extra = set(self.children) - set(ids)
        if extra:
            raise ValueError(f"subdivision given for unknown prototile(s) {sorted(extra)}")
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "_by_id", {p.id: p for p in protos})
        object.__setattr__(self, "_validated", False)
        vol = self.volume_expansion
        for p in protos:
            total = sum(self._by_id[c].area for c, _ in kids[p.id])
            want = vol * p.area
            if abs(total - want) > self.area_tol * want:
                raise ValueError(
                    f"children of {p.id} have total area {total:.12g}, expected {want:.12g}"
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeometricRule):
            return NotImplemented
        return (
            self.name == other.name
            and self.prototiles == other.prototiles
            and self.expansion == other.expansion
            and self.children == other.children
            and self.equivalence == other.equivalence
            and self.dimension == other.dimension
        )

    def __hash__(self) -> int:
        return hash((self.name, self.prototiles, self.expansion))

    def is_expanding(self) -> bool:
        phi = self.expansion
        if self.dimension == 1:
            return abs(phi.a) > 1 and phi.b == 0 and phi.c == 0 and phi.d == 1
        return phi.det != 0 and phi.is_expanding()

    @property
    def volume_expansion(self) -> float:
        return abs(self.expansion.det)

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.prototiles]

    def proto(self, pid: str) -> Prototile:
        try:
            return self._by_id[pid]
        except KeyError:
            raise KeyError(f"unknown prototile {pid}") from None

    def index(self, pid: str) -> int:
        return self.ids.index(pid)

    @property
    def validated(self) -> bool:
        return self._validated

    def substitution_matrix(self) -> SubstitutionMatrix:
        ids = self.ids
        return _count_matrix(ids, [[ids.index(c) for c, _ in self.children[p]] for p in ids])

    def predicted_count(self, pid: str, n: int) -> int:
        M = self.substitution_matrix().power(n)
        return sum(M.column(self.index(pid)))


def _generate(rule: GeometricRule, pid: str, n: int, cap: int | None = None):
    """Arrays (ids, linear parts, translations, parents) of the level-n tile of ``pid``."""
    cap = tile_cap() if cap is None else cap
    expected = rule.predicted_count(pid, n)
    if expected > cap:
        raise TileCapExceeded(f"level-{n} tile of {pid} has {expected} tiles, cap is {cap}")
    phi = rule.expansion.to_numpy()
    phi_inv = np.linalg.inv(phi)
    ids = np.array([rule.index(pid)])
    lin = np.eye(2)[None, :, :]
    trans = np.zeros((1, 2))
    parents: list[np.ndarray] = []
    kids = [
        [
            (rule.index(c), m.linear.to_numpy(), np.array(m.translation))
            for c, m in rule.children[p]
        ]
        for p in rule.ids
    ]
    for _ in range(n):
        # tile (q, L, t) inflates to (phi L phi^-1, phi t); each child (c, G, g) lands at that motion composed with (G, g)
        conj = phi @ lin @ phi_inv
        moved = trans @ phi.T
        new_ids, new_lin, new_trans, new_par = [], [], [], []
        for q, children in enumerate(kids):
            sel = np.nonzero(ids == q)[0]
            if len(sel) == 0:
                continue
            for c, G, g in children:
                new_ids.append(np.full(len(sel), c))
                new_lin.append(conj[sel] @ G)
                new_trans.append(moved[sel] + conj[sel] @ g)
                new_par.append(sel)
        ids = np.concatenate(new_ids)
        lin = np.concatenate(new_lin)
        trans = np.concatenate(new_trans)
        parents.append(np.concatenate(new_par))
    defect = np.abs(np.einsum("kij,kil->kjl", lin, lin) - np.eye(2)).max() if len(lin) else 0.0
    if defect > 1e-9:
        raise GeometryError(f"placements lost orthogonality (defect {defect:.3g}); expansion must be a similarity")
    return ids, lin, trans, parents


def _level_patch_unchecked(rule: GeometricRule, pid: str, n: int) -> Patch:
    ids, lin, trans, _ = _generate(rule, pid, n)
    return patch_from_arrays(rule.prototiles, ids, lin, trans)[0]


def inflate(rule: GeometricRule, proto: str, n: int) -> Patch:
    """The level-n tile of ``proto``: n rounds of inflate-and-subdivide, canonically ordered."""
    if n < 0:
        raise ValueError("level must be >= 0")
    rule.proto(proto)
    if not rule.validated:
        raise RuleNotValidatedError(f"rule {rule.name!r} has not passed validate()")
    return _level_patch_unchecked(rule, proto, n)


def inflated_shape(rule: GeometricRule, pid: str, n: int) -> Polygon:
    return rule.proto(pid).shape.transformed(rule.expansion**n)


@dataclass
class LevelCheck:
    prototile: str
    level: int
    area_defect: float
    max_overlap: float
    coverage_misses: int
    overlap_witness: tuple[int, int] | None = None
    miss_witness: tuple[float, float] | None = None

    def ok(self, tol: float) -> bool:
        return self.area_defect < tol and self.max_overlap < tol and self.coverage_misses == 0


@dataclass
class ValidationReport:
    rule: str
    levels: int
    tol: float
    checks: list[LevelCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok(self.tol) for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def first_failure(self) -> LevelCheck | None:
        return next((c for c in self.checks if not c.ok(self.tol)), None)

    @property
    def max_area_defect(self) -> float:
        return max((c.area_defect for c in self.checks), default=0.0)


def _coverage_misses(big: Polygon, patch: Patch, samples: int, tol: float):
    x0, y0, x1, y1 = big.bbox
    # offset grid avoids landing exactly on rational edge coordinates
    frac = (np.arange(samples) + 0.5 + 0.0123456789) / samples
    xs, ys = np.meshgrid(x0 + frac * (x1 - x0), y0 + frac * (y1 - y0))
    xs, ys = xs.ravel(), ys.ravel()
    outline = big.to_shapely()
    margin = tol * big.diameter
    inside = shapely.contains_xy(outline, xs, ys)
    if margin > 0:
        inside &= shapely.distance(outline.exterior, shapely.points(xs, ys)) > margin
    xs, ys = xs[inside], ys[inside]
    open_count = np.zeros(len(xs), dtype=int)
    closed_count = np.zeros(len(xs), dtype=int)
    for t in patch.tiles:
        g = shapely.Polygon(t.support.vertices)
        bx = t.bbox
        near = (xs >= bx[0] - margin) & (xs <= bx[2] + margin) & (ys >= bx[1] - margin) & (ys <= bx[3] + margin)
        if not near.any():
            continue
        idx = np.nonzero(near)[0]
        open_count[idx] += shapely.contains_xy(g, xs[idx], ys[idx])
        closed_count[idx] += shapely.intersects_xy(g, xs[idx], ys[idx])
    on_boundary = (closed_count > 0) & (open_count == 0)
    bad = ~on_boundary & (open_count != 1)
    witness = (float(xs[bad][0]), float(ys[bad][0])) if bad.any() else None
    return int(bad.sum()), witness


def validate(rule: GeometricRule, levels: int = 3, tol: float = EPS, samples: int = 64) -> ValidationReport:
    """Check levels 1..``levels`` of every prototile for gaps, overlaps and area balance."""
    report = ValidationReport(rule.name, levels, tol)
    vol = rule.volume_expansion
    for p in rule.prototiles:
        for level in range(1, levels + 1):
            patch = _level_patch_unchecked(rule, p.id, level)
            want = vol**level * p.area
            area_defect = abs(patch.area - want) / want
            overlaps = overlapping_pairs(patch, tol, SpatialIndex(patch))
            max_overlap = max((a for _, _, a in overlaps), default=0.0)
            big = inflated_shape(rule, p.id, level)
            misses, miss_at = _coverage_misses(big, patch, samples, tol)
            report.checks.append(
                LevelCheck(
                    p.id,
                    level,
                    area_defect,
                    max_overlap / p.area,
                    misses,
                    (overlaps[0][0], overlaps[0][1]) if overlaps else None,
                    miss_at,
                )
            )
    if report.passed:
        object.__setattr__(rule, "_validated", True)
    return report


@dataclass
class VolumeReport:
    perron_value: float | None
    volume_expansion: float
    eigenvector: tuple[float, ...] | None
    area_vector: tuple[float, ...]
    eigenvalue_error: float | None
    eigenvector_error: float | None
    passed: bool | None
    note: str = ""


def volume_consistency(rule: GeometricRule, tol: float = 1e-6) -> VolumeReport:
    """Compare the Perron data of the substitution matrix with |det phi| and prototile areas."""
    from .spectral import is_primitive, perron

    M = rule.substitution_matrix()
    areas = np.array([p.area for p in rule.prototiles])
    areas_n = tuple(float(x) for x in areas / areas.sum())
    vol = rule.volume_expansion
    if not is_primitive(M):
        return VolumeReport(None, vol, None, areas_n, None, None, None, "skipped: substitution matrix not primitive")
    pd = perron(M)
    lam_err = abs(pd.eigenvalue - vol) / vol
    left = np.array(pd.left_eigenvector)
    vec_err = float(np.max(np.abs(left - areas / areas.sum()) / (areas / areas.sum())))
    return VolumeReport(
        pd.eigenvalue,
        vol,
        pd.left_eigenvector,
        areas_n,
        lam_err,
        vec_err,
        lam_err < tol and vec_err < tol,
    )


def orientation_count(patch: Patch, quantum: float = 1e-6) -> int:
    """Distinct tile orientations (angle and handedness) at the given angular quantum."""
    full = quantize(2 * math.pi, quantum)
    return len({(quantize(t.placement.angle, quantum) % full, t.placement.is_reflection) for t in patch.tiles})


def _motion_from_frames(src: Sequence[Point2], dst: Sequence[Point2]) -> RigidMotion:
    """Rigid motion taking src[0], src[1], src[2] to dst[0], dst[1], dst[2]."""
    s0, s1, s2 = (np.asarray(p, dtype=float) for p in src)
    d0, d1, d2 = (np.asarray(p, dtype=float) for p in dst)
    S = np.column_stack([s1 - s0, s2 - s0])
    D = np.column_stack([d1 - d0, d2 - d0])
    L = D @ np.linalg.inv(S)
    t = d0 - L @ s0
    return RigidMotion(LinearMap(*(float(x) for x in L.ravel())), Point2(float(t[0]), float(t[1])))


def _rotate_motion(k: int, m: RigidMotion) -> RigidMotion:
    R = RigidMotion(LinearMap.rotation(k * math.pi / 2))
    R = RigidMotion(LinearMap(*(float(round(x)) for x in (R.linear.a, R.linear.b, R.linear.c, R.linear.d))))
    return R @ m @ R.inverse()


def chair() -> GeometricRule:
    """L-tromino in four orientations (distinct under translation), phi = 2."""
    base = Polygon(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)))
    rots = [LinearMap(1, 0, 0, 1), LinearMap(0, -1, 1, 0), LinearMap(-1, 0, 0, -1), LinearMap(0, 1, -1, 0)]
    protos = tuple(Prototile(f"L{k}", base.transformed(rots[k]), f"chair {90 * k}") for k in range(4))
    # subdivision of 2*L0, in cell coordinates: two upright chairs and the two end pieces
    base_kids = [(0, (0, 0)), (0, (1, 1)), (1, (4, 0)), (3, (0, 4))]
    children = {}
    for k in range(4):
        R = rots[k]
        children[f"L{k}"] = tuple(
            (f"L{(j + k) % 4}", RigidMotion.translate(*R(t))) for j, t in base_kids
        )
    return GeometricRule("chair", protos, LinearMap.scale(2.0), children, "translation")


def _pinwheel_subdivision(s: Point2, r: Point2, l: Point2):
    """Five (s, r, l) role triples tiling a right triangle with legs sqrt5, 2 sqrt5.

    Roles: ``s`` joins short leg and hypotenuse, ``r`` is the right angle,
    ``l`` joins long leg and hypotenuse.  The altitude cuts off one child;
    the remaining legs-2-4 piece splits into two end triangles and a
    rectangle cut along the diagonal that makes its halves opposite-handed.
    """
    s, r, l = (np.asarray(p, dtype=float) for p in (s, r, l))
    hyp = l - s
    h = s + hyp / np.linalg.norm(hyp)  # foot of the altitude, at distance 1 from s
    u = (l - h) / 4
    w = (r - h) / 2
    m = h + 2 * u
    n = m + w
    k = h + w
    return [
        (s, h, r),
        (n, m, l),
        (n, m, h),
        (h, k, n),
        (r, k, n),
    ]


def pinwheel() -> GeometricRule:
    """Right triangle with legs 1, 2 and its mirror image; phi = [[2, -1], [1, 2]]."""
    T = Polygon(((0, 0), (2, 0), (2, 1)))
    Tm = Polygon(((0, 0), (2, -1), (2, 0)))
    roles = {"T": ((2, 1), (2, 0), (0, 0)), "Tm": ((2, -1), (2, 0), (0, 0))}
    protos = (Prototile("T", T, "pinwheel right-handed"), Prototile("Tm", Tm, "pinwheel left-handed"))
    phi = LinearMap(2.0, -1.0, 1.0, 2.0)
    children = {}
    for pid, (s, r, l) in roles.items():
        kids = []
        for cs, cr, cl in _pinwheel_subdivision(phi(s), phi(r), phi(l)):
            m = _motion_from_frames(roles["T"], (cs, cr, cl))
            if m.is_reflection:
                m = _motion_from_frames(roles["Tm"], (cs, cr, cl))
                kids.append(("Tm", m))
            else:
                kids.append(("T", m))
        children[pid] = tuple(kids)
    return GeometricRule("pinwheel", protos, phi, children, "isometry")


def robinson_triangles() -> GeometricRule:
    """Halves of the Penrose rhombs: acute (1, 1, 1/g) and obtuse (1, 1, g); phi = g."""
    g = GOLDEN
    c36, s36 = math.cos(math.pi / 5), math.sin(math.pi / 5)
    # role frames: (apex, base1, base2)
    acute = ((0.0, 0.0), (1.0, 0.0), (c36, s36))
    obtuse = ((c36, s36), (0.0, 0.0), (g, 0.0))
    A = Prototile("A", Polygon((acute[0], acute[1], acute[2])), "acute Robinson triangle")
    O = Prototile("O", Polygon((obtuse[1], obtuse[2], obtuse[0])), "obtuse Robinson triangle")

    def place(frame, target):
        return _motion_from_frames(frame, target)

    X, Y, Z = (0.0, 0.0), (g, 0.0), (g * c36, g * s36)
    D = (1.0, 0.0)
    U, V, W = (0.0, 0.0), (g * g, 0.0), (g * c36, g * s36)
    F, G = (1.0, 0.0), (g * g - 1.0, 0.0)
    children = {
        "A": (("A", place(acute, (Z, D, Y))), ("O", place(obtuse, (D, X, Z)))),
        "O": (
            ("O", place(obtuse, (F, U, W))),
            ("O", place(obtuse, (G, W, V))),
            ("A", place(acute, (W, F, G))),
        ),
    }
    return GeometricRule("robinson_triangles", (A, O), LinearMap.scale(g), children, "isometry")


def fibonacci_intervals() -> GeometricRule:
    """Intervals of lengths g and 1 drawn as unit-height strips; phi stretches x by g."""
    g = GOLDEN
    a = Prototile("a", Polygon.rectangle(0, 0, g, 1), "long interval")
    b = Prototile("b", Polygon.rectangle(0, 0, 1, 1), "short interval")
    children = {
        "a": (("a", RigidMotion.identity()), ("b", RigidMotion.translate(g, 0))),
        "b": (("a", RigidMotion.identity()),),
    }
    return GeometricRule("fibonacci_intervals", (a, b), LinearMap(g, 0.0, 0.0, 1.0), children, "translation", dimension=1)


_BUILDERS = {
    "chair": chair,
    "pinwheel": pinwheel,
    "robinson_triangles": robinson_triangles,
    "fibonacci_intervals": fibonacci_intervals,
}
_CACHE: dict[str, GeometricRule] = {}


def builtin_names() -> list[str]:
    return list(_BUILDERS)


def builtin(name: str) -> GeometricRule:
    """A catalog rule, already validated to level 3."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown builtin geometric rule {name!r}; known: {', '.join(_BUILDERS)}")
    if name not in _CACHE:
        rule = _BUILDERS[name]()
        report = validate(rule, 3)
        if not report.passed:
            raise AssertionError(f"builtin {name} failed validation: {report.first_failure}")
        _CACHE[name] = rule
    return _CACHE[name]
