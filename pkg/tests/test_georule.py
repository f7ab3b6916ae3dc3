import math

import numpy as np
import pytest

from tesserae.geometry import LinearMap, Patch, Point2, Polygon, Prototile, RigidMotion, TileCapExceeded
from tesserae.georule import (
    GeometricRule,
    RuleNotValidatedError,
    builtin,
    chair,
    inflate,
    inflated_shape,
    orientation_count,
    pinwheel,
    robinson_triangles,
    validate,
    volume_consistency,
)
from oracles import raster_cover_counts

GOLDEN = (1 + math.sqrt(5)) / 2


@pytest.mark.parametrize("name", ["chair", "pinwheel", "robinson_triangles", "fibonacci_intervals"])
def test_builtins_validate(name):
    rule = builtin(name)
    assert rule.validated
    assert volume_consistency(rule).passed


@pytest.mark.parametrize("name,seed,levels", [("chair", "L0", 3), ("pinwheel", "T", 3), ("robinson_triangles", "A", 4)])
def test_level_patch_covers_inflated_prototile_by_raster(name, seed, levels):
    """Independent 512x512 point-in-polygon raster: every pixel centre inside is covered once."""
    rule = builtin(name)
    for n in range(1, levels + 1):
        patch = inflate(rule, seed, n)
        region = inflated_shape(rule, seed, n)
        counts, inside = raster_cover_counts(patch, region, 512)
        # pixels whose centre sits on an edge are counted by ray casting on one side only
        assert np.mean(counts[inside] == 1) > 0.995
        assert np.all(counts[~inside] == 0)
        assert np.all(counts <= 1) or np.mean(counts > 1) < 1e-3


@pytest.mark.parametrize("name,seed", [("chair", "L0"), ("pinwheel", "T"), ("robinson_triangles", "O")])
def test_counts_follow_matrix(name, seed):
    rule = builtin(name)
    for n in range(5):
        p = inflate(rule, seed, n)
        assert len(p) == rule.predicted_count(seed, n)
        M = np.array(rule.substitution_matrix().rows, dtype=np.int64)
        col = np.linalg.matrix_power(M, n)[:, rule.index(seed)]
        assert p.count_vector(rule.ids) == list(col)


def test_area_scales_by_determinant():
    rule = builtin("pinwheel")
    for n in range(5):
        assert inflate(rule, "T", n).area == pytest.approx(5**n * rule.proto("T").area, rel=1e-9)


def _perturbed_chair():
    base = chair()
    kids = {p: list(v) for p, v in base.children.items()}
    c, m = kids["L0"][1]
    kids["L0"][1] = (c, RigidMotion(m.linear, Point2(m.translation.x + 0.5, m.translation.y)))
    return GeometricRule("bent", base.prototiles, base.expansion, kids)


def test_perturbed_child_fails_with_overlap_witness():
    rule = _perturbed_chair()
    rep = validate(rule, 2)
    assert not rep.passed
    bad = rep.first_failure
    assert bad.prototile == "L0" and bad.level == 1
    assert bad.max_overlap > 0.1 and bad.overlap_witness is not None
    with pytest.raises(RuleNotValidatedError):
        inflate(rule, "L0", 1)


def test_area_imbalance_rejected_at_construction():
    base = chair()
    kids = {p: list(v) for p, v in base.children.items()}
    kids["L0"] = kids["L0"][:3]
    with pytest.raises(ValueError, match="total area"):
        GeometricRule("short", base.prototiles, base.expansion, kids)


def test_non_expanding_rejected():
    tri = Prototile("T", Polygon(((0, 0), (1, 0), (0, 1))))
    with pytest.raises(ValueError):
        GeometricRule("flat", (tri,), LinearMap(1.0, 0.0, 0.0, 1.0), {"T": [("T", RigidMotion.identity())]})


def test_gap_detected_by_coverage():
    # two unit squares in a 2x1 rectangle that doubles to 4x2: areas balance only with 4 children
    sq = Prototile("S", Polygon.rectangle(0, 0, 1, 1))
    kids = [("S", RigidMotion.translate(x, 0)) for x in (0, 1)] + [("S", RigidMotion.translate(x, 1)) for x in (0, 0)]
    rule = GeometricRule("holey", (sq,), LinearMap.scale(2.0), {"S": kids})
    rep = validate(rule, 1)
    assert not rep.passed
    assert rep.first_failure.coverage_misses > 0


def test_pinwheel_orientations_grow():
    rule = builtin("pinwheel")
    counts = [orientation_count(inflate(rule, "T", n)) for n in range(1, 6)]
    assert counts == sorted(counts) and counts[-1] > counts[0]


def test_robinson_perron_is_golden_square():
    rule = robinson_triangles()
    vol = volume_consistency(rule)
    assert vol.perron_value == pytest.approx(GOLDEN**2, abs=1e-8)


def test_tile_cap(monkeypatch):
    monkeypatch.setenv("TESSERAE_TILE_CAP", "100")
    with pytest.raises(TileCapExceeded):
        inflate(builtin("chair"), "L0", 4)


def test_pinwheel_matrix():
    assert pinwheel().substitution_matrix().rows == ((2, 3), (3, 2))
