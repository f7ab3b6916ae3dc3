import math

import numpy as np
import pytest
import shapely

from tesserae import analysis, catalog
from tesserae.combrule import fibonacci_dpv, nonpisot_dpv, nonpisot_product
from tesserae.geometry import LinearMap, Patch, RigidMotion, SpatialIndex, Tile, neighbors
from tesserae.symbolic import FIBONACCI, NONPISOT, SIERPINSKI, grid_patch
from oracles import all_pairs_adjacent, census

GOLDEN = (1 + math.sqrt(5)) / 2

CASES = [
    ("chair", "L0", 4, "translation"),
    ("pinwheel", "T", 3, "isometry"),
    ("robinson_triangles", "A", 6, "isometry"),
    ("rauzy", "1", 12, "translation"),
    ("fibonacci_dpv", "aa", 6, "translation"),
    ("nonpisot_dpv_rescaled", "aa", 3, "translation"),
    ("sierpinski", "2", 3, "translation"),
]


@pytest.fixture(scope="module", params=CASES, ids=[c[0] for c in CASES])
def case(request):
    name, seed, n, mode = request.param
    return analysis.generate(catalog.get(name), seed, n), mode


def test_neighbors_match_oracle(case):
    patch, _ = case
    brute = all_pairs_adjacent(patch)
    idx = SpatialIndex(patch)
    adj = {i: set() for i in range(len(patch))}
    for a, b in brute:
        adj[a].add(b)
        adj[b].add(a)
    for i in range(len(patch)):
        assert set(neighbors(idx, patch, i)) == adj[i]


def test_dual_graph_matches_oracle(case):
    patch, mode = case
    g = analysis.dual_graph(patch, mode)
    canon = patch.canonical()
    assert g.edge_set == set(all_pairs_adjacent(canon))
    assert g.labels == [t.id for t in canon.tiles]


def test_census_matches_oracle(case):
    patch, mode = case
    assert len(analysis.adjacency_classes(patch, mode)) == len(census(patch, mode))


def test_chair_census_stabilises():
    rep = analysis.adjacency_census(catalog.get("chair"), "L0", range(0, 6))
    assert [c for _, c in rep.counts] == [0, 5, 21, 28, 28, 28]
    assert rep.summary() == "stable through level 5 (from level 3)"


def test_pinwheel_isometry_census_finite_translation_not():
    rule = catalog.get("pinwheel")
    iso = analysis.adjacency_census(rule, "T", range(3, 6), "isometry")
    tr = analysis.adjacency_census(rule, "T", range(3, 6), "translation")
    assert iso.stable_from is not None
    assert tr.strictly_increasing


def test_shape_symmetries():
    assert len(analysis.shape_symmetries(catalog.get("chair").proto("L0").shape)) == 2
    sq = catalog.get("fibonacci_product").prototiles[0].shape
    assert len(analysis.shape_symmetries(sq)) == 8


def test_faults_in_rearranged_rule_only():
    rep = analysis.fault_candidates(analysis.generate(nonpisot_dpv(True), "aa", 4))
    assert rep.directions(True) == {(0.0, 1.0), (1.0, 0.0)}
    plain = analysis.fault_candidates(analysis.generate(nonpisot_product(True), "aa", 4))
    assert not plain.any_mismatch
    chair = analysis.fault_candidates(analysis.generate(catalog.get("chair"), "L0", 4))
    assert not chair.any_mismatch


def test_admitted_regression_vertical_pair():
    rule = fibonacci_dpv()
    P = {p.id: p for p in rule.prototiles}
    cand = Patch((Tile(P["aa"]), Tile(P["ab"], RigidMotion.translate(0, 1))))
    res = analysis.is_admitted(rule, cand, 5)
    assert res.found and res.level == 1 and res.seed == "ba"
    # oracle: scan every level-1 patch for a tile pair with the same relative offset
    hit = False
    for seed in rule.ids:
        p = rule.level_patch(seed, 1)
        pos = {(t.id, tuple(t.placement.translation)) for t in p}
        hit |= any(("ab", (x, y + 1)) in pos for pid, (x, y) in pos if pid == "aa")
    assert hit


def test_admitted_rejects_absent_and_overlapping():
    rule = fibonacci_dpv()
    P = {p.id: p for p in rule.prototiles}
    bb2 = Patch((Tile(P["bb"]), Tile(P["bb"], RigidMotion.translate(1, 0))))
    assert not analysis.is_admitted(rule, bb2, 5).found
    with pytest.raises(ValueError):
        analysis.is_admitted(rule, Patch((Tile(P["aa"]), Tile(P["aa"]))), 3)


def test_hausdorff_matches_shapely():
    a = shapely.Polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
    b = shapely.Polygon([(0, 0), (3, 0), (3, 1), (0, 1)])
    assert analysis.hausdorff(a, b) == pytest.approx(shapely.hausdorff_distance(a, b, densify=0.01), abs=1e-3)


def test_chair_rescale_is_exact():
    lim = analysis.rescale_limit(catalog.get("chair"), "L0", 5, catalog.get("chair").expansion)
    assert max(d for _, d in lim.table) < 1e-9
    assert max(lim.to_prototile) < 1e-9


def test_fibonacci_dpv_rescale_contracts_by_golden_square():
    rule = fibonacci_dpv(True)
    lim = analysis.rescale_limit(rule, "aa", 9, LinearMap.scale(GOLDEN))
    d = [x for _, x in lim.table]
    ratios = [b / a for a, b in zip(d[-4:], d[-3:]) if a > 0]
    assert d[-1] < d[0]
    assert np.prod(ratios) ** (1 / len(ratios)) == pytest.approx(GOLDEN**-1, rel=0.25)


def test_rescale_rejects_wrong_expansion():
    with pytest.raises(ValueError, match="Perron"):
        analysis.rescale_limit(catalog.get("chair"), "L0", 2, LinearMap.scale(3.0))


def test_length_table():
    tab = analysis.length_table(FIBONACCI, 20)
    assert all(a > b for a, b in zip(tab.errors[2:], tab.errors[3:]))
    assert tab.errors[-1] < 1e-6
    # oracle: lambda^-n times exact block lengths, against the closed-form limit
    lam = GOLDEN
    for n, vec, _ in tab.rows[-3:]:
        exact = FIBONACCI.block_lengths(n)
        assert vec[0] == pytest.approx(exact["a"] / lam**n, rel=1e-12)


def test_grid_generate():
    p = analysis.generate(SIERPINSKI, "2", 2)
    assert p.counts() == {"1": 17, "2": 64}
