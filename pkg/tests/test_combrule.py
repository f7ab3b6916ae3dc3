import pytest
from hypothesis import given, strategies as st

from tesserae.combrule import (
    DPVRule,
    Offset,
    PackingError,
    adjacency_separation,
    builtin,
    check_packing,
    chacon_product,
    fibonacci_dpv,
    fibonacci_product,
    nonpisot_dpv,
    rauzy,
    rauzy_vectors,
    W,
    H,
)
from tesserae.geometry import TileCapExceeded, patches_equal
from tesserae.symbolic import FIBONACCI, NONPISOT

FIB = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233]


def test_rauzy_vectors():
    assert [rauzy_vectors(n) for n in range(6)] == [(0, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1)]
    r = rauzy()
    # independent recomputation of v_n = v_{n-3} - v_{n-2}
    v = [(0, 0), (0, 1), (-1, 0)]
    for n in range(3, 20):
        v.append((v[n - 3][0] - v[n - 2][0], v[n - 3][1] - v[n - 2][1]))
    assert [r.vector(n) for n in range(20)] == v


def test_rauzy_identities():
    r = rauzy()
    for n in range(1, 9):
        assert patches_equal(r.level_patch("2", n), r.level_patch("3", n - 1))
        assert patches_equal(r.level_patch("3", n), r.level_patch("1", n - 1))


def test_rauzy_packing():
    rep = check_packing(rauzy(), 8)
    assert rep.passed and rep.max_overlap == 0.0


def test_lineage_descendants_partition():
    r = rauzy()
    lp = r.level_patch("1", 6, lineage=True)
    parent = r.level_patch("1", 5, lineage=True)
    seen = []
    for path in parent.paths:
        seen += lp.descendants(path)
    assert sorted(seen) == list(range(len(lp.patch)))


@pytest.mark.parametrize("make", [fibonacci_product, fibonacci_dpv, nonpisot_dpv])
def test_dpv_packing(make):
    rule = make()
    assert check_packing(rule, 5).passed


def test_fibonacci_dpv_block_sides():
    rule = fibonacci_dpv()
    for n in range(11):
        w, h = rule.block_sizes(n)
        assert w == {"a": FIB[n + 1], "b": FIB[n]}
        assert h == {"a": FIB[n + 1], "b": FIB[n]}


def test_dpv_rejects_changed_multiset():
    arrangement = {("a", "a"): [(("a", "a"), (Offset(), Offset()))]}
    with pytest.raises(ValueError, match="multiset"):
        DPVRule("bad", FIBONACCI, FIBONACCI, arrangement)


def test_overlapping_arrangement_raises():
    arrangement = {
        ("a", "a"): [
            (("a", "a"), (Offset(), Offset())),
            (("b", "a"), (Offset(), Offset())),
            (("a", "b"), (Offset(), H("a"))),
            (("b", "b"), (W("a"), H("a"))),
        ]
    }
    with pytest.raises(PackingError) as info:
        DPVRule("clash", FIBONACCI, FIBONACCI, arrangement).level_patch("aa", 2)
    assert info.value.area == pytest.approx(1.0)


def test_separation_grows_only_for_rearranged_rule():
    seps = [adjacency_separation(nonpisot_dpv(), "aa", n).maximum for n in range(2, 6)]
    assert all(a < b for a, b in zip(seps, seps[1:]))
    plain = [adjacency_separation(fibonacci_product(), "aa", n).maximum for n in range(2, 5)]
    assert plain == [0.0, 0.0, 0.0]


def test_chacon_hits_tile_cap():
    with pytest.raises(TileCapExceeded):
        chacon_product().level_patch("aa", 7)


offsets = st.lists(
    st.tuples(st.sampled_from("WH"), st.sampled_from("ab"), st.integers(-3, 3).filter(bool)), max_size=4
)


@given(offsets)
def test_offset_print_parse_round_trip(terms):
    from tesserae.combrule import offset_sum

    off = offset_sum(*[Offset(((k, l, c),)) for k, l, c in terms])
    assert Offset.parse(str(off)) == off


def test_builtin_lookup():
    with pytest.raises(KeyError):
        builtin("nope")
    assert builtin("rauzy") == rauzy()
