import pytest
from hypothesis import given, strategies as st

from tesserae import analysis, catalog, patchio
from tesserae.geometry import Patch, RigidMotion, Tile, patches_equal


def test_chair_level3_records():
    text = patchio.dumps(analysis.generate(catalog.get("chair"), "L0", 3))
    lines = text.splitlines()
    assert lines[0] == "TESSERAE-PATCH v1"
    n = int(lines[lines.index("tiles 64")].split()[1])
    records = lines[lines.index("tiles 64") + 1 :]
    assert n == len(records) == 64
    assert all(len(r.split()) == 7 for r in records)


def test_pinwheel_level4_round_trip_exact():
    p = analysis.generate(catalog.get("pinwheel"), "T", 4)
    q = patchio.loads(patchio.dumps(p))
    assert patchio.dumps(q) == patchio.dumps(p)
    for s, t in zip(p.canonical(), q):
        assert s.placement == t.placement and s.proto == t.proto


def test_empty_patch_is_header_only():
    assert patchio.dumps(Patch(())) == "TESSERAE-PATCH v1\n"
    assert len(patchio.loads("TESSERAE-PATCH v1\n")) == 0


def test_version_mismatch():
    with pytest.raises(patchio.PatchFormatError, match="version") as info:
        patchio.loads("TESSERAE-PATCH v9\n")
    assert info.value.line == 1


def test_malformed_record_reports_line():
    text = patchio.dumps(analysis.generate(catalog.get("chair"), "L0", 1))
    lines = text.splitlines()
    lines[-2] = lines[-2].rsplit(" ", 1)[0]
    with pytest.raises(patchio.PatchFormatError, match="malformed record") as info:
        patchio.loads("\n".join(lines))
    assert info.value.line == len(lines) - 1


def test_non_rigid_record_rejected():
    text = patchio.dumps(analysis.generate(catalog.get("chair"), "L0", 1))
    lines = text.splitlines()
    parts = lines[-1].split()
    parts[1] = "2"
    lines[-1] = " ".join(parts)
    with pytest.raises(patchio.PatchFormatError):
        patchio.loads("\n".join(lines))


@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(0, 6.3), st.booleans()), max_size=12))
def test_round_trip_property(placements):
    proto = catalog.get("chair").proto("L0")
    from tesserae.geometry import LinearMap

    tiles = []
    for x, y, a, refl in placements:
        m = RigidMotion.rotation(a, (x, y))
        if refl:
            m = m @ RigidMotion(LinearMap(1.0, 0.0, 0.0, -1.0))
        tiles.append(Tile(proto, m))
    p = Patch(tuple(tiles))
    q = patchio.loads(patchio.dumps(p))
    assert patches_equal(p, q, tol=0.0)


def test_save_and_load(tmp_path):
    p = analysis.generate(catalog.get("rauzy"), "1", 6)
    f = tmp_path / "r.patch"
    patchio.save(p, f)
    assert patches_equal(patchio.load(f), p)
