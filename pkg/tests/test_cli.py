import pytest

from tesserae.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_matrix(capsys):
    assert run(capsys, "matrix", "--builtin", "fibonacci") == (0, "matrix: 1 1 / 1 0\n", "")


def test_analyze_rauzy(capsys):
    code, out, _ = run(capsys, "analyze", "--builtin", "rauzy")
    fields = dict(line.split(": ", 1) for line in out.splitlines())
    assert code == 0
    assert fields["char_poly"] == "x^3 - x^2 - 1"
    assert float(fields["perron"]) == pytest.approx(1.4655712319, abs=1e-9)
    assert fields["repetitivity"].startswith("repetitive")
    assert fields["pisot"] == "Pisot"


def test_analyze_chacon_not_repetitive(capsys):
    code, out, _ = run(capsys, "analyze", "--builtin", "chacon")
    assert code == 0
    assert "repetitivity: not repetitive" in out and "persistent zero" in out


def test_iterate_writes_patch(capsys, tmp_path):
    f = tmp_path / "p.patch"
    code, out, _ = run(capsys, "iterate", "--builtin", "chair", "--tile", "L0", "--level", "3", "--out", str(f))
    assert code == 0 and "tiles: 64" in out
    lines = f.read_text().splitlines()
    assert sum(1 for ln in lines if ln.startswith("L")) == 64


def test_parse_error_exit_1(capsys, tmp_path):
    f = tmp_path / "bad.rule"
    f.write_text("symbolic bad { a -> a c; }\n")
    code, _, err = run(capsys, "parse", str(f))
    assert code == 1 and "1:23" in err and "unknown letter c" in err


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "matrix")[0] == 2
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "matrix", "--builtin", "nope")[0] == 2
    assert run(capsys, "iterate", "--builtin", "chair", "--level", "x")[0] == 2
    assert run(capsys, "iterate", "--builtin", "chair", "--tile", "Q")[0] == 2


def test_check_failing_rule_exit_1(capsys, tmp_path):
    f = tmp_path / "bent.rule"
    f.write_text(
        "geometric bent { expansion=[[2,0],[0,2]];"
        " prototile S polygon (0,0) (1,0) (1,1) (0,1);"
        " child S <- S t=(0,0); child S <- S t=(1,0); child S <- S t=(0,1); child S <- S t=(0.5,1); }"
    )
    code, out, _ = run(capsys, "check", str(f))
    assert code == 1 and "validation: fail" in out


def test_flc_render_dual_faults(capsys, tmp_path):
    code, out, _ = run(capsys, "flc", "--builtin", "chair", "--level", "4")
    assert code == 0 and "summary: stable through level 4" in out
    svg = tmp_path / "s.svg"
    code, out, _ = run(capsys, "render", "--builtin", "sierpinski", "--tile", "2", "--level", "2", "--out", str(svg))
    assert code == 0 and svg.read_text().count("<polygon") == 81
    code, out, _ = run(capsys, "dual", "--builtin", "rauzy", "--level", "5")
    assert code == 0 and "edges:" in out
    code, out, _ = run(capsys, "faults", "--builtin", "nonpisot_dpv_rescaled", "--tile", "aa", "--level", "3")
    assert code == 0 and "mismatch: yes" in out


def test_rescale_and_admitted(capsys, tmp_path):
    code, out, _ = run(capsys, "rescale", "--builtin", "chair", "--level", "4")
    assert code == 0 and "converging: yes" in out
    code, out, _ = run(capsys, "rescale", "--builtin", "fibonacci_product", "--level", "3")
    assert code == 1
    f = tmp_path / "c.patch"
    run(capsys, "iterate", "--builtin", "chair", "--level", "1", "--out", str(f))
    code, out, _ = run(capsys, "admitted", "--builtin", "chair", "--candidate", str(f), "--level", "3")
    assert code == 0 and "admitted: yes" in out


def test_tile_cap_is_domain_error(capsys, monkeypatch):
    monkeypatch.setenv("TESSERAE_TILE_CAP", "1000")
    assert run(capsys, "iterate", "--builtin", "chair", "--level", "6")[0] == 1
