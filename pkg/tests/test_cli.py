import math

import pytest

from adelic_lab import emit
from adelic_lab.cli import main


def _rows(text):
    lines = text.splitlines()
    assert lines[0] == emit.SCHEMA
    return [line.split(",") for line in lines[1:]]


def test_spectrum_n3(capsys):
    assert main(["spectrum", "--n", "3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["n", "parity", "re", "im", "modulus", "tag", "multiplicity"]
    got = {(float(r[2]), float(r[3])): int(r[6]) for r in rows[1:]}
    s7 = math.sqrt(7) / 4
    expected = {(1.0, 0.0): 2, (0.5, 0.0): 3, (0.0, 0.0): 2, (-0.25, s7): 1, (-0.25, -s7): 1}
    assert len(got) == len(expected)
    for (re, im), m in expected.items():
        assert any(abs(re - a) < 1e-8 and abs(im - b) < 1e-8 and m == k for (a, b), k in got.items())


def test_divisibility_table(capsys):
    assert main(["divisibility", "--n", "3", "--kmax", "17", "--out", "csv"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["k", "count", "expectation_num", "expectation_den", "deviation", "sqrt_scale"]
    assert rows[-1][:5] == ["17", "32586", "32768", "1", "-182"]


def test_matrix_export(capsys):
    assert main(["matrix", "--n", "2"]) == 0
    rows = _rows(capsys.readouterr().out)
    half = [(1, 1), (1, 3), (2, 2), (2, 3), (3, 1), (3, 2)]
    assert rows[1:] == [["0", "0", "1", "1"]] + [[str(i), str(j), "1", "2"] for i, j in half]


def test_outputs_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["adelic-scan", "--nmax", "8", "--out", str(tmp_path / d)]) == 0
        assert main(["graph", "--n", "4", "--dot", "--spectra", "--out", str(tmp_path / d)]) == 0
        assert main(["strip", "--k", "8", "--grid", "12x10", "--out", str(tmp_path / d)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    assert {"adelic_even_8.csv", "adelic_even_8.svg", "graph_4.dot", "graph_4_spectra.csv", "strip_8.svg"} <= set(names)
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_single_file_target(tmp_path):
    out = tmp_path / "scan.svg"
    assert main(["strip", "--k", "6", "--grid", "8x8", "--out", str(out)]) == 0
    assert out.read_text().startswith("<svg")
    assert not (tmp_path / "scan.csv").exists()


def test_config_and_formats(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"out_dir = {tmp_path / 'res'}\nformats = csv\n")
    assert main(["spectrum", "--n", "4", "--config", str(cfg)]) == 0
    assert sorted(p.name for p in (tmp_path / "res").iterdir()) == ["spectrum_4.csv"]


def test_identities_and_lemmaf_exit_zero(capsys):
    assert main(["identities", "--nmax", "3"]) == 0
    assert main(["lemmaf", "--bound", "5"]) == 0
    capsys.readouterr()


@pytest.mark.parametrize("check", ["spectrum", "resolvent", "harmonic", "dk-norms"])
def test_tree_checks(check, capsys):
    assert main(["tree", "--depth", "6", "--check", check, "--kmax", "10"]) == 0
    assert capsys.readouterr().out.startswith(emit.SCHEMA)


def test_dirichlet_and_interaction(capsys):
    assert main(["dirichlet", "--k", "12", "--mode", "ztilde", "--s", "3,0"]) == 0
    assert main(["dirichlet", "--k", "12", "--mode", "zhat", "--s", "1.5,14"]) == 0
    assert main(["interaction", "--k", "1", "--t", "1"]) == 0
    last = capsys.readouterr().out.splitlines()[-1].split(",")
    assert float(last[2]) == pytest.approx(math.log(2) / 2)


def test_module_errors_exit_nonzero(capsys):
    assert main(["spectrum", "--n", "99"]) == 2
    assert main(["graph", "--n", "2"]) == 2
    assert main(["interaction", "--k", "3", "--t", "000"]) == 2
    assert "ValueError" in capsys.readouterr().err


def test_unknown_flag_prints_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--n", "3", "--bogus"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_verify_all_subset(capsys):
    assert main(["verify-all", "--only", "1,2,3"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3 and "3 of 3 criteria passed" in out


def test_json_output(tmp_path):
    import json

    cfg = tmp_path / "run.cfg"
    cfg.write_text("formats = csv,json\n")
    assert main(["divisibility", "--n", "3", "--kmax", "5", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    body = json.loads((tmp_path / "divisibility_3.json").read_text())
    assert body["rows"][5][:2] == [5, 10]
