import json

import pytest

from hopfberger.cli import SCHEMA_VERSION, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_spectra_octonionic(capsys):
    code, out = run(capsys, "spectra", "--family", "O", "--tau", "0.25")
    d = json.loads(out)
    assert code == 0 and d["pass"] and d["schema_version"] == SCHEMA_VERSION
    rec = {r["name"]: r["actual"] for r in d["records"]}
    assert rec["vertical p"] == [[0, 1], [0.25, 8], [4, 6]]
    assert rec["horizontal p2"] == [[0, 1], [3.25, 7]]
    assert rec["horizontal p1"] == [[0.25, 7]]
    assert d["wall_time"] is None


def test_tables_quaternionic(capsys):
    code, out = run(capsys, "tables", "--family", "H", "--n", "1", "--tau", "0.5")
    d = json.loads(out)
    assert code == 0 and max(r["residual"] for r in d["records"]) <= 1e-12


def test_tables_octonionic_reports_the_sign_discrepancy(capsys):
    code, out = run(capsys, "tables", "--family", "O", "--tau", "0.5")
    d = json.loads(out)
    failed = [r["name"] for r in d["records"] if not r["pass"]]
    assert code == 1 and not d["pass"] and len(failed) == 21
    assert all(name.startswith("D_J") for name in failed)


def test_verify_catalog_complex(capsys):
    code, out = run(capsys, "verify-catalog", "--family", "C", "--n", "3", "--tau", "0.7")
    d = json.loads(out)
    assert code == 0 and d["pass"]
    assert all(r["name"].startswith("WP_") for r in d["records"])


def test_verify_catalog_round_sphere(capsys):
    code, out = run(capsys, "verify-catalog", "--family", "H", "--n", "1", "--tau", "1")
    assert code == 0 and json.loads(out)["pass"]


def test_reports_are_byte_identical(capsys):
    argv = ("search", "--family", "H", "--n", "1", "--tau", "0.3333333333333333",
            "--restarts", "15", "--seed", "42", "--isotropic")
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a == b
    d = json.loads(a)
    assert d["pass"] and d["extra"]["summary"]["unclassified"] == 0


def test_search_writes_hits(capsys, tmp_path):
    hits = tmp_path / "hits.jsonl"
    code, _ = run(capsys, "search", "--family", "H", "--n", "1", "--tau", "0.3",
                  "--restarts", "5", "--isotropic", "--hits", str(hits))
    lines = hits.read_text().splitlines()
    assert code == 0 and "summary" in json.loads(lines[-1])
    assert all("matched_family" in json.loads(x) for x in lines[:-1])


def test_phi_and_geodesic(capsys, tmp_path):
    code, out = run(capsys, "phi", "--tau", "0.4", "--points", "5")
    assert code == 0 and len(json.loads(out)["records"]) == 11
    csv = tmp_path / "g.csv"
    code, out = run(capsys, "geodesic", "--tau", "2.0", "--alphas", "0", "0.6", "0.8",
                    "--csv", str(csv))
    assert code == 0 and json.loads(out)["pass"]
    assert csv.read_text().startswith("s,re_z1")


def test_markdown_out_and_timing(capsys, tmp_path):
    out = tmp_path / "r.md"
    code, text = run(capsys, "spectra", "--family", "C", "--n", "2", "--tau", "0.3",
                     "--format", "markdown", "--out", str(out))
    assert code == 0 and text == ""
    assert "Overall: PASS" in out.read_text()
    code, text = run(capsys, "spectra", "--family", "C", "--n", "2", "--tau", "0.3", "--timing")
    assert json.loads(text)["wall_time"] > 0


@pytest.mark.parametrize("argv", [
    ["spectra", "--family", "X", "--tau", "0.3"],
    ["spectra", "--family", "H"],
    ["search", "--family", "H", "--tau", "abc"],
    ["unknown"],
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["spectra", "--family", "H", "--n", "0", "--tau", "0.3"],
    ["spectra", "--family", "H", "--tau", "-1"],
    ["spectra", "--family", "O", "--n", "3", "--tau", "0.3"],
    ["search", "--family", "H", "--tau", "0.3", "--restarts", "-4"],
    ["geodesic", "--alphas", "1", "1", "0"],
    ["phi", "--tau", "0.7"],
    ["tables", "--family", "C", "--tau", "0.3", "--tol", "-1"],
])
def test_invalid_values_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err
