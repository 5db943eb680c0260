import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from moyalqm.cli import main


def read_json(path):
    return json.loads(path.read_text())


def test_help_exits_zero():
    r = subprocess.run([sys.executable, "-m", "moyalqm.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "wigner-grid" in r.stdout


@pytest.mark.parametrize(
    "argv",
    [
        ["wigner-grid", "--state", "3"],
        ["wigner-grid", "--state", "a,b"],
        ["wigner-grid", "--slice", "z=1"],
        ["wigner-grid", "--epsilon", "0,1"],
        ["wigner-grid", "--star-order", "-1"],
        ["extrema-table", "--order", "0"],
        ["negativity", "--system", "hydrogen1d", "--n", "0"],
        ["hydrogen", "--n", "0"],
        ["hydrogen", "--Z", "0"],
    ],
)
def test_usage_errors_exit_two_and_write_nothing(tmp_path, argv, capsys):
    out = tmp_path / "out"
    assert main(argv + ["--out-dir", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["wigner-grid", "--order", "5"])
    assert exc.value.code == 2


def test_wigner_grid_outputs(tmp_path):
    assert main(["wigner-grid", "--state", "1,0", "--order", "0", "--grid", "33", "--out-dir", str(tmp_path)]) == 0
    stem = "wigner_n1-0_eps0_order0"
    text = (tmp_path / f"{stem}.csv").read_bytes().decode()
    assert "\r\n" in text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["q_x", "p_x", "value"]
    assert len(rows) == 1 + 33 * 33
    side = read_json(tmp_path / f"{stem}.json")
    assert side["shape"] == [33, 33] and side["fixed"] == {"q_y": 0.0, "p_y": 0.0}
    checks = read_json(tmp_path / "checks.json")
    assert all(c["ok"] for c in checks["checks"])
    man = read_json(tmp_path / "manifest.json")
    for art in man["artifacts"]:
        assert hashlib.sha256((tmp_path / art["path"]).read_bytes()).hexdigest() == art["sha256"]
    assert man["threads"] >= 1 and "version" in man


def test_wigner_grid_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["wigner-grid", "--state", "0", "--epsilon", "0.5", "--lambda", "0.2", "--grid", "33"]
    assert main(argv + ["--out-dir", str(a)]) == 0
    assert main(argv + ["--out-dir", str(b)]) == 0
    for name in ("wigner_n0-0_eps0.5_order1.csv", "wigner_n0-0_eps0.5_order1.json", "checks.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_wigner_grid_json_format(tmp_path):
    assert main(["wigner-grid", "--format", "json", "--grid", "33", "--order", "0", "--out-dir", str(tmp_path)]) == 0
    assert not list(tmp_path.glob("*.csv"))


def test_extrema_table(tmp_path):
    argv = ["extrema-table", "--n", "0", "--epsilon", "0,1", "--order", "1", "--out-dir", str(tmp_path)]
    assert main(argv) == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "extrema_order1.csv").read_text())))
    assert [float(r["epsilon"]) for r in rows] == [0.0, 1.0]
    assert all(float(r["max"]) > 0 for r in rows)
    diff = list(csv.DictReader(io.StringIO((tmp_path / "extrema_order1_diff.csv").read_text())))
    assert {r["field"] for r in diff} == {"max", "min"}
    checks = read_json(tmp_path / "checks.json")
    assert checks["trends"] and all("holds" in t for t in checks["trends"])


def test_negativity_hydrogen(tmp_path):
    argv = ["negativity", "--system", "hydrogen1d", "--n", "1,2,3", "--out-dir", str(tmp_path)]
    assert main(argv) == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "negativity.csv").read_text())))
    etas = [float(r["eta"]) for r in rows]
    assert etas == sorted(etas)
    trend = read_json(tmp_path / "checks.json")["trends"][0]
    assert trend["holds"]


def test_negativity_henon_heiles_small(tmp_path):
    argv = ["negativity", "--n", "0", "--epsilon", "0", "--lambda", "0", "--grid", "24", "--out-dir", str(tmp_path)]
    main(argv)
    rows = list(csv.DictReader(io.StringIO((tmp_path / "negativity.csv").read_text())))
    assert abs(float(rows[0]["eta"])) < 5e-3


def test_hydrogen_command(tmp_path):
    assert main(["hydrogen", "--n", "1,2,3", "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "hydrogen_energies.csv").read_text())))
    assert abs(float(rows[0]["eV"]) + 13.6) < 0.01
    assert main(["hydrogen", "--Z", "2", "--format", "json", "--out-dir", str(tmp_path / "z2")]) == 0
    checks = {c["name"]: c for c in read_json(tmp_path / "z2" / "checks.json")["checks"]}
    assert abs(checks["bohr radius"]["radial"] - 0.5) < 1e-6


def test_coarse_grid_fails_normalisation_check(tmp_path):
    assert main(["wigner-grid", "--grid", "5", "--order", "0", "--out-dir", str(tmp_path)]) == 1
    checks = {c["name"]: c["ok"] for c in read_json(tmp_path / "checks.json")["checks"]}
    assert checks["normalization exact"] and not checks["normalization trapezoid"]


def test_failed_check_exits_one(tmp_path, monkeypatch):
    import moyalqm.hydrogen as hyd

    monkeypatch.setattr(hyd, "eigen_residual", lambda n, Z=1: 1.0)
    assert main(["hydrogen", "--out-dir", str(tmp_path)]) == 1
    assert (tmp_path / "manifest.json").exists()


def test_console_script():
    r = subprocess.run(["moyalqm", "hydrogen", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
