import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from lagtime import __version__, cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_verify_defaults_pass(capsys):
    code, out, _ = run(["verify"], capsys)
    report = json.loads(out)
    assert code == cli.EXIT_OK
    assert report["pass"] is True
    assert report["version"] == __version__
    for key in ("orthonormality_max_error", "band_leakage_max", "psi_closed_vs_numeric_max_error",
                "time_variance_max_rel_discrepancy", "heisenberg_margin_min",
                "arrival_closed_vs_quadrature_max_error", "var_T_closed_form_n0", "var_T_quadrature_n0"):
        assert key in report
    assert report["orthonormality_max_error"] <= 1e-11
    assert report["var_T_closed_form_n0"] == pytest.approx(0.25, rel=1e-12)
    # flat: every value is a scalar
    assert all(not isinstance(v, (dict, list)) for v in report.values())


def test_verify_alpha_below_two_is_usage_error(capsys):
    code, _, err = run(["verify", "--alpha", "1.5"], capsys)
    assert code == cli.EXIT_USAGE
    assert "--alpha" in err and "2" in err


def test_verify_tolerance_violation(capsys, monkeypatch):
    monkeypatch.setitem(cli.TOLERANCES, "orthonormality_max_error", -1.0)
    code, out, _ = run(["verify", "--nmax", "4"], capsys)
    assert code == cli.EXIT_TOLERANCE
    assert json.loads(out)["pass"] is False


def test_verify_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["verify", "--alpha", "20", "--nmax", "8", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["alpha"] == 20.0


@pytest.mark.parametrize("fig", ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"])
def test_figures_are_byte_identical(fig, tmp_path, capsys):
    extra = ["--alpha-grid", "2:6:9"] if fig in ("fig3", "fig4") else []
    a, b = tmp_path / "a", tmp_path / "b"
    assert run([fig, "--out", str(a)] + extra, capsys)[0] == 0
    assert run([fig, "--out", str(b)] + extra, capsys)[0] == 0
    files = sorted(p.name for p in a.iterdir())
    assert files and files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_csv_format(tmp_path, capsys):
    run(["fig5", "--out", str(tmp_path)], capsys)
    raw = (tmp_path / "fig5.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == "tau,density"
    assert len(lines) == 802
    first = lines[1].split(",")[0]
    mantissa = first.lstrip("-").split("e")[0]
    assert len(mantissa.replace(".", "")) == 17


def test_fig1_columns(tmp_path, capsys):
    run(["fig1", "--out", str(tmp_path)], capsys)
    head, data = read_csv(tmp_path / "fig1_energy.csv")
    assert head == ["omega", "phi_0", "phi_1", "phi_2", "phi_3"]
    assert data.shape == (1001, 5)
    head, data = read_csv(tmp_path / "fig1_time.csv")
    assert head == ["t", "psi2_0", "psi2_1", "psi2_2", "psi2_3"]
    assert data[0, 0] == -6.0 and data[-1, 0] == 6.0


def test_fig3_fig4_values(tmp_path, capsys):
    run(["fig3", "--out", str(tmp_path)], capsys)
    run(["fig4", "--out", str(tmp_path)], capsys)
    head, d3 = read_csv(tmp_path / "fig3.csv")
    assert head == ["alpha", "deltaT_n0", "deltaT_n3"]
    assert d3.shape == (77, 3)
    assert np.allclose(np.diff(d3[:, 0]), 0.5)
    assert d3[0, 1] == pytest.approx(0.5, rel=1e-12)
    assert np.all(np.diff(d3[:, 1]) < 0)
    head, d4 = read_csv(tmp_path / "fig4.csv")
    assert head == ["alpha", "product_n0", "product_n3"]
    assert d4[0, 1] == pytest.approx(0.8660254037844386, rel=1e-12)
    assert np.all(d4[:, 1] > 0.5) and np.all(d4[:, 2] > 3.5)


@pytest.mark.parametrize("fig", ["fig5", "fig6"])
def test_arrival_figures_zero_at_coincidence(fig, tmp_path, capsys):
    run([fig, "--out", str(tmp_path), "--x", "2.0"], capsys)
    _, data = read_csv(tmp_path / f"{fig}.csv")
    mid = data[np.argmin(np.abs(data[:, 0] - 2.0))]
    assert mid[0] == 2.0 and mid[1] == 0.0


def test_uncertainty_json(capsys):
    code, out, _ = run(["uncertainty", "--n", "0", "--alpha", "2"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["product"] == pytest.approx(0.8660254037844386, rel=1e-12)
    assert rep["var_H"] == 3.0


def test_uncertainty_alpha_floor(capsys):
    code, _, err = run(["uncertainty", "--alpha", "1.2"], capsys)
    assert code == cli.EXIT_USAGE and "--alpha" in err


def test_spectrum_csv(capsys):
    code, out, _ = run(["spectrum", "--nmax", "2", "--alpha", "2"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "index,eigenvalue"
    assert [float(r.split(",")[1]) for r in lines[1:]] == pytest.approx([2.0, 6.0], abs=1e-12)


def test_modes_and_arrival_to_file(tmp_path, capsys):
    assert run(["modes", "--n", "2", "--out", str(tmp_path / "m.csv")], capsys)[0] == 0
    head, data = read_csv(tmp_path / "m.csv")
    assert head == ["omega", "phi_2"] and data.shape == (401, 2)
    assert run(["arrival", "--out", str(tmp_path / "a.csv"), "--grid=-1:1:5"], capsys)[0] == 0
    head, data = read_csv(tmp_path / "a.csv")
    assert head == ["tau", "re", "im", "density"]
    assert data[2, 3] == 0.0


@pytest.mark.parametrize("argv, flag", [
    (["spectrum", "--nmax", "1"], "--nmax"),
    (["modes", "--n", "-1"], "--n"),
    (["arrival", "--s", "2"], "--s"),
    (["modes", "--omega0", "0"], "--omega0"),
    (["fig3", "--alpha-grid", "1:3:5"], "--alpha-grid"),
    (["verify", "--nmax", "99"], "--nmax"),
])
def test_usage_errors_name_the_flag(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == cli.EXIT_USAGE
    assert flag in err


def test_bad_grid_spec(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["modes", "--grid", "0:1"])
    assert exc.value.code == cli.EXIT_USAGE


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(["fig5", "--out", str(blocker / "sub")], capsys)
    assert code == cli.EXIT_IO
    assert "I/O" in err


def test_console_script_entry_point():
    env = dict(os.environ)
    out = subprocess.run([sys.executable, "-m", "lagtime.cli", "--version"],
                         capture_output=True, text=True, env=env)
    assert out.returncode == 0
    assert __version__ in out.stdout
