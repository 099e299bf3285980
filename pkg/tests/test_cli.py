import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from rotofrict import checker, cli
from rotofrict.constants import CODATA2018, MoleculeParams, gamma0


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


def test_rates_table(capsys):
    code, out, _ = run(capsys, "rates", "--lmax", "3")
    assert code == 0
    header, data = parse(out)
    assert header == ["l", "omega_l", "down", "up", "quantum_correction"]
    assert np.allclose(data[:, 2], [0, 1 / 3, 16 / 5, 81 / 7], rtol=1e-15)
    assert np.all(data[:, 3] == 0)
    assert data[2, 4] == 16 / 45


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "evolve", "--lmax", "6", "--initial", "l=6", "--npoints", "50")[1]
            for _ in range(3)}
    assert len(outs) == 1
    assert "-0.0" not in next(iter(outs))


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("ROTOFRICT_PRECISION", "5")
    _, out, _ = run(capsys, "rates", "--lmax", "1")
    assert out.splitlines()[2].split(",")[2] == "3.3333e-01"
    monkeypatch.setenv("ROTOFRICT_PRECISION", "40")
    code, _, err = run(capsys, "rates", "--lmax", "1")
    assert code == 1 and err.startswith("error: guard=invalid_input")


def test_evolve_file_figure_and_checker(tmp_path, capsys):
    out, fig = tmp_path / "run.csv", tmp_path / "run.png"
    code, _, _ = run(capsys, "evolve", "--lmax", "8", "--initial", "l=8", "--out", str(out),
                     "--figure", str(fig), "--npoints", "120")
    assert code == 0 and fig.stat().st_size > 0
    assert checker.main([str(out)]) == 0
    assert capsys.readouterr().out.startswith("OK")
    assert run(capsys, "check", str(out))[0] == 0


def test_checker_flags_tampering(tmp_path, capsys):
    out = tmp_path / "run.csv"
    run(capsys, "evolve", "--lmax", "3", "--initial", "l=3", "--out", str(out), "--npoints", "30")
    lines = out.read_text().splitlines()
    cells = lines[10].split(",")
    cells[1] = repr(float(cells[1]) + 1e-6)
    lines[10] = ",".join(cells)
    out.write_text("\n".join(lines) + "\n")
    assert checker.main([str(out)]) == 1
    assert "normalization" in capsys.readouterr().out
    code, _, err = run(capsys, "check", str(out))
    assert code == 1 and "guard=roundtrip" in err


def test_thermal_evolve_and_tail_guard(tmp_path, capsys):
    out = tmp_path / "hot.csv"
    code, _, _ = run(capsys, "evolve", "--lmax", "15", "--initial", "l=0", "--temp", "3",
                     "--out", str(out), "--npoints", "60")
    assert code == 0
    assert checker.main([str(out), "--thermal"]) == 0
    code, _, err = run(capsys, "evolve", "--lmax", "3", "--initial", "l=1", "--temp", "50")
    assert code == 1 and err.startswith("error: guard=tail_mass message=")


def test_sweep_writes_one_file_per_value(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run(capsys, "evolve", "--lmax", "5", "--initial", "l=5", "--npoints", "40",
                          "--sweep", "initial=1,3,5", "--out", str(out))
    assert code == 0
    names = sorted(p.name for p in tmp_path.glob("sweep_*.csv"))
    assert names == ["sweep_initial1.csv", "sweep_initial3.csv", "sweep_initial5.csv"]
    assert len(stdout.splitlines()) == 3
    single = tmp_path / "single.csv"
    run(capsys, "evolve", "--lmax", "5", "--initial", "l=3", "--npoints", "40", "--out", str(single))
    assert single.read_text() == (tmp_path / "sweep_initial3.csv").read_text()
    code, _, err = run(capsys, "evolve", "--lmax", "5", "--initial", "l=5", "--sweep", "colour=1")
    assert code == 1


def test_fig2_writes_csv_and_png(tmp_path, capsys):
    out = tmp_path / "fig2.csv"
    assert run(capsys, "fig2", "--out", str(out))[0] == 0
    header, data = parse(out.read_text())
    assert header == ["t", "p_0", "p_1", "p_2", "omega4", "power"]
    assert data.shape == (500, 6)
    assert data[0, 4] == 36.0
    assert (tmp_path / "fig2.png").exists()
    other = tmp_path / "nofig.csv"
    run(capsys, "fig2", "--out", str(other), "--no-figure")
    assert not (tmp_path / "nofig.png").exists()


def test_classical_and_climit(capsys, tmp_path):
    code, out, _ = run(capsys, "classical", "--omega0", "2", "--tmax", "100", "--npoints", "20",
                       "--figure", str(tmp_path / "c.png"))
    assert code == 0
    _, data = parse(out)
    assert np.allclose(data[:, 1], 2 / np.sqrt(1 + 2 * 4 * 0.5 * data[:, 0]), rtol=1e-14)
    code, out, _ = run(capsys, "climit", "--lmax", "4")
    _, data = parse(out)
    assert np.allclose(data[:, 1], [2 / 3, 4 / 5, 6 / 7, 8 / 9], rtol=1e-15)


def test_short_time(capsys):
    code, out, _ = run(capsys, "short-time", "--level", "2")
    assert code == 0
    _, data = parse(out)
    assert np.allclose(data[1:, 3] / data[1:, 2], 1.0, rtol=1e-2)
    assert np.allclose(data[:, 1] + data[:, 2], 1.0, rtol=0, atol=1e-15)
    code, _, err = run(capsys, "short-time", "--tmax", "1")
    assert code == 1 and "guard=short_time_regime" in err
    code, _, err = run(capsys, "short-time", "--cutoff", "10", "--level", "5")
    assert code == 1 and "guard=cutoff_ratio" in err


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--lmax", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["l", "m", "mprime", "component", "closed", "quad", "absdiff"]
    assert {r[3] for r in rows[1:]} == {f"{a}_{p}" for a in "xyz" for p in ("re", "im")}
    assert max(float(r[-1]) for r in rows[1:]) < 1e-12
    code, _, err = run(capsys, "oracle-check", "--lmax", "8", "--nodes", "6")
    assert code == 1 and "guard=quadrature_resolution" in err


def test_config_si(tmp_path, capsys):
    cfg = tmp_path / "hcl.cfg"
    cfg.write_text("units = si\ndipole_cm = 3.6e-30\ninertia_kgm2 = 2.6e-47\n")
    code, out, _ = run(capsys, "rates", "--lmax", "2", "--config", str(cfg))
    assert code == 0
    _, data = parse(out)
    m = MoleculeParams.from_dipole_inertia(3.6e-30, 2.6e-47)
    assert data[1, 2] == pytest.approx(gamma0(m, CODATA2018) / 3, rel=1e-15)
    bad = tmp_path / "bad.cfg"
    bad.write_text("units = si\n")
    code, _, err = run(capsys, "rates", "--lmax", "2", "--config", str(bad))
    assert code == 1 and err.count("\n") == 1
    code, _, err = run(capsys, "rates", "--lmax", "2", "--config", str(tmp_path / "missing.cfg"))
    assert code == 1


def test_argument_errors(capsys):
    for argv in (["rates"], ["rates", "--lmax", "-1"], ["evolve", "--lmax", "3", "--initial", "x"],
                 ["nonsense"]):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 2
        assert capsys.readouterr().err.startswith("error: guard=arguments message=")
    code, _, err = run(capsys, "evolve", "--lmax", "3", "--initial", "l=5")
    assert code == 1 and "exceeds lmax" in err


def test_help_documents_natural_units(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    assert "natural units" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rotofrict", "rates", "--lmax", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("l,omega_l,down,up,quantum_correction\n")
