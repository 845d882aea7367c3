import json

import numpy as np
import pytest

from xomit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_nuclides_default_table(capsys):
    code, out, err = run(capsys, "nuclides")
    assert code == 0
    for name in ("45Sc", "67Zn", "73Ge", "157Gd", "181Ta", "229Th"):
        assert name in out
    assert "valid" in out and "marginal" in out


def test_nuclides_single_row(capsys):
    code, out, err = run(capsys, "nuclides", "--nuclide", "67Zn")
    assert code == 0
    assert "67Zn" in out
    assert "45Sc" not in out


def test_nuclides_unknown_exits_2_with_suggestions(capsys):
    code, out, err = run(capsys, "nuclides", "--nuclide", "57Fe")
    assert code == 2
    assert "67Zn" in err


def test_nuclides_file_bad_json_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    code, out, err = run(capsys, "nuclides", "--nuclides-file", str(bad))
    assert code == 2
    assert "JSON" in err


def test_nuclides_file_extends_pool(capsys, tmp_path):
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps([{"name": "57Fe", "energy_eV": 14.4e3, "gamma_MHz": 1.1}]), encoding="utf-8")
    code, out, err = run(capsys, "nuclides", "--nuclides-file", str(extra))
    assert code == 0
    assert "57Fe" in out


def test_spectrum_uncoupled_no_dip(capsys, tmp_path):
    out_file = tmp_path / "zn.csv"
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "0",
        "--output", str(out_file),
    )
    assert code == 0
    assert "contrast = 0.0000" in out
    assert out_file.exists()
    header = out_file.read_text().splitlines()[0]
    assert header == "delta_rad_s,delta_over_omega_m,absorption"


def test_spectrum_with_power_reports_dip(capsys, tmp_path):
    out_file = tmp_path / "zn2.csv"
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
        "--output", str(out_file),
    )
    assert code == 0
    assert "contrast = 0.9" in out or "contrast = 1.0" in out


def test_spectrum_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, *_ = run(
            capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
            "--grid-points", "501", "--output", str(path),
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_spectrum_json_roundtrip(capsys, tmp_path):
    out_file = tmp_path / "zn.json"
    code, *_ = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
        "--format", "json", "--grid-points", "301", "--output", str(out_file),
    )
    assert code == 0
    from xomit.spectrum import Spectrum

    spec = Spectrum.from_json(out_file.read_text())
    assert spec.snapshot["config"]["power_w"] == pytest.approx(2e-9)
    assert spec.snapshot["gamma_convention"] == "hz"
    assert len(spec.delta) == 301


def test_spectrum_normalize(capsys, tmp_path):
    out_file = tmp_path / "norm.csv"
    code, *_ = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "0",
        "--normalize", "--grid-points", "501", "--output", str(out_file),
    )
    assert code == 0
    rows = out_file.read_text().splitlines()[1:]
    values = [float(r.split(",")[2]) for r in rows]
    assert max(values) == pytest.approx(1.0, rel=1e-9)


def test_spectrum_conflicting_coupling_flags(capsys, tmp_path):
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
        "--coupling-g-hz-2pi", "100", "--output", str(tmp_path / "x.csv"),
    )
    assert code == 2
    assert "not both" in err


def test_spectrum_invalid_physics_exits_2(capsys, tmp_path):
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--mass-ug", "-1",
        "--output", str(tmp_path / "x.csv"),
    )
    assert code == 2
    assert "mass" in err


def test_spectrum_warning_goes_to_stderr_exit_0(capsys, tmp_path):
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
        "--delta-c-rad-s", "1e6", "--grid-points", "301",
        "--output", str(tmp_path / "warn.csv"),
    )
    assert code == 0
    assert "red-detuned" in err


def test_spectrum_plot_written(capsys, tmp_path):
    png = tmp_path / "fig.png"
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--power-nw", "2",
        "--grid-points", "301", "--output", str(tmp_path / "s.csv"),
        "--plot", str(png),
    )
    assert code == 0
    assert png.exists() and png.stat().st_size > 1000


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"power_nw": 2.0, "grid_points": 301}), encoding="utf-8")
    out_file = tmp_path / "c.csv"
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--config", str(cfg),
        "--output", str(out_file), "--format", "csv",
    )
    assert code == 0
    assert len(out_file.read_text().splitlines()) == 302  # config grid applied
    # explicit flag beats the config file
    code, out, err = run(
        capsys, "spectrum", "--nuclide", "67Zn", "--config", str(cfg),
        "--grid-points", "101", "--output", str(out_file),
    )
    assert code == 0
    assert len(out_file.read_text().splitlines()) == 102


def test_config_file_unknown_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"powr_nw": 2.0}), encoding="utf-8")
    code, out, err = run(capsys, "spectrum", "--nuclide", "67Zn", "--config", str(cfg),
                         "--output", str(tmp_path / "x.csv"))
    assert code == 2
    assert "unknown keys" in err


def test_sweep_power_contrast_monotone(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    code, out, err = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "power_nw",
        "--from", "0", "--to", "5", "--count", "11",
        "--grid-points", "301", "--output", str(out_file),
    )
    assert code == 0
    rows = [r.split(",") for r in out_file.read_text().splitlines()[1:]]
    by_value = {}
    for r in rows:
        by_value[float(r[1])] = float(r[6])
    values = sorted(by_value)
    contrasts = [by_value[v] for v in values]
    assert len(values) == 11
    assert all(b >= a - 1e-12 for a, b in zip(contrasts, contrasts[1:]))
    assert contrasts[-1] > 0.9


def test_sweep_rows_ordered_value_major(capsys, tmp_path):
    out_file = tmp_path / "sweep2.csv"
    code, *_ = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "power_nw",
        "--values", "0,2", "--grid-points", "101", "--output", str(out_file),
    )
    assert code == 0
    rows = [r.split(",") for r in out_file.read_text().splitlines()[1:]]
    assert len(rows) == 202
    assert [float(r[1]) for r in rows[:101]] == [0.0] * 101
    deltas = [float(r[2]) for r in rows[:101]]
    assert deltas == sorted(deltas)


def test_sweep_single_value_rejected(capsys, tmp_path):
    code, out, err = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "power_nw",
        "--values", "2", "--output", str(tmp_path / "x.csv"),
    )
    assert code == 2
    assert "at least 2" in err


def test_sweep_unknown_variable_rejected(capsys, tmp_path):
    code, out, err = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "temperature",
        "--values", "1,2", "--output", str(tmp_path / "x.csv"),
    )
    assert code == 2
    assert "unknown sweep variable" in err


def test_sweep_n_records_validity_transition(capsys, tmp_path):
    out_file = tmp_path / "nsweep.csv"
    code, out, err = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "n",
        "--values", "1e5,5e6,1e8", "--grid-points", "101",
        "--output", str(out_file),
    )
    assert code == 0
    assert "marginal" in out and "valid" in out and "invalid" in out


def test_sweep_plot(capsys, tmp_path):
    png = tmp_path / "sweep.png"
    code, *_ = run(
        capsys, "sweep", "--nuclide", "67Zn", "--variable", "power_nw",
        "--values", "0,2,5", "--grid-points", "101",
        "--output", str(tmp_path / "s.csv"), "--plot", str(png),
    )
    assert code == 0
    assert png.exists() and png.stat().st_size > 1000


def test_validate_report(capsys, tmp_path):
    report_file = tmp_path / "report.json"
    code, out, err = run(capsys, "validate", "--report", str(report_file))
    assert code == 0
    assert out.count("PASS") >= 10
    payload = json.loads(report_file.read_text())
    assert payload["schema"] == "xomit.validation/1"
    assert payload["all_passed"] is True
    names = {c["name"] for c in payload["checks"]}
    assert {"table1-eta", "oracle-equivalence", "transparency-dip"} <= names


def test_validate_injected_failure(capsys, tmp_path):
    code, out, err = run(capsys, "validate", "--inject-failure", "table1-eta")
    assert code == 1
    assert "FAIL  table1-eta" in out
    assert "table1-eta" in err
