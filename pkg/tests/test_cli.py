import json

import numpy as np
import pytest

from garchdiag import GarchParams, residuals, simulate
from garchdiag.cli import (
    load_series,
    main,
    parse_report,
    serialize_report,
    write_series,
)
from garchdiag.errors import NonFiniteValue, ParseError, TooShort


@pytest.fixture()
def series_file(tmp_path, table_theta, normal_spec):
    path = simulate(table_theta, normal_spec, 400, burn_in=500, seed=90)
    out = tmp_path / "series.csv"
    write_series(str(out), path.x)
    return out


class TestLoadSeries:
    def test_roundtrip(self, tmp_path):
        p = tmp_path / "s.csv"
        values = np.linspace(-0.01, 0.01, 150)
        write_series(str(p), values)
        loaded = load_series(str(p))
        assert np.array_equal(loaded, values)

    def test_header_optional(self, tmp_path):
        p = tmp_path / "s.csv"
        rows = [f"{v}" for v in np.zeros(120)]
        p.write_text("\n".join(rows) + "\n")
        assert len(load_series(str(p))) == 120

    def test_parse_error_row(self, tmp_path):
        p = tmp_path / "s.csv"
        rows = ["0.1"] * 200
        rows[6] = "abc"
        p.write_text("\n".join(rows) + "\n")
        with pytest.raises(ParseError) as err:
            load_series(str(p))
        assert err.value.row == 7

    def test_non_finite_row(self, tmp_path):
        p = tmp_path / "s.csv"
        rows = ["0.1"] * 200
        rows[6] = "NaN"
        p.write_text("\n".join(rows) + "\n")
        with pytest.raises(NonFiniteValue) as err:
            load_series(str(p))
        assert err.value.row == 7

    def test_too_short(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("\n".join(["0.1"] * 100) + "\n")
        with pytest.raises(TooShort):
            load_series(str(p))


class TestReportFormat:
    def test_roundtrip(self):
        record = {"name": "cusum1", "statistic": 1.25, "reject": False,
                  "n": 500, "note": "ok"}
        assert parse_report(serialize_report(record)) == record

    def test_six_significant_digits(self):
        text = serialize_report({"statistic": 1.23456789012})
        assert text == "statistic=1.23457\n"


class TestCommands:
    def test_simulate_deterministic(self, tmp_path):
        args = ["simulate", "--theta", "0.0002,0.1,0.7", "--n", "300",
                "--burn-in", "200", "--seed", "4"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()
        assert len(load_series(str(tmp_path / "a.csv"))) == 301

    def test_simulate_requires_seed(self, tmp_path, capsys):
        code = main(["simulate", "--theta", "0.0002,0.1,0.7", "--n", "300",
                     "--out", str(tmp_path / "a.csv")])
        assert code == 1
        assert "--seed" in capsys.readouterr().err

    def test_fit_report(self, series_file, tmp_path):
        out = tmp_path / "fit.txt"
        assert main(["fit", "--in", str(series_file), "--out", str(out)]) == 0
        record = parse_report(out.read_text())
        assert record["converged"] is True
        assert 0.0 < record["alpha0"] < 1.0
        assert record["n"] == 400

    def test_residuals_with_explicit_theta(self, series_file, tmp_path):
        out = tmp_path / "res.csv"
        code = main(["residuals", "--in", str(series_file),
                     "--theta", "0.0002,0.1,0.7", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "eps_hat"
        got = np.array([float(v) for v in lines[1:]])
        x = load_series(str(series_file))
        expected = residuals(GarchParams(0.0002, (0.1,), (0.7,)), x).eps_hat
        assert np.array_equal(got, expected)

    def test_test_command_auto_fit(self, series_file, tmp_path):
        out = tmp_path / "report.txt"
        code = main(["test", "--stat", "cusum2_2", "--level", "0.05",
                     "--in", str(series_file), "--fit", "auto", "--out", str(out)])
        assert code == 0
        record = parse_report(out.read_text())
        assert record["name"] == "cusum2_2"
        assert isinstance(record["reject"], bool)
        assert 0.0 <= record["p_value"] <= 1.0
        assert record["provenance.estimator_converged"] is True

    def test_test_requires_theta_or_fit(self, series_file, capsys):
        assert main(["test", "--stat", "jb", "--in", str(series_file)]) == 1

    def test_jb_correct_short_series_is_computation_error(self, tmp_path, capsys):
        p = tmp_path / "short.csv"
        p.write_text("\n".join(["0.01"] * 90) + "\n")
        code = main(["test", "--stat", "jb", "--correct", "--in", str(p),
                     "--theta", "0.0002,0.1,0.7"])
        assert code == 2
        assert "TooShort" in capsys.readouterr().err

    def test_unknown_stat_is_usage_error(self, series_file):
        assert main(["test", "--stat", "bogus", "--in", str(series_file),
                     "--fit", "auto"]) == 1

    def test_kde_mass(self, series_file, tmp_path):
        out = tmp_path / "density.csv"
        code = main(["kde", "--in", str(series_file),
                     "--theta", "0.0002,0.1,0.7", "--out", str(out)])
        assert code == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        grid = np.array([float(r[0]) for r in rows])
        dens = np.array([float(r[1]) for r in rows])
        assert abs(np.trapezoid(dens, grid) - 1.0) < 1e-3


class TestMcTable:
    @pytest.fixture()
    def config_file(self, tmp_path):
        cfg = {
            "p": 1, "q": 1,
            "theta": [0.0002, 0.1, 0.7],
            "scenario": {"kind": "null"},
            "innovation": {"family": "standard-normal"},
            "n_list": [150],
            "replicates": 8,
            "statistic": "cusum2_2",
            "master_seed": 3,
            "burn_in": 200,
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_deterministic_csv(self, config_file, tmp_path):
        args = ["mc-table", "--config", str(config_file), "--seed", "42"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
        a = (tmp_path / "a.csv").read_text()
        assert a == (tmp_path / "b.csv").read_text()
        header, row = a.splitlines()
        assert header == "scenario,n,rejection_rate,mc_se,fit_failure_rate"
        assert row.startswith("null,150,")

    def test_reps_override(self, config_file, tmp_path, monkeypatch):
        import garchdiag.cli as cli_mod
        seen = {}
        def fake_run(config, workers=1):
            seen["reps"] = config.replicates
            seen["seed"] = config.master_seed
            from garchdiag.montecarlo import McRow, McTable
            return McTable(rows=(McRow("null", 150, 0.0, 0.0, 0.0),))
        monkeypatch.setattr(cli_mod, "run_experiment", fake_run)
        main(["mc-table", "--config", str(config_file), "--reps", "5",
              "--seed", "7", "--out", str(tmp_path / "t.csv")])
        assert seen == {"reps": 5, "seed": 7}

    def test_unknown_config_key_is_computation_error(self, tmp_path, capsys):
        bad = {"theta": [0.0002, 0.1, 0.7], "n_list": [150], "replicates": 2,
               "master_seed": 1, "typo_key": True}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code = main(["mc-table", "--config", str(path), "--out",
                     str(tmp_path / "t.csv")])
        assert code == 2
        assert "typo_key" in capsys.readouterr().err

    def test_bad_flag_is_usage_error(self, config_file, tmp_path):
        assert main(["mc-table", "--config", str(config_file),
                     "--bogus-flag", "--out", str(tmp_path / "t.csv")]) == 1

    def test_missing_seed_everywhere(self, tmp_path):
        cfg = {"theta": [0.0002, 0.1, 0.7], "n_list": [150], "replicates": 2}
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg))
        assert main(["mc-table", "--config", str(path),
                     "--out", str(tmp_path / "t.csv")]) == 1


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 1
