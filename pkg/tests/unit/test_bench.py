"""Unit tests for the benchmark functions, metrics, CSV handling and experiment runner."""

import json
import math

import numpy as np
import pytest


class TestTestFunctions:
    """Test Herbie's tooth and the borehole function."""

    def test_herbies_tooth(self):
        """Matches the product form -w(x1) w(x2)."""
        from ligp.bench import herbies_tooth

        def w(x):
            bumps = math.exp(-((x - 1) ** 2)) + math.exp(-0.8 * (x + 1) ** 2)
            return bumps - 0.05 * math.sin(8 * (x + 0.1))

        for x1, x2 in [(0.0, 0.0), (1.0, -1.0), (-1.7, 0.6)]:
            assert herbies_tooth([x1, x2]) == pytest.approx(-w(x1) * w(x2), rel=1e-14)
        assert herbies_tooth(np.zeros((3, 2))).shape == (3,)

    def test_borehole_midpoint(self):
        """Midpoint of all ranges matches an independent evaluation of the flow formula."""
        from ligp.bench import BOREHOLE_RANGES, borehole

        mid = {name: (lo + hi) / 2 for name, lo, hi in BOREHOLE_RANGES}
        log_ratio = math.log(mid["r"] / mid["r_w"])
        expected = (
            2 * math.pi * mid["T_u"] * (mid["H_u"] - mid["H_l"])
            / (
                log_ratio
                * (
                    1
                    + 2 * mid["L"] * mid["T_u"] / (log_ratio * mid["r_w"] ** 2 * mid["K_w"])
                    + mid["T_u"] / mid["T_l"]
                )
            )
        )
        x = np.array([(lo + hi) / 2 for _, lo, hi in BOREHOLE_RANGES])

        assert borehole(x) == pytest.approx(expected, rel=1e-12)
        print(f"✅ Borehole flow at midpoint: {expected:.6f}")

    def test_borehole_ranges(self):
        """Input order and ranges of the standard borehole problem."""
        from ligp.bench import BOREHOLE_RANGES

        names = [name for name, _, _ in BOREHOLE_RANGES]
        assert names == ["r_w", "r", "T_u", "T_l", "H_u", "H_l", "L", "K_w"]
        assert BOREHOLE_RANGES[0][1:] == (0.05, 0.15)
        assert BOREHOLE_RANGES[7][1:] == (9855.0, 12045.0)

    def test_borehole_rejects_bad_geometry(self):
        from ligp.bench import borehole

        x = np.array([0.1, 0.05, 80000, 80, 1000, 750, 1300, 10000])
        with pytest.raises(ValueError):
            borehole(x)

    def test_unit_scaling(self, rng):
        from ligp.bench import unit_scale, unit_unscale

        u = rng.random((4, 8))
        np.testing.assert_allclose(unit_scale(unit_unscale(u)), u, atol=1e-12)


class TestMetrics:
    """Test RMSE, RMSPE and interval summaries."""

    def test_rmse_matches_loop(self, rng):
        from ligp.bench import rmse

        a, b = rng.random(50), rng.random(50)
        naive = math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)) / 50)
        assert rmse(a, b) == pytest.approx(naive, rel=1e-12)

    def test_rmspe(self):
        from ligp.bench import rmspe

        assert rmspe([1.1, 1.8], [1.0, 2.0]) == pytest.approx(10.0)
        with pytest.raises(ValueError):
            rmspe([1.0], [0.0])
        with pytest.raises(ValueError):
            rmspe([1.0, 2.0], [1.0])

    def test_interval90(self):
        from ligp.bench import interval90

        lo, hi = interval90(np.arange(101.0))
        assert (lo, hi) == (pytest.approx(5.0), pytest.approx(95.0))
        assert all(math.isnan(v) for v in interval90([]))


class TestCsv:
    """Test CSV ingestion."""

    def test_header_and_named_response(self, tmp_path):
        from ligp.bench import load_csv

        path = tmp_path / "data.csv"
        path.write_text("a,target,b\n1,10,2\n3,30,4\n")
        X, Y = load_csv(path, "target")
        np.testing.assert_array_equal(X, [[1, 2], [3, 4]])
        np.testing.assert_array_equal(Y, [10, 30])

    def test_headerless_last_column(self, tmp_path):
        from ligp.bench import load_csv

        path = tmp_path / "data.csv"
        path.write_text("1,2,3\n4,5,6\n")
        X, Y = load_csv(path)
        np.testing.assert_array_equal(Y, [3, 6])
        assert X.shape == (2, 2)

    def test_non_numeric_cell(self, tmp_path):
        """Error names the file row and column of the bad value."""
        from ligp.bench import CsvParseError, load_csv

        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\n3,oops\n")
        with pytest.raises(CsvParseError) as excinfo:
            load_csv(path)
        assert (excinfo.value.row, excinfo.value.column) == (3, 2)
        print(f"✅ {excinfo.value}")

    def test_load_inputs(self, tmp_path):
        """Test inputs may carry the response column or not."""
        from ligp.bench import load_inputs

        with_y = tmp_path / "with_y.csv"
        with_y.write_text("1,2,9\n3,4,9\n")
        without_y = tmp_path / "without_y.csv"
        without_y.write_text("1,2\n3,4\n")

        np.testing.assert_array_equal(load_inputs(with_y, 2), [[1, 2], [3, 4]])
        np.testing.assert_array_equal(load_inputs(without_y, 2), [[1, 2], [3, 4]])
        with pytest.raises(ValueError, match="columns"):
            load_inputs(without_y, 4)


class TestExperiment:
    """Test the replicated experiment runner and report files."""

    def _spec(self, **overrides):
        from ligp.bench import ExperimentSpec
        from ligp.predictor import PredictConfig

        fields = dict(
            problem="herbie",
            N=300,
            N_prime=8,
            replicates=2,
            configs=(PredictConfig(m=4, n=25), PredictConfig(method="lagp-nn", m=1, n=25)),
            seed=5,
            prescale=False,
        )
        fields.update(overrides)
        return ExperimentSpec(**fields)

    def test_unknown_problem(self):
        with pytest.raises(ValueError, match="unknown problem"):
            self._spec(problem="sarcos")

    def test_config_needs_enough_points(self):
        from ligp.predictor import PredictConfig

        with pytest.raises(ValueError):
            self._spec(configs=(PredictConfig(m=4, n=500),))

    def test_run_and_write(self, tmp_path):
        """Every config gets per-replicate metrics and the report files are written."""
        from ligp.bench import run_experiment, write_report

        report = run_experiment(self._spec(), invalid={"broken": "ValueError: m > n"})
        labels = [c.label for c in report.configs]

        assert labels == ["ligp-qnorm(m=4,n=25)", "lagp-nn(m=1,n=25)", "broken"]
        assert report.failed == ["broken"]
        for c in report.configs[:2]:
            assert len(c.rmse_values) == 2
            assert c.rmse > 0
            assert c.rmse_interval[0] <= c.rmse_interval[1]
            assert "predict" in c.timings

        out = write_report(report, tmp_path / "run")
        doc = json.loads((out / "report.json").read_text())
        assert set(doc["rmse"]) == set(labels)
        assert "timings" not in doc["configs"][0]
        assert "site_stats" not in doc["configs"][0]
        timing_doc = json.loads((out / "timings.json").read_text())
        assert "host" in timing_doc
        site_predict = timing_doc["per_site"]["ligp-qnorm(m=4,n=25)"]["predict"]
        assert site_predict["count"] == 2 * 8
        assert 0 < site_predict["median"] <= site_predict["max"]
        assert len(list(out.glob("*.csv"))) == 2
        print(f"✅ RMSE: {report.rmse}")

    def test_report_is_reproducible(self, tmp_path):
        """Same seed, same report.json bytes."""
        from ligp.bench import run_experiment, write_report

        spec = self._spec(replicates=1)
        first = write_report(run_experiment(spec), tmp_path / "a") / "report.json"
        second = write_report(run_experiment(spec), tmp_path / "b") / "report.json"
        assert first.read_text() == second.read_text()

    def test_csv_problem_uses_folds(self, tmp_path):
        from ligp.bench import herbie_design, herbies_tooth, run_experiment, write_csv

        X = herbie_design(200, seed=1)
        path = write_csv(tmp_path / "herbie.csv", X, herbies_tooth(X))
        spec = self._spec(problem="csv", csv_path=str(path), replicates=3, folds=5, N=200)
        report = run_experiment(spec)

        assert report.settings["folds"] == 5
        assert all(len(c.rmse_values) == 3 for c in report.configs)


class TestStudies:
    """Test the slice and global path studies on small sizes."""

    def test_slice_table(self):
        from ligp.bench import run_slice_study
        from ligp.predictor import PredictConfig

        study = run_slice_study([PredictConfig(m=4, n=25)], N=400, count=9, seed=1)
        assert len(study.table) == 9
        expected = {"x1", "x2", "truth", "mean", "variance", "abs_error", "method"}
        assert set(study.table.columns) >= expected
        assert np.all(study.table["x2"] == 0.6)

    def test_global_path(self):
        from ligp.bench import global_alc_path

        path = global_alc_path(N=40, M0=3, M_max=8, N_prime=30, seed=2, grid_size=7)
        assert path.table["M"].tolist() == list(range(3, 3 + len(path.table)))
        assert path.full_gp_rmse >= 0
        assert path.theta > 0
