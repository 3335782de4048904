"""Integration tests for the ligp command line."""

import json
import logging

import numpy as np
import pytest


@pytest.fixture
def herbie_csvs(tmp_path):
    """Training and test CSVs drawn from Herbie's tooth."""
    from ligp.bench import herbie_design, herbies_tooth, write_csv

    X = herbie_design(300, seed=3)
    Xt = np.array([[0.3, 0.6], [-1.1, 0.2], [1.5, -0.4], [0.0, 0.0], [-0.7, -1.3]])
    train = write_csv(tmp_path / "train.csv", X, herbies_tooth(X))
    test = write_csv(tmp_path / "test.csv", Xt, herbies_tooth(Xt))
    return train, test


def _write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


class TestValidateCommand:
    """Test `ligp validate`."""

    def test_quick_suite_passes(self, capsys):
        from ligp.cli import EXIT_OK, main

        code = main(["validate", "--quick", "--suite", "woodbury"])
        out = capsys.readouterr().out

        assert code == EXIT_OK
        assert "woodbury" in out and "PASS" in out
        print(f"✅ {out.strip()}")

    def test_unknown_suite_is_a_usage_error(self):
        from ligp.cli import main

        with pytest.raises(SystemExit):
            main(["validate", "--suite", "nope"])


class TestBenchCommand:
    """Test `ligp bench` exit codes and error reporting."""

    def test_malformed_json(self, tmp_path, caplog):
        """Syntax errors are reported with file and line."""
        from ligp.cli import EXIT_ERROR, main

        path = tmp_path / "broken.json"
        path.write_text('{\n  "problem": "herbie",\n  "N": 200,,\n}\n')
        with caplog.at_level(logging.ERROR):
            code = main(["bench", str(path), "--out", str(tmp_path / "out")])

        assert code == EXIT_ERROR
        assert f"{path}:3:" in caplog.text

    def test_unknown_key(self, tmp_path, caplog):
        from ligp.cli import EXIT_ERROR, main

        path = _write_json(tmp_path / "extra.json", {"problem": "herbie", "budget": 3})
        with caplog.at_level(logging.ERROR):
            code = main(["bench", str(path), "--out", str(tmp_path / "out")])

        assert code == EXIT_ERROR
        assert "unknown key 'budget'" in caplog.text

    def test_unknown_problem(self, tmp_path, caplog):
        from ligp.cli import EXIT_ERROR, main

        doc = {"problem": "sarcos", "configs": [{"m": 4, "n": 25}]}
        path = _write_json(tmp_path / "sarcos.json", doc)
        with caplog.at_level(logging.ERROR):
            code = main(["bench", str(path), "--out", str(tmp_path / "out")])

        assert code == EXIT_ERROR
        assert "unknown problem" in caplog.text

    def test_invalid_config_is_partial(self, tmp_path, capsys):
        """One rejected config does not stop the others; exit code flags it."""
        from ligp.cli import EXIT_PARTIAL, main

        doc = {
            "problem": "herbie",
            "N": 200,
            "N_prime": 5,
            "replicates": 1,
            "prescale": False,
            "configs": [{"m": 4, "n": 25}, {"m": 30, "n": 10, "label": "too-many-inducing"}],
        }
        path = _write_json(tmp_path / "herbie.json", doc)
        out_dir = tmp_path / "out"
        code = main(["bench", str(path), "--out", str(out_dir), "--workers", "1"])
        out = capsys.readouterr().out

        assert code == EXIT_PARTIAL
        assert "too-many-inducing" in out and "FAILED" in out
        report = json.loads((out_dir / "report.json").read_text())
        assert "ligp-qnorm(m=4,n=25)" in report["rmse"]
        assert (out_dir / "timings.json").exists()


class TestPredictCommand:
    """Test `ligp predict` output files."""

    def test_writes_one_row_per_site(self, tmp_path, herbie_csvs, caplog):
        import pandas as pd

        from ligp.cli import EXIT_OK, main

        train, test = herbie_csvs
        out = tmp_path / "pred.csv"
        with caplog.at_level(logging.INFO):
            code = main(
                [
                    "predict",
                    str(train),
                    str(test),
                    "--m",
                    "5",
                    "--n",
                    "30",
                    "--workers",
                    "1",
                    "--out",
                    str(out),
                ]
            )
        frame = pd.read_csv(out)

        assert code == EXIT_OK
        assert len(frame) == 5
        assert list(frame.columns[:4]) == ["x1", "x2", "mean", "variance"]
        assert not any(c.startswith("t_") for c in frame.columns)
        timings = pd.read_csv(tmp_path / "pred.timings.csv")
        assert len(timings) == 5 and "t_predict" in timings.columns
        assert "Phase timings" in caplog.text
        print(f"✅ Predicted means: {frame['mean'].round(4).tolist()}")

    def test_reruns_are_byte_identical(self, tmp_path, herbie_csvs):
        from ligp.cli import main

        train, test = herbie_csvs
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            args = ["--m", "5", "--n", "30", "--seed", "9", "--out", str(out)]
            main(["predict", str(train), str(test), *args])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_inline_timings(self, tmp_path, herbie_csvs):
        import pandas as pd

        from ligp.cli import main

        train, test = herbie_csvs
        out = tmp_path / "inline.csv"
        main(["predict", str(train), str(test), "--m", "4", "--n", "25", "--workers", "1",
              "--timings", "inline", "--out", str(out)])

        assert "t_predict" in pd.read_csv(out).columns
        assert not (tmp_path / "inline.timings.csv").exists()

    def test_column_mismatch(self, tmp_path, herbie_csvs, caplog):
        from ligp.bench import write_csv
        from ligp.cli import EXIT_ERROR, main

        train, _ = herbie_csvs
        wide = write_csv(tmp_path / "wide.csv", np.zeros((3, 4)))
        with caplog.at_level(logging.ERROR):
            code = main(["predict", str(train), str(wide), "--out", str(tmp_path / "p.csv")])

        assert code == EXIT_ERROR
        assert "columns" in caplog.text

    def test_neighborhood_larger_than_training_set(self, tmp_path, herbie_csvs):
        from ligp.cli import EXIT_ERROR, main

        train, test = herbie_csvs
        args = ["--n", "5000", "--out", str(tmp_path / "p.csv")]
        code = main(["predict", str(train), str(test), *args])
        assert code == EXIT_ERROR


class TestTemplateCommand:
    """Test `ligp template`."""

    @pytest.mark.parametrize("kind", ["qnorm", "wimse"])
    def test_template_round_trip(self, tmp_path, herbie_csvs, capsys, kind):
        from ligp.cli import EXIT_OK, main
        from ligp.local_design import load_template

        train, _ = herbie_csvs
        out = tmp_path / f"{kind}.txt"
        args = ["--m", "4", "--n", "30", "--kind", kind, "--out", str(out)]
        code = main(["template", str(train), *args])
        printed = capsys.readouterr().out
        template = load_template(out)

        assert code == EXIT_OK
        assert "theta0" in printed
        assert template.offsets.shape[1] == 2
        assert 1 < template.offsets.shape[0] <= 4
        assert template.kind == kind
        assert np.all(template.offsets[0] == 0.0)

    def test_bad_sizes(self, tmp_path, herbie_csvs):
        from ligp.cli import EXIT_ERROR, main

        train, _ = herbie_csvs
        args = ["--m", "50", "--n", "20", "--out", str(tmp_path / "t.txt")]
        assert main(["template", str(train), *args]) == EXIT_ERROR

    @pytest.mark.parametrize("kind", ["qnorm", "wimse"])
    def test_saved_template_drives_predict(self, tmp_path, herbie_csvs, kind):
        """A template written by `ligp template` is displaced to every site by `ligp predict`."""
        import pandas as pd

        from ligp.cli import EXIT_OK, main

        train, test = herbie_csvs
        template = tmp_path / "t.txt"
        args = ["--m", "4", "--n", "30", "--kind", kind, "--out", str(template)]
        assert main(["template", str(train), *args]) == EXIT_OK

        out = tmp_path / "pred.csv"
        args = ["--template", str(template), "--n", "30", "--workers", "1", "--out", str(out)]
        code = main(["predict", str(train), str(test), *args])
        frame = pd.read_csv(out)

        assert code == EXIT_OK
        assert len(frame) == 5
        assert np.all(np.isfinite(frame["mean"]))
        assert (frame["error"].fillna("") == "").all()
        print(f"✅ {kind} template reused: {frame['mean'].round(4).tolist()}")

    def test_prescaled_template_round_trip(self, tmp_path, herbie_csvs):
        """Scale lengths travel with the template and predict reuses them."""
        from ligp.cli import EXIT_OK, main
        from ligp.local_design import load_template

        train, test = herbie_csvs
        template = tmp_path / "scaled.txt"
        args = ["--m", "4", "--n", "30", "--kind", "qnorm", "--prescale", "--out", str(template)]
        code = main(["template", str(train), *args])
        loaded = load_template(template)

        assert code == EXIT_OK
        assert loaded.scale_lengths.shape == (2,)
        assert np.all(loaded.scale_lengths > 0)
        args = ["--template", str(template), "--prescale", "--n", "30", "--workers", "1"]
        code = main(["predict", str(train), str(test), *args, "--out", str(tmp_path / "pred.csv")])
        assert code == EXIT_OK

    def test_template_mismatches_are_rejected(self, tmp_path, herbie_csvs, caplog):
        """Wrong dimension, a conflicting method and unscaled-with-prescale all exit 1."""
        from ligp.cli import EXIT_ERROR, EXIT_OK, main
        from ligp.local_design import Template, save_template

        train, test = herbie_csvs
        offsets = np.vstack([np.zeros(3), np.ones(3)])
        wide = save_template(
            Template(offsets=offsets, theta0=0.1, build_center=np.zeros(3)), tmp_path / "wide.txt"
        )
        plain = tmp_path / "plain.txt"
        args = ["--m", "4", "--n", "30", "--kind", "chr", "--out", str(plain)]
        assert main(["template", str(train), *args]) == EXIT_OK
        predict = ["predict", str(train), str(test), "--out", str(tmp_path / "p.csv")]

        with caplog.at_level(logging.ERROR):
            assert main([*predict, "--template", str(wide)]) == EXIT_ERROR
            assert "d=3" in caplog.text
            conflicting = ["--template", str(plain), "--method", "ligp-qnorm"]
            assert main([*predict, *conflicting]) == EXIT_ERROR
            assert main([*predict, "--template", str(plain), "--prescale"]) == EXIT_ERROR
        assert "--prescale" in caplog.text
