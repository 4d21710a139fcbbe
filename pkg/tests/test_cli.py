import pytest

from rcr.cli import main


def run(*argv):
    return main(list(argv))


class TestRunCommand:
    def test_success(self, tiny_config, tmp_path, capsys):
        code = run("run", "--config", str(tiny_config(costs=[1.0], repetitions=1)), "--out", str(tmp_path / "o"))
        assert code == 0
        assert "c=1" in capsys.readouterr().out
        assert (tmp_path / "o" / "results.csv").is_file()

    def test_figures(self, tiny_config, tmp_path):
        cfg = tiny_config(costs=[1.0, 2.0], repetitions=1, figures=True)
        assert run("run", "--config", str(cfg), "--out", str(tmp_path / "o")) == 0
        assert (tmp_path / "o" / "cost_curves.png").stat().st_size > 0

    def test_no_figures_flag(self, tiny_config, tmp_path):
        cfg = tiny_config(costs=[1.0], repetitions=1, figures=True)
        assert run("run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-figures") == 0
        assert not (tmp_path / "o" / "cost_curves.png").exists()

    def test_cell_failure_exits_one(self, tiny_config, tmp_path, capsys):
        cfg = tiny_config(costs=[{"column": "nope"}], repetitions=1)
        assert run("run", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1
        assert "cell failed" in capsys.readouterr().err

    def test_config_error_exits_two(self, tiny_config, capsys):
        assert run("run", "--config", str(tiny_config(repetitions=0))) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert run("run", "--config", str(tmp_path / "none.json")) == 2

    def test_missing_data_file(self, tiny_config, tmp_path):
        cfg = tiny_config(dataset={"name": "x", "csv": "absent.csv", "target": "y"})
        assert run("run", "--config", str(cfg), "--out", str(tmp_path / "o")) == 2

    def test_nothing_to_verify(self, tiny_config, capsys):
        cfg = tiny_config(verify={"minimizer_samples": 0, "regret_samples": 0})
        assert run("run", "--config", str(cfg), "--mode", "verify-theory") == 2
        assert "nothing to verify" in capsys.readouterr().err

    def test_verify_mode(self, tiny_config, tmp_path, capsys):
        cfg = tiny_config(verify={"minimizer_samples": 5, "regret_samples": 0})
        code = run("run", "--config", str(cfg), "--mode", "verify-theory", "--out", str(tmp_path / "v"))
        assert code == 0
        assert capsys.readouterr().out.count("PASS") == 5
        assert (tmp_path / "v" / "verification.csv").is_file()

    def test_seed_override_changes_output(self, tiny_config, tmp_path):
        cfg = str(tiny_config(costs=[1.0], repetitions=1))
        run("run", "--config", cfg, "--out", str(tmp_path / "a"))
        run("run", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "99")
        assert (tmp_path / "a" / "results.csv").read_text() != (tmp_path / "b" / "results.csv").read_text()

    def test_rerun_is_byte_identical(self, tiny_config, tmp_path):
        cfg = str(tiny_config())
        run("run", "--config", cfg, "--out", str(tmp_path / "a"))
        run("run", "--config", cfg, "--out", str(tmp_path / "b"), "--jobs", "2")
        for name in ("results.csv", "results_runs.csv", "results.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestPrepareAbalone:
    def test_encode(self, tmp_path, capsys):
        src = tmp_path / "abalone.data"
        src.write_text("M,0.455,0.365,0.095,0.514,0.2245,0.101,0.15,15\n")
        assert run("prepare-abalone", str(src), str(tmp_path / "a.csv")) == 0
        assert (tmp_path / "a.csv").read_text().startswith("sex_M,sex_F,sex_I,length")

    def test_missing_source(self, tmp_path):
        assert run("prepare-abalone", str(tmp_path / "none"), str(tmp_path / "a.csv")) == 2


def test_requires_command():
    with pytest.raises(SystemExit):
        main([])
