import json

import pytest

from gpanet.cli import cli_main
from gpanet.harness import ExperimentSpec
from gpanet.models import ModelConfig


def run(capsys, *argv):
    code = cli_main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


GEN = ["--model", "base", "--n", "200", "--m", "2", "--xi", "1",
       "--r", "0.6", "--seed", "3"]


class TestParams:
    def test_prints_json(self, capsys):
        code, out, _ = run(capsys, "params", "--n", "100000", "--xi", "1",
                           "--c0", "1", "--c1", "0.5")
        assert code == 0
        d = json.loads(out)
        assert d["r0"] == pytest.approx(0.036407067001059)
        assert d["R0"] == pytest.approx(0.4191518487813695)
        assert d["window_valid"] is False

    def test_domain_error(self, capsys):
        code, out, err = run(capsys, "params", "--n", "2", "--xi", "1",
                             "--c0", "1", "--c1", "0.5")
        assert code == 1
        assert "n must be" in err

    def test_domain_error_json(self, capsys):
        code, out, _ = run(capsys, "params", "--n", "2", "--xi", "1",
                           "--c0", "1", "--c1", "0.5", "--json")
        assert code == 1
        assert "error" in json.loads(out)


class TestGenerate:
    def test_lonely_vertex_loops(self, capsys):
        code, out, _ = run(capsys, "generate", "--model", "base", "--n", "1",
                           "--m", "3", "--xi", "1", "--r", "0.3",
                           "--seed", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "src,dst,kind"
        assert lines[1:] == ["0,0,plain"] * 6

    def test_out_directory(self, capsys, tmp_path):
        code, out, _ = run(capsys, "generate", *GEN, "--out", str(tmp_path),
                           "--checkpoints", "100,200", "--json")
        assert code == 0
        for name in ("edges.csv", "vertices.csv", "trace.csv", "config.json"):
            assert (tmp_path / name).exists()
        cfg = ModelConfig.from_json_dict(
            json.loads((tmp_path / "config.json").read_text()))
        assert cfg.n == 200 and cfg.checkpoint_times == (100, 200)

    def test_env_var_output(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("GPANET_OUT", str(tmp_path))
        code, out, _ = run(capsys, "generate", *GEN)
        assert code == 0
        assert (tmp_path / "edges.csv").exists()

    def test_radius_from_c0(self, capsys, tmp_path):
        argv = ["generate", "--model", "base", "--n", "200", "--m", "2",
                "--xi", "1", "--c0", "1", "--seed", "3", "--out",
                str(tmp_path), "--json"]
        code, out, _ = run(capsys, *argv)
        assert code == 0
        cfg = json.loads((tmp_path / "config.json").read_text())
        import math
        assert cfg["r"] == pytest.approx(math.log(200) / math.sqrt(200))

    def test_needs_some_radius(self, capsys):
        code, _, err = run(capsys, "generate", "--model", "base", "--n", "5",
                           "--m", "2", "--xi", "1", "--seed", "3")
        assert code == 1
        assert "--r or --c0" in err


class TestAnalysisCommands:
    def test_degrees_json(self, capsys):
        code, out, _ = run(capsys, "degrees", *GEN, "--json")
        assert code == 0
        d = json.loads(out)
        assert d["expected_exponent"] == 4.0
        assert d["k_min"] == 2
        assert isinstance(d["exponent"], float)
        assert d["config"]["n"] == 200

    def test_degrees_error_json(self, capsys):
        code, out, _ = run(capsys, "degrees", "--model", "base", "--n", "5",
                           "--m", "2", "--xi", "1", "--r", "0.5",
                           "--seed", "3", "--json")
        assert code == 1
        assert "need at least 100" in json.loads(out)["error"]

    def test_diameter_json(self, capsys):
        code, out, _ = run(capsys, "diameter", "--model", "hybrid", "--n",
                           "300", "--m", "2", "--xi", "1", "--r", "0.5",
                           "--seed", "12", "--mode", "component-wise",
                           "--json")
        assert code == 0
        d = json.loads(out)
        assert isinstance(d["diameter"], int) and d["diameter"] > 0

    def test_communities_json(self, capsys):
        code, out, _ = run(capsys, "communities", *GEN, "--centers", "10",
                           "--R", "0.4", "--json")
        assert code == 0
        d = json.loads(out)
        assert d["n_checked"] == 10
        assert len(d["reports"]) == 10
        assert 0 <= d["n_satisfying"] <= 10

    def test_expander_json(self, capsys):
        code, out, _ = run(capsys, "expander", *GEN, "--centers", "8",
                           "--radii", "0.2,0.5", "--json")
        assert code == 0
        d = json.loads(out)
        assert d["radii"] == [0.2, 0.5]
        assert len(d["conductance"]) == 2
        assert len(d["conductance"][0]) == 8

    def test_concentration_json(self, capsys):
        code, out, _ = run(capsys, "concentration", *GEN, "--probes", "2",
                           "--checkpoints", "100,200", "--json")
        assert code == 0
        d = json.loads(out)
        assert d["times"] == [100, 200]
        assert d["worst_z_dev"] is None or isinstance(d["worst_z_dev"], float)


class TestExperimentCommand:
    def test_runs_spec_file(self, capsys, tmp_path):
        cfg = ModelConfig(model="base", n=150, m=2, xi=1.0, r=0.6, seed=0)
        spec = ExperimentSpec(cfg, (1, 2), ("degrees", "diameter"),
                              str(tmp_path / "ignored"))
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec.to_json_dict()))
        out_dir = tmp_path / "run"
        code, out, _ = run(capsys, "experiment", "--spec", str(spec_path),
                           "--out", str(out_dir), "--json")
        assert code == 0
        index = json.loads(out)
        assert index["errors"] == []
        assert (out_dir / "index.json").exists()
        assert (out_dir / "degrees_summary.json").exists()

    def test_missing_spec_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "experiment", "--spec",
                           str(tmp_path / "nope.json"))
        assert code == 1


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert cli_main(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        assert cli_main(["degrees", "--model", "base"]) == 2

    def test_bad_model_choice(self, capsys):
        argv = ["generate", "--model", "tripartite", "--n", "5", "--m", "2",
                "--xi", "1", "--r", "0.5", "--seed", "3"]
        assert cli_main(argv) == 2
