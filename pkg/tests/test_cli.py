import hashlib

import pytest

from waitr.cli import main

SEED7_ENV_SHA256 = "81728c8135e0976ae1422ec3059bc2f19fff4db8737dd3c7bcea7801346b97cf"

SEED7_WAITR_METRICS = """planner,seed,frame,newly_covered,cumulative_covered,hazard_exposure_steps
waitr,0,0,0,0,0
waitr,0,1,34,34,0
waitr,0,2,26,60,0
waitr,0,3,22,82,1
waitr,0,4,20,102,1
waitr,0,5,11,113,0
waitr,0,6,19,132,0
"""


@pytest.fixture(scope="module")
def seed7_env(tmp_path_factory):
    path = tmp_path_factory.mktemp("env") / "seed7.grid"
    assert main(["synth", "--seed", "7", "--width", "20", "--height", "20",
                 "--frames", "7", "--out", str(path)]) == 0
    return path


class TestSynth:
    def test_deterministic_golden_digest(self, seed7_env, tmp_path):
        digest = hashlib.sha256(seed7_env.read_bytes()).hexdigest()
        assert digest == SEED7_ENV_SHA256
        again = tmp_path / "again.grid"
        assert main(["synth", "--seed", "7", "--width", "20", "--height", "20",
                     "--frames", "7", "--out", str(again)]) == 0
        assert again.read_bytes() == seed7_env.read_bytes()

    def test_zero_sources_yield_no_events(self, tmp_path):
        env = tmp_path / "flat.grid"
        assert main(["synth", "--seed", "1", "--width", "8", "--height", "8", "--frames", "3",
                     "--blobs", "0", "--swirls", "0", "--patches", "0",
                     "--out", str(env)]) == 0
        out = tmp_path / "x"
        assert main(["extract", "--env", str(env), "--out-dir", str(out)]) == 0
        assert (out / "events.csv").read_text() == "frame,row,col,magnitude,count\n"


class TestRun:
    def test_missing_env_exits_2_and_names_path(self, tmp_path, capsys):
        rc = main(["run", "--env", str(tmp_path / "nope.grid"), "--out-dir", str(tmp_path)])
        assert rc == 2
        assert "nope.grid" in capsys.readouterr().err

    def test_metrics_rows_equal_frames(self, seed7_env, tmp_path):
        out = tmp_path / "run"
        assert main(["run", "--env", str(seed7_env), "--planner", "greedy",
                     "--out-dir", str(out)]) == 0
        lines = (out / "metrics.csv").read_text().splitlines()
        assert len(lines) == 1 + 7
        assert len(list(out.glob("frame_*.geojson"))) == 7

    def test_golden_metrics_pin(self, seed7_env, tmp_path):
        out = tmp_path / "golden"
        assert main(["run", "--env", str(seed7_env), "--planner", "waitr",
                     "--out-dir", str(out)]) == 0
        assert (out / "metrics.csv").read_text() == SEED7_WAITR_METRICS

    def test_config_file_and_overrides(self, seed7_env, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("agents: 2\ngamma: 0.8\n")
        out = tmp_path / "cfgrun"
        assert main(["run", "--env", str(seed7_env), "--config", str(cfg),
                     "--set", "agents=1", "--out-dir", str(out)]) == 0

    def test_invalid_config_key_fails(self, seed7_env, tmp_path, capsys):
        rc = main(["run", "--env", str(seed7_env), "--set", "bogus=1",
                   "--out-dir", str(tmp_path)])
        assert rc == 1
        assert "bogus" in capsys.readouterr().err


class TestCompare:
    def test_single_seed_summary_rows(self, seed7_env, tmp_path):
        out = tmp_path / "cmp"
        assert main(["compare", "--env", str(seed7_env), "--seeds", "7",
                     "--out-dir", str(out)]) == 0
        summary = (out / "summary.csv").read_text().splitlines()
        assert len(summary) == 3  # header + one row per planner
        assert summary[1].startswith("waitr,")
        assert summary[2].startswith("greedy,")
        table = (out / "table2.csv").read_text().splitlines()
        assert table[0] == "timestep,waitr,greedy"
        assert table[-1].startswith("pct,")


class TestOtherCommands:
    def test_cluster_csv(self, seed7_env, tmp_path):
        out = tmp_path / "clusters.csv"
        assert main(["cluster", "--env", str(seed7_env), "--out", str(out)]) == 0
        assert out.read_text().startswith("rank,centroid_row,centroid_col,score,covered_count")

    def test_plan_csv(self, seed7_env, tmp_path):
        out = tmp_path / "plans.csv"
        assert main(["plan", "--env", str(seed7_env), "--frame", "1", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "agent,frame,node,row,col,claimed_reward"
        assert len(lines) == 1 + 3 * 7  # agents x (horizon + 1)

    def test_graph_outputs(self, seed7_env, tmp_path):
        out = tmp_path / "graph"
        assert main(["graph", "--env", str(seed7_env), "--out-dir", str(out)]) == 0
        assert (out / "nodes.csv").exists() and (out / "edges.csv").exists()

    def test_render_svg_frames(self, seed7_env, tmp_path):
        out = tmp_path / "render"
        assert main(["render", "--env", str(seed7_env), "--out-dir", str(out)]) == 0
        frames = sorted(out.glob("frame_*.svg"))
        assert len(frames) == 7
        body = frames[0].read_text()
        assert "<svg" in body and "polygon" in body and "stroke-dasharray" in body


class TestParser:
    def test_help_exits_zero(self, capsys):
        for argv in (["--help"], ["run", "--help"], ["synth", "--help"]):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 0
            capsys.readouterr()

    def test_unknown_flag_exits_nonzero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--bogus"])
        assert exc.value.code != 0
        capsys.readouterr()
