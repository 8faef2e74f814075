import json

import pytest

from waypoint_extraction.cli import (
    EXIT_CHECK_FAILED,
    EXIT_DOMAIN,
    EXIT_IO,
    EXIT_OK,
    EXIT_SCHEMA,
    EXIT_VALIDATION,
    main,
)
from waypoint_extraction.defaults import TASK_ETA_DEFAULTS
from waypoint_extraction.synthetic import make_random_walk_trajectory, make_segmented_ee_trajectory
from waypoint_extraction.trajfile import save_trajectory


@pytest.fixture
def demo_file(tmp_path, rng):
    path = tmp_path / "demo.json"
    save_trajectory(path, make_segmented_ee_trajectory(rng, n_segments=4, name="demo"))
    return path


@pytest.fixture
def tiny_file(tmp_path, rng):
    path = tmp_path / "tiny.json"
    save_trajectory(path, make_random_walk_trajectory(rng, 10, name="tiny"))
    return path


def test_extract_writes_waypoints(tmp_path, demo_file, capsys):
    out = tmp_path / "wp.json"
    code = main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(out), "--no-timestamp"])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == "awe-wp-v1"
    assert doc["eta"] == 0.01
    assert doc["indices"][0] == 0
    assert "waypoints=" in capsys.readouterr().out


def test_extract_task_resolves_defaults(tmp_path, demo_file):
    for task, eta in TASK_ETA_DEFAULTS.items():
        out = tmp_path / f"wp-{task}.json"
        code = main(["extract", "--input", str(demo_file), "--task", task, "--output", str(out), "--no-timestamp"])
        assert code == EXIT_OK
        assert json.loads(out.read_text())["eta"] == eta


def test_extract_conflicting_eta_and_task(tmp_path, demo_file):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--input", str(demo_file), "--eta", "0.1", "--task", "lift", "--output", str(tmp_path / "x.json")])
    assert exc.value.code == 2


def test_extract_requires_eta_or_task(tmp_path, demo_file):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--input", str(demo_file), "--output", str(tmp_path / "x.json")])
    assert exc.value.code == 2


def test_unknown_flag_exits_2(demo_file):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--input", str(demo_file), "--frobnicate"])
    assert exc.value.code == 2


def test_missing_file_exit_code(tmp_path, capsys):
    code = main(["extract", "--input", str(tmp_path / "nope.json"), "--eta", "0.1", "--output", str(tmp_path / "o.json")])
    assert code == EXIT_IO
    assert "error" in capsys.readouterr().err


def test_schema_and_validation_exit_codes(tmp_path):
    bad_schema = tmp_path / "s.json"
    bad_schema.write_text(json.dumps({"schema_version": "other"}))
    assert main(["extract", "--input", str(bad_schema), "--eta", "0.1", "--output", str(tmp_path / "o.json")]) == EXIT_SCHEMA
    bad_valid = tmp_path / "v.json"
    bad_valid.write_text(
        json.dumps(
            {
                "schema_version": "awe-traj-v1",
                "name": "x",
                "state_space": "ee",
                "frequency_hz": 50.0,
                "frames": [
                    {"t": 0, "pos": [0, 0, 0], "axis_angle": [0, 0, 0], "gripper": 0},
                    {"t": 0, "pos": [1, 0, 0], "axis_angle": [0, 0, 0], "gripper": 0},
                ],
            }
        )
    )
    assert main(["extract", "--input", str(bad_valid), "--eta", "0.1", "--output", str(tmp_path / "o.json")]) == EXIT_VALIDATION


def test_extract_deterministic_without_timestamp(tmp_path, demo_file):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(out1), "--no-timestamp"]) == EXIT_OK
    assert main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(out2), "--no-timestamp"]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()


def test_extract_metric_config(tmp_path, demo_file):
    mpath = tmp_path / "metric.json"
    mpath.write_text(json.dumps({"position_weight": 1.0, "orientation_weight": 0.0}))
    out = tmp_path / "wp.json"
    code = main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(out), "--metric-config", str(mpath), "--no-timestamp"])
    assert code == EXIT_OK
    assert json.loads(out.read_text())["provenance"]["metric"]["orientation_weight"] == 0.0


def test_relabel_directory(tmp_path, rng, capsys):
    in_dir = tmp_path / "demos"
    in_dir.mkdir()
    lengths = {}
    for i in range(3):
        traj = make_random_walk_trajectory(rng, int(rng.integers(6, 14)), name=f"d{i}")
        save_trajectory(in_dir / f"d{i}.json", traj)
        lengths[f"d{i}"] = len(traj)
    out_dir = tmp_path / "out"
    code = main(["relabel", "--input", str(in_dir), "--eta", "0.5", "--output", str(out_dir), "--no-timestamp"])
    assert code == EXIT_OK
    for i in range(3):
        lines = (out_dir / f"d{i}.relabeled.jsonl").read_text().splitlines()
        assert len(lines) == lengths[f"d{i}"] - 1
    assert "3/3" in capsys.readouterr().out


def test_stats_prints_and_warns(tmp_path, demo_file, capsys):
    code = main(["stats", "--input", str(demo_file), "--eta", "100.0"])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    assert "wall_time=" in captured.out
    assert "per-segment losses" in captured.out
    assert "WARNING" in captured.err  # huge budget puts the ratio below 1:15
    code = main(["stats", "--input", str(demo_file), "--eta", "100.0", "--strict-ratio"])
    assert code == EXIT_CHECK_FAILED


def test_compare_table(demo_file, capsys):
    code = main(["compare", "--input", str(demo_file), "--eta", "0.01", "--methods", "awe,zero-vel,fixed"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "awe" in out and "zero-vel" in out and "fixed" in out
    assert "awe <= zero-vel" in out


def test_compare_rejects_unknown_method(demo_file):
    with pytest.raises(SystemExit) as exc:
        main(["compare", "--input", str(demo_file), "--eta", "0.01", "--methods", "awe,magic"])
    assert exc.value.code == 2


def test_replay_check(tmp_path, demo_file, capsys):
    wp = tmp_path / "wp.json"
    assert main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(wp), "--no-timestamp"]) == EXIT_OK
    code = main(["replay-check", "--input", str(demo_file), "--waypoints", str(wp), "--control-multiplier", "10"])
    assert code == EXIT_OK
    assert "reached_final=True" in capsys.readouterr().out


def test_replay_check_failure_is_nonzero(tmp_path, demo_file, capsys):
    wp = tmp_path / "wp.json"
    main(["extract", "--input", str(demo_file), "--eta", "0.01", "--output", str(wp), "--no-timestamp"])
    code = main(["replay-check", "--input", str(demo_file), "--waypoints", str(wp), "--max-step", "1e-7"])
    assert code == EXIT_CHECK_FAILED


def test_sweep_with_plot(tmp_path, demo_file, capsys):
    plot = tmp_path / "plot.csv"
    code = main(["sweep", "--input", str(demo_file), "--etas", "0.05,0.01,0.005", "--plot-out", str(plot)])
    assert code == EXIT_OK
    assert plot.read_text().splitlines()[0] == "eta,kind,t,x,y,z"
    assert capsys.readouterr().out.count("eta=") == 3


def test_oracle_match(tiny_file, capsys):
    code = main(["oracle", "--input", str(tiny_file), "--eta", "0.3"])
    assert code == EXIT_OK
    assert "MATCH" in capsys.readouterr().out


def test_oracle_refuses_long_input(tmp_path, rng, capsys):
    path = tmp_path / "long.json"
    save_trajectory(path, make_random_walk_trajectory(rng, 30, name="long"))
    code = main(["oracle", "--input", str(path), "--eta", "0.3"])
    assert code == EXIT_DOMAIN
    assert "T <= 20" in capsys.readouterr().err
