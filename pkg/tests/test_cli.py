import json

import numpy as np
import pytest

from divdrive import cli
from divdrive.cli import ExperimentConfig, Store, cmd_evaluate, cmd_train, load_config, main
from divdrive.learning.qnet import init_params
from divdrive.learning.snapshot import PolicySnapshot, save_snapshot
from divdrive.trajectory import read_log

TINY = ["scenario=\"builtin:straight_lane\"", "eval_count=3", "sessions=2", "k=2", "delta=0.0",
        "trainer.total_steps=400", "trainer.snapshot_interval=200", "trainer.learn_start=100",
        "trainer.batch_size=8", "trainer.hidden=[8,8]", "trainer.publish_every=100",
        "trainer.target_sync=100", "trainer.replay_size=500",
        "bridge.count=3", "bridge.sigma_la=0.0", "bridge.sigma_lo=0.0"]


def sets(out, extra=()):
    args = []
    for s in [*TINY, f"out_dir=\"{out}\"", *extra]:
        args += ["--set", s]
    return args


def test_config_defaults_and_hash():
    cfg = ExperimentConfig()
    assert cfg.eval_count == 50 and cfg.delta == 0.9 and cfg.k == 10
    a = load_config(None, ["out_dir=\"/tmp/a\"", "workers=3"])
    b = load_config(None, ["out_dir=\"/tmp/b\""])
    assert a.hash == b.hash
    assert load_config(None, ["k=3"]).hash != cfg.hash
    with pytest.raises(cli.ConfigError):
        load_config(None, ["delta=1.5"])
    with pytest.raises(cli.ConfigError):
        load_config(None, ["nonexistent=1"])


def test_env_var_overrides_out_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("DIVDRIVE_OUT", str(tmp_path / "envout"))
    assert load_config(None, []).out_dir == str(tmp_path / "envout")


def test_init_config_prints_json(capsys):
    assert main(["init-config"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["eval_count"] == 50 and d["trainer"]["alpha"] == 0.01


@pytest.fixture
def trained(tmp_path):
    out = tmp_path / "exp"
    assert main(["train", *sets(out)]) == 0
    return out


def test_evaluate_counts_and_cache(trained, capsys):
    cfg = load_config(None, sets(trained)[1::2])
    store = Store(cfg)
    table, info = cmd_evaluate(cfg, store)
    assert len(info["scores"]) == 4 and info["new_episodes"] == 4 * 3
    log = read_log(trained / "eval" / "trajectories.log")
    assert len(log.entries) == 4 * 3
    before = (trained / "eval" / "trajectories.log").read_bytes()
    _, again = cmd_evaluate(cfg, store)
    assert again["new_episodes"] == 0
    assert (trained / "eval" / "trajectories.log").read_bytes() == before


def test_train_is_idempotent(trained):
    cfg = load_config(None, sets(trained)[1::2])
    store = Store(cfg)
    first = json.loads(store.manifest.read_text())
    assert len(cmd_train(cfg, store)) == 4
    assert json.loads(store.manifest.read_text()) == first


def test_config_mismatch_exits_2(trained, capsys):
    assert main(["evaluate", *sets(trained, ["k=5"])]) == 2
    assert "config" in capsys.readouterr().err


def test_no_candidates_exits_3(trained, capsys):
    assert main(["select", *sets(trained)]) == 0
    other = trained.parent / "strict"
    assert main(["train", *sets(other, ["delta=1.0"])]) == 0
    code = main(["select", *sets(other, ["delta=1.0"])])
    scores = json.loads((other / "eval" / "scores.json").read_text())["scores"]
    if max(scores.values()) < 1.0:
        assert code == 3 and "histogram" in capsys.readouterr().err
    else:
        assert code == 0


def test_corrupt_snapshot_skipped(trained, tmp_path, capsys):
    bad = tmp_path / "bad.snap"
    bad.write_bytes(b"not a snapshot")
    good = save_snapshot(tmp_path / "good.snap", PolicySnapshot(init_params(np.random.default_rng(0), (201, 4, 9))))
    assert main(["evaluate", *sets(trained), "--snapshots", str(bad), str(good)]) == 0
    out = capsys.readouterr().out
    assert "skipped snapshots: 1" in out and "s00-00000000" in out


def test_pipeline_reports_both_methods(tmp_path, capsys):
    trained = tmp_path / "pipe"
    assert main(["pipeline", *sets(trained, ["repetitions=3"])]) == 0
    rep = json.loads((trained / "pipeline_report.json").read_text())["report"]
    assert set(rep) >= {"PolicySelect", "RandomSelect", "paired"}
    assert len(rep["paired"]["repetitions"]) == 3
    assert (trained / "selection.csv").read_text().startswith("# config_hash=")
    assert (trained / "reference.log").exists()


def test_plot_roundtrip(trained, capsys):
    assert main(["select", *sets(trained)]) == 0
    assert main(["plot", *sets(trained)]) == 0
    svgs = sorted((trained / "plots").glob("*.svg"))
    assert len(svgs) == 3
    csv = svgs[0].with_suffix(".csv").read_text().splitlines()
    log = read_log(trained / "eval" / "trajectories.log")
    scen, pid, step, _, x, y, _ = csv[1].split(",")
    assert float(x) == log.get(scen, pid).trajectory.points[int(step)][0]
    assert float(y) == log.get(scen, pid).trajectory.points[int(step)][1]


def test_plot_empty_selection(trained):
    assert main(["evaluate", *sets(trained)]) == 0
    assert main(["plot", *sets(trained), "--policies"]) == 0


def test_run_command(tmp_path, capsys):
    rec = tmp_path / "ep.log"
    assert main(["run", "--scenario", "builtin:right_turn", "--policy", "random:3", "--record", str(rec),
                 "--seed-override", "11"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.split(",")[1] == "random:3"
    assert len(read_log(rec).entries) == 1
    main(["run", "--scenario", "builtin:right_turn", "--policy", "random:3", "--record", str(tmp_path / "b.log"),
          "--seed-override", "11"])
    assert rec.read_bytes() == (tmp_path / "b.log").read_bytes()
    assert main(["run", "--scenario", "missing.json", "--policy", "random"]) == 2
    assert main(["run", "--scenario", "builtin:right_turn", "--policy", str(tmp_path / "none.snap")]) == 2
