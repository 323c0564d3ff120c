"""Command-line harness: train, evaluate, metrics, select, refgen, pipeline, plot, run.

All artifacts of one experiment live in a single output directory and carry
the hash of the experiment configuration that produced them; artifacts with a
different hash are refused.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .learning.snapshot import SnapshotError, load_snapshot, save_snapshot, snapshot_hash
from .learning.trainer import TrainerConfig, train_sessions
from .metrics import (EmptySuccessSet, EvaluationTable, NoSharedScenario, build_distance_matrix,
                      inter_policy_diversity, overall_diversity, success_rate_mean,
                      write_metrics_report)
from .refgen import (BridgeParams, InfeasibleReference, PControlParams, generate_reference_set,
                     read_reference_set, write_reference_set)
from .selection import (Candidate, CandidatePool, NoCandidates, filter_by_score, select_diverse,
                        select_random, selection_report, format_selection_report)
from .sim.world import ConfigError, Scenario, builtin_scenario, load_scenario, run_episode
from .trajectory import LogEntry, Trajectory, TrajectoryLog, format_log, read_log, write_log

log = logging.getLogger("divdrive")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    scenario: str = "builtin:right_turn"
    eval_count: int = 50
    eval_seed: int = 1000
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    sessions: int = 4
    dde: bool = False
    bridge: BridgeParams = field(default_factory=lambda: BridgeParams(sigma_la=0.3, v_lo=2.0))
    pcontrol: PControlParams = field(default_factory=PControlParams)
    k: int = 10
    delta: float = 0.9
    selection_seed: int = 0
    repetitions: int = 1
    out_dir: str = "runs/default"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.trainer, dict):
            self.trainer = TrainerConfig.from_dict(self.trainer)
        if isinstance(self.bridge, dict):
            self.bridge = BridgeParams(**self.bridge)
        if isinstance(self.pcontrol, dict):
            self.pcontrol = PControlParams(**self.pcontrol)
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigError("delta must lie in [0, 1]")
        if self.eval_count < 1 or self.sessions < 1 or self.repetitions < 1:
            raise ConfigError("eval_count, sessions and repetitions must be positive")
        if self.dde and self.sessions < 2:
            raise ConfigError("the peer bonus needs at least two sessions")
        self.trainer = dataclasses.replace(self.trainer, seed=self.seed)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["trainer"] = self.trainer.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def hash(self) -> str:
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("workers")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:12]

    def load_scenario(self) -> Scenario:
        try:
            if self.scenario.startswith("builtin:"):
                return builtin_scenario(self.scenario.split(":", 1)[1])
            return load_scenario(self.scenario)
        except FileNotFoundError as exc:
            raise ConfigError(f"scenario file not found: {self.scenario}") from exc

    def suite(self) -> list[Scenario]:
        return self.load_scenario().suite(self.eval_count, self.eval_seed)


def load_config(path: Optional[str], overrides: Sequence[str] = ()) -> ExperimentConfig:
    d: dict = {}
    if path:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            d = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        scen = d.get("scenario")
        if scen and not scen.startswith("builtin:") and not Path(scen).is_absolute():
            d["scenario"] = str((p.parent / scen).resolve())
    for item in overrides:
        key, _, raw = item.partition("=")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = d
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = val
    if os.environ.get("DIVDRIVE_OUT"):
        d["out_dir"] = os.environ["DIVDRIVE_OUT"]
    return ExperimentConfig.from_dict(d)


# ---------------------------------------------------------------------------
# artifact store
# ---------------------------------------------------------------------------


class Store:
    """Single-writer view of one experiment directory."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.root = Path(cfg.out_dir)
        self.hash = cfg.hash
        self.root.mkdir(parents=True, exist_ok=True)
        cfg_path = self.root / "config.json"
        if cfg_path.exists():
            other = json.loads(cfg_path.read_text()).get("config_hash")
            if other != self.hash:
                raise ConfigError(f"{self.root} holds artifacts of config {other}, not {self.hash}")
        else:
            self.write_json(cfg_path, {"config": cfg.to_dict()})

    def write_json(self, path: Path, payload: dict) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps({"config_hash": self.hash, **payload}, indent=2, sort_keys=True) + "\n")
        tmp.replace(path)

    def read_json(self, path: Path) -> dict:
        d = json.loads(path.read_text())
        if d.get("config_hash") != self.hash:
            raise ConfigError(f"{path} was produced by config {d.get('config_hash')}, not {self.hash}")
        return d

    def check_header(self, path: Path, header: dict) -> None:
        if header.get("config_hash") != self.hash:
            raise ConfigError(f"{path} was produced by config {header.get('config_hash')}, not {self.hash}")

    @property
    def manifest(self) -> Path:
        return self.root / "snapshots" / "manifest.json"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_train(cfg: ExperimentConfig, store: Store) -> list[dict]:
    if store.manifest.exists():
        entries = store.read_json(store.manifest)["snapshots"]
        log.info("training skipped: %d snapshots already recorded", len(entries))
        return entries
    scenario = cfg.load_scenario()

    def progress(done):
        log.info("trained %d / %d steps per session", done, cfg.trainer.total_steps)

    res = train_sessions(cfg.trainer, scenario, cfg.sessions, cfg.dde, progress=progress)
    for sid, msg in res.aborted.items():
        log.error("session %d aborted: %s", sid, msg)
    entries = []
    for snap in res.snapshots:
        path = store.root / "snapshots" / f"{snap.policy_id}.snap"
        save_snapshot(path, snap)
        entries.append({"policy_id": snap.policy_id, "file": path.name, "hash": snapshot_hash(snap),
                        "session_id": snap.session_id, "step": snap.step})
    store.write_json(store.manifest, {"snapshots": entries, "aborted": res.aborted,
                                      "steps": {str(k): v for k, v in res.steps.items()}})
    return entries


def _eval_cell(args):
    snap_path, scenario, pid = args
    snap = load_snapshot(snap_path)
    res = run_episode(scenario, snap, record=False)
    return pid, scenario.key, res.outcome, res.steps, res.trajectory


def cmd_evaluate(cfg: ExperimentConfig, store: Store,
                 snapshot_paths: Optional[Sequence[str]] = None) -> tuple[EvaluationTable, dict]:
    """Evaluate every snapshot on the fixed suite; cells already on disk are reused."""
    if snapshot_paths:
        files = [Path(p) for p in snapshot_paths]
    else:
        if not store.manifest.exists():
            raise ConfigError("no snapshots: run `train` first or pass --snapshots")
        files = [store.manifest.parent / e["file"] for e in store.read_json(store.manifest)["snapshots"]]
    suite = cfg.suite()
    table = EvaluationTable()
    skipped = []
    todo = []
    loaded = []
    for f in files:
        try:
            snap = load_snapshot(f)
        except (OSError, SnapshotError) as exc:
            skipped.append({"file": str(f), "error": str(exc)})
            log.warning("skipping snapshot %s: %s", f, exc)
            continue
        h = snapshot_hash(snap)
        loaded.append((snap.policy_id, h))
        for sc in suite:
            cell = store.root / "eval" / "cache" / h / f"{sc.key}.log"
            if not cell.exists():
                todo.append((str(f), sc, snap.policy_id, cell))
    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_eval_cell, [t[:3] for t in todo], chunksize=8))
    else:
        results = [_eval_cell(t[:3]) for t in todo]
    for (_, _, _, cell), (pid, key, outcome, steps, traj) in zip(todo, results):
        cell.parent.mkdir(parents=True, exist_ok=True)
        write_log(cell, TrajectoryLog([LogEntry(key, pid, traj, outcome, steps)],
                                      {"config_hash": store.hash}))
    entries = []
    for pid, h in loaded:
        for sc in suite:
            cell = store.root / "eval" / "cache" / h / f"{sc.key}.log"
            clog = read_log(cell)
            store.check_header(cell, clog.header)
            e = clog.entries[0]
            table.add(sc.key, pid, e.outcome, e.trajectory)
            entries.append(e)
    table.policies = [pid for pid, _ in loaded]
    scores = {pid: table.driving_score(pid) for pid, _ in loaded}
    (store.root / "eval").mkdir(parents=True, exist_ok=True)
    write_log(store.root / "eval" / "trajectories.log", TrajectoryLog(entries, {"config_hash": store.hash}))
    store.write_json(store.root / "eval" / "scores.json",
                     {"scores": scores, "hashes": dict(loaded), "skipped": skipped,
                      "new_episodes": len(todo)})
    log.info("evaluation: %d new episodes, %d cached", len(todo), len(loaded) * len(suite) - len(todo))
    return table, {"scores": scores, "skipped": skipped, "new_episodes": len(todo)}


def cmd_refgen(cfg: ExperimentConfig, store: Store) -> list[Trajectory]:
    path = store.root / "reference.log"
    if path.exists():
        refs, header = read_reference_set(path)
        store.check_header(path, header)
        return refs
    scenario = cfg.load_scenario().with_seed(cfg.seed)
    rs = generate_reference_set(scenario, bp=cfg.bridge, pp=cfg.pcontrol)
    if rs.flagged:
        log.warning("%d perturbed targets exceeded the local curvature radius", rs.flagged)
    write_reference_set(path, rs, {"config_hash": store.hash})
    return rs.trajectories


def _candidates(store: Store, table: EvaluationTable) -> list[Candidate]:
    meta = {}
    if store.manifest.exists():
        meta = {e["policy_id"]: e for e in store.read_json(store.manifest)["snapshots"]}
    out = []
    for pid in table.policies:
        m = meta.get(pid, {})
        out.append(Candidate(pid, table.driving_score(pid), m.get("session_id"), m.get("step")))
    return out


def score_histogram(cands: Sequence[Candidate], bins: int = 10) -> dict[str, int]:
    hist, edges = np.histogram([c.driving_score for c in cands], bins=bins, range=(0.0, 1.0))
    return {f"[{edges[i]:.1f},{edges[i + 1]:.1f}{']' if i == bins - 1 else ')'}": int(h)
            for i, h in enumerate(hist)}


def set_metrics(table: EvaluationTable, dmat, policies: Sequence[str],
                refs: Optional[Sequence[Trajectory]]) -> dict:
    """Suc. / O.A. / I.P. for one policy set."""
    row = {"policies": list(policies), "Suc.": success_rate_mean(table, policies)}
    try:
        row["I.P."] = inter_policy_diversity(dmat, policies) if len(policies) > 1 else None
    except NoSharedScenario as exc:
        row["I.P."] = None
        row["I.P._error"] = str(exc)
    if refs:
        ref_map = {s: refs for s in table.scenarios}
        try:
            row["O.A."] = overall_diversity(table, policies, ref_map)
        except EmptySuccessSet as exc:
            row["O.A."] = None
            row["O.A._error"] = str(exc)
            try:
                row["O.A._solved_only"] = overall_diversity(table, policies, ref_map, skip_empty=True)
            except EmptySuccessSet:
                row["O.A._solved_only"] = None
    return row


def _safe_ip(dmat, ids: Sequence[str]) -> Optional[float]:
    if len(ids) < 2:
        return None
    try:
        return inter_policy_diversity(dmat, ids)
    except NoSharedScenario:
        return None


def cmd_select(cfg: ExperimentConfig, store: Store, table: EvaluationTable) -> dict:
    cands = _candidates(store, table)
    pool_all = CandidatePool(cands, build_distance_matrix(table))
    pool = filter_by_score(pool_all, cfg.delta)
    if not pool.candidates:
        raise NoCandidates(f"no candidate reaches driving score {cfg.delta}; "
                           f"score histogram: {score_histogram(cands)}")
    pool = CandidatePool(pool.candidates, pool.distances.submatrix(pool.ids))
    sel = select_diverse(pool, cfg.k, seed=cfg.selection_seed)
    rows = selection_report(pool, sel)
    text = f"# config_hash={store.hash}\n" + format_selection_report(rows)
    (store.root / "selection.csv").write_text(text)
    return {"pool": pool, "selection": sel, "rows": rows}


def cmd_pipeline(cfg: ExperimentConfig, store: Store) -> dict:
    cmd_train(cfg, store)
    table, _ = cmd_evaluate(cfg, store)
    picked = cmd_select(cfg, store, table)
    pool, sel = picked["pool"], picked["selection"]
    refs = cmd_refgen(cfg, store)
    sub = table.subset(pool.ids)
    dmat = pool.distances
    rnd = select_random(pool, cfg.k, seed=cfg.selection_seed)
    rnd_rows = [{"rank": i + 1, "policy_id": pid, "session_id": pool.by_id(pid).session_id,
                 "training_step": pool.by_id(pid).training_step,
                 "driving_score": pool.by_id(pid).driving_score, "min_dist_at_selection": None}
                for i, pid in enumerate(rnd)]
    (store.root / "random_selection.csv").write_text(
        f"# config_hash={store.hash}\n" + format_selection_report(rnd_rows))
    report = {
        "pool_size": len(pool),
        "candidates": len(table.policies),
        "truncated": sel.truncated,
        "PolicySelect": set_metrics(sub, dmat, sel.ids, refs),
        "RandomSelect": set_metrics(sub, dmat, rnd, refs),
    }
    if cfg.repetitions > 1:
        wins = []
        for r in range(cfg.repetitions):
            seed = cfg.selection_seed + r
            ps = select_diverse(pool, cfg.k, seed=seed).ids
            rs = select_random(pool, cfg.k, seed=seed)
            a, b = _safe_ip(dmat, ps), _safe_ip(dmat, rs)
            win = a is not None and (b is None or a >= b)
            wins.append({"seed": seed, "policy_select_ip": a, "random_select_ip": b, "win": win})
        report["paired"] = {"repetitions": wins, "wins": sum(w["win"] for w in wins)}
    store.write_json(store.root / "pipeline_report.json", {"report": report})
    write_metrics_report(store.root / "metrics.json",
                         {"config_hash": store.hash, "PolicySelect": report["PolicySelect"],
                          "RandomSelect": report["RandomSelect"], "distance_matrix": dmat.to_dict()})
    return report


def cmd_metrics(cfg: ExperimentConfig, store: Store, policies: Optional[Sequence[str]] = None) -> dict:
    table, _ = cmd_evaluate(cfg, store)
    policies = list(policies) if policies else list(table.policies)
    sub = table.subset(policies)
    dmat = build_distance_matrix(sub)
    refs = None
    if (store.root / "reference.log").exists():
        refs = cmd_refgen(cfg, store)
    row = set_metrics(sub, dmat, policies, refs)
    write_metrics_report(store.root / "metrics.json",
                         {"config_hash": store.hash, "set": row, "distance_matrix": dmat.to_dict()})
    return row


# ---------------------------------------------------------------------------
# plotting
# ---------------------------------------------------------------------------


def plot_scenario(path_stem: Path, scenario_key: str, trajs: dict[str, Trajectory], note: str = "") -> None:
    """x-y overlay and speed-vs-time for one scenario, as SVG plus a CSV of the plotted values."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = ["scenario,policy,step,t,x,y,v"]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 8))
    for pid, tr in trajs.items():
        t = np.arange(len(tr)) * tr.timestep
        v = tr.speed if tr.speed is not None else np.zeros(len(tr))
        ax1.plot(tr.points[:, 0], tr.points[:, 1], lw=1, label=pid)
        ax2.plot(t, v, lw=1, label=pid)
        for i in range(len(tr)):
            rows.append(f"{scenario_key},{pid},{i},{float(t[i])!r},{float(tr.points[i, 0])!r},"
                        f"{float(tr.points[i, 1])!r},{float(v[i])!r}")
    ax1.set_xlabel("x [m]")
    ax1.set_ylabel("y [m]")
    ax1.invert_yaxis()
    ax1.set_aspect("equal", adjustable="datalim")
    ax1.set_title(scenario_key)
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("speed [m/s]")
    if trajs:
        if len(trajs) <= 12:
            ax1.legend(fontsize=6)
    else:
        ax1.text(0.5, 0.5, note or "no trajectories selected", transform=ax1.transAxes, ha="center")
        ax1.plot([], [], label=note or "empty selection")
        ax1.legend(fontsize=6)
    fig.tight_layout()
    path_stem.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path_stem.with_suffix(".svg"), format="svg")
    plt.close(fig)
    path_stem.with_suffix(".csv").write_text("\n".join(rows) + "\n")


def cmd_plot(cfg: ExperimentConfig, store: Store, policies: Optional[Sequence[str]] = None,
             scenarios: Optional[Sequence[str]] = None) -> list[Path]:
    path = store.root / "eval" / "trajectories.log"
    if not path.exists():
        log.error("missing trajectory log %s; run `evaluate` first", path)
        return []
    tlog = read_log(path)
    store.check_header(path, tlog.header)
    if policies is None:
        sel = store.root / "selection.csv"
        if sel.exists():
            lines = [ln for ln in sel.read_text().splitlines() if ln and not ln.startswith("#")]
            policies = [ln.split(",")[1] for ln in lines[1:]]
        else:
            policies = []
    keys = list(dict.fromkeys(e.scenario_id for e in tlog.entries))
    if scenarios:
        keys = [k for k in keys if k in set(scenarios)]
    out = []
    for key in keys:
        trajs = {}
        for pid in policies:
            try:
                trajs[pid] = tlog.get(key, pid).trajectory
            except KeyError:
                log.warning("no log for policy %s in scenario %s", pid, key)
        stem = store.root / "plots" / key
        plot_scenario(stem, key, trajs)
        out.append(stem.with_suffix(".svg"))
    return out


# ---------------------------------------------------------------------------
# single episode
# ---------------------------------------------------------------------------


class _UniformRandom:
    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def act(self, obs) -> int:
        return int(self.rng.integers(9))


def cmd_run(scenario: str, policy: str, record: Optional[str], seed_override: Optional[int]) -> str:
    if scenario.startswith("builtin:"):
        sc = builtin_scenario(scenario.split(":", 1)[1])
    else:
        if not Path(scenario).exists():
            raise ConfigError(f"scenario file not found: {scenario}")
        sc = load_scenario(scenario)
    if policy.startswith("random"):
        _, _, s = policy.partition(":")
        pol, pid = _UniformRandom(int(s or 0)), policy
    else:
        try:
            snap = load_snapshot(policy)
        except (OSError, SnapshotError) as exc:
            raise ConfigError(f"cannot load policy {policy}: {exc}") from exc
        pol, pid = snap, snap.policy_id
    if seed_override is not None:
        sc = sc.with_seed(seed_override)
    res = run_episode(sc, pol)
    text = format_log(TrajectoryLog([LogEntry(sc.key, pid, res.trajectory, res.outcome, res.steps)]))
    if record:
        Path(record).write_text(text)
    return f"{sc.key},{pid},{res.outcome},{res.steps}"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="divdrive", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def with_config(p):
        p.add_argument("--config", help="experiment config (JSON)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. trainer.total_steps=20000")
        return p

    with_config(sub.add_parser("train", help="train sessions and write snapshots"))
    ev = with_config(sub.add_parser("evaluate", help="evaluate snapshots on the scenario suite"))
    ev.add_argument("--snapshots", nargs="*", help="explicit snapshot files")
    me = with_config(sub.add_parser("metrics", help="Suc./O.A./I.P. for a policy set"))
    me.add_argument("--policies", nargs="*")
    with_config(sub.add_parser("select", help="filter by score and pick k diverse policies"))
    with_config(sub.add_parser("refgen", help="generate the reference trajectory set"))
    with_config(sub.add_parser("pipeline", help="train, evaluate, select, compare with random selection"))
    pl = with_config(sub.add_parser("plot", help="trajectory and speed plots for selected policies"))
    pl.add_argument("--policies", nargs="*")
    pl.add_argument("--scenarios", nargs="*")
    with_config(sub.add_parser("init-config", help="print the default config"))
    run = sub.add_parser("run", help="run one episode")
    run.add_argument("--scenario", required=True)
    run.add_argument("--policy", required=True, help="snapshot file or random[:seed]")
    run.add_argument("--record", help="write the trajectory log here")
    run.add_argument("--seed-override", type=int)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "run":
            print(cmd_run(args.scenario, args.policy, args.record, args.seed_override))
            return EXIT_OK
        cfg = load_config(args.config, args.set)
        if args.cmd == "init-config":
            print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
            return EXIT_OK
        store = Store(cfg)
        if args.cmd == "train":
            print(f"{len(cmd_train(cfg, store))} snapshots")
        elif args.cmd == "evaluate":
            _, info = cmd_evaluate(cfg, store, args.snapshots)
            for pid, s in info["scores"].items():
                print(f"{pid},{s}")
            print(f"# new episodes: {info['new_episodes']}, skipped snapshots: {len(info['skipped'])}")
        elif args.cmd == "metrics":
            print(json.dumps(cmd_metrics(cfg, store, args.policies), indent=2))
        elif args.cmd == "select":
            table, _ = cmd_evaluate(cfg, store)
            print(format_selection_report(cmd_select(cfg, store, table)["rows"]), end="")
        elif args.cmd == "refgen":
            print(f"{len(cmd_refgen(cfg, store))} reference trajectories")
        elif args.cmd == "pipeline":
            rep = cmd_pipeline(cfg, store)
            print("method,Suc.,O.A.,I.P.")
            for name in ("PolicySelect", "RandomSelect"):
                r = rep[name]
                print(f"{name},{r['Suc.']},{r.get('O.A.')},{r['I.P.']}")
        elif args.cmd == "plot":
            paths = cmd_plot(cfg, store, args.policies, args.scenarios)
            print(f"{len(paths)} plots")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoCandidates, InfeasibleReference) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
