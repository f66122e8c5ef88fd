"""Command-line front end.

Subcommands:

    track          closed-loop tracking of a named task, CSV + JSON summary
    approx-error   open-loop model-vs-plant error sweep over (M, N)
    analyze        controllability / residual-decay / gramian diagnostics
    export-model   write the lifted model matrices in Matrix Market format

All units are SI; angles in radians. Every command is reproducible from the
config file and seed alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy.io

from . import analysis, mpc, tasks
from .config import ExperimentConfig, load_config
from .errors import ConfigError, LiftquadError
from .lifting import TruncationOrder
from .models import build_A, build_B, build_Bbar
from .reporting import write_csv, write_json, write_sidecar
from .se3 import QuadState, integrate_pseudo


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="experiment config file (INI sections)")
    p.add_argument("--seed", type=int, help="RNG seed override")
    p.add_argument("--out", help="output directory override")
    p.add_argument("--M", type=int, help="positional-chain truncation order")
    p.add_argument("--N", type=int, help="attitude-chain truncation order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liftquad",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="run closed-loop tracking for a task")
    p_track.add_argument("task", choices=sorted(tasks.TASKS))
    _add_common(p_track)
    p_track.add_argument("--duration", type=float, help="run length [s]")
    p_track.add_argument("--dt", type=float, help="control sampling interval [s]")
    p_track.add_argument("--horizon", type=float, help="prediction horizon [s]")
    p_track.add_argument("--bounds", choices=["on", "off"], help="virtual-control box")

    p_err = sub.add_parser("approx-error", help="model-vs-plant error sweep")
    _add_common(p_err)
    p_err.add_argument("--duration", type=float, help="run length [s]")
    p_err.add_argument("--workers", type=int, help="parallel jobs for the sweep")

    p_an = sub.add_parser("analyze", help="rank / decay / gramian diagnostics")
    p_an.add_argument("what", choices=["controllability", "residuals", "gramian"])
    _add_common(p_an)
    p_an.add_argument("--omega-norm", type=float, default=0.5, help="body-rate norm for decay study")
    p_an.add_argument("--duration", type=float, help="trajectory length for the gramian [s]")

    p_ex = sub.add_parser("export-model", help="write A, Bbar, B(X0) as Matrix Market files")
    _add_common(p_ex)
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    for name, attr in [("seed", "seed"), ("out", "out_dir"), ("M", "M"), ("N", "N")]:
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, attr, v)
    for name in ("duration", "dt", "horizon"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "bounds", None) is not None:
        cfg.bounds_enabled = args.bounds == "on"
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    return cfg


def cmd_track(cfg: ExperimentConfig, task_name: str) -> int:
    order = TruncationOrder(cfg.M, cfg.N)
    task = tasks.make_task(task_name, cfg.duration)
    mcfg = mpc.default_mpc_config(
        order, params=cfg.params, horizon=cfg.horizon, dt=cfg.dt, ubar_bound=cfg.ubar_bound()
    )
    log = mpc.run_tracking(task, cfg.params, order, mcfg, plant_dt=cfg.plant_dt)

    out = Path(cfg.out_dir)
    csv_path = out / f"{task.name}.csv"
    write_csv(csv_path, log.CSV_HEADER, log.rows())
    meta = {
        "task": task.name,
        "M": cfg.M,
        "N": cfg.N,
        "seed": cfg.seed,
        "dt": cfg.dt,
        "horizon": cfg.horizon,
        "plant_dt": cfg.plant_dt,
        "bounds": cfg.bounds_enabled,
    }
    write_sidecar(csv_path, meta)
    summary = log.summary()
    summary["seed"] = cfg.seed
    write_json(out / f"{task.name}.summary.json", summary)
    print(f"wrote {csv_path} ({log.t.size} steps)")
    print(f"mean qp solve time: {summary['mean_qp_ms']:.3f} ms")
    print(f"max attitude error: {summary['max_psi']:.3e}")
    if task.name == "hover":
        print(f"settle time (0.05 m band): {summary['settle_time_s']}")
    return 0


def _approx_error_job(args):
    cfg_dict, order = args
    acfg = analysis.ApproxErrorConfig(**cfg_dict, orders=[order])
    return order, analysis.approximation_error_experiment(acfg)[order]


def cmd_approx_error(cfg: ExperimentConfig) -> int:
    base = dict(
        duration=cfg.duration if cfg.duration is not None else 10.0,
        seed=cfg.seed,
        plant_dt=cfg.plant_dt,
        model_dt=cfg.model_dt,
        params=cfg.params,
    )
    jobs = [(base, order) for order in cfg.sweep_orders]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_approx_error_job, jobs))
    else:
        results = [_approx_error_job(j) for j in jobs]

    out = Path(cfg.out_dir)
    for (m_, n_), series in results:
        csv_path = out / f"approx_error_{m_}_{n_}.csv"
        write_csv(csv_path, "t,err_x,err_v,psi", series.rows())
        write_sidecar(csv_path, {"M": m_, "N": n_, "seed": cfg.seed, **{k: v for k, v in base.items() if k != "params"}})
        print(f"wrote {csv_path} (mean position error {series.mean_err_x():.4e})")
    return 0


def cmd_analyze(cfg: ExperimentConfig, what: str, omega_norm: float, duration) -> int:
    out = Path(cfg.out_dir)
    order = TruncationOrder(cfg.M, cfg.N)
    if what == "controllability":
        report = analysis.lti_controllability(order)
        doc = report.to_dict()
        write_json(out / f"controllability_{cfg.M}_{cfg.N}.json", doc)
        print(json.dumps(doc, indent=2))
    elif what == "residuals":
        doc = analysis.residual_decay_profile(
            cfg.params, omega_norm=omega_norm, seed=cfg.seed
        )
        write_json(out / "residual_decay.json", doc)
        print(json.dumps(doc, indent=2))
    else:  # gramian
        dur = duration if duration is not None else 1.0
        rng = np.random.default_rng(cfg.seed)
        s0 = QuadState(
            rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3), np.eye(3), 0.3 * rng.standard_normal(3)
        )
        control = analysis.excitation_control(cfg.params, cfg.seed, dur)
        step = 0.01
        traj = integrate_pseudo(s0, control, step, int(round(dur / step)), cfg.params)
        sv = analysis.gramian_min_sv(traj, cfg.params, order, 0.0, dur)
        doc = {"M": cfg.M, "N": cfg.N, "t0": 0.0, "tf": dur, "min_singular_value": sv}
        write_json(out / "gramian.json", doc)
        print(json.dumps(doc, indent=2))
    return 0


def cmd_export_model(cfg: ExperimentConfig) -> int:
    order = TruncationOrder(cfg.M, cfg.N)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    A = build_A(order)
    Bbar = build_Bbar(order)
    s0 = QuadState.identity()
    B0 = build_B(s0, cfg.params, order)
    for name, mat in [("A", A), ("Bbar", Bbar), ("B0", B0)]:
        path = out / f"{name}.mtx"
        scipy.io.mmwrite(str(path), np.asarray(mat))
        print(f"wrote {path} ({mat.shape[0]}x{mat.shape[1]})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "track":
            return cmd_track(cfg, args.task)
        if args.command == "approx-error":
            return cmd_approx_error(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.what, args.omega_norm, args.duration)
        if args.command == "export-model":
            return cmd_export_model(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LiftquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
