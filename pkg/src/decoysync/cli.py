"""Command-line entry point: ``decoysync simulate | sweep | feasibility``."""

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import _kernels, feasibility
from .analysis import qber_estimate
from .config import Config, parse_config, parse_grid
from .errors import DecoySyncError
from .harness import SweepSpec, check_size, emit_results, prepare_trial, run_sweep, run_trial
from .sync import cross_correlate


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _load(args):
    cfg = parse_config(args.config) if args.config else Config()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, base_seed=args.seed)
    return cfg


def cmd_simulate(args):
    cfg = _load(args)
    check_size(cfg, args.allow_large)
    row = run_trial(cfg, args.trial)
    data = prepare_trial(cfg, args.trial)
    corr = cross_correlate(data.template, data.clicks, cfg.method, cfg.exclusion_halfwidth)
    channel = cfg.channel()

    summary = {
        "n_alice": cfg.n_alice,
        "d_max_bins": cfg.d_max,
        "loss_db": cfg.loss_db,
        "bcr_hz": cfg.bcr,
        "seed": row.seed,
        "true_offset": row.true_offset,
        "recovered_offset": row.recovered_offset,
        "recovered_delta_ppm": row.recovered_delta_ppm,
        "success": row.success,
        "sigma_multiple": row.sigma,
        "detections": row.detections,
        "corr_mean": corr.mean,
        "corr_std": corr.std,
        "corr_peak": corr.peak_value,
        "qber_model": qber_estimate(channel, cfg.table()),
        "kernels": _kernels.backend(),
    }
    for k, v in summary.items():
        print(f"{k:>20}: {v}")
    if args.out:
        if args.format == "json":
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"summary": summary, "lags": corr.lags.tolist(),
                           "values": corr.values.tolist()}, fh)
        else:
            np.savetxt(args.out, np.column_stack([corr.lags, corr.values]), delimiter=",",
                       header="lag,value", comments="", fmt=["%d", "%.17g"])
    return 0


def cmd_sweep(args):
    cfg = _load(args)
    if args.param:
        cfg = replace(cfg, swept_param=args.param)
    if args.grid:
        cfg = replace(cfg, grid=parse_grid(args.grid))
    if args.trials:
        cfg = replace(cfg, trials_per_point=args.trials)
    spec = SweepSpec.from_config(cfg)
    result = run_sweep(spec, threads=args.threads, allow_large=args.allow_large)
    if args.out:
        emit_results(result.rows, args.format, args.out)
    values, rate, score = result.performance.per_point()
    print(f"# {spec.swept_param}  success_rate  mean_score")
    for v, r, s in zip(values, rate, score):
        print(f"{v:.6g}  {r:.3f}  {s:.3f}")
    return 0


def cmd_feasibility(args):
    cfg = _load(args)
    budget = feasibility.HardwareBudget(args.max_transform_points, 1.0 / cfg.t_bin)
    n_alice = args.n_alice or cfg.n_alice
    d_max = args.d_max_bins if args.d_max_bins is not None else cfg.d_max
    out = {
        "n_alice": n_alice,
        "d_max_bins": d_max,
        "required_transform_length": feasibility.required_transform_length(n_alice, d_max),
        "max_transform_points": budget.max_transform_points,
    }
    try:
        dmb, dms = feasibility.max_offset_for_transform(n_alice, budget)
        out["max_offset_bins"] = dmb
        out["max_offset_ms"] = dms * 1e3
    except DecoySyncError as exc:
        out["max_offset_bins"] = None
        out["max_offset_error"] = str(exc)
    out["smear_bins"] = feasibility.syntonization_smear(args.delta_ppm, n_alice)
    ok, limit = feasibility.arrival_lock_limit(cfg.table(), cfg.channel(), args.delta_ppm, args.min_detections)
    out["arrival_lock_feasible"] = ok
    out["arrival_lock_loss_limit_db"] = limit
    if args.latency is not None:
        out["state_buffer_bytes"] = feasibility.state_buffer_bytes(args.latency, budget.rep_rate)
    if args.format == "json":
        text = json.dumps(out, indent=1)
    else:
        text = "\n".join(f"{k},{v}" for k, v in out.items())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="decoysync", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH", help="key = value configuration file")
        sp.add_argument("--seed", type=_u64, help="base seed (overrides the config)")
        sp.add_argument("--out", metavar="PATH", help="output file")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("simulate", help="run one trial and dump its correlation")
    common(sp)
    sp.add_argument("--trial", type=int, default=0, help="trial index (default 0)")
    sp.add_argument("--allow-large", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="Monte-Carlo sweep over one parameter")
    common(sp)
    sp.add_argument("--threads", type=int, default=0, help="worker threads, 0 = all cores")
    sp.add_argument("--allow-large", action="store_true",
                    help="permit n_alice + 2*d_max above 2^28")
    sp.add_argument("--param", help="override swept_param")
    sp.add_argument("--grid", help="override grid: 'a,b,c' or 'start:stop:step'")
    sp.add_argument("--trials", type=int, help="override trials_per_point")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("feasibility", help="transform-length and syntonization budgets")
    common(sp)
    sp.add_argument("--n-alice", type=int)
    sp.add_argument("--d-max-bins", type=int)
    sp.add_argument("--delta-ppm", type=float, default=1.0)
    sp.add_argument("--min-detections", type=float, default=10.0)
    sp.add_argument("--max-transform-points", type=int, default=2 ** 27)
    sp.add_argument("--latency", type=float, help="round-trip latency in seconds for the buffer estimate")
    sp.set_defaults(func=cmd_feasibility)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DecoySyncError, OSError) as exc:
        print(f"decoysync: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
