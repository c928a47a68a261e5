"""Command-line front end: ``liewave {verify,simulate,lifespan-sweep,gn}``.

Every command reads an optional YAML config (``--config``), applies scalar
overrides from flags, writes its outputs plus a resolved ``config.yaml`` to
the output directory and returns a process exit status.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .config import COMMANDS, ConfigError, RunConfig, load_config, spec_from_name, write_resolved
from .gn import AdmissibilityError
from .output import snapshot, write_csv, write_json, write_report
from .profiles import ProfileError

log = logging.getLogger("liewave")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

OUTCOME_COLUMNS = ("outcome", "final_time", "steps", "resolved", "aliasing", "detected_T",
                   "check_T", "extrapolated_T", "stable", "threshold", "epsilon", "p", "profile",
                   "dt_policy")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liewave", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="defaults to the config's 'command' key")
    ap.add_argument("--config", type=Path, help="YAML run configuration")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--workers", type=int, help="concurrent member runs for sweeps")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--oracle-only", action="store_true",
                    help="lifespan-sweep: take lifespans from the comparison ODE")
    ap.add_argument("--no-guard", action="store_true",
                    help="disable the local-existence exponent guard (blow-up runs)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.command:
        cfg.override("command", args.command)
    if cfg.command is None:
        raise ConfigError("no command given on the command line or in the config")
    if args.seed is not None:
        cfg.override("seed", args.seed)
    if args.workers is not None:
        cfg.override("workers", args.workers)
    if args.out is not None:
        cfg.override("output.dir", str(args.out))
    if args.oracle_only:
        cfg.override("sweep.oracle_only", True)
    if args.no_guard:
        cfg.override("solver.guard", False)
    return cfg.validate()


# verify

def cmd_verify(cfg: RunConfig) -> int:
    from .verify import CHECK_COLUMNS, run_checks

    v = cfg["verify"]
    specs = [spec_from_name(g, v["band_limits"].get(g, 8)) for g in v["groups"]]
    reports: dict = {}
    results = run_checks(specs, samples=v["samples"], seed=cfg.seed, t_max=v["t_max"],
                         reports=reports)
    out = cfg.out_dir
    fmt = cfg["output"]["format"]
    write_report(out, "verify", CHECK_COLUMNS, [r.csv_row() for r in results], fmt)
    rows = []
    for name, rep in reports.items():
        for row in rep.csv_rows():
            rows.append(dict(row, group=name, samples=rep.samples, t_max=rep.t_max))
    write_report(out, "l2_estimates",
                 ("group", "name", "max_ratio", "argmax_time", "seed", "samples", "t_max"), rows, fmt)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_FAILED if failed else EXIT_OK


# simulate

def cmd_simulate(cfg: RunConfig) -> int:
    from .solver import DIAGNOSTIC_COLUMNS, integrate

    sc = cfg.solver_config()
    every = cfg["output"]["snapshot_every"]
    traj = integrate(sc, keep_every=every)
    out = cfg.out_dir
    d = traj.diagnostics
    n = len(d["time"])
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS,
              ([d[c][i] for c in DIAGNOSTIC_COLUMNS] for i in range(n)))
    rec = traj.record
    row = {
        "outcome": traj.outcome, "final_time": float(d["time"][-1]), "steps": int(d["step"][-1]),
        "resolved": traj.resolved if rec is None else rec.resolved, "aliasing": traj.aliasing,
        "epsilon": sc.epsilon, "p": sc.p, "profile": sc.profile, "dt_policy": sc.dt_policy,
    }
    if rec is not None:
        row.update(detected_T=rec.detected_T, check_T=rec.check_T,
                   extrapolated_T=rec.extrapolated_T, stable=rec.stable, threshold=rec.threshold)
    write_csv(out / "outcome.csv", OUTCOME_COLUMNS, [row])
    write_json(out / "outcome.json", row)
    if every:
        write_json(out / "snapshots.json",
                   {"group": traj.spec.name, "band_limit": traj.spec.band_limit,
                    "snapshots": [dict(snapshot(s), step=k)
                                  for s, k in zip(traj.states, traj.state_steps)]})
    if rec is not None:
        print(f"blow-up detected before t_end: T = {rec.detected_T:.10g} "
              f"(threshold {rec.threshold:g}, resolved={rec.resolved}, stable={rec.stable})")
    else:
        print(f"{traj.outcome}: t = {d['time'][-1]:.10g} after {int(d['step'][-1])} steps"
              + ("" if traj.outcome != "completed" else " (no blow-up before t_end)"))
    return EXIT_OK


# lifespan-sweep

def _sweep_member(args) -> str:
    """Run one epsilon and write its record to a per-run JSON file."""
    cfg, index, eps, path = args
    from .blowup import jensen_check, zero_mode_series
    from .solver import integrate

    sc = cfg.solver_config(epsilon=eps)
    traj = integrate(sc, keep_every=0)
    log.info("eps=%g: %s after %d steps", eps, traj.outcome, traj.diagnostics["step"][-1])
    info = {"index": index, "epsilon": eps, "outcome": traj.outcome,
            "final_time": float(traj.times[-1]), "steps": int(traj.diagnostics["step"][-1]),
            "profile": sc.profile, "p": sc.p, "dt_policy": sc.dt_policy, "record": None}
    if traj.record is not None:
        info["record"] = asdict(traj.record)
        chk = jensen_check(zero_mode_series(traj), sc.p)
        info["jensen"] = asdict(chk)
    write_json(path, info)
    return str(path)


def _load_member(path):
    import json

    from .blowup import LifespanRecord

    info = json.loads(Path(path).read_text())
    rec = info.get("record")
    if rec is not None:
        rec = {k: (float(v) if isinstance(v, str) and v in ("nan", "inf") else v)
               for k, v in rec.items()}
        info["record"] = LifespanRecord(**rec)
    return info


def cmd_lifespan_sweep(cfg: RunConfig) -> int:
    from .blowup import RECORD_COLUMNS, fit_lifespan_scaling, oracle_records
    from .profiles import build_profile

    eps = cfg.epsilons()
    out = cfg.out_dir
    members = []
    if cfg["sweep"]["oracle_only"]:
        spec = cfg.group_spec()
        s = cfg["solver"]
        a = build_profile(s["u0"], spec).zero_mode.real
        b = build_profile(s["u1"], spec).zero_mode.real
        for i, rec in enumerate(oracle_records(s["p"], eps, a, b)):
            members.append({"index": i, "epsilon": rec.epsilon, "outcome": "blowup", "record": rec})
    else:
        cfg.solver_config(epsilon=eps[0])  # validate once before forking
        tasks = [(cfg, i, e, out / "runs" / f"eps_{i:03d}.json") for i, e in enumerate(eps)]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                paths = list(pool.map(_sweep_member, tasks))
        else:
            paths = [_sweep_member(t) for t in tasks]
        members = [_load_member(p) for p in sorted(paths)]

    rows = []
    usable = []
    unresolved = []
    no_blowup = []
    for m in members:
        rec = m["record"]
        if rec is None:
            no_blowup.append(m["epsilon"])
            rows.append({"epsilon": m["epsilon"], "p": m["p"], "profile": m["profile"],
                         "detected_T": math.nan, "threshold": cfg["solver"]["threshold"],
                         "dt_policy": m["dt_policy"], "resolved": False,
                         "slope": "", "predicted_exponent": "", "residual": ""})
            continue
        rows.append(rec.csv_row())
        (usable if rec.resolved else unresolved).append(rec)
    summary = {
        "epsilons": eps, "unresolved": [r.epsilon for r in unresolved], "no_blowup": no_blowup,
        "largest_resolved_epsilon": max((r.epsilon for r in usable), default=None),
        "oracle_only": cfg["sweep"]["oracle_only"], "fit": None, "refused": None,
        "jensen": [m.get("jensen") for m in members],
    }
    status = EXIT_OK
    try:
        fit = fit_lifespan_scaling(usable)
    except ValueError as exc:
        summary["refused"] = str(exc)
        print(f"fit refused: {exc}", file=sys.stderr)
        status = EXIT_FAILED
    else:
        rows.append(fit.csv_row())
        summary["fit"] = asdict(fit)
        print(f"slope {fit.slope:.6f} vs predicted {fit.predicted:.6f} "
              f"(|diff| = {fit.deviation:.2e}, {fit.n_records} records, {fit.decades:.2f} decades)")
    if unresolved:
        print("excluded as under-resolved: eps = " + ", ".join(f"{r.epsilon:.4g}" for r in unresolved))
    write_csv(out / "lifespan.csv", RECORD_COLUMNS, rows)
    write_json(out / "fit.json", summary)
    return status


# gn

def _gn_member(args):
    from .gn import gn_ratio_sweep

    group, band, q, samples, seed, decay = args
    return gn_ratio_sweep(spec_from_name(group, band), q, samples, seed, decay)


def cmd_gn(cfg: RunConfig) -> int:
    from .gn import theta

    g = cfg["gn"]
    n = spec_from_name(g["group"], 1).topological_dim
    for q in g["q"]:
        theta(n, q)
    tasks = [(g["group"], b, q, g["samples"], cfg.seed, g["decay"])
             for q in g["q"] for b in g["band_limits"]]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(_gn_member, tasks))
    else:
        reports = [_gn_member(t) for t in tasks]
    out = cfg.out_dir
    cols = ("n", "q", "theta", "samples", "max_ratio", "argmax_seed", "band_limit")
    write_report(out, "gn", cols, [r.csv_row() for r in reports], cfg["output"]["format"])
    write_csv(out / "gn_ratios.csv", ("q", "band_limit", "seed", "ratio"),
              ([r.q, r.band_limit, int(s), x] for r in reports for s, x in zip(r.seeds, r.ratios)))
    status = EXIT_OK
    growth = []
    for q in g["q"]:
        rs = sorted((r for r in reports if r.q == q), key=lambda r: r.band_limit)
        for r in rs:
            print(f"n={r.n} q={r.q:g} theta={r.theta:.6g} band_limit={r.band_limit:g} "
                  f"max_ratio={r.max_ratio:.6g}")
            if not math.isfinite(r.max_ratio):
                status = EXIT_FAILED
        if len(rs) > 1:
            growth.append({"q": q, "band_limits": [r.band_limit for r in rs],
                           "growth": rs[-1].max_ratio / rs[0].max_ratio})
    write_json(out / "gn_summary.json", {"group": g["group"], "growth": growth})
    return status


COMMAND_FUNCS = {
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "lifespan-sweep": cmd_lifespan_sweep,
    "gn": cmd_gn,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        write_resolved(cfg, cfg.out_dir)
        return COMMAND_FUNCS[cfg.command](cfg)
    except (ConfigError, AdmissibilityError, ProfileError, ValueError) as exc:
        print(f"liewave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
