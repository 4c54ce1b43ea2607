"""``heavylin`` command line for coefficient checks and seeded Monte Carlo runs.

Every run writes ``report.json`` and ``manifest.json`` to ``--out``.  The
manifest echoes the resolved configuration, so ``heavylin replay`` can
reproduce the report byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import corollary_check, fdd_condition_trend
from .config import ConfigError, RunConfig, load_config, load_preset, parse_config, preset_names
from .innovations import draw_innovations, make_rng, norming_constant
from .linproc import InnovationWindow, innovation_path, process_path, split_pm_paths
from .montecarlo import (EXPERIMENTS, corollary51_experiment, fdd_experiment,
                         m1_nontightness_experiment, sup_frechet_experiment, tightness_diagnostic)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def run_check(cfg: RunConfig, out: Path) -> tuple[dict, int, list]:
    e = cfg.experiment
    report = fdd_condition_trend(cfg.seq, cfg.model, e.get("n_list", [100, 1000, 10000]),
                                 r=float(e.get("r", 1.0)), threshold=float(e.get("threshold", 1e-2)))
    for name in e.get("criteria", []):
        kwargs = {"beta": e.get("beta")} if name == "beta_summable" else {}
        if name == "weak_regularity":
            kwargs = {"gamma": e.get("gamma")}
        report.corollary_verdicts[name] = corollary_check(cfg.seq, cfg.model, name, **kwargs)
    (out / "report.txt").write_text(report.table() + "\n")
    print(report.table())
    return json.loads(report.to_json()), 0, ["report.json", "report.txt"]


def run_simulate(cfg: RunConfig, out: Path) -> tuple[dict, int, list]:
    e = cfg.experiment
    n = int(e.get("n", 100))
    seeds = [int(s) for s in e.get("seeds", [cfg.seed])]
    a_n = norming_constant(cfg.model, n)
    lo, hi = 1 - cfg.seq.hi, n - cfg.seq.lo
    files, summary = [], {}
    for seed in seeds:
        window = InnovationWindow(lo, draw_innovations(cfg.model, make_rng(seed), hi - lo + 1))
        S = process_path(cfg.seq, window, n, a_n)
        Z = innovation_path(window, n, a_n)
        T = split_pm_paths(cfg.seq, window, n, a_n)
        name = f"paths_seed{seed}.csv"
        with open(out / name, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "S", "Z", "T_plus", "T_minus"])
            for row in zip(S.grid, S.values, Z.values, T.plus.values, T.minus.values):
                writer.writerow([repr(float(v)) for v in row])
        files.append(name)
        summary[str(seed)] = {"S(1)": float(S.values[-1]), "Z(1)": float(Z.values[-1]),
                              "sup|S|": float(np.abs(S.values).max())}
    print(f"wrote {len(files)} path file(s) with {n + 1} grid points each to {out}")
    return {"n": n, "a_n": a_n, "seeds": seeds, "paths": summary}, 0, files + ["report.json"]


def run_experiment(kind: str, cfg: RunConfig, out: Path, raw: bool) -> tuple[dict, int, list]:
    ec = cfg.experiment_config()
    if kind == "fdd":
        report = fdd_experiment(ec)
    elif kind == "frechet":
        report = sup_frechet_experiment(ec)
    elif kind == "m1":
        zeta = cfg.experiment.get("zeta")
        xi = cfg.experiment.get("xi")
        if zeta is None or xi is None:
            vals = cfg.seq.values
            if cfg.seq.lo != 0 or vals.size != 2:
                raise ConfigError("m1 needs [experiment] zeta and xi or coefficients [zeta, -xi]")
            zeta, xi = float(vals[0]), float(-vals[1])
        report = m1_nontightness_experiment(float(zeta), float(xi), ec)
    elif kind == "stat51":
        report = corollary51_experiment(ec)
    else:
        report = tightness_diagnostic(ec)
    files = ["report.json"]
    if raw and report.raw:
        report.raw_to_csv(out / "raw.csv")
        files.append("raw.csv")
    data = report.to_dict()
    data["failures"] = [c["name"] for c in report.failures]
    for c in report.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['value']:.6g} {c['op']} {c['threshold']}")
    if report.failures:
        print(json.dumps({"failures": data["failures"]}), file=sys.stderr)
    return data, 0 if report.passed else 1, files


def _resolve(args) -> tuple[RunConfig, str | None]:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both")
    if args.config:
        cfg, source = load_config(args.config), str(args.config)
    elif args.preset:
        cfg, source = load_preset(args.preset), f"preset:{args.preset}"
    else:
        raise ConfigError("a --config PATH or --preset NAME is required")
    cfg = cfg.with_overrides(seed=args.seed, reps=args.reps, n=args.n, threads=args.threads)
    return cfg, source


def execute(command: str, kind: str | None, cfg: RunConfig, source: str | None, out: Path,
            raw: bool = False) -> int:
    out.mkdir(parents=True, exist_ok=True)
    if command == "check":
        data, code, files = run_check(cfg, out)
    elif command == "simulate":
        data, code, files = run_simulate(cfg, out)
    else:
        data, code, files = run_experiment(kind, cfg, out, raw)
    _write_json(out / "report.json", data)
    _write_json(out / "manifest.json", {
        "command": command, "kind": kind, "config_path": source, "config": cfg.to_dict(),
        "base_seed": cfg.seed, "version": __version__, "raw": raw,
        "outputs": sorted(set(files)), "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")})
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heavylin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--preset", choices=preset_names(), help="bundled configuration")
        p.add_argument("--seed", type=int, help="override the base seed")
        p.add_argument("--reps", type=int, help="override the replicate count")
        p.add_argument("--n", type=int, help="override the grid size")
        p.add_argument("--threads", type=int, help="worker threads for replicates")
        p.add_argument("--out", type=Path, default=Path("heavylin-out"), help="output directory")

    common(sub.add_parser("check", help="boundary condition trend and coefficient criteria"))
    common(sub.add_parser("simulate", help="write S_n, Z_n, T_n+ and T_n- paths as CSV"))
    exp = sub.add_parser("experiment", help="seeded Monte Carlo experiment")
    exp.add_argument("kind", choices=EXPERIMENTS)
    common(exp)
    exp.add_argument("--raw", action="store_true", help="also dump per-replicate statistics")
    rep = sub.add_parser("replay", help="rerun a manifest.json")
    rep.add_argument("manifest", type=Path)
    rep.add_argument("--out", type=Path, help="output directory (default: <manifest dir>/replay)")
    sub.add_parser("presets", help="list bundled presets")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            print("\n".join(preset_names()))
            return 0
        if args.command == "replay":
            manifest = json.loads(args.manifest.read_text())
            cfg = parse_config(manifest["config"], source=str(args.manifest))
            cfg = RunConfig(cfg.model, cfg.seq, cfg.experiment, int(manifest["base_seed"]))
            out = args.out or args.manifest.parent / "replay"
            return execute(manifest["command"], manifest["kind"], cfg, manifest["config_path"], out,
                           bool(manifest.get("raw", False)))
        cfg, source = _resolve(args)
        return execute(args.command, getattr(args, "kind", None), cfg, source, args.out,
                       getattr(args, "raw", False))
    except ConfigError as exc:
        print(f"heavylin: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"heavylin: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
