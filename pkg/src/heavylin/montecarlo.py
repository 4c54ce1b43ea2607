"""Seeded Monte Carlo experiments on normalised partial-sum paths.

Replicate ``r`` always draws its innovations from the stream
``make_rng(base_seed, lane(r))``, so reports do not depend on how
replicates are split over worker threads.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import stats

from .coefficients import CoefficientSeq, aggregates
from .innovations import TailModel, draw_innovations, make_rng, norming_constant
from .linproc import InnovationWindow, build_process, partial_sum_values
from .pathspace import count_eta_values, lbeta_discrepancy, w_m1_values, window_steps
from .stable import draw_stable

DEFAULT_THRESHOLDS = {
    "ks": 0.05,
    "discrepancy_eps": 0.25,
    "discrepancy_prob": 0.05,
    "degenerate_eps": 0.1,
    "degenerate_prob": 0.05,
    "theta_tol": 0.07,
    "decay_ratio": 0.5,
}
REFERENCE_LANE = 2 ** 62
QUANTILES = (0.5, 0.9, 0.99)


def ks_distance(sample_a, cdf_or_sample_b) -> float:
    """Kolmogorov-Smirnov sup distance: two-sample, or one-sample against a callable cdf."""
    a = np.asarray(sample_a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    if callable(cdf_or_sample_b):
        return float(stats.kstest(a, cdf_or_sample_b).statistic)
    b = np.asarray(cdf_or_sample_b, dtype=float).ravel()
    if b.size == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    return float(stats.ks_2samp(a, b).statistic)


def frechet_cdf(alpha: float) -> Callable:
    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x > 0, np.exp(-np.where(x > 0, x, 1.0) ** -alpha), 0.0)
    return cdf


def probability(hits) -> dict:
    """Empirical probability with its binomial standard error."""
    hits = np.asarray(hits, dtype=bool)
    p = float(hits.mean())
    return {"p": p, "se": math.sqrt(p * (1 - p) / hits.size), "count": int(hits.sum())}


def _quantiles(x) -> dict:
    return {f"q{round(100 * q)}": float(np.quantile(x, q)) for q in QUANTILES}


@dataclass
class ExperimentConfig:
    model: TailModel
    seq: CoefficientSeq
    n: int = 1000
    reps: int = 1000
    base_seed: int = 0
    t_points: tuple = (1.0,)
    deltas: tuple = (0.05,)
    etas: tuple = (1.0,)
    beta: float = 1.0
    n_list: tuple = ()
    eps_grid: tuple = (0.1, 0.25, 0.5)
    reference_size: int = 100_000
    thresholds: dict = field(default_factory=dict)
    threads: int = 1
    chunk: int = 250
    # replaces draw_innovations(model, rng, size); used for deterministic scenarios
    draw: Callable | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if any(not 0 < t <= 1 for t in self.t_points):
            raise ValueError(f"t_points must lie in (0, 1], got {self.t_points}")
        if any(int(m) < 1 for m in self.n_list):
            raise ValueError("n_list entries must be >= 1")
        unknown = set(self.thresholds) - set(DEFAULT_THRESHOLDS)
        if unknown:
            raise ValueError(f"unknown thresholds {sorted(unknown)}")

    def threshold(self, key: str) -> float:
        return float(self.thresholds.get(key, DEFAULT_THRESHOLDS[key]))

    def to_dict(self) -> dict:
        return {"model": self.model.to_config(), "coefficients": self.seq.to_config(),
                "n": self.n, "reps": self.reps, "base_seed": self.base_seed,
                "t_points": list(self.t_points), "deltas": list(self.deltas),
                "etas": list(self.etas), "beta": self.beta, "n_list": list(self.n_list),
                "eps_grid": list(self.eps_grid), "reference_size": self.reference_size,
                "thresholds": {**DEFAULT_THRESHOLDS, **self.thresholds}}


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    statistics: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def check(self, name: str, value: float, threshold: float, op: str = "<=") -> bool:
        ok = {"<=": value <= threshold, ">=": value >= threshold, "==": value == threshold}[op]
        self.checks.append({"name": name, "value": value, "threshold": threshold, "op": op,
                            "passed": bool(ok)})
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return _jsonable({"kind": self.kind, "config": self.config, "statistics": self.statistics,
                          "checks": self.checks, "passed": self.passed})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def raw_to_csv(self, path) -> None:
        """One row per replicate, one column per raw statistic (equal-length columns only)."""
        cols = {k: np.asarray(v).ravel() for k, v in sorted(self.raw.items())}
        if not cols:
            return
        lengths = {v.size for v in cols.values()}
        if len(lengths) != 1:
            raise ValueError("raw statistics have different lengths")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replicate", *cols])
            for i, row in enumerate(zip(*cols.values())):
                writer.writerow([i, *(repr(float(v)) for v in row)])


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


# -- simulation core -----------------------------------------------------------


def lane(rep: int, stage: int = 0) -> int:
    """Seed lane of replicate ``rep`` in stage ``stage`` (one stage per grid size)."""
    return (stage << 32) | rep


def replicate_innovations(config: ExperimentConfig, rep: int, n: int | None = None,
                          stage: int = 0) -> InnovationWindow:
    """The innovations replicate ``rep`` uses: indices ``1 - hi .. n - lo`` of the coefficients."""
    n = config.n if n is None else n
    lo, hi = 1 - config.seq.hi, n - config.seq.lo
    draw = config.draw or draw_innovations
    rng = make_rng(config.base_seed, lane(rep, stage))
    return InnovationWindow(lo, draw(config.model, rng, hi - lo + 1))


@dataclass(frozen=True)
class Batch:
    """Coupled paths of a block of replicates: ``S`` from the filter, ``Z`` from raw innovations."""

    innovations: InnovationWindow
    S: np.ndarray
    Z: np.ndarray
    a_n: float
    n: int


def _batch(config: ExperimentConfig, reps: Sequence[int], n: int, stage: int, a_n: float) -> Batch:
    rows = [replicate_innovations(config, r, n, stage) for r in reps]
    window = InnovationWindow(rows[0].lo, np.stack([w.values for w in rows]))
    x = build_process(config.seq, window, 1, n).values
    S = partial_sum_values(x, a_n)
    Z = partial_sum_values(window.slice(1, n), a_n)
    return Batch(window, S, Z, a_n, n)


def _run(config: ExperimentConfig, stat: Callable[[Batch], dict], n: int | None = None,
         stage: int = 0) -> dict:
    """Apply ``stat`` to every replicate block and concatenate its per-replicate arrays in order."""
    n = config.n if n is None else n
    a_n = norming_constant(config.model, n)
    chunks = [range(s, min(s + config.chunk, config.reps)) for s in range(0, config.reps, config.chunk)]
    work = lambda reps: stat(_batch(config, reps, n, stage, a_n))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return {k: np.concatenate([np.atleast_1d(p[k]) for p in parts]) for k in parts[0]}


def _grid_index(n: int, t: float) -> int:
    return min(int(math.floor(n * t + 1e-12)), n)


def _stable_reference(config: ExperimentConfig) -> np.ndarray:
    m = config.model
    return draw_stable(m.alpha, m.p, m.q, make_rng(config.base_seed, REFERENCE_LANE),
                       int(config.reference_size))


# -- experiments ---------------------------------------------------------------


def fdd_experiment(config: ExperimentConfig) -> ExperimentReport:
    """``S_n(t)`` against ``A Z(t)`` per ``t``: KS to the stable oracle and coupled discrepancy."""
    A = aggregates(config.seq).A
    alpha = config.model.alpha
    idx = {t: _grid_index(config.n, t) for t in config.t_points}

    def stat(b: Batch) -> dict:
        out = {}
        for t, k in idx.items():
            out[f"S({t})"] = b.S[:, k]
            out[f"Z({t})"] = b.Z[:, k]
        return out

    raw = _run(config, stat)
    report = ExperimentReport("fdd", config.to_dict(), {"A": A}, raw=raw)
    reference = _stable_reference(config) if A != 0 else None
    eps_grid = sorted(set(config.eps_grid) | {config.threshold("discrepancy_eps")})
    per_t = {}
    for t in config.t_points:
        s, z = raw[f"S({t})"], raw[f"Z({t})"]
        entry = {"discrepancy": {repr(e): probability(np.abs(s - A * z) > e) for e in eps_grid}}
        if A != 0:
            entry["ks_to_stable"] = ks_distance(s / (A * t ** (1 / alpha)), reference)
            report.check(f"ks(t={t})", entry["ks_to_stable"], config.threshold("ks"))
        else:
            eps = config.threshold("degenerate_eps")
            entry["degenerate"] = {repr(eps): probability(np.abs(s) > eps)}
            report.check(f"P(|S_n({t})|>{eps})", entry["degenerate"][repr(eps)]["p"],
                         config.threshold("degenerate_prob"))
        eps = config.threshold("discrepancy_eps")
        report.check(f"P(|S_n({t})-A Z_n({t})|>{eps})", entry["discrepancy"][repr(eps)]["p"],
                     config.threshold("discrepancy_prob"))
        per_t[repr(t)] = entry
    report.statistics["t"] = per_t
    return report


def sup_frechet_experiment(config: ExperimentConfig) -> ExperimentReport:
    """``sup_t S_n(t)`` for ``c_0 = 1, c_1 = -1`` and nonnegative innovations, against ``exp(-x^-alpha)``."""
    m = config.model
    if m.p != 1.0 or m.q != 0.0:
        raise ValueError("the supremum experiment needs nonnegative innovations (p = 1, q = 0)")
    if config.seq != CoefficientSeq.finite([1.0, -1.0]):
        raise ValueError("the supremum experiment needs c_0 = 1, c_1 = -1")

    def stat(b: Batch) -> dict:
        y = b.innovations.values
        return {"sup": b.S.max(axis=1), "max_increment": (y - y[:, :1]).max(axis=1) / b.a_n}

    raw = _run(config, stat)
    cdf = frechet_cdf(m.alpha)
    ks = ks_distance(raw["sup"], cdf)
    points = (0.5, 1.0, 2.0, 5.0)
    table = {repr(x): {"empirical": float(np.mean(raw["sup"] <= x)), "frechet": float(cdf(x))}
             for x in points}
    err = float(np.max(np.abs(raw["sup"] - raw["max_increment"])))
    report = ExperimentReport("frechet", config.to_dict(),
                              {"ks_to_frechet": ks, "cdf_table": table, "telescoping_max_error": err},
                              raw=raw)
    report.check("ks_to_frechet", ks, config.threshold("ks"))
    return report


def theta(zeta: float, xi: float, eta: float, alpha: float) -> float:
    """``1 - exp(-((zeta - xi)/eta)^alpha)``."""
    return 1.0 - math.exp(-(((zeta - xi) / eta) ** alpha))


def m1_nontightness_experiment(zeta: float, xi: float, config: ExperimentConfig) -> ExperimentReport:
    """``P(w^M1(S_n, delta) > eta)`` for ``c_0 = zeta, c_1 = -xi`` against the limit ``theta``.

    The spike at a large ``Y_k`` rises by ``zeta Y_k`` and falls back by
    ``xi Y_k``, so the path limit of the probability is
    ``1 - exp(-(xi/eta)^alpha)`` (``spike_limit``); it equals ``theta`` when
    ``zeta = 2 xi``.
    """
    if not zeta > xi > 0:
        raise ValueError(f"need zeta > xi > 0, got zeta={zeta}, xi={xi}")
    m = config.model
    if not (m.p == 1.0 and m.is_pure_pareto and m.alpha < 1):
        raise ValueError("needs nonnegative pure-Pareto innovations with alpha < 1")
    config = replace(config, seq=CoefficientSeq.finite([zeta, -xi]))
    steps = {d: window_steps(d, config.n) for d in config.deltas}

    def stat(b: Batch) -> dict:
        out = {f"w({d})": w_m1_values(b.S, s) for d, s in steps.items()}
        out["range"] = b.S.max(axis=1) - b.S.min(axis=1)
        return out

    raw = _run(config, stat)
    report = ExperimentReport("m1", dict(config.to_dict(), zeta=zeta, xi=xi), raw=raw)
    probes = {}
    for d in config.deltas:
        for eta in config.etas:
            th = theta(zeta, xi, eta, m.alpha)
            est = probability(raw[f"w({d})"] > eta)
            probes[f"delta={d},eta={eta}"] = {
                **est, "theta": th, "spike_limit": 1.0 - math.exp(-((xi / eta) ** m.alpha))}
            report.check(f"|P(w(delta={d})>{eta}) - theta|", abs(est["p"] - th),
                         config.threshold("theta_tol"))
    report.statistics.update(probes=probes, max_range=float(raw["range"].max()))
    return report


def corollary51_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Quantiles of ``int_0^1 |S_n - A Z_n|^beta`` over the grid sizes in ``n_list``."""
    if not config.n_list:
        raise ValueError("corollary51_experiment needs n_list")
    A = aggregates(config.seq).A
    raw, per_n, medians = {}, {}, []
    for stage, n in enumerate(config.n_list):
        res = _run(config, lambda b: {"stat": lbeta_discrepancy(b.S, b.Z, A, config.beta)},
                   n=int(n), stage=stage)
        x = res["stat"]
        raw[f"stat(n={n})"] = x
        per_n[str(n)] = {"median": float(np.median(x)), "q90": float(np.quantile(x, 0.9))}
        medians.append(per_n[str(n)]["median"])
    all_zero = all(v == 0 for v in medians)
    decreasing = all_zero or all(b < a for a, b in zip(medians, medians[1:]))
    report = ExperimentReport("stat51", config.to_dict(), {"A": A, "per_n": per_n}, raw=raw)
    report.statistics["trend"] = "consistent with -> 0" if decreasing else "inconsistent"
    report.check("medians strictly decreasing", float(decreasing), 1.0, "==")
    ratio = 0.0 if all_zero else medians[-1] / medians[0]
    report.check("median(last)/median(first)", ratio, config.threshold("decay_ratio"))
    return report


def tightness_diagnostic(config: ExperimentConfig) -> ExperimentReport:
    """Quantiles of sup-norm and ``N_eta`` for ``S_n``, ``T_n^+``, ``T_n^-`` per grid size.

    Also reports ``P(w^M1(S_n, delta) > eta)``.  No pass/fail checks: tightness
    is a statement about the limit, so the report only shows the trend.
    """
    n_list = config.n_list or (config.n,)
    seq = config.seq
    parts = {"S": seq, "T_plus": seq.positive_part(), "T_minus": seq.negative_part()}
    per_n = {}
    for stage, n in enumerate(n_list):
        n = int(n)
        steps = {d: window_steps(d, n) for d in config.deltas}

        def stat(b: Batch) -> dict:
            out = {}
            for name, s in parts.items():
                path = b.S if name == "S" else partial_sum_values(
                    build_process(s, b.innovations, 1, b.n).values, b.a_n)
                out[f"{name}.sup"] = np.abs(path).max(axis=1)
                for eta in config.etas:
                    out[f"{name}.N({eta})"] = count_eta_values(path, eta)
                if name == "S":
                    for d, m in steps.items():
                        out[f"S.w({d})"] = w_m1_values(path, m)
            return out

        raw = _run(config, stat, n=n, stage=stage)
        entry = {}
        for name in parts:
            entry[name] = {"sup_norm": _quantiles(raw[f"{name}.sup"]),
                           "n_eta": {repr(e): _quantiles(raw[f"{name}.N({e})"]) for e in config.etas}}
        entry["w_m1"] = {f"delta={d},eta={e}": probability(raw[f"S.w({d})"] > e)
                         for d in config.deltas for e in config.etas}
        per_n[str(n)] = entry
    return ExperimentReport("tightness", config.to_dict(), {"per_n": per_n})


EXPERIMENTS = ("fdd", "frechet", "m1", "stat51", "tightness")
