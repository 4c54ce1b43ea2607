"""Numeric evaluation of the boundary condition for f.d.d. convergence of ``S_n``,
the sufficient coefficient conditions that imply it, and the auxiliary
array criteria used along the way.

A finite computation cannot prove a limit statement, so trend functions
return evidence ("consistent" or "inconsistent"), never a proof.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import ndimage

from .coefficients import CoefficientSeq, aggregates, three_series_sum, three_series_terms
from .innovations import TailModel, norming_constant

CONSISTENT = "consistent with -> 0"
INCONSISTENT = "inconsistent"
HOLDS, FAILS, INAPPLICABLE = "holds", "fails", "inapplicable"
CRITERIA = ("beta_summable", "alpha_above_one", "bounded_ratio", "weak_regularity")


class BoundarySums(NamedTuple):
    left: float
    right: float


def _boundary_terms(d, a_n: float, model: TailModel, r: float) -> np.ndarray:
    """``(|d|/(r a_n))^alpha h(r a_n/|d|)`` computed in log space; zero where ``d = 0``."""
    d = np.abs(np.asarray(d, dtype=float))
    nz = d > 0
    log_ratio = np.log(r) + math.log(a_n) - np.log(np.where(nz, d, 1.0))
    return np.where(nz, np.exp(-model.alpha * log_ratio + model.h.log_h(log_ratio)), 0.0)


def _fsum(x) -> float:
    return math.fsum(np.asarray(x, dtype=float).tolist())


def fdd_condition(seq: CoefficientSeq, model: TailModel, n: int, r: float = 1.0,
                  a_n: float | None = None) -> BoundarySums:
    """Left (``j <= 0``) and right (``j > n``) sums of ``(|d_{n,j}|/(r a_n))^alpha h(r a_n/|d_{n,j}|)``.

    Only indices with possibly nonzero ``d_{n,j}`` are visited.
    """
    if n < 1 or not r > 0:
        raise ValueError("need n >= 1 and r > 0")
    a_n = norming_constant(model, n) if a_n is None else a_n
    j_lo, j_hi = seq.nonzero_d_range(n)
    left = right = 0.0
    if j_lo <= 0:
        j = np.arange(j_lo, 1)
        left = _fsum(_boundary_terms(seq.d(n, j), a_n, model, r))
    if j_hi >= n + 1:
        j = np.arange(max(n + 1, j_lo), j_hi + 1)
        right = _fsum(_boundary_terms(seq.d(n, j), a_n, model, r))
    return BoundarySums(left, right)


def _trend(values: Sequence[float], threshold: float) -> str:
    """Consistent when the last three values decrease (zeros may repeat) and the final one is small."""
    tail = list(values)[-3:]
    decreasing = all(b < a or (a == 0 and b == 0) for a, b in zip(tail, tail[1:]))
    return CONSISTENT if decreasing and tail[-1] < threshold else INCONSISTENT


@dataclass
class ConditionReport:
    n_values: list
    left: list
    right: list
    r: float = 1.0
    threshold: float = 1e-2
    verdict_left: str = ""
    verdict_right: str = ""
    omitted_abs_mass: float = 0.0
    corollary_verdicts: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        ok = self.verdict_left == CONSISTENT and self.verdict_right == CONSISTENT
        return CONSISTENT if ok else INCONSISTENT

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        rows = [f"{'n':>10}  {'left':>14}  {'right':>14}"]
        rows += [f"{n:>10d}  {lv:>14.6e}  {rv:>14.6e}" for n, lv, rv in zip(self.n_values, self.left, self.right)]
        rows.append(f"left: {self.verdict_left}; right: {self.verdict_right}")
        for name, v in self.corollary_verdicts.items():
            rows.append(f"{name}: {v['verdict']}")
        return "\n".join(rows)


def fdd_condition_trend(seq: CoefficientSeq, model: TailModel, n_list: Sequence[int],
                        r: float = 1.0, threshold: float = 1e-2) -> ConditionReport:
    """Evaluate :func:`fdd_condition` over an increasing ``n_list`` and judge the trend."""
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be nonempty and strictly increasing")
    sums = [fdd_condition(seq, model, n, r) for n in n_list]
    left = [s.left for s in sums]
    right = [s.right for s in sums]
    return ConditionReport(n_list, left, right, r, threshold, _trend(left, threshold),
                           _trend(right, threshold), seq.abs_tail(1.0).value)


class SimplifiedSums(NamedTuple):
    left: float
    right: float
    sup_d_left: float
    sup_d_right: float


def simplified_condition(seq: CoefficientSeq, model: TailModel, n: int, j_n: int | None = None,
                         r: float = 1.0) -> SimplifiedSums:
    """Boundary sums restricted to ``j <= -j_n`` and ``j >= n + j_n``, with ``sup |d_{n,j}|`` there.

    ``j_n`` defaults to ``floor(sqrt(n))``.
    """
    j_n = int(math.isqrt(n)) if j_n is None else int(j_n)
    if not 1 <= j_n < n:
        raise ValueError(f"need 1 <= j_n < n, got j_n={j_n}, n={n}")
    a_n = norming_constant(model, n)
    j_lo, j_hi = seq.nonzero_d_range(n)
    left_j = np.arange(j_lo, -j_n + 1)
    right_j = np.arange(max(n + j_n, j_lo), j_hi + 1)
    d_left, d_right = np.abs(seq.d(n, left_j)), np.abs(seq.d(n, right_j))
    return SimplifiedSums(_fsum(_boundary_terms(d_left, a_n, model, r)),
                          _fsum(_boundary_terms(d_right, a_n, model, r)),
                          float(d_left.max()) if d_left.size else 0.0,
                          float(d_right.max()) if d_right.size else 0.0)


# -- sufficient coefficient conditions -------------------------------------------


def _summability(seq: CoefficientSeq, power: float) -> dict:
    """Windowed ``sum |c_j|^power``, the same sum on the half window, and the family's omitted tail."""
    vals = np.abs(seq.values) ** power
    extent = max(abs(seq.lo), abs(seq.hi))
    inner = np.abs(seq.indices) <= extent // 2
    tail = seq.abs_tail(power)
    return {"power": power, "window_sum": _fsum(vals), "half_window_sum": _fsum(vals[inner]),
            "omitted_tail": tail.value, "divergent": tail.divergent}


def _weak_regularity_constant(mags: np.ndarray, alpha: float, gamma: float, j_max: int,
                              n_max: int) -> float:
    """``sup max|c_k|^e / sum |c_k|^alpha`` over windows ``[j+1, j+n]``, ``0 <= j <= j_max``,
    ``n`` on a doubling grid up to ``n_max``; ``mags[k]`` is ``|c_k|`` for ``k >= 0``.
    """
    e = (1 - alpha) * (alpha - gamma) / (1 - alpha + gamma)
    need = j_max + n_max + 1
    mags = np.concatenate([mags, np.zeros(max(0, need - mags.size))])[:need]
    powered = mags ** e
    powered[mags == 0] = 0.0
    # suffix sums keep far-tail windows accurate for decaying coefficients
    suffix = np.concatenate([np.cumsum((mags ** alpha)[::-1])[::-1], [0.0]])
    worst = 0.0
    n = 1
    while n <= n_max:
        starts = np.arange(1, j_max + 2)
        sums = suffix[starts] - suffix[starts + n]
        maxes = ndimage.maximum_filter1d(powered, size=n, mode="constant",
                                         origin=-(n // 2))[starts]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(sums > 0, maxes / np.where(sums > 0, sums, 1.0),
                             np.where(maxes > 0, np.inf, 1.0))
        worst = max(worst, float(ratio.max()))
        n *= 2
    return worst


def corollary_check(seq: CoefficientSeq, model: TailModel, which: str, beta: float | None = None,
                    gamma: float | None = None, j_scan: int | None = None, n_scan: int | None = None,
                    stability: float = 0.05) -> dict:
    """Verdict and constants for one sufficient condition on the coefficients.

    ``which`` is one of

    - ``beta_summable``: ``sum |c_j|^beta < inf`` for some ``0 < beta < alpha``, ``beta <= 1``;
    - ``alpha_above_one``: ``alpha in (1, 2)`` and ``sum |c_j| < inf``;
    - ``bounded_ratio``: ``alpha <= 1``, ``sum |c_j|^alpha < inf`` and ``h(lx)/h(x) <= M``;
    - ``weak_regularity``: ``alpha < 1``, ``sum |c_j|^alpha < inf`` and the windowed ratio
      ``max |c_k|^e / sum |c_k|^alpha`` with ``e = (1-alpha)(alpha-gamma)/(1-alpha+gamma)``
      bounded on both sides (``0/0 = 1``).  The sup is scanned over ``j <= j_scan`` and window
      lengths on a doubling grid up to ``n_scan``; the verdict holds when the scanned sup is
      finite and grows by at most ``stability`` (relative) when the scan range doubles.
    """
    alpha = model.alpha
    out: dict = {"criterion": which}
    if which == "beta_summable":
        if beta is None or not (0 < beta < alpha and beta <= 1):
            raise ValueError(f"beta_summable needs 0 < beta < alpha and beta <= 1, got beta={beta}")
        s = _summability(seq, beta)
        out.update(s, beta=beta, verdict=FAILS if s["divergent"] else HOLDS)
        return out
    if which == "alpha_above_one":
        if not 1 < alpha < 2:
            return dict(out, verdict=INAPPLICABLE, reason=f"alpha={alpha} is outside (1, 2)")
        s = _summability(seq, 1.0)
        out.update(s, verdict=FAILS if s["divergent"] else HOLDS)
        return out
    if which == "bounded_ratio":
        if alpha > 1:
            return dict(out, verdict=INAPPLICABLE, reason=f"alpha={alpha} exceeds 1")
        M = model.h.bounded_ratio_constant()
        if M is None:
            return dict(out, verdict=INAPPLICABLE, reason=f"h of kind {model.h.kind} has no bounded ratio")
        s = _summability(seq, alpha)
        well = three_series_sum(seq, model)
        out.update(s, M=M, well_defined=well.finite,
                   verdict=HOLDS if not s["divergent"] and well.finite else FAILS)
        return out
    if which == "weak_regularity":
        if gamma is None or not 0 < gamma < alpha:
            raise ValueError(f"weak_regularity needs 0 < gamma < alpha, got gamma={gamma}")
        if not alpha < 1:
            return dict(out, verdict=INAPPLICABLE, reason=f"alpha={alpha} is not below 1")
        s = _summability(seq, alpha)
        # windows [j-n, j-1], j <= 0, become [j+1, j+n] after mirroring k -> -k
        right = np.abs(seq.coeff(np.arange(0, max(seq.hi, 0) + 1)))
        left = np.abs(seq.coeff(-np.arange(0, max(-seq.lo, 0) + 1)))
        extent = max(seq.hi, -seq.lo, 1)
        # finite support: scan well past the support so the 0/0 windows are seen
        default = max(extent // 2, 1) if seq.is_parametric else 2 * extent + 2
        j_scan = j_scan or default
        n_scan = n_scan or default
        if seq.is_parametric and j_scan + n_scan > extent:
            raise ValueError(f"scan range {j_scan} + {n_scan} exceeds the coefficient window {extent}")
        half_j, half_n = max(j_scan // 2, 1), max(n_scan // 2, 1)
        consts = {}
        for side, m in (("K_plus", right), ("K_minus", left)):
            full = _weak_regularity_constant(m, alpha, gamma, j_scan, n_scan)
            half = _weak_regularity_constant(m, alpha, gamma, half_j, half_n)
            consts[side] = full
            consts[side + "_half_scan"] = half
        stable = all(math.isfinite(consts[s]) and consts[s] <= consts[s + "_half_scan"] * (1 + stability)
                     for s in ("K_plus", "K_minus"))
        out.update(s, **consts, gamma=gamma, j_scan=j_scan, n_scan=n_scan,
                   exponent=(1 - alpha) * (alpha - gamma) / (1 - alpha + gamma),
                   verdict=HOLDS if stable and not s["divergent"] else FAILS)
        return out
    raise ValueError(f"unknown criterion {which!r}; expected one of {CRITERIA}")


# -- averages and array criteria --------------------------------------------------


def cesaro_average(b, n: int) -> float:
    """``(1/n) sum_{k>=1} min(k, n) |b_k|``.

    ``b`` is an array ``(b_1, b_2, ...)`` or a :class:`CoefficientSeq` whose
    entries with ``k >= 1`` are used; for a parametric sequence the omitted
    tail beyond the window is added with full weight (an upper bound when the
    window is shorter than ``n``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tail = 0.0
    if isinstance(b, CoefficientSeq):
        k = np.arange(max(1, b.lo), b.hi + 1)
        vals = np.abs(b.coeff(k)) if k.size else np.zeros(0)
        if b.is_parametric:
            tail = b.abs_tail(1.0).value / b.n_sides
    else:
        vals = np.abs(np.asarray(b, dtype=float))
        k = np.arange(1, vals.size + 1)
    return _fsum(np.minimum(k, n) * vals) / n + tail


def array_criterion(rows: Sequence, model: TailModel) -> list[float]:
    """``sum_j |c_{n,j}|^alpha h(1/|c_{n,j}|)`` per row; rows going to zero is equivalent to ``V_n -> 0``."""
    return [_fsum(three_series_terms(row, model)) for row in rows]


def boundary_array(seq: CoefficientSeq, n: int, a_n: float) -> np.ndarray:
    """``(A - d_{n,j}) / a_n`` for ``1 <= j <= n``: weights of ``A Z_n(1) - S_n^0(1)``."""
    A = aggregates(seq).A
    return (A - seq.d(n, np.arange(1, n + 1))) / a_n


def select_jn(row: Callable[[int], np.ndarray], n_max: int) -> np.ndarray:
    """Slowly growing ``j_n`` with ``sum_{j<=j_n} |a_{n,j}| -> 0`` and ``j_n / n -> 0``.

    Constructive: ``N_m`` is the first ``N > max(N_{m-1}, m^2)`` such that
    ``sum_{j<=m} |a_{n,j}| < 1/m`` for every ``N <= n <= n_max``, and ``j_n = m``
    on ``[N_m, N_{m+1})``.  Entries before ``N_1`` are 0 (empty sum).
    ``row(n)`` returns ``(a_{n,1}, ..., a_{n,n})``.
    """
    heads = {}
    for n in range(1, n_max + 1):
        r = np.abs(np.asarray(row(n), dtype=float))
        heads[n] = np.cumsum(r)
    jn = np.zeros(n_max + 1, dtype=np.int64)
    prev = 0
    m = 1
    while True:
        start = max(prev, m * m) + 1
        if start > n_max:
            break
        ok = np.array([m <= n and heads[n][m - 1] < 1.0 / m for n in range(start, n_max + 1)])
        # the condition must hold from N_m on, so take the start of the final good run
        bad = np.flatnonzero(~ok)
        n_m = start if bad.size == 0 else start + int(bad[-1]) + 1
        if n_m > n_max:
            break
        jn[n_m:] = m
        prev = n_m
        m += 1
    return jn[1:]
