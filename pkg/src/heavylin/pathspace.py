"""Functionals of step paths: the three-point distance ``H``, the ``M1`` modulus,
oscillation counts, sup-norm, smoothing integrals and ``L^beta`` discrepancies.

Every functional is evaluated on grid points only, which is exact for the
step paths built here.  Array-level kernels (``*_values``) work along the
last axis so a batch of replicate paths is processed in one call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import ndimage

from .linproc import CadlagPath


def h_distance(a, b, c):
    """Distance from ``b`` to the closed interval with endpoints ``a`` and ``c``."""
    a, b, c = np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)
    lo, hi = np.minimum(a, c), np.maximum(a, c)
    out = np.maximum(np.maximum(lo - np.minimum(lo, b), np.maximum(hi, b) - hi), 0.0)
    return out if out.ndim else float(out)


def _values(path) -> np.ndarray:
    return path.values if isinstance(path, CadlagPath) else np.asarray(path, dtype=float)


def _resolution(path) -> int:
    return _values(path).shape[-1] - 1


def window_steps(delta: float, n: int) -> int:
    """Grid steps ``m`` with ``t2 - delta <= t1`` iff ``k2 - k1 <= m``."""
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return int(math.floor(delta * n + 1e-9))


def _trailing(x, m, fn):
    """``fn`` over ``x[i-m+1 .. i]`` (clipped at 0) along the last axis."""
    return fn(x, size=m, axis=-1, mode="nearest", origin=(m - 1) // 2)


def w_m1_values(x, m: int) -> np.ndarray:
    """``M1`` modulus of grid paths for a window of ``m`` steps, along the last axis.

    For a middle point ``k`` the sup of ``H`` over ``a`` left and ``c`` right of
    it is ``max(min(maxL, maxR) - b, b - max(minL, minR), 0)``; left and right
    extrema come from running filters.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] - 1
    if m < 1 or n < 2:
        return np.zeros(x.shape[:-1])
    left_max = _trailing(x, m, ndimage.maximum_filter1d)[..., :-2]
    left_min = _trailing(x, m, ndimage.minimum_filter1d)[..., :-2]
    rev = x[..., ::-1]
    right_max = _trailing(rev, m, ndimage.maximum_filter1d)[..., ::-1][..., 2:]
    right_min = _trailing(rev, m, ndimage.minimum_filter1d)[..., ::-1][..., 2:]
    b = x[..., 1:-1]
    over = b - np.maximum(left_min, right_min)
    under = np.minimum(left_max, right_max) - b
    return np.maximum(np.maximum(over, under), 0.0).max(axis=-1)


def w_m1(path, delta: float) -> float:
    """``sup H(x(t1), x(t2), x(t3))`` over grid triples with ``t2 - delta <= t1 < t2 < t3 <= t2 + delta``."""
    x = _values(path)
    out = w_m1_values(x, window_steps(delta, _resolution(path)))
    return out if np.ndim(out) else float(out)


def _grid_slice(n: int, s: float, t: float) -> slice:
    if not 0 <= s < t <= 1:
        raise ValueError(f"need 0 <= s < t <= 1, got s={s}, t={t}")
    lo = int(math.floor(n * s + 1e-12))
    hi = min(int(math.floor(n * t + 1e-12)), n)
    return slice(lo, hi + 1)


def count_eta_values(x, eta) -> np.ndarray:
    """Greedy ``eta``-oscillation count of each path along the last axis.

    ``eta`` is a scalar or one level per path.  The window of candidates
    restarts at the point that completed an oscillation, since consecutive
    pairs may share an endpoint.
    """
    x = np.asarray(x, dtype=float)
    x2 = x.reshape(-1, x.shape[-1])
    level = np.broadcast_to(np.asarray(eta, dtype=float), x.shape[:-1]).reshape(-1)
    if not np.all(level > 0):
        raise ValueError(f"eta must be positive, got {eta}")
    lo = x2[:, 0].copy()
    hi = x2[:, 0].copy()
    count = np.zeros(x2.shape[0], dtype=np.int64)
    for k in range(1, x2.shape[1]):
        v = x2[:, k]
        np.minimum(lo, v, out=lo)
        np.maximum(hi, v, out=hi)
        hit = hi - lo > level
        count += hit
        lo[hit] = v[hit]
        hi[hit] = v[hit]
    return count.reshape(x.shape[:-1])


def count_eta_oscillations(path, eta: float, s: float = 0.0, t: float = 1.0):
    """Largest ``N`` with ``s <= t1 < t2 <= t3 < t4 <= ... < t_2N <= t`` and every pair moving by more than ``eta``."""
    x = _values(path)
    out = count_eta_values(x[..., _grid_slice(_resolution(path), s, t)], eta)
    return int(out) if out.ndim == 0 else out


def sup_norm(path):
    out = np.abs(_values(path)).max(axis=-1)
    return out if np.ndim(out) else float(out)


def three_point_sup(path, s: float = 0.0, t: float = 1.0) -> float:
    """``sup H(x(u1), x(u2), x(u3))`` over all grid triples ``s <= u1 < u2 < u3 <= t``."""
    x = _values(path)[_grid_slice(_resolution(path), s, t)]
    if x.size < 3:
        return 0.0
    return float(w_m1_values(x, x.size))


@dataclass(frozen=True)
class Integrand:
    """Continuous ``g`` for smoothing integrals: ``identity``, ``abs_power`` or a piecewise-linear ``table``."""

    kind: str = "identity"
    power: float = 1.0
    knots: tuple = ()
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("identity", "abs_power", "table"):
            raise ValueError(f"unknown integrand kind {self.kind!r}")
        if self.kind == "abs_power" and not self.power > 0:
            raise ValueError("abs_power needs a positive exponent")
        if self.kind == "table":
            k = np.asarray(self.knots, float)
            if k.size < 2 or k.size != len(self.table) or np.any(np.diff(k) <= 0):
                raise ValueError("table integrand needs >= 2 increasing knots with matching values")

    @classmethod
    def abs_power(cls, power: float) -> "Integrand":
        return cls("abs_power", power=float(power))

    @classmethod
    def from_table(cls, knots: Sequence[float], values: Sequence[float]) -> "Integrand":
        return cls("table", knots=tuple(map(float, knots)), table=tuple(map(float, values)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "identity":
            return x
        if self.kind == "abs_power":
            return np.abs(x) ** self.power
        # constant extrapolation keeps g continuous and bounded
        return np.interp(x, self.knots, self.table)


def step_integral(values, t: float = 1.0) -> np.ndarray:
    """``int_0^t v(s) ds`` for the step function ``v(s) = values[floor(n s)]``, along the last axis."""
    v = np.asarray(values, dtype=float)
    n = v.shape[-1] - 1
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    k = min(int(math.floor(n * t + 1e-12)), n)
    whole = v[..., :k].sum(axis=-1) / n
    frac = t - k / n
    return whole + (v[..., k] * frac if k < n and frac > 0 else 0.0)


def smoothing_functional(path, g: Integrand, t: float = 1.0):
    """``int_0^t g(x(s)) ds`` (Lebesgue measure), exact for step paths."""
    out = step_integral(g(_values(path)), t)
    return out if np.ndim(out) else float(out)


def lbeta_discrepancy(path_s, path_z, A: float, beta: float):
    """``int_0^1 |S_n(t) - A Z_n(t)|^beta dt`` as an exact step-function integral."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s, z = _values(path_s), _values(path_z)
    if s.shape[-1] != z.shape[-1]:
        raise ValueError(f"grid mismatch: {s.shape[-1] - 1} vs {z.shape[-1] - 1} steps")
    diff = np.abs(s - A * z) ** beta
    out = diff[..., :-1].mean(axis=-1)
    return out if np.ndim(out) else float(out)


def discrete_discrepancy(x, y, A: float, beta: float, a_n: float) -> float:
    """``(1/(n a_n^beta)) sum_{k=1}^n |sum_{i<=k} (X_i - A Y_i)|^beta`` summed directly."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    n = x.size
    total, terms = 0.0, []
    for xi, yi in zip(x.tolist(), y.tolist()):
        total = math.fsum([total, xi, -A * yi])
        terms.append(abs(total) ** beta)
    return math.fsum(terms) / (n * a_n ** beta)


@dataclass
class ModulusReport:
    """Sup-norm, ``M1`` moduli per ``delta`` and oscillation counts per ``eta`` of one path."""

    sup_norm: float
    w_m1: dict = field(default_factory=dict)
    n_eta: dict = field(default_factory=dict)

    @classmethod
    def of(cls, path, deltas: Sequence[float] = (), etas: Sequence[float] = ()) -> "ModulusReport":
        return cls(sup_norm(path), {float(d): w_m1(path, d) for d in sorted(deltas)},
                   {float(e): count_eta_oscillations(path, e) for e in sorted(etas)})

    def to_dict(self) -> dict:
        return {"sup_norm": self.sup_norm,
                "w_m1": {repr(k): v for k, v in self.w_m1.items()},
                "n_eta": {repr(k): v for k, v in self.n_eta.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModulusReport":
        return cls(float(data["sup_norm"]), {float(k): float(v) for k, v in data["w_m1"].items()},
                   {float(k): int(v) for k, v in data["n_eta"].items()})
