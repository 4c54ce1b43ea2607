"""Heavy-tailed innovation laws.

The law of ``|Y|`` is fixed exactly by its tail ``P(|Y| > x) = min(1,
x**-alpha * h(x))`` with a slowly varying ``h``; the sign is ``+`` with
probability ``p`` and ``-`` with probability ``q``.  For ``alpha > 1`` the
draws are shifted to mean zero.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import integrate, interpolate, optimize
from scipy.interpolate import PchipInterpolator

SLOWLY_VARYING_KINDS = ("constant", "log_power", "karamata")

_PARAM_NAMES = {
    "constant": ("C",),
    "log_power": ("rho", "C"),
    "karamata": ("c_limit", "gamma0"),
}


def make_rng(seed: int, lane: int | None = None) -> np.random.Generator:
    """Counter-based generator for ``seed`` (optionally a sub-lane of it)."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    if lane is not None:
        key.append(int(lane))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


# -- Karamata integral table ----------------------------------------------
#
# J(v) = int_0^v dw / log(e + e^w), so that int_1^x eps(u)/u du = gamma0 * J(log x)
# for eps(u) = gamma0 / log(e + u).

_J_LO, _J_HI, _J_STEP = -60.0, 3000.0, 0.005


@functools.lru_cache(maxsize=1)
def _karamata_table():
    grid = np.arange(_J_LO, _J_HI + _J_STEP / 2, _J_STEP)
    f = 1.0 / np.logaddexp(1.0, grid)
    cum = integrate.cumulative_simpson(f, x=grid, initial=0.0)
    # J' is known exactly, so a Hermite spline keeps J smooth for quadrature
    spline = interpolate.CubicHermiteSpline(grid, cum, f)
    zero = float(spline(0.0))
    return grid, cum - zero, interpolate.CubicHermiteSpline(grid, cum - zero, f)


def _karamata_J(v):
    grid, cum, spline = _karamata_table()
    v = np.asarray(v, dtype=float)
    out = spline(np.clip(v, _J_LO, _J_HI))
    hi = v > _J_HI
    if np.any(hi):
        out = np.where(hi, cum[-1] + np.log(np.where(hi, v, _J_HI) / _J_HI), out)
    lo = v < _J_LO
    if np.any(lo):
        out = np.where(lo, cum[0] + (v - _J_LO), out)
    return out


@dataclass(frozen=True)
class SlowlyVarying:
    """Slowly varying factor ``h`` of the innovation tail.

    ``constant``: ``h = C``.  ``log_power``: ``h(x) = C * log(e + x)**rho``.
    ``karamata``: ``h(x) = c_limit * exp(int_1^x eps(u)/u du)`` with
    ``eps(u) = gamma0 / log(e + u)``.
    """

    kind: str = "constant"
    C: float = 1.0
    rho: float = 0.0
    gamma0: float = 0.0

    def __post_init__(self):
        if self.kind not in SLOWLY_VARYING_KINDS:
            raise ValueError(f"unknown slowly varying kind {self.kind!r}; "
                             f"expected one of {SLOWLY_VARYING_KINDS}")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError(f"h constant must be positive and finite, got {self.C}")

    @classmethod
    def constant(cls, C: float = 1.0) -> "SlowlyVarying":
        return cls("constant", C=C)

    @classmethod
    def log_power(cls, rho: float, C: float = 1.0) -> "SlowlyVarying":
        return cls("log_power", C=C, rho=rho)

    @classmethod
    def karamata(cls, c_limit: float = 1.0, gamma0: float = 0.1) -> "SlowlyVarying":
        return cls("karamata", C=c_limit, gamma0=gamma0)

    @classmethod
    def from_params(cls, kind: str, params: Mapping | None = None) -> "SlowlyVarying":
        params = dict(params or {})
        if kind not in _PARAM_NAMES:
            raise ValueError(f"unknown slowly varying kind {kind!r}")
        unknown = set(params) - set(_PARAM_NAMES[kind])
        if unknown:
            raise ValueError(f"unexpected parameters for h.kind={kind!r}: {sorted(unknown)}")
        if kind == "constant":
            return cls.constant(float(params.get("C", 1.0)))
        if kind == "log_power":
            return cls.log_power(float(params.get("rho", 1.0)), float(params.get("C", 1.0)))
        return cls.karamata(float(params.get("c_limit", 1.0)), float(params.get("gamma0", 0.1)))

    @property
    def params(self) -> dict:
        if self.kind == "constant":
            return {"C": self.C}
        if self.kind == "log_power":
            return {"rho": self.rho, "C": self.C}
        return {"c_limit": self.C, "gamma0": self.gamma0}

    def log_h(self, log_x):
        """``log h(e^t)`` evaluated at ``t = log_x`` (vectorised)."""
        t = np.asarray(log_x, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, math.log(self.C)) if t.ndim else math.log(self.C)
        if self.kind == "log_power":
            out = math.log(self.C) + self.rho * np.log(np.logaddexp(1.0, t))
        else:
            out = math.log(self.C) + self.gamma0 * _karamata_J(t)
        return out if np.ndim(out) else float(out)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(self.log_h(np.log(x)))
        return out if out.ndim else float(out)

    def bounded_ratio_constant(self) -> float | None:
        """``M`` with ``h(lam x)/h(x) <= M`` for all ``lam >= 1``, or None if unbounded."""
        if self.kind == "constant":
            return 1.0
        growth = self.rho if self.kind == "log_power" else self.gamma0
        # h is nonincreasing when growth <= 0
        return 1.0 if growth <= 0 else None


@dataclass(frozen=True)
class TailModel:
    """Innovation law: tail index, tail balance ``(p, q)`` and slowly varying factor."""

    alpha: float
    p: float = 0.5
    q: float = 0.5
    h: SlowlyVarying = field(default_factory=SlowlyVarying)
    centered: bool = True

    def __post_init__(self):
        a = self.alpha
        if not (0.0 < a < 2.0):
            raise ValueError(f"alpha must lie in (0, 2), got {a}")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"p and q must lie in [0, 1], got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > 1e-12:
            raise ValueError(f"p + q must equal 1, got {self.p + self.q}")
        if a == 1.0 and self.p != self.q:
            raise ValueError("alpha = 1 requires symmetric innovations (p = q = 1/2)")
        if self.h.kind == "karamata" and not (self.h.gamma0 < a):
            raise ValueError("karamata h needs gamma0 < alpha for a proper tail")

    @property
    def is_pure_pareto(self) -> bool:
        return self.h.kind == "constant" and self.h.C == 1.0

    def log_tail_raw(self, log_x):
        """``log(x**-alpha * h(x))`` without the cap at 1."""
        t = np.asarray(log_x, dtype=float)
        return -self.alpha * t + self.h.log_h(t)

    @functools.cached_property
    def log_x_min(self) -> float:
        """Log of the point where ``x**-alpha h(x)`` reaches 1; ``|Y|`` lives above it."""
        if self.h.kind == "constant":
            return math.log(self.h.C) / self.alpha
        f = lambda t: float(self.log_tail_raw(t))
        lo, hi = -1.0, 1.0
        while f(lo) <= 0:
            lo *= 2
            if lo < -1e4:
                raise ValueError("tail function never reaches 1: malformed slowly varying h")
        while f(hi) >= 0:
            hi *= 2
            if hi > 1e5:
                raise ValueError("tail function never drops below 1: malformed slowly varying h")
        return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)

    def tail(self, x):
        """``P(|Y| > x)`` of the uncentred law."""
        x = np.asarray(x, dtype=float)
        inside = x > math.exp(self.log_x_min)
        safe = np.where(inside, x, 1.0)
        out = np.where(inside, np.exp(np.minimum(self.log_tail_raw(np.log(safe)), 0.0)), 1.0)
        return out if out.ndim else float(out)

    @functools.cached_property
    def mean_abs(self) -> float:
        """``E|Y|`` of the uncentred law (finite only for alpha > 1)."""
        if self.alpha <= 1:
            return math.inf
        x_min = math.exp(self.log_x_min)
        if self.h.kind == "constant":
            return x_min * self.alpha / (self.alpha - 1.0)
        g = lambda t: math.exp(t + float(self.log_tail_raw(t)))
        t0 = self.log_x_min
        v1, _ = integrate.quad(g, t0, t0 + 50.0, limit=400, epsabs=0, epsrel=1e-10)
        # the far piece is small next to v1, so an absolute target suffices
        v2, _ = integrate.quad(g, t0 + 50.0, math.inf, limit=400, epsabs=1e-14 * max(v1, 1.0),
                               epsrel=1e-11)
        return x_min + v1 + v2

    @property
    def shift(self) -> float:
        """Constant subtracted from every draw (``E[sign * |Y|]`` when centring)."""
        if self.centered and self.alpha > 1:
            return (self.p - self.q) * self.mean_abs
        return 0.0

    def to_config(self, seed: int | None = None) -> dict:
        out = {"alpha": self.alpha, "p": self.p, "q": self.q,
               "h": {"kind": self.h.kind, "params": self.h.params}}
        if not self.centered:
            out["centered"] = False
        if seed is not None:
            out["seed"] = int(seed)
        return out

    @classmethod
    def from_config(cls, block: Mapping) -> "TailModel":
        h_block = block.get("h", {"kind": "constant"})
        h = SlowlyVarying.from_params(h_block.get("kind", "constant"), h_block.get("params", {}))
        p = float(block.get("p", 0.5))
        q = float(block.get("q", 1.0 - p))
        return cls(float(block["alpha"]), p, q, h, bool(block.get("centered", True)))


@dataclass
class NormingTable:
    """Norming constants ``a_n`` with ``n P(|Y| > a_n) = 1``."""

    entries: dict = field(default_factory=dict)
    C: float = 1.0

    @classmethod
    def build(cls, model: TailModel, ns) -> "NormingTable":
        return cls({int(n): norming_constant(model, int(n)) for n in sorted(set(ns))})

    def __getitem__(self, n: int) -> float:
        return self.entries[n]


def norming_constant(model: TailModel, n: int) -> float:
    """``a_n`` solving ``n * P(|Y| > a_n) = 1`` on the exact tail of ``model``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return math.exp(model.log_x_min)
    if model.h.kind == "constant":
        return (model.h.C * n) ** (1.0 / model.alpha)
    target = -math.log(n)
    f = lambda t: float(model.log_tail_raw(t)) - target
    lo = model.log_x_min
    hi = lo + 1.0
    while f(hi) > 0:
        hi = lo + 2 * (hi - lo)
        if hi - lo > 1e5:
            raise ValueError("tail function is not invertible on the search bracket")
    if f(lo) < 0:
        raise ValueError("tail function is not invertible on the search bracket")
    t = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    a_n = math.exp(t)
    check = n * model.tail(a_n)
    if abs(check - 1.0) > 1e-6:
        raise ValueError(f"norming root check failed: n*P(|Y|>a_n) = {check}")
    return a_n


class _Quantile:
    """Inverse of ``u -> P(|Y| > x)``, in log coordinates: ``s = -log u -> log x``."""

    def __init__(self, model: TailModel):
        self.model = model
        t0 = model.log_x_min
        # extend until u underflows double precision
        span = 760.0 / model.alpha + 10.0
        t = np.linspace(t0, t0 + span, 40001)
        s = -model.log_tail_raw(t)
        s[0] = max(s[0], 0.0)
        if np.any(np.diff(s) <= 0):
            raise ValueError("tail function is not monotone on its support: malformed slowly varying h")
        self._t0 = t0
        self._interp = PchipInterpolator(s, t, extrapolate=True)

    def log_x(self, s):
        t = self._interp(s)
        # one Newton polish on -log G(t) = s
        m = self.model
        eps = 1e-6
        g = -m.log_tail_raw(t)
        dg = (m.log_tail_raw(t - eps) - m.log_tail_raw(t + eps)) / (2 * eps)
        t = t - (g - s) / dg
        return np.maximum(t, self._t0)


@functools.lru_cache(maxsize=32)
def _quantile(model: TailModel) -> _Quantile:
    return _Quantile(model)


def abs_quantile(model: TailModel, u):
    """``x`` with ``P(|Y| > x) = u`` for ``u`` in ``(0, 1]``."""
    u = np.asarray(u, dtype=float)
    if model.h.kind == "constant":
        return (model.h.C / u) ** (1.0 / model.alpha)
    return np.exp(_quantile(model).log_x(-np.log(u)))


def draw_innovations(model: TailModel, rng: np.random.Generator, size) -> np.ndarray:
    """I.i.d. draws from ``model`` using ``rng``."""
    u = 1.0 - rng.random(size)  # in (0, 1]
    signs = np.where(rng.random(size) < model.p, 1.0, -1.0)
    y = signs * abs_quantile(model, u)
    shift = model.shift
    return y - shift if shift else y


def sample_innovations(model: TailModel, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. innovations; identical seed gives identical output."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return draw_innovations(model, make_rng(seed), int(count))


def truncated_moment(sample, x: float, power: float, above: bool = False) -> float:
    """Monte Carlo ``E[|Y|^power 1(|Y| <= x)]`` (or ``> x`` with ``above``)."""
    a = np.abs(np.asarray(sample, dtype=float))
    mask = a > x if above else a <= x
    return math.fsum((a[mask] ** power).tolist()) / a.size


# Named members used by the invariant checks and the documentation.
CATALOG = {
    "pareto": SlowlyVarying.constant(1.0),
    "scaled": SlowlyVarying.constant(2.0),
    "log_slow": SlowlyVarying.log_power(0.1),
    "log_inverse": SlowlyVarying.log_power(-0.1),
    "karamata": SlowlyVarying.karamata(1.0, 0.1),
}
