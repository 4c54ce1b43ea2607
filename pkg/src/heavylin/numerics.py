"""Small numeric kernels shared by the rest of the package.

Compensated (Neumaier) prefix sums and the regular-variation analysis of
series tails used to attach explicit truncation bounds to windowed sums.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate


def compensated_cumsum(x, axis: int = -1) -> np.ndarray:
    """Neumaier-compensated running sum along ``axis``.

    One-dimensional input runs a scalar loop; higher-dimensional input is
    vectorised over every axis except ``axis``.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.copy()
    if arr.ndim == 1:
        out = np.empty_like(arr)
        s = 0.0
        comp = 0.0
        for i, v in enumerate(arr.tolist()):
            t = s + v
            if abs(s) >= abs(v):
                comp += (s - t) + v
            else:
                comp += (v - t) + s
            s = t
            out[i] = s + comp
        return out

    moved = np.moveaxis(arr, axis, -1)
    out = np.empty_like(moved)
    s = np.zeros(moved.shape[:-1])
    comp = np.zeros(moved.shape[:-1])
    for i in range(moved.shape[-1]):
        v = moved[..., i]
        t = s + v
        big = np.abs(s) >= np.abs(v)
        comp += np.where(big, (s - t) + v, (v - t) + s)
        s = t
        out[..., i] = s + comp
    return np.moveaxis(out, -1, axis)


def compensated_sum(x) -> float:
    return math.fsum(np.asarray(x, dtype=float).ravel().tolist())


class TailAnalysis(NamedTuple):
    """Outcome of the integral test on the tail of a positive series.

    ``value`` is ``int_{x0}^inf f(x) dx``, an upper bound on ``sum_{j > x0}
    f(j)`` whenever ``f`` decreases beyond ``x0``; ``inf`` when divergent.
    ``growth`` and ``log_power`` are the fitted exponents of
    ``x f(x) ~ x^growth (log x)^log_power``.
    """

    value: float
    divergent: bool
    growth: float
    log_power: float


def analyse_tail(log_term: Callable[[np.ndarray], np.ndarray], x0: float,
                 tol: float = 1e-3) -> TailAnalysis:
    """Integral test for ``sum_{j > x0} f(j)`` given ``log f(e^u)`` as a function of ``u``.

    The integrand after ``x = e^u`` is ``g(u) = exp(u + log f(e^u))``.  Its
    log is fitted as ``lam*u + kappa*log(u) + c`` at three far points;
    ``lam > 0`` or (``lam ~ 0`` and ``kappa >= -1``) certifies divergence.
    """
    u0 = math.log(max(x0, 1.0))

    def log_g(u):
        u = np.asarray(u, dtype=float)
        return u + log_term(u)

    base = max(2.0 * u0, 40.0)
    us = np.array([base, 2.0 * base, 4.0 * base])
    lg = log_g(us)
    if np.all(np.isneginf(lg[1:])):
        lam, kappa = -math.inf, 0.0
    elif not np.all(np.isfinite(lg)):
        lam, kappa = math.inf, 0.0
    else:
        design = np.column_stack([us, np.log(us), np.ones(3)])
        lam, kappa, _ = np.linalg.solve(design, lg)
        # the log-log fit is ill-conditioned; snap tiny rates
        if abs(lam) < tol / base:
            lam = 0.0

    divergent = lam > 0 or (lam == 0.0 and kappa >= -1.0 - tol)
    if divergent:
        return TailAnalysis(math.inf, True, float(lam), float(kappa))

    def g(u):
        return math.exp(float(log_g(u)))

    # split so QUADPACK sees the bulk on a finite interval
    mid = u0 + 60.0
    v1, _ = integrate.quad(g, u0, mid, limit=400)
    v2, _ = integrate.quad(g, mid, math.inf, limit=400)
    return TailAnalysis(v1 + v2, False, float(lam), float(kappa))
