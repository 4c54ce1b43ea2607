"""Reference law of ``Z(1)``: the strictly alpha-stable limit of ``a_n^-1 sum Y_i``.

With ``C = 1`` the Levy measure has density ``(p 1(x>0) + q 1(x<0)) alpha
|x|^{-1-alpha}``.  ``stable_oracle_chf`` integrates the Levy-Khintchine
exponent by adaptive quadrature; ``stable_oracle_sample`` draws with the
Chambers-Mallows-Stuck transform in the ``S_alpha(sigma, beta, 0)``
parametrisation obtained from ``stable_parameters``.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .innovations import make_rng


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


def _check(alpha: float, p: float, q: float) -> None:
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0) or abs(p + q - 1.0) > 1e-12:
        raise ValueError(f"need p, q in [0, 1] with p + q = 1, got p={p}, q={q}")
    if alpha == 1.0 and p != q:
        raise ValueError("alpha = 1 requires p = q = 1/2")


def stable_parameters(alpha: float, p: float, q: float) -> tuple[float, float]:
    """``(sigma, beta)`` of ``S_alpha(sigma, beta, 0)`` matching the Levy density above.

    ``sigma**alpha = Gamma(1 - alpha) cos(pi alpha / 2)`` (``pi/2`` at alpha = 1)
    and ``beta = p - q``.
    """
    _check(alpha, p, q)
    if alpha == 1.0:
        return math.pi / 2, 0.0
    s_alpha = gamma_fn(1.0 - alpha) * math.cos(math.pi * alpha / 2)
    return s_alpha ** (1.0 / alpha), p - q


def closed_form_chf(alpha: float, p: float, q: float, theta):
    """``exp(-sigma^a |t|^a (1 - i beta sign(t) tan(pi a / 2)))``; ``exp(-sigma |t|)`` at a = 1."""
    sigma, beta = stable_parameters(alpha, p, q)
    t = np.asarray(theta, dtype=float)
    if alpha == 1.0:
        out = np.exp(-sigma * np.abs(t)) + 0j
    else:
        out = np.exp(-(sigma ** alpha) * np.abs(t) ** alpha
                     * (1 - 1j * beta * np.sign(t) * math.tan(math.pi * alpha / 2)))
    return out if out.ndim else complex(out)


def _quad(f, a, b, **kw):
    val, err = integrate.quad(f, a, b, limit=400, **kw)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature error estimate {err:.3g} on [{a}, {b}]")
    return val


def _one_minus_cos_over_sq(x, theta):
    return -2.0 * math.sin(theta * x / 2) ** 2 / (x * x) if x else -theta * theta / 2


def _sin_minus_lin_over_cube(x, theta):
    y = theta * x
    if y < 1e-2:
        y2 = y * y
        return -theta ** 3 * (1.0 / 6 - y2 / 120 + y2 * y2 / 5040)
    return (math.sin(y) - y) / (x ** 3)


@functools.lru_cache(maxsize=4096)
def _positive_half(alpha: float, theta: float) -> complex:
    """``int_0^inf (e^{i theta x} - 1 [- i theta x]) alpha x^{-1-alpha} dx`` for theta > 0.

    The linear compensator is included only when alpha > 1.  The imaginary
    part is skipped at alpha = 1, where it diverges and cancels by symmetry.
    """
    x0 = 1.0 / theta
    # real part: integrand (cos - 1)/x^2 * x^{1-alpha} near 0, cosine-weighted tail
    re = _quad(lambda x: _one_minus_cos_over_sq(x, theta), 0.0, x0,
               weight="alg", wvar=(1.0 - alpha, 0.0))
    re += _quad(lambda x: x ** (-1.0 - alpha), x0, math.inf, weight="cos", wvar=theta)
    re -= x0 ** (-alpha) / alpha
    re *= alpha
    if alpha == 1.0:
        return complex(re, 0.0)
    tail = _quad(lambda x: x ** (-1.0 - alpha), x0, math.inf, weight="sin", wvar=theta)
    if alpha < 1.0:
        head = _quad(lambda x: math.sin(theta * x) / x if x else theta, 0.0, x0,
                     weight="alg", wvar=(-alpha, 0.0))
        im = head + tail
    else:
        head = _quad(lambda x: _sin_minus_lin_over_cube(x, theta), 0.0, x0,
                     weight="alg", wvar=(2.0 - alpha, 0.0))
        im = head + tail - theta * x0 ** (1.0 - alpha) / (alpha - 1.0)
    return complex(re, alpha * im)


def stable_oracle_chf(alpha: float, p: float, q: float, theta: float) -> complex:
    """Characteristic function of ``Z(1)`` by quadrature of its Levy-Khintchine exponent."""
    _check(alpha, p, q)
    theta = float(theta)
    if theta == 0.0:
        return 1.0 + 0j
    half = _positive_half(float(alpha), abs(theta))
    if theta < 0:
        half = half.conjugate()
    # negative half-line is the mirror image: conj of the positive one
    exponent = p * half + q * half.conjugate()
    if alpha == 1.0:
        exponent = complex(exponent.real, 0.0)
    return complex(np.exp(exponent))


def cms_transform(alpha: float, beta: float, v, w):
    """Chambers-Mallows-Stuck map of ``V ~ U(-pi/2, pi/2)``, ``W ~ Exp(1)`` to ``S_alpha(1, beta, 0)``."""
    if alpha == 1.0:
        if beta != 0.0:
            raise ValueError("only the symmetric case is supported at alpha = 1")
        return np.tan(v)
    t = beta * math.tan(math.pi * alpha / 2)
    b = math.atan(t) / alpha
    s = (1.0 + t * t) ** (1.0 / (2 * alpha))
    av = alpha * (v + b)
    return (s * np.sin(av) / np.cos(v) ** (1.0 / alpha)
            * (np.cos(v - av) / w) ** ((1.0 - alpha) / alpha))


def draw_stable(alpha: float, p: float, q: float, rng: np.random.Generator, size) -> np.ndarray:
    sigma, beta = stable_parameters(alpha, p, q)
    v = (rng.random(size) - 0.5) * math.pi
    w = rng.standard_exponential(size)
    return sigma * cms_transform(alpha, beta, v, w)


def stable_oracle_sample(alpha: float, p: float, q: float, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws of ``Z(1)``; identical seed gives identical output."""
    _check(alpha, p, q)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return draw_stable(alpha, p, q, make_rng(seed), int(count))


def empirical_chf(sample, theta) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    return np.array([np.mean(np.exp(1j * tt * x)) for tt in t])
