"""Coefficient sequences ``{c_j}`` of a linear process.

Every sequence is materialised on a finite index window ``[lo, hi]`` and is
zero outside it.  Parametric families (``power_log``, ``geometric``,
``power``) also remember the analytic magnitude law of the untruncated
family, so windowed sums can report what the truncation left out.
"""

from __future__ import annotations

import math
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .innovations import TailModel
from .numerics import TailAnalysis, analyse_tail, compensated_cumsum

KINDS = ("finite_support", "power_log", "geometric", "power")
SIGN_MODES = ("positive", "alternating", "antisymmetric")
SIDES = ("both", "right", "left")


class Aggregates(NamedTuple):
    A: float
    A_plus: float
    A_minus: float
    A_abs: float


class ThreeSeries(NamedTuple):
    """``sum_j |c_j|^alpha h(1/|c_j|)``: windowed value plus the family's omitted tail."""

    value: float
    tail: float
    divergent: bool

    @property
    def total(self) -> float:
        return math.inf if self.divergent else self.value + self.tail

    @property
    def finite(self) -> bool:
        return not self.divergent and math.isfinite(self.value)


def _signs(mode, idx: np.ndarray) -> np.ndarray:
    if isinstance(mode, str):
        if mode == "positive":
            return np.ones(idx.size)
        if mode == "alternating":
            return np.where(idx % 2 == 0, 1.0, -1.0)
        if mode == "antisymmetric":
            return np.where(idx >= 0, 1.0, -1.0)
        raise ValueError(f"unknown sign mode {mode!r}; expected one of {SIGN_MODES} or a list")
    mask = np.asarray(mode, dtype=float)
    if mask.shape != idx.shape:
        raise ValueError(f"explicit sign mask needs {idx.size} entries (indices {idx[0]}..{idx[-1]}), "
                         f"got {mask.size}")
    if not np.all(np.isin(mask, (-1.0, 0.0, 1.0))):
        raise ValueError("sign mask entries must be -1, 0 or +1")
    return mask


class CoefficientSeq:
    """Coefficients ``c_j`` on ``[lo, hi]`` with compensated prefix and suffix sums.

    Build with :meth:`finite`, :meth:`power_log`, :meth:`geometric` or
    :meth:`power`.  Instances are immutable after construction.
    """

    def __init__(self, lo: int, values, spec: Mapping, log_magnitude=None, tail_from: int = 0,
                 sides: str = "both"):
        vals = np.array(values, dtype=float).ravel()
        if vals.size and not np.all(np.isfinite(vals)):
            raise ValueError("coefficients must be finite")
        self.lo = int(lo)
        self.values = vals
        self.values.setflags(write=False)
        self.spec = dict(spec)
        # log|c| of the untruncated family as a function of u = log|j|
        self._log_magnitude = log_magnitude
        self._tail_from = int(tail_from)
        self._sides = sides
        self._prefix = compensated_cumsum(vals) if vals.size else np.zeros(0)
        self._suffix = compensated_cumsum(vals[::-1])[::-1] if vals.size else np.zeros(0)

    # -- constructors -------------------------------------------------------

    @classmethod
    def finite(cls, values: Sequence[float], offset: int = 0) -> "CoefficientSeq":
        """``c_{offset + i} = values[i]``."""
        vals = list(map(float, values))
        return cls(offset, vals, {"kind": "finite_support", "offset": int(offset), "values": vals})

    @classmethod
    def _parametric(cls, spec, magnitude, log_magnitude, start, window, signs, sides):
        if window < start:
            raise ValueError(f"window {window} is below the first active index {start}")
        if sides not in SIDES:
            raise ValueError(f"sides must be one of {SIDES}, got {sides!r}")
        lo = -window if sides in ("both", "left") else 0
        hi = window if sides in ("both", "right") else 0
        idx = np.arange(lo, hi + 1)
        mag = np.where(np.abs(idx) >= start, magnitude(np.abs(idx)), 0.0)
        if sides == "right":
            mag = np.where(idx >= 0, mag, 0.0)
        elif sides == "left":
            mag = np.where(idx <= 0, mag, 0.0)
        vals = _signs(signs, idx) * mag
        spec = dict(spec, window=int(window), sides=sides,
                    signs=signs if isinstance(signs, str) else [int(s) for s in signs])
        return cls(lo, vals, spec, log_magnitude, window, sides)

    @classmethod
    def power_log(cls, alpha: float, eps: float, window: int, signs="positive",
                  sides: str = "both") -> "CoefficientSeq":
        """``|c_j| = |j|^{-1/alpha} log^{-(1+eps)/alpha} |j|`` for ``3 <= |j| <= window``."""
        if not (0 < alpha < 2) or eps <= 0:
            raise ValueError("power_log needs alpha in (0, 2) and eps > 0")
        a, e = float(alpha), float(eps)

        def magnitude(j):
            j = np.maximum(j, 3).astype(float)
            return j ** (-1.0 / a) * np.log(j) ** (-(1.0 + e) / a)

        def log_magnitude(u):
            return -u / a - (1.0 + e) / a * np.log(u)

        return cls._parametric({"kind": "power_log", "alpha": a, "eps": e},
                               magnitude, log_magnitude, 3, int(window), signs, sides)

    @classmethod
    def geometric(cls, ratio: float, window: int, signs="positive",
                  sides: str = "both") -> "CoefficientSeq":
        """``|c_j| = ratio^{|j|}`` for ``|j| <= window``."""
        if not (0 < ratio < 1):
            raise ValueError(f"geometric ratio must lie in (0, 1), got {ratio}")
        r = float(ratio)
        log_r = math.log(r)
        return cls._parametric({"kind": "geometric", "ratio": r},
                               lambda j: r ** j.astype(float),
                               lambda u: np.exp(u) * log_r, 0, int(window), signs, sides)

    @classmethod
    def power(cls, exponent: float, window: int, signs="positive", sides: str = "both",
              start: int = 1) -> "CoefficientSeq":
        """``|c_j| = |j|^{-exponent}`` for ``start <= |j| <= window``."""
        if exponent <= 0 or start < 1:
            raise ValueError("power needs exponent > 0 and start >= 1")
        s = float(exponent)
        return cls._parametric({"kind": "power", "exponent": s, "start": int(start)},
                               lambda j: np.maximum(j, 1).astype(float) ** (-s),
                               lambda u: -s * u, int(start), int(window), signs, sides)

    @classmethod
    def from_config(cls, block: Mapping) -> "CoefficientSeq":
        kind = block.get("kind", "finite_support")
        if kind == "finite_support":
            return cls.finite(block.get("values", []), int(block.get("offset", 0)))
        if kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")
        common = dict(window=int(block["window"]), signs=block.get("signs", "positive"),
                      sides=block.get("sides", "both"))
        if kind == "power_log":
            return cls.power_log(float(block["alpha"]), float(block["eps"]), **common)
        if kind == "geometric":
            return cls.geometric(float(block["ratio"]), **common)
        if kind == "power":
            return cls.power(float(block["exponent"]), start=int(block.get("start", 1)), **common)
        raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")

    def to_config(self) -> dict:
        return dict(self.spec)

    # -- basic access -------------------------------------------------------

    @property
    def hi(self) -> int:
        return self.lo + self.values.size - 1

    @property
    def kind(self) -> str:
        return self.spec["kind"]

    @property
    def is_parametric(self) -> bool:
        return self._log_magnitude is not None

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def coeff(self, j):
        j = np.asarray(j)
        pos = j - self.lo
        inside = (pos >= 0) & (pos < self.values.size)
        out = np.where(inside, self.values[np.clip(pos, 0, max(self.values.size - 1, 0))]
                       if self.values.size else 0.0, 0.0)
        return out if out.ndim else float(out)

    def __repr__(self):
        return f"CoefficientSeq({self.spec!r}, lo={self.lo}, hi={self.hi})"

    def __eq__(self, other):
        return (isinstance(other, CoefficientSeq) and self.lo == other.lo
                and np.array_equal(self.values, other.values))

    __hash__ = None

    # -- prefix sums and d_{n,j} ----------------------------------------------

    def prefix(self, m):
        """``D(m) = sum_{k <= m} c_k``."""
        m = np.asarray(m)
        if not self.values.size:
            return np.zeros(m.shape) if m.ndim else 0.0
        pos = m - self.lo
        total = self._prefix[-1]
        out = np.where(pos < 0, 0.0, np.where(pos >= self.values.size, total,
                                              self._prefix[np.clip(pos, 0, self.values.size - 1)]))
        return out if out.ndim else float(out)

    def suffix(self, m):
        """``R(m) = sum_{k >= m} c_k``."""
        m = np.asarray(m)
        if not self.values.size:
            return np.zeros(m.shape) if m.ndim else 0.0
        pos = m - self.lo
        total = self._suffix[0]
        out = np.where(pos >= self.values.size, 0.0,
                       np.where(pos < 0, total, self._suffix[np.clip(pos, 0, self.values.size - 1)]))
        return out if out.ndim else float(out)

    def d(self, n, j):
        """``d_{n,j} = sum_{k=1-j}^{n-j} c_k``.

        Windows right of the origin (``j <= 0``) are differenced on suffix
        sums and the rest on prefix sums, so far-tail windows never subtract
        two numbers close to ``A``.
        """
        n = np.asarray(n)
        j = np.asarray(j)
        right = self.suffix(1 - j) - self.suffix(n - j + 1)
        left = self.prefix(n - j) - self.prefix(-j)
        out = np.where(j <= 0, right, left)
        return out if out.ndim else float(out)

    def nonzero_d_range(self, n: int) -> tuple[int, int]:
        """Indices ``j`` outside ``[1 - hi, n - lo]`` have ``d_{n,j} = 0``."""
        return 1 - self.hi, n - self.lo

    # -- algebra ---------------------------------------------------------------

    def _materialise(self, lo, hi):
        return np.array([self.coeff(j) for j in range(lo, hi + 1)]) if hi >= lo else np.zeros(0)

    def __add__(self, other: "CoefficientSeq") -> "CoefficientSeq":
        if not isinstance(other, CoefficientSeq):
            return NotImplemented
        if not self.values.size:
            return CoefficientSeq.finite(other.values, other.lo)
        if not other.values.size:
            return CoefficientSeq.finite(self.values, self.lo)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        idx = np.arange(lo, hi + 1)
        return CoefficientSeq.finite(self.coeff(idx) + other.coeff(idx), lo)

    def __mul__(self, scalar: float) -> "CoefficientSeq":
        return CoefficientSeq.finite(float(scalar) * self.values, self.lo)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def map_values(self, fn) -> "CoefficientSeq":
        """Elementwise transform keeping the window and the family's magnitude law."""
        out = CoefficientSeq(self.lo, fn(self.values), {"kind": "finite_support", "offset": self.lo,
                                                          "values": fn(self.values).tolist()},
                             self._log_magnitude, self._tail_from, self._sides)
        return out

    def positive_part(self) -> "CoefficientSeq":
        return self.map_values(lambda v: np.maximum(v, 0.0))

    def negative_part(self) -> "CoefficientSeq":
        return self.map_values(lambda v: np.maximum(-v, 0.0))

    def absolute(self) -> "CoefficientSeq":
        return self.map_values(np.abs)

    # -- tails of the untruncated family ---------------------------------------

    @property
    def n_sides(self) -> int:
        return 2 if self._sides == "both" else 1

    def tail_analysis(self, log_term) -> TailAnalysis:
        """Integral test on ``sum_{|j| > window} F(|c_j|)`` given ``log F`` of ``log|c|``.

        Finite-support sequences have no omitted tail.
        """
        if not self.is_parametric:
            return TailAnalysis(0.0, False, -math.inf, 0.0)
        res = analyse_tail(lambda u: log_term(self._log_magnitude(u)), self._tail_from)
        return res._replace(value=res.value * self.n_sides)

    def abs_tail(self, power: float = 1.0) -> TailAnalysis:
        """``sum_{|j| > window} |c_j|^power`` of the family (exact for geometric)."""
        if self.kind == "geometric" and self.is_parametric:
            rp = self.spec["ratio"] ** power
            val = self.n_sides * rp ** (self._tail_from + 1) / (1.0 - rp)
            return TailAnalysis(val, False, -math.inf, 0.0)
        return self.tail_analysis(lambda lc: power * lc)


def coeff(seq: CoefficientSeq, j):
    """``c_j``; zero outside the active window."""
    return seq.coeff(j)


def d_coefficient(seq: CoefficientSeq, n, j):
    """``d_{n,j} = sum_{k=1-j}^{n-j} c_k`` in constant time from the prefix tables."""
    if np.any(np.asarray(n) < 1):
        raise ValueError("n must be >= 1")
    return seq.d(n, j)


def aggregates(seq: CoefficientSeq) -> Aggregates:
    """``(A, A_plus, A_minus, A_abs)`` over the active window."""
    v = seq.values.tolist()
    a_plus = math.fsum(max(x, 0.0) for x in v)
    a_minus = math.fsum(max(-x, 0.0) for x in v)
    return Aggregates(math.fsum(v), a_plus, a_minus, math.fsum(abs(x) for x in v))


def three_series_terms(c, model: TailModel) -> np.ndarray:
    """``|c|^alpha h(1/|c|)`` elementwise, zero where ``c = 0``."""
    c = np.abs(np.asarray(c, dtype=float))
    nz = c > 0
    lc = np.log(np.where(nz, c, 1.0))
    return np.where(nz, np.exp(model.alpha * lc + model.h.log_h(-lc)), 0.0)


def three_series_sum(seq: CoefficientSeq, model: TailModel) -> ThreeSeries:
    """``sum_j |c_j|^alpha h(|c_j|^{-1})`` with the untruncated family's tail.

    A finite total means the linear process is almost surely well defined.
    """
    value = math.fsum(three_series_terms(seq.values, model).tolist())
    tail = seq.tail_analysis(lambda lc: model.alpha * lc + model.h.log_h(-lc))
    if seq.kind == "geometric" and seq.is_parametric and model.h.kind == "constant":
        tail = seq.abs_tail(model.alpha)
        tail = tail._replace(value=tail.value * model.h.C)
    return ThreeSeries(value, tail.value, tail.divergent)
