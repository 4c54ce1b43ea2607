"""Linear processes ``X_i = sum_j c_j Y_{i-j}`` and their normalised partial-sum paths."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coefficients import CoefficientSeq
from .numerics import compensated_cumsum


class InnovationRangeError(ValueError):
    """The innovation window does not cover the indices a computation needs."""


@dataclass(frozen=True)
class InnovationWindow:
    """Innovations ``Y_lo, ..., Y_hi`` stored along the last axis of ``values``.

    Leading axes, if any, index independent replicates.
    """

    lo: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim == 0:
            raise ValueError("innovation window needs at least one axis")

    @property
    def hi(self) -> int:
        return self.lo + self.values.shape[-1] - 1

    def require(self, lo: int, hi: int) -> None:
        if lo < self.lo or hi > self.hi:
            missing = []
            if lo < self.lo:
                missing.append(f"{lo}..{self.lo - 1}")
            if hi > self.hi:
                missing.append(f"{self.hi + 1}..{hi}")
            raise InnovationRangeError(
                f"innovations cover {self.lo}..{self.hi}; missing indices {', '.join(missing)}")

    def slice(self, lo: int, hi: int) -> np.ndarray:
        """``Y_lo .. Y_hi`` inclusive."""
        self.require(lo, hi)
        return self.values[..., lo - self.lo: hi - self.lo + 1]

    def __getitem__(self, i: int):
        self.require(i, i)
        return self.values[..., i - self.lo]


def required_innovations(seq: CoefficientSeq, i_lo: int, i_hi: int) -> tuple[int, int]:
    """Index range of ``Y`` needed for ``X_{i_lo} .. X_{i_hi}``."""
    return i_lo - seq.hi, i_hi - seq.lo


class ProcessValues(NamedTuple):
    values: np.ndarray
    first_index: int
    omitted_abs_mass: float


def build_process(seq: CoefficientSeq, innovations: InnovationWindow, i_lo: int,
                  i_hi: int) -> ProcessValues:
    """``X_{i_lo} .. X_{i_hi}`` truncated to the active coefficient window.

    ``omitted_abs_mass`` is ``sum_{|j| > window} |c_j|`` of the untruncated
    family (zero for finite support), the coefficient mass left out.
    """
    if i_hi < i_lo:
        raise ValueError(f"empty index range {i_lo}..{i_hi}")
    lo, hi = required_innovations(seq, i_lo, i_hi)
    innovations.require(lo, hi)
    count = i_hi - i_lo + 1
    out = np.zeros(innovations.values.shape[:-1] + (count,))
    for j in np.flatnonzero(seq.values):
        cj = seq.values[j]
        j = seq.lo + int(j)
        out += cj * innovations.slice(i_lo - j, i_hi - j)
    return ProcessValues(out, i_lo, seq.abs_tail(1.0).value)


@dataclass(frozen=True)
class CadlagPath:
    """Step path on ``[0, 1]`` with ``value(t) = values[floor(n t)]`` and ``value(1) = values[n]``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n + 1,):
            raise ValueError(f"path of resolution n={self.n} needs {self.n + 1} values, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values) -> "CadlagPath":
        vals = np.asarray(values, dtype=float)
        return cls(vals.size - 1, vals)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    def index(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("t must lie in [0, 1]")
        return np.minimum(np.floor(self.n * t + 1e-12).astype(int), self.n)

    def __call__(self, t):
        out = self.values[self.index(t)]
        return out if np.ndim(out) else float(out)

    def _check(self, other):
        if isinstance(other, CadlagPath) and other.n != self.n:
            raise ValueError(f"grid mismatch: n={self.n} vs n={other.n}")
        return other.values if isinstance(other, CadlagPath) else other

    def __add__(self, other):
        return CadlagPath(self.n, self.values + self._check(other))

    def __sub__(self, other):
        return CadlagPath(self.n, self.values - self._check(other))

    def __mul__(self, scalar: float):
        return CadlagPath(self.n, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "value"])
            for t, v in zip(self.grid, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


def partial_sum_values(x, a_n: float) -> np.ndarray:
    """``(1/a_n) sum_{i<=k} x_i`` for ``k = 0..n`` along the last axis (compensated)."""
    if not a_n > 0:
        raise ValueError(f"a_n must be positive, got {a_n}")
    x = np.asarray(x, dtype=float)
    sums = compensated_cumsum(x, axis=-1) if x.shape[-1] else x
    zero = np.zeros(x.shape[:-1] + (1,))
    return np.concatenate([zero, sums], axis=-1) / a_n


def partial_sum_path(values, a_n: float) -> CadlagPath:
    """Path with ``values[k] = (1/a_n) sum_{i<=k} X_i`` and ``values[0] = 0``."""
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1:
        raise ValueError("partial_sum_path takes a single sequence; use partial_sum_values for batches")
    return CadlagPath(vals.size, partial_sum_values(vals, a_n))


def process_path(seq: CoefficientSeq, innovations: InnovationWindow, n: int, a_n: float) -> CadlagPath:
    """``S_n`` built from ``X_1 .. X_n``."""
    return partial_sum_path(build_process(seq, innovations, 1, n).values, a_n)


def innovation_path(innovations: InnovationWindow, n: int, a_n: float) -> CadlagPath:
    """``Z_n``: partial sums of ``Y_1 .. Y_n``."""
    return partial_sum_path(innovations.slice(1, n), a_n)


class Decomposition(NamedTuple):
    minus: float
    zero: float
    plus: float

    @property
    def total(self) -> float:
        return math.fsum(self)


def decompose_path(seq: CoefficientSeq, innovations: InnovationWindow, n: int, t: float,
                   a_n: float) -> Decomposition:
    """Split ``S_n(t) = sum_j (d_{[nt],j} / a_n) Y_j`` by ``j <= 0``, ``1 <= j <= [nt]``, ``j > [nt]``."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    k = min(int(math.floor(n * t + 1e-12)), n)
    if k == 0:
        return Decomposition(0.0, 0.0, 0.0)
    j_lo, j_hi = seq.nonzero_d_range(k)
    if j_hi < j_lo:
        return Decomposition(0.0, 0.0, 0.0)
    j = np.arange(j_lo, j_hi + 1)
    terms = seq.d(k, j) * innovations.slice(j_lo, j_hi) / a_n
    if terms.ndim != 1:
        raise ValueError("decompose_path works on a single replicate")
    parts = (terms[j <= 0], terms[(j >= 1) & (j <= k)], terms[j > k])
    return Decomposition(*(math.fsum(p.tolist()) for p in parts))


class SignedPaths(NamedTuple):
    plus: CadlagPath
    minus: CadlagPath
    absolute: CadlagPath


def split_pm_paths(seq: CoefficientSeq, innovations: InnovationWindow, n: int,
                   a_n: float) -> SignedPaths:
    """Paths of the filters ``c^+``, ``c^-`` and ``|c|`` on the same innovations.

    Each path is a sum over innovations with nonnegative weights, so
    ``S_n = T_n^+ - T_n^-`` holds pointwise.
    """
    return SignedPaths(process_path(seq.positive_part(), innovations, n, a_n),
                       process_path(seq.negative_part(), innovations, n, a_n),
                       process_path(seq.absolute(), innovations, n, a_n))
