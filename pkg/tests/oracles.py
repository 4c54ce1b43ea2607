"""Independent brute-force oracles shared by the module tests and the acceptance suite."""

import functools
import math

import numpy as np


def h_naive(a, b, c):
    """Distance from b to the interval [min(a, c), max(a, c)], written out by cases."""
    lo, hi = min(a, c), max(a, c)
    if b < lo:
        return lo - b
    if b > hi:
        return b - hi
    return 0.0


def w_m1_brute(x, m):
    """Exhaustive scan of all triples k1 < k2 < k3 with both gaps at most m."""
    best = 0.0
    n = len(x)
    for k2 in range(1, n - 1):
        for k1 in range(max(0, k2 - m), k2):
            for k3 in range(k2 + 1, min(n - 1, k2 + m) + 1):
                best = max(best, h_naive(x[k1], x[k2], x[k3]))
    return best


def count_eta_brute(x, eta):
    """Maximise over every admissible chain t1 < t2 <= t3 < t4 <= ... by full recursion."""
    x = list(map(float, x))

    @functools.lru_cache(maxsize=None)
    def best(start):
        top = 0
        for i in range(start, len(x)):
            for j in range(i + 1, len(x)):
                if abs(x[j] - x[i]) > eta:
                    top = max(top, 1 + best(j))
        return top

    return best(0)


def cesaro_brute(b, n):
    """(1/n) sum_{j>=0} sum_{k=j+1}^{j+n} |b_k| for b = (b_1, b_2, ...) as a literal double loop."""
    b = [abs(float(v)) for v in b]
    total = 0.0
    for j in range(len(b)):
        for k in range(j + 1, j + n + 1):
            if k <= len(b):
                total += b[k - 1]
    return total / n


def riemann(values, t, points):
    """Midpoint rule for int_0^t v(s) ds, v(s) = values[floor(n s)]; exact once cells align with steps."""
    n = len(values) - 1
    s = (np.arange(points) + 0.5) * (t / points)
    idx = np.minimum(np.floor(n * s).astype(int), n)
    return float(np.asarray(values, float)[idx].sum() * (t / points))


def random_paths(rng, count, size, kind="walk"):
    """``count`` random grid paths of ``size`` points as rows of an array."""
    if kind == "walk":
        steps = rng.normal(size=(count, size - 1))
    elif kind == "jumps":
        steps = rng.choice([0.0, 0.0, 1.0, -1.0, 2.5], size=(count, size - 1)) * rng.random((count, size - 1))
    else:
        return rng.normal(size=(count, size))
    return np.concatenate([np.zeros((count, 1)), np.cumsum(steps, axis=1)], axis=1)


def random_path(rng, size, kind="walk"):
    return random_paths(rng, 1, size, kind)[0]


def exhaustive_sum(f, lo, hi):
    return math.fsum(f(k) for k in range(lo, hi + 1))
