"""Connectivity probabilities, Stepanov's asymptotic and the large-deviation functions.

Parametrisation: ``P_n(s)`` is the probability that ER(n, 1 - e^{-s}) is connected
and ``y = n s``.  The expected number of components of order k is

    E_{n,k}(y/n) = C(n, k) exp(-y k (1 - k/n)) P_k(y/n).
"""
from __future__ import annotations

import csv
import itertools
import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np

from .analytic import DomainError
from .graphproc import UnionFind, sample_edge_stream

_START_DPS = 40
_MAX_DPS = 5000

_cache_lock = threading.Lock()
_cache: dict[float, list[float]] = {}


def _connectivity_table_mp(n_max: int, s: float, dps: int) -> list:
    """``[P_1, ..., P_{n_max}]`` at working precision ``dps`` (decimal digits)."""
    with mpmath.workdps(dps):
        q = mpmath.exp(-mpmath.mpf(s))
        qpow = [mpmath.mpf(1)]
        for _ in range(n_max):
            qpow.append(qpow[-1] * q)
        qinv = [1 / x for x in qpow]
        P = [None, mpmath.mpf(1)]
        for n in range(2, n_max + 1):
            # term_k = C(n-1, k-1) q^{k(n-k)}, stepped in k
            term = qpow[n - 1]
            acc = term * P[1]
            for k in range(1, n - 1):
                e = n - 2 * k - 1
                term = term * (n - k) / k * (qpow[e] if e >= 0 else qinv[-e])
                acc += term * P[k + 1]
            P.append(1 - acc)
        return P[1:]


def _connectivity_table(n_max: int, s: float) -> list[float]:
    # the recursion subtracts nearly equal numbers once P_n is tiny; double the
    # precision until two consecutive runs agree to 1e-20 relative
    dps = _START_DPS
    prev = _connectivity_table_mp(n_max, s, dps)
    while True:
        dps *= 2
        cur = _connectivity_table_mp(n_max, s, dps)
        with mpmath.workdps(dps):
            ok = all(abs(a - b) <= mpmath.mpf("1e-20") * abs(b) for a, b in zip(prev, cur))
        if ok:
            return [float(x) for x in cur]
        if dps > _MAX_DPS:
            raise ArithmeticError(f"connectivity recursion did not stabilise (n={n_max}, s={s})")
        prev = cur


def connectivity_table(n_max: int, s: float) -> list[float]:
    """``[P_1(s), ..., P_{n_max}(s)]``, memoised per ``s``."""
    if n_max < 1:
        raise DomainError("n must be >= 1")
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    s = float(s)
    with _cache_lock:
        table = _cache.get(s)
        if table is not None and len(table) >= n_max:
            return table[:n_max]
    table = _connectivity_table(n_max, s)
    with _cache_lock:
        old = _cache.get(s)
        if old is None or len(old) < len(table):
            _cache[s] = table
    return table


def connectivity_prob(n: int, s: float) -> float:
    """Probability that ER(n, 1 - e^{-s}) is connected.

    Conditions on the order k of the component containing vertex 1:
    ``P_n = 1 - sum_{k<n} C(n-1, k-1) P_k q^{k(n-k)}`` with ``q = e^{-s}``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    return connectivity_table(n, s)[n - 1]


def connectivity_prob_enumerate(n: int, s: float) -> float:
    """Same probability by summing over all graphs on n <= 6 vertices (test oracle)."""
    if not 1 <= n <= 6:
        raise ValueError("enumeration is limited to 1 <= n <= 6")
    p = -math.expm1(-s)
    pairs = list(itertools.combinations(range(n), 2))
    by_edges = [0] * (len(pairs) + 1)
    for mask in range(1 << len(pairs)):
        uf = UnionFind(n)
        for bit, (a, b) in enumerate(pairs):
            if mask >> bit & 1:
                uf.union(a, b)
        if uf.largest == n:
            by_edges[bin(mask).count("1")] += 1
    total = math.fsum(c * p**e * (1 - p) ** (len(pairs) - e) for e, c in enumerate(by_edges))
    return total


def stepanov_asymptotic(n: int, y: float) -> float:
    """``(1 - y / (e^y - 1)) (1 - e^{-y})^n``, the connectivity asymptotic without its 1 + o(1)."""
    if y < 1 or n < 1:
        raise DomainError(f"need y >= 1 and n >= 1, got n={n}, y={y}")
    return (1.0 - y / math.expm1(y)) * math.exp(n * math.log1p(-math.exp(-y)))


def stepanov_ratio(n: int, y: float) -> float:
    return connectivity_prob(n, y / n) / stepanov_asymptotic(n, y)


def expected_components(n: int, k: int, y: float) -> float:
    """Expected number of components of order k in ER(n, 1 - e^{-y/n})."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not y > 0:
        raise DomainError(f"y must be positive, got {y}")
    log_binom = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    pk = connectivity_table(k, y / n)[k - 1]
    return math.exp(log_binom - y * k * (1 - k / n)) * pk


def simulate_component_counts(n: int, y: float, ks, reps: int, seed: int) -> np.ndarray:
    """Counts of components of each order in ``ks`` for ``reps`` independent ER(n, 1 - e^{-y/n}) graphs."""
    t_max = -n * math.expm1(-y / n)
    ks = list(ks)
    out = np.zeros((reps, len(ks)), dtype=np.int64)
    ss = np.random.SeedSequence(seed)
    for r, child in enumerate(ss.generate_state(reps, dtype=np.uint64).tolist()):
        stream = sample_edge_stream(n, t_max, child)
        uf = UnionFind(n)
        for a, b in zip(stream.i.tolist(), stream.j.tolist()):
            uf.union(a, b)
        sizes = uf.component_sizes()
        for c, k in enumerate(ks):
            out[r, c] = sizes.count(k)
    return out


@dataclass(frozen=True)
class LDFunctions:
    x: float
    y: float
    delta: float
    phi: float
    psi: float


def ld_functions(x: float, y: float) -> LDFunctions:
    """``delta = 1 - e^{-xy} - x``, the rate function ``phi(x, y)`` and ``psi(x, delta)``.

    ``phi`` is evaluated from its defining expression, ``psi`` from
    ``x log(1 + delta/x) + (1 - x) log(1 - delta/(1 - x))``; the two agree
    identically, and ``psi`` is the stable form near ``x = rho(y)``.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    if not y > 1.0:
        raise DomainError(f"y must exceed 1, got {y}")
    delta = -math.expm1(-x * y) - x
    if not -x < delta < 1.0 - x:
        raise DomainError("delta outside (-x, 1 - x)")
    phi = -x * y * (1.0 - x) + x * math.log(-math.expm1(-x * y)) - x * math.log(x) - (1.0 - x) * math.log1p(-x)
    return LDFunctions(x, y, delta, phi, psi(x, delta))


def psi(x: float, delta: float) -> float:
    return x * math.log1p(delta / x) + (1.0 - x) * math.log1p(-delta / (1.0 - x))


def tail_check(samples, n: int, gamma: float) -> dict:
    """Count fluctuation samples with ``|X| > n**gamma``."""
    if not 0.0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0, 0.5), got {gamma}")
    xs = np.asarray(samples, dtype=float).ravel()
    threshold = float(n) ** gamma
    return {
        "count": int(np.count_nonzero(np.abs(xs) > threshold)),
        "threshold": threshold,
        "sample_size": int(xs.size),
        "n": int(n),
        "gamma": float(gamma),
    }


def subcritical_max_components(n: int, c: float, reps: int, seed: int) -> np.ndarray:
    """Largest component order of ``reps`` independent ER(n, c/n) graphs with c < 1."""
    if not 0.0 < c < 1.0:
        raise DomainError(f"c must lie in (0, 1), got {c}")
    out = np.empty(reps, dtype=np.int64)
    ss = np.random.SeedSequence(seed)
    for r, child in enumerate(ss.generate_state(reps, dtype=np.uint64).tolist()):
        stream = sample_edge_stream(n, c, child)
        uf = UnionFind(n)
        for a, b in zip(stream.i.tolist(), stream.j.tolist()):
            uf.union(a, b)
        out[r] = uf.largest
    return out


def log_squared_check(maxima, n: int) -> dict:
    """Count component orders above ``ln(n)**2``."""
    xs = np.asarray(maxima)
    threshold = math.log(n) ** 2
    return {"count": int(np.count_nonzero(xs > threshold)), "threshold": threshold, "sample_size": int(xs.size)}


def write_sweep_csv(path, rows) -> None:
    """Rows of ``(n, k, y, E_nk, ratio)``; ``ratio`` is P_n(y/n) over the Stepanov asymptotic."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "k", "y", "E_nk", "ratio"])
        for n, k, y, e, ratio in rows:
            w.writerow([int(n), int(k), f"{y:.17g}", f"{e:.17g}", f"{ratio:.17g}"])
