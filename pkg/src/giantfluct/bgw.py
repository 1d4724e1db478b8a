"""Total progeny of a Bienaymé–Galton–Watson process with Binomial(m, p) offspring.

The hitting-time (Dwass/Otter) identity gives the law of the total progeny T:

    P(T = k) = (1/k) P(S_k = k - 1),   S_k ~ Binomial(m k, p),

and in the subcritical case ``m p < 1`` the first two moments are
``1 / (1 - m p)`` and ``m p (1 - p) / (1 - m p)**3``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

SAMPLE_CAP = 10**9
DOMINATION_MAX_N = 6


class RunawayError(RuntimeError):
    """Progeny exceeded the hard cap; the parameters are probably not subcritical."""


@dataclass(frozen=True)
class BGWParams:
    m: int
    p: float

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def mean_offspring(self) -> float:
        return self.m * self.p

    @property
    def subcritical(self) -> bool:
        return self.m * self.p < 1.0


def total_progeny_pmf(params: BGWParams, k: int) -> float:
    """``P(T = k)`` evaluated in log space."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    m, p = params.m, params.p
    trials = m * k
    if k - 1 > trials:
        return 0.0
    if not math.isfinite(float(trials)) or trials > 1e300:
        raise OverflowError("log-gamma argument overflow")
    log_binom = gammaln(trials + 1) - gammaln(k) - gammaln(trials - k + 2)
    logp = log_binom + (k - 1) * math.log(p) + (trials - k + 1) * math.log1p(-p) - math.log(k)
    return float(min(1.0, math.exp(logp)))


def pmf_table(params: BGWParams, rel_tol: float = 1e-14, k_max: int = 10**7) -> np.ndarray:
    """Truncated pmf ``[P(T=1), P(T=2), ...]``.

    Stops at the first k beyond ten times the mean where ``k**2 P(T=k)`` drops
    below ``rel_tol`` times the running second moment, so that mass, mean and
    variance are all converged.
    """
    mean = total_progeny_moments(params)[0]
    probs = []
    running = 0.0
    for k in range(1, k_max + 1):
        q = total_progeny_pmf(params, k)
        probs.append(q)
        running += k * k * q
        if k > 10 * mean and k * k * q < rel_tol * running:
            break
    return np.array(probs)


def total_progeny_moments(params: BGWParams) -> tuple[float, float]:
    mp = params.m * params.p
    if mp >= 1.0:
        raise ValueError(f"moments diverge for m p >= 1 (m p = {mp})")
    return 1.0 / (1.0 - mp), mp * (1.0 - params.p) / (1.0 - mp) ** 3


def sample_total_progeny(params: BGWParams, rng: np.random.Generator, cap: int = SAMPLE_CAP) -> int:
    """One exact draw by breadth-first exploration: each queued individual gets Binomial(m, p) children."""
    if not params.subcritical:
        raise ValueError("sampling requires m p < 1")
    total = 1
    queue = 1
    while queue:
        queue -= 1
        children = int(rng.binomial(params.m, params.p))
        total += children
        queue += children
        if total > cap:
            raise RunawayError(f"total progeny exceeded {cap}")
    return total


def sample_total_progeny_batch(
    params: BGWParams, size: int, rng: np.random.Generator, cap: int = SAMPLE_CAP
) -> np.ndarray:
    """``size`` independent draws, explored generation by generation in parallel.

    A generation of ``g`` individuals has Binomial(m g, p) children in total, so
    this has the same law as the per-individual queue.
    """
    if not params.subcritical:
        raise ValueError("sampling requires m p < 1")
    total = np.ones(size, dtype=np.int64)
    current = np.ones(size, dtype=np.int64)
    alive = np.arange(size)
    while alive.size:
        kids = rng.binomial(params.m * current[alive], params.p)
        total[alive] += kids
        current[alive] = kids
        if np.any(total[alive] > cap):
            raise RunawayError(f"total progeny exceeded {cap}")
        alive = alive[kids > 0]
    return total


def borel_pmf(mu: float, k: int) -> float:
    """Total progeny law for Poisson(mu) offspring, the m -> inf, m p -> mu limit."""
    return math.exp((k - 1) * math.log(k * mu) - k * mu - math.lgamma(k + 1))


# exhaustive checks of the component-versus-progeny dominations


def _progeny_tail_exact(m: int, p: Fraction, k: int) -> Fraction:
    """``P(T_{m,p} >= k)`` in exact rational arithmetic (valid for any m p)."""
    below = Fraction(0)
    for j in range(1, k):
        trials = m * j
        if j - 1 > trials:
            continue
        below += Fraction(math.comb(trials, j - 1), j) * p ** (j - 1) * (1 - p) ** (trials - j + 1)
    return 1 - below


@lru_cache(maxsize=None)
def _component_histogram(n: int) -> dict[tuple[int, int], int]:
    """Number of graphs on n labelled vertices by (edge count, size of vertex 0's component)."""
    pairs = list(itertools.combinations(range(n), 2))
    hist: dict[tuple[int, int], int] = {}
    for mask in range(1 << len(pairs)):
        adj = [[] for _ in range(n)]
        n_edges = 0
        for bit, (a, b) in enumerate(pairs):
            if mask >> bit & 1:
                adj[a].append(b)
                adj[b].append(a)
                n_edges += 1
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        key = (n_edges, len(seen))
        hist[key] = hist.get(key, 0) + 1
    return hist


def component_tail_exact(n: int, p: Fraction, k: int) -> Fraction:
    """``P(L_{n,p} >= k)`` for the component of a fixed vertex of ER(n, p), by enumeration."""
    n_pairs = n * (n - 1) // 2
    total = Fraction(0)
    for (e, size), count in _component_histogram(n).items():
        if size >= k:
            total += count * p**e * (1 - p) ** (n_pairs - e)
    return total


@dataclass
class DominationReport:
    n: int
    p: float
    k: list[int] = field(default_factory=list)
    component_tail: list[float] = field(default_factory=list)
    upper_tail: list[float] = field(default_factory=list)
    lower_tail: list[float] = field(default_factory=list)
    upper_margin: list[float] = field(default_factory=list)
    lower_margin: list[float] = field(default_factory=list)
    holds: bool = True

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2)


def check_domination(n: int, p: float | Fraction) -> DominationReport:
    """Check ``P(T_{n-k,p} >= k) <= P(L_{n,p} >= k) <= P(T_{n,p} >= k)`` for k = 1..n.

    All probabilities are exact rationals (a float ``p`` is converted exactly),
    so the inequalities are decided without rounding.
    """
    if not 2 <= n <= DOMINATION_MAX_N:
        raise ValueError(f"enumeration is limited to 2 <= n <= {DOMINATION_MAX_N}, got {n}")
    pf = Fraction(p)
    if not 0 < pf < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    report = DominationReport(n=n, p=float(p))
    for k in range(1, n + 1):
        comp = component_tail_exact(n, pf, k)
        upper = _progeny_tail_exact(n, pf, k)
        lower = _progeny_tail_exact(n - k, pf, k)
        report.k.append(k)
        report.component_tail.append(float(comp))
        report.upper_tail.append(float(upper))
        report.lower_tail.append(float(lower))
        report.upper_margin.append(float(upper - comp))
        report.lower_margin.append(float(comp - lower))
        if comp > upper or comp < lower:
            report.holds = False
    return report
