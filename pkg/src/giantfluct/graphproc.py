"""Coupled Erdős–Rényi graph process on a finite window and its giant component.

Each unordered pair ``{i, j}`` carries a uniform weight ``w_ij``; the edge is
present in G(t) iff ``w_ij <= t / n``.  Only pairs with ``w_ij <= t_max / n``
ever matter on ``[0, t_max]``, so a realization is summarised by those pairs and
their arrival times ``n w_ij``, which are i.i.d. uniform on ``(0, t_max]``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analytic import DomainError, rho, scaling

BRUTE_FORCE_MAX_N = 12


class GridError(ValueError):
    """Evaluation grid is not strictly increasing or leaves the sampled window."""


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class EdgeStream:
    """Edges of one realization arriving on ``(0, t_max]``, sorted by arrival time.

    Vertex ids are 0-based with ``i < j`` on every event.
    """

    n: int
    t_max: float
    i: np.ndarray
    j: np.ndarray
    time: np.ndarray

    def __len__(self) -> int:
        return len(self.time)

    @property
    def events(self) -> list[tuple[int, int, float]]:
        return list(zip(self.i.tolist(), self.j.tolist(), self.time.tolist()))

    @classmethod
    def from_events(cls, n: int, t_max: float, events: Iterable[tuple[int, int, float]]) -> "EdgeStream":
        """Build a stream from explicit ``(i, j, time)`` triples (used for hand-made cases)."""
        rows = sorted(((min(a, b), max(a, b), float(s)) for a, b, s in events), key=lambda e: e[2])
        if len({(a, b) for a, b, _ in rows}) != len(rows):
            raise ValueError("duplicate unordered pair in events")
        for a, b, s in rows:
            if a == b or not 0 <= a < n or not 0 <= b < n:
                raise ValueError(f"bad vertex pair ({a}, {b}) for n={n}")
            if not 0.0 < s <= t_max:
                raise ValueError(f"arrival time {s} outside (0, {t_max}]")
        arr = np.array(rows, dtype=float).reshape(-1, 3)
        return cls(n, float(t_max), arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])


def _distinct_pairs(n: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    seen: set[int] = set()
    keys: list[int] = []
    while len(keys) < m:
        need = m - len(keys)
        batch = need + need // 8 + 16
        a = rng.integers(0, n, size=batch)
        b = rng.integers(0, n, size=batch)
        ok = a != b
        lo = np.minimum(a, b)[ok]
        hi = np.maximum(a, b)[ok]
        for key in (lo * n + hi).tolist():
            if key not in seen:
                seen.add(key)
                keys.append(key)
                if len(keys) == m:
                    break
    k = np.array(keys, dtype=np.int64)
    return k // n, k % n


def sample_edge_stream(n: int, t_max: float, seed: int) -> EdgeStream:
    """Sample the edges of G(t_max) together with their arrival times.

    The edge count is Binomial(n(n-1)/2, t_max/n); the pairs are drawn uniformly
    without replacement by rejection, and the arrival times are i.i.d. uniform on
    ``(0, t_max]``.  Deterministic given ``(n, t_max, seed)``.
    """
    n = int(n)
    t_max = float(t_max)
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if not 0.0 < t_max < n:
        raise DomainError(f"need 0 < t_max < n, got t_max={t_max}, n={n}")
    rng = make_rng(seed)
    n_pairs = n * (n - 1) // 2
    m = int(rng.binomial(n_pairs, t_max / n))
    if m > n_pairs // 2:
        # dense window: rejection would stall, so draw the complement-free set directly
        keys = np.sort(rng.choice(n_pairs, size=m, replace=False))
        i, j = _unrank_pairs(n, keys)
        perm = rng.permutation(m)
        i, j = i[perm], j[perm]
    else:
        i, j = _distinct_pairs(n, m, rng)
    # 1 - U lies in (0, 1]
    times = t_max * (1.0 - rng.random(m))
    order = np.argsort(times, kind="stable")
    return EdgeStream(n, t_max, i[order], j[order], times[order])


def _unrank_pairs(n: int, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    i_list, j_list = [], []
    for key in keys.tolist():
        i = 0
        row = n - 1
        while key >= row:
            key -= row
            i += 1
            row -= 1
        i_list.append(i)
        j_list.append(i + 1 + key)
    return np.array(i_list, dtype=np.int64), np.array(j_list, dtype=np.int64)


class UnionFind:
    """Disjoint sets with union by size, path halving and a running maximum size."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n
        self.largest = 1 if n else 0

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        """Merge the sets of ``a`` and ``b``; return the size of the resulting set."""
        ra, rb = self.find(a), self.find(b)
        size = self.size
        if ra == rb:
            return size[ra]
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        size[ra] += size[rb]
        if size[ra] > self.largest:
            self.largest = size[ra]
        return size[ra]

    def component_sizes(self) -> list[int]:
        return [self.size[x] for x in range(len(self.parent)) if self.find(x) == x]


@dataclass(frozen=True)
class Trajectory:
    n: int
    grid: np.ndarray
    L: np.ndarray


def _check_grid(grid: Sequence[float], t_max: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise GridError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(g) <= 0):
        raise GridError("grid must be strictly increasing")
    if g[0] <= 0 or g[-1] > t_max:
        raise GridError(f"grid must lie in (0, {t_max}]")
    return g


def trajectory(stream: EdgeStream, grid: Sequence[float]) -> Trajectory:
    """Largest component order of G(t) at each grid time, in one pass over the stream."""
    g = _check_grid(grid, stream.t_max)
    uf = UnionFind(stream.n)
    times = stream.time.tolist()
    ii = stream.i.tolist()
    jj = stream.j.tolist()
    n_events = len(times)
    out = np.empty(g.size, dtype=np.int64)
    e = 0
    for k, t in enumerate(g.tolist()):
        while e < n_events and times[e] <= t:
            uf.union(ii[e], jj[e])
            e += 1
        out[k] = uf.largest
    return Trajectory(stream.n, g, out)


@dataclass(frozen=True)
class FluctuationPath:
    """``X_n`` on the grid and its time change ``Z_n = u X_n`` on ``v(grid)``."""

    n: int
    grid: np.ndarray
    L: np.ndarray
    X: np.ndarray
    Zgrid: np.ndarray
    Z: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "L", "X", "v_t", "Z"])
            for row in zip(self.grid, self.L, self.X, self.Zgrid, self.Z):
                t, L, x, vt, z = row
                w.writerow([f"{t:.17g}", int(L), f"{x:.17g}", f"{vt:.17g}", f"{z:.17g}"])


def read_fluctuation_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows]) for key in ("t", "L", "X", "v_t", "Z")}


def fluctuation_path(traj: Trajectory) -> FluctuationPath:
    if np.any(traj.grid <= 1.0):
        raise DomainError("fluctuations are only defined for grid times > 1")
    n = traj.n
    root_n = math.sqrt(n)
    bundles = [scaling(t) for t in traj.grid.tolist()]
    X = np.array([(int(L) - n * b.rho) / root_n for L, b in zip(traj.L, bundles)])
    u = np.array([b.u for b in bundles])
    vt = np.array([b.v for b in bundles])
    return FluctuationPath(n, traj.grid, traj.L, X, vt, u * X)


def brute_force_components(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Component sizes (descending) by exhaustive depth-first traversal; test oracle for tiny n."""
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force oracle refuses n > {BRUTE_FORCE_MAX_N}")
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = [False] * n
    sizes = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        count = 0
        while stack:
            x = stack.pop()
            count += 1
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        sizes.append(count)
    return sorted(sizes, reverse=True)


def centered_count(n: int, t: float) -> int:
    """``round(n rho(t))``, the integer closest to the deterministic giant order."""
    return int(round(n * rho(t)))
