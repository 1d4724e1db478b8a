import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from giantfluct import analytic
from giantfluct.analytic import DomainError
from giantfluct.graphproc import (
    BRUTE_FORCE_MAX_N,
    EdgeStream,
    GridError,
    UnionFind,
    brute_force_components,
    centered_count,
    fluctuation_path,
    make_rng,
    read_fluctuation_csv,
    sample_edge_stream,
    trajectory,
)

from oracles import components_dfs

# frozen: (8068 - 10000 rho(2)) / 100
X_EXAMPLE = 0.9987869979980042


def test_three_vertex_example():
    s = EdgeStream.from_events(3, 1.0, [(0, 1, 0.4)])
    assert trajectory(s, [0.3, 0.5]).L.tolist() == [1, 2]


def test_four_vertex_example():
    s = EdgeStream.from_events(4, 1.0, [(0, 1, 0.1), (2, 3, 0.2), (1, 2, 0.6)])
    assert trajectory(s, [0.5, 1.0]).L.tolist() == [2, 4]


def test_edge_at_grid_time_counts():
    s = EdgeStream.from_events(3, 1.0, [(1, 2, 0.5)])
    assert trajectory(s, [0.5]).L.tolist() == [2]


def test_from_events_validation():
    with pytest.raises(ValueError):
        EdgeStream.from_events(3, 1.0, [(0, 1, 0.2), (1, 0, 0.3)])
    with pytest.raises(ValueError):
        EdgeStream.from_events(3, 1.0, [(0, 0, 0.2)])
    with pytest.raises(ValueError):
        EdgeStream.from_events(3, 1.0, [(0, 3, 0.2)])
    with pytest.raises(ValueError):
        EdgeStream.from_events(3, 1.0, [(0, 1, 1.5)])


def test_union_find_tracks_largest():
    uf = UnionFind(6)
    assert uf.largest == 1
    uf.union(0, 1)
    uf.union(2, 3)
    uf.union(3, 4)
    assert uf.largest == 3
    uf.union(1, 4)
    assert uf.largest == 5
    assert sorted(uf.component_sizes(), reverse=True) == [5, 1]
    assert uf.find(0) == uf.find(4)


def test_brute_force_refuses_large_n():
    with pytest.raises(ValueError):
        brute_force_components(BRUTE_FORCE_MAX_N + 1, [])


def test_random_small_instances_match_dfs():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        keep = rng.random(len(pairs)) < rng.random()
        events = [(a, b, float(t)) for (a, b), k, t in zip(pairs, keep, rng.uniform(0.01, 1.0, len(pairs))) if k]
        stream = EdgeStream.from_events(n, 1.0, events)
        grid = [0.25, 0.5, 0.75, 1.0]
        L = trajectory(stream, grid).L.tolist()
        for t, got in zip(grid, L):
            edges = [(a, b) for a, b, s in events if s <= t]
            ref = components_dfs(n, edges)
            assert got == ref[0]
            assert brute_force_components(n, edges) == ref


def test_sample_is_deterministic():
    a = sample_edge_stream(200, 2.5, 99)
    b = sample_edge_stream(200, 2.5, 99)
    c = sample_edge_stream(200, 2.5, 100)
    for name in ("i", "j", "time"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert not np.array_equal(a.time, c.time)


def test_sample_structure():
    s = sample_edge_stream(300, 2.0, 5)
    assert np.all(s.i < s.j)
    assert np.all((s.i >= 0) & (s.j < 300))
    assert np.all(np.diff(s.time) >= 0)
    assert s.time[0] > 0 and s.time[-1] <= 2.0
    keys = s.i * 300 + s.j
    assert np.unique(keys).size == len(s)


def test_dense_window_has_distinct_pairs():
    s = sample_edge_stream(10, 8.0, 1)
    keys = s.i * 10 + s.j
    assert np.unique(keys).size == len(s) > 22
    assert np.all(s.i < s.j)


def test_sample_domain():
    with pytest.raises(DomainError):
        sample_edge_stream(1, 0.5, 0)
    with pytest.raises(DomainError):
        sample_edge_stream(10, 0.0, 0)
    with pytest.raises(DomainError):
        sample_edge_stream(10, 10.0, 0)


def test_two_vertex_presence_frequency():
    hits = sum(len(sample_edge_stream(2, 1.0, seed)) for seed in range(40_000))
    assert abs(hits / 40_000 - 0.5) <= 0.01


def test_mean_edge_count():
    counts = [len(sample_edge_stream(100, 3.0, seed)) for seed in range(4000)]
    assert abs(np.mean(counts) - 148.5) <= 1.0


def test_edge_count_is_binomial():
    n, t = 50, 2.0
    N = n * (n - 1) // 2
    counts = np.array([len(sample_edge_stream(n, t, seed)) for seed in range(20_000)])
    edges = np.arange(25, 76)
    cdf = sps.binom.cdf(edges, N, t / n)
    probs = np.diff(np.concatenate([[0.0], cdf[:-1], [1.0]]))
    observed = np.bincount(np.clip(counts, 25, 75) - 25, minlength=51)
    assert sps.chisquare(observed, probs * counts.size).pvalue > 1e-3


def test_pair_marginals_are_uniform():
    hits = np.zeros((6, 6))
    for seed in range(6000):
        s = sample_edge_stream(6, 1.5, seed)
        np.add.at(hits, (s.i, s.j), 1)
    upper = hits[np.triu_indices(6, 1)] / 6000
    assert np.all(np.abs(upper - 0.25) <= 0.025)


def test_grid_refinement_is_consistent():
    s = sample_edge_stream(500, 3.0, 17)
    fine = np.linspace(0.1, 3.0, 30)
    coarse = fine[::3]
    assert np.array_equal(trajectory(s, fine).L[::3], trajectory(s, coarse).L)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**63), st.integers(min_value=2, max_value=400))
def test_trajectory_is_monotone(seed, n):
    s = sample_edge_stream(n, 1.9, seed)
    L = trajectory(s, np.linspace(0.05, 1.9, 12)).L
    assert np.all(np.diff(L) >= 0)
    assert 1 <= L[0] and L[-1] <= n


def test_grid_errors():
    s = sample_edge_stream(50, 2.0, 0)
    for bad in ([], [1.0, 1.0], [1.5, 1.2], [0.0, 1.0], [1.0, 2.5]):
        with pytest.raises(GridError):
            trajectory(s, bad)


def test_fluctuation_example():
    tr = trajectory(EdgeStream.from_events(10_000, 3.0, []), [2.0])
    tr = type(tr)(tr.n, tr.grid, np.array([8068]))
    fp = fluctuation_path(tr)
    assert fp.X[0] == pytest.approx(X_EXAMPLE, abs=1e-12)
    assert fp.Z[0] == pytest.approx(analytic.u(2.0) * X_EXAMPLE, rel=1e-14)
    assert fp.Zgrid[0] == pytest.approx(analytic.v(2.0), rel=1e-15)
    assert centered_count(10_000, 2.0) == 7968


def test_fluctuation_rejects_subcritical_times():
    s = sample_edge_stream(50, 2.0, 0)
    with pytest.raises(DomainError):
        fluctuation_path(trajectory(s, [0.5, 1.5]))


def test_fluctuation_csv_round_trip(tmp_path):
    s = sample_edge_stream(2000, 3.0, 8)
    fp = fluctuation_path(trajectory(s, [1.5, 2.0, 2.5, 3.0]))
    out = tmp_path / "path.csv"
    fp.to_csv(out)
    assert out.read_text().splitlines()[0] == "t,L,X,v_t,Z"
    back = read_fluctuation_csv(out)
    assert np.array_equal(back["X"], fp.X)
    assert np.array_equal(back["Z"], fp.Z)
    assert np.array_equal(back["L"], fp.L)


def test_giant_fraction_near_rho():
    s = sample_edge_stream(20_000, 2.0, 4)
    L = trajectory(s, [2.0]).L[0]
    assert abs(L / 20_000 - analytic.rho(2.0)) < 5 * math.sqrt(analytic.sigma2(2.0) / 20_000)


def test_make_rng_is_philox():
    assert isinstance(make_rng(1).bit_generator, np.random.Philox)
