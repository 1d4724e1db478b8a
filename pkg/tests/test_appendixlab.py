import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantfluct import analytic, appendixlab
from giantfluct.analytic import DomainError

from oracles import connected_prob_brute


def test_connectivity_small_closed_forms():
    s = 0.7
    q = math.exp(-s)
    assert appendixlab.connectivity_prob(1, s) == 1.0
    assert appendixlab.connectivity_prob(2, s) == pytest.approx(1 - q, rel=1e-14)
    assert appendixlab.connectivity_prob(3, s) == pytest.approx((1 - q) ** 2 * (1 + 2 * q), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("s", [0.05, 0.2, 0.7, 1.5, 3.0])
def test_recursion_matches_enumeration(n, s):
    assert abs(appendixlab.connectivity_prob(n, s) - appendixlab.connectivity_prob_enumerate(n, s)) <= 1e-12


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_matches_independent_oracle(n):
    s = 0.4
    assert appendixlab.connectivity_prob_enumerate(n, s) == pytest.approx(
        connected_prob_brute(n, -math.expm1(-s)), abs=1e-13
    )


def test_connectivity_is_a_probability_and_increasing_in_s():
    vals = [appendixlab.connectivity_prob(40, s) for s in (0.01, 0.05, 0.1, 0.3)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_connectivity_large_n_is_accurate():
    # the recursion cancels catastrophically in floats; compare with the asymptotic at large y
    n, y = 400, 12.0
    assert appendixlab.stepanov_ratio(n, y) == pytest.approx(1.0, abs=1e-3)


def test_connectivity_domain():
    with pytest.raises(DomainError):
        appendixlab.connectivity_prob(0, 1.0)
    with pytest.raises(ValueError):
        appendixlab.connectivity_prob_enumerate(7, 1.0)


def test_stepanov_ratio_examples():
    r300 = appendixlab.stepanov_ratio(300, 3.0)
    assert abs(r300 - 1) <= 0.05
    assert abs(appendixlab.stepanov_ratio(600, 3.0) - 1) < abs(appendixlab.stepanov_ratio(150, 3.0) - 1)


def test_stepanov_asymptotic_large_y():
    n = 50
    assert appendixlab.stepanov_asymptotic(n, 40.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        appendixlab.stepanov_asymptotic(n, 0.5)


def test_expected_components_examples():
    n, y = 30, 2.0
    e1 = n * math.exp(-y * (1 - 1 / n))
    assert appendixlab.expected_components(n, 1, y) == pytest.approx(e1, rel=1e-13)
    e2 = math.comb(n, 2) * math.exp(-2 * y * (1 - 2 / n)) * -math.expm1(-y / n)
    assert appendixlab.expected_components(n, 2, y) == pytest.approx(e2, rel=1e-13)
    # a whole-graph component has expectation P_n
    assert appendixlab.expected_components(n, n, y) == pytest.approx(appendixlab.connectivity_prob(n, y / n), rel=1e-12)


def test_expected_components_domain():
    with pytest.raises(DomainError):
        appendixlab.expected_components(10, 0, 1.0)
    with pytest.raises(DomainError):
        appendixlab.expected_components(10, 11, 1.0)
    with pytest.raises(DomainError):
        appendixlab.expected_components(10, 2, 0.0)


def test_expected_components_vs_simulation():
    n, y, ks = 60, 2.0, [1, 2, 3]
    counts = appendixlab.simulate_component_counts(n, y, ks, 4000, 21)
    for c, k in enumerate(ks):
        se = counts[:, c].std(ddof=1) / math.sqrt(counts.shape[0])
        assert abs(counts[:, c].mean() - appendixlab.expected_components(n, k, y)) <= 3.5 * se


def test_vertex_mass_identity():
    # sum_k k E_{n,k} = n
    n, y = 25, 1.7
    total = math.fsum(k * appendixlab.expected_components(n, k, y) for k in range(1, n + 1))
    assert total == pytest.approx(n, rel=1e-10)


@pytest.mark.parametrize("y", [1.5, 2.0, 3.0])
def test_phi_vanishes_at_rho(y):
    f = appendixlab.ld_functions(analytic.rho(y), y)
    assert abs(f.phi) <= 1e-10
    assert abs(f.delta) <= 1e-12


def test_ld_grid():
    for y in (1.5, 2.0, 3.0):
        for x in np.arange(0.05, 0.99, 0.05):
            f = appendixlab.ld_functions(float(x), y)
            assert f.psi <= -2 * f.delta**2 + 1e-12
            assert abs(f.phi - f.psi) <= 1e-12


@settings(max_examples=100)
@given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=1.01, max_value=8.0))
def test_psi_bound_property(x, y):
    f = appendixlab.ld_functions(x, y)
    assert f.psi <= -2 * f.delta**2 + 1e-12
    assert f.phi == pytest.approx(f.psi, abs=1e-11)


def test_ld_domain():
    with pytest.raises(DomainError):
        appendixlab.ld_functions(0.0, 2.0)
    with pytest.raises(DomainError):
        appendixlab.ld_functions(0.5, 1.0)


def test_tail_check_examples():
    n = 10_000
    r = appendixlab.tail_check([0.1, -1.0, 2.0], n, 0.2)
    assert r["count"] == 0
    assert r["threshold"] == pytest.approx(10 ** 0.8)
    assert appendixlab.tail_check([0.1, 10.0, -7.0], n, 0.2)["count"] == 2
    empty = appendixlab.tail_check([], n, 0.2)
    assert empty["count"] == 0 and empty["sample_size"] == 0
    with pytest.raises(DomainError):
        appendixlab.tail_check([0.0], n, 0.5)


def test_subcritical_components_are_small():
    n = 2000
    maxima = appendixlab.subcritical_max_components(n, 0.5, 50, 3)
    r = appendixlab.log_squared_check(maxima, n)
    assert r["count"] == 0 and r["sample_size"] == 50
    with pytest.raises(DomainError):
        appendixlab.subcritical_max_components(n, 1.5, 1, 0)


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    appendixlab.write_sweep_csv(out, [(300, 1, 3.0, 15.0, 0.99)])
    lines = out.read_text().splitlines()
    assert lines[0] == "n,k,y,E_nk,ratio"
    assert lines[1].startswith("300,1,3,15,")


def test_dense_limit_is_connected():
    n = 20
    assert appendixlab.connectivity_prob(n, 60.0 / n) == pytest.approx(1.0, abs=1e-12)
    assert appendixlab.stepanov_ratio(n, 60.0) == pytest.approx(1.0, abs=1e-12)
