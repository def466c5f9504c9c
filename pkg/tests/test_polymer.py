import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import optimize, special

from polylab import _kernels
from polylab.env import EnvField, generate_field
from polylab.errors import DomainError, InvalidArgumentError, OutOfBoundsError
from polylab.lpp import log_path_count, passage_time
from polylab.polymer import (ScalingRegime, anti_diagonal_log_partitions, boundary_entropy,
                             boundary_free_energies, log_partition, log_partition_bruteforce, log_partition_d,
                             log_segment_count, mo_free_energy_exact, mo_regime_endpoint, mo_regime_estimate)
from polylab.special import digamma, trigamma

small_values = st.floats(-4, 4, allow_nan=False, allow_infinity=False)
fields = st.tuples(st.integers(1, 6), st.integers(1, 5)).flatmap(
    lambda s: arrays(np.float64, (s[0] + 1, s[1] + 1), elements=small_values))


def enumerate_log_z(values, end, beta):
    steps = [i for i, c in enumerate(end) for _ in range(c)]
    energies = []
    for order in set(itertools.permutations(steps)):
        pos = [0] * len(end)
        total = 0.0
        for i in order:
            pos[i] += 1
            total += values[tuple(pos)]
        energies.append(beta * total)
    return float(special.logsumexp(energies))


def path_fraction_energy(values):
    """Sum over sites of eta times the fraction of directed paths through the site."""
    n, m = values.shape[0] - 1, values.shape[1] - 1
    total = math.comb(n + m, n)
    acc = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == j == 0:
                continue
            through = math.comb(i + j, i) * math.comb(n - i + m - j, n - i)
            acc += values[i, j] * through / total
    return acc


def test_beta_zero_normalized_is_zero():
    f = generate_field("gaussian", (10, 6), 1)
    assert log_partition(f, (9, 5), 0.0) == pytest.approx(0.0, abs=1e-12)
    assert log_partition_d(generate_field("gaussian", (4, 3, 3), 1), (3, 2, 2), 0.0) == pytest.approx(0.0, abs=1e-12)


def test_constant_field():
    f = EnvField.from_array(np.full((8, 5), -0.4))
    assert log_partition(f, (7, 4), 1.5) == pytest.approx(1.5 * -0.4 * 11, abs=1e-10)


def test_three_path_example(example_field):
    expected = math.log(math.exp(4) + math.exp(6) + math.exp(8))
    assert log_partition(example_field, (2, 1), 1.0, normalized=False) == pytest.approx(expected, rel=1e-14)
    assert log_partition(example_field, (2, 1), 1.0) == pytest.approx(expected - math.log(3), rel=1e-14)


def test_planar_and_d_agree():
    f = generate_field("rademacher", (12, 9), 5)
    assert log_partition_d(f, (11, 8), 0.8) == log_partition(f, (11, 8), 0.8)


def test_three_dimensional_enumeration():
    f = generate_field("gaussian", (4, 3, 2), 13)
    got = log_partition_d(f, (3, 2, 1), 0.7, normalized=False)
    assert got == pytest.approx(enumerate_log_z(f.to_array(), (3, 2, 1), 0.7), rel=1e-10)


def test_bruteforce_matches():
    for seed in range(30):
        f = generate_field("centered_exponential", (6, 5), seed)
        assert log_partition(f, (5, 4), 1.1) == pytest.approx(log_partition_bruteforce(f, (5, 4), 1.1), rel=1e-10)


def test_errors():
    f = generate_field("gaussian", (4, 4), 0)
    with pytest.raises(OutOfBoundsError):
        log_partition(f, (4, 0), 1.0)
    with pytest.raises(DomainError):
        log_partition(f, (3, 3), math.inf)
    with pytest.raises(DomainError):
        log_partition(f, (3, 3), math.nan)


@given(fields, st.floats(0.01, 20.0))
def test_sandwich(values, beta):
    n, m = values.shape[0] - 1, values.shape[1] - 1
    f = EnvField.from_array(values)
    t = passage_time(f, (n, m))
    z = log_partition(f, (n, m), beta)
    assert beta * t - log_path_count((n, m)) - 1e-9 <= z <= beta * t + 1e-9


@given(fields, st.data(), st.floats(0.01, 2.0), st.floats(0.05, 3.0))
def test_monotone_in_each_site(values, data, delta, beta):
    n, m = values.shape[0] - 1, values.shape[1] - 1
    i, j = data.draw(st.integers(0, n)), data.draw(st.integers(0, m))
    base = log_partition(EnvField.from_array(values), (n, m), beta, normalized=False)
    bumped = values.copy()
    bumped[i, j] += delta
    new = log_partition(EnvField.from_array(bumped), (n, m), beta, normalized=False)
    assert -1e-10 <= new - base <= beta * delta + 1e-10


def test_zero_temperature_limit():
    f = generate_field("gaussian", (9, 9), 21)
    beta = 50.0
    gap = log_partition(f, (8, 8), beta, normalized=False) / beta - passage_time(f, (8, 8))
    assert 0.0 <= gap <= math.log(math.comb(16, 8)) / beta


@pytest.mark.parametrize("seed", range(5))
def test_derivative_at_zero_is_path_average(seed):
    f = generate_field("gaussian", (7, 7), seed)
    h = 1e-5
    fd = (log_partition(f, (6, 6), h, normalized=False) - log_partition(f, (6, 6), -h, normalized=False)) / (2 * h)
    exact = path_fraction_energy(f.to_array())
    assert fd == pytest.approx(exact, rel=1e-6)


def test_log_sum_exp_edge_cases():
    assert _kernels.logaddexp(-np.inf, -np.inf) == -np.inf
    assert _kernels.logaddexp(700.0, 700.0) == pytest.approx(700.0 + math.log(2.0))
    assert _kernels.logaddexp(-np.inf, 3.0) == 3.0
    assert not math.isnan(_kernels.logaddexp(1e308, 1e308))


def test_anti_diagonal_matches_pointwise():
    n = 9
    f = generate_field("gaussian", (n + 1, 5), 4)
    row = anti_diagonal_log_partitions(f, n, 0.6, 4)
    for m in range(5):
        assert row[m] == pytest.approx(log_partition(f, (n - m, m), 0.6, normalized=False), rel=1e-13)


def test_scaling_regime():
    r = ScalingRegime(0.5, 2.0, 3.0)
    assert r.beta_n(100) == pytest.approx(2.0 / 10**0.5)
    assert r.h_n(100) == pytest.approx(3.0 * 10**0.5)
    assert r.free_energy_scale(100) == pytest.approx(100**0.75)
    for bad in [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, -1.0)]:
        with pytest.raises(InvalidArgumentError):
            ScalingRegime(*bad)
    with pytest.raises(InvalidArgumentError):
        ScalingRegime(0.5, 1.0, 0.0)


def test_mo_endpoint_and_small_n():
    r = ScalingRegime(0.5, 1.0)
    assert mo_regime_endpoint(r, 100, (1.0,)) == (100, 10)
    assert mo_regime_endpoint(r, 100, (1.0, 0.5)) == (100, 10, 5)
    with pytest.raises(InvalidArgumentError):
        mo_regime_endpoint(r, 100, (0.05,))


def test_mo_estimator_vanishes_linearly_in_beta():
    n, seed = 2000, 3
    ests = [mo_regime_estimate(ScalingRegime(0.5, b), n, seed=seed) for b in (1e-6, 2e-6)]
    # the estimator times beta_n is log Z, which is O(beta_n): halving beta halves it
    z1 = ests[0] * 1e-6
    z2 = ests[1] * 2e-6
    assert abs(z1) < 1e-4 and abs(z2) < 2e-4
    assert z2 / z1 == pytest.approx(2.0, rel=1e-3)


def test_mo_estimator_d_broadcast():
    r = ScalingRegime(0.5, 1.0)
    a = mo_regime_estimate(r, 100, alpha=(1.0,), d=2, seed=1)
    b = mo_regime_estimate(r, 100, alpha=(1.0, 1.0), seed=1)
    assert a == b
    with pytest.raises(InvalidArgumentError):
        mo_regime_estimate(r, 100, alpha=(1.0, 1.0), d=3)


def _grid_oracle(beta):
    ms = np.logspace(-4, 3, 200_001)
    g = ms * beta**2 - special.digamma(ms)
    k = int(np.argmin(g))
    res = optimize.minimize_scalar(lambda m: m * beta**2 - special.digamma(m),
                                   bracket=(ms[k - 1], ms[k], ms[k + 1]), tol=1e-14)
    return res.fun - 2 * math.log(abs(beta))


@pytest.mark.parametrize("beta", [1.0, 0.3, 2.5])
def test_free_energy_matches_grid_minimization(beta):
    assert mo_free_energy_exact(beta) == pytest.approx(_grid_oracle(beta), abs=1e-8)


def test_free_energy_properties():
    assert mo_free_energy_exact(1.3) == mo_free_energy_exact(-1.3)
    assert mo_free_energy_exact(0.0) == 0.0
    assert mo_free_energy_exact(1e-3) == pytest.approx(1.0, abs=1e-5)
    for beta in np.logspace(-3, 3, 61):
        assert math.isfinite(mo_free_energy_exact(beta))


@given(st.floats(1e-6, 1e5))
def test_digamma_recurrence(x):
    assert digamma(x) == pytest.approx(digamma(x + 1) - 1 / x, rel=1e-12, abs=1e-12)
    assert trigamma(x) == pytest.approx(trigamma(x + 1) + 1 / x**2, rel=1e-12)


@pytest.mark.parametrize("x", [1e-8, 1e-3, 0.5, 1.0, 5.9, 6.0, 10.0, 37.5, 1e6])
def test_special_functions_against_scipy(x):
    assert digamma(x) == pytest.approx(special.digamma(x), rel=1e-13, abs=1e-14)
    assert trigamma(x) == pytest.approx(special.polygamma(1, x), rel=1e-13)


def test_special_function_domain():
    with pytest.raises(ValueError):
        digamma(0.0)
    with pytest.raises(ValueError):
        trigamma(-1.0)


def test_boundary_free_energies_match_pointwise():
    n = 40
    f = generate_field("gaussian", (n + 1, 9), 6)
    got = boundary_free_energies(f, n, [0.0, 0.1, 0.2], 1.0)
    assert got[0.0] == pytest.approx(f.row(0)[1:].sum() / n, rel=1e-12)
    for h in (0.1, 0.2):
        m = math.floor(h * n)
        assert got[h] == pytest.approx(log_partition(f, (n, m), 1.0, normalized=False) / n, rel=1e-12)


def test_segment_count_and_entropy():
    n = 10
    assert log_segment_count(n, 0.3, [1.0]) == pytest.approx(math.log(math.comb(13, 3)))
    assert log_segment_count(n, 0.3, [1.0, 0.5]) == pytest.approx(math.log(math.comb(13, 3) * math.comb(8, 3)))
    assert boundary_entropy(0.0, [1.0]) == 0.0
    for h in (0.3, 0.1, 0.02):
        assert log_segment_count(100_000, h, [1.0]) / 100_000 == pytest.approx(boundary_entropy(h, [1.0]), rel=1e-3)
    values = [boundary_entropy(h, [1.0, 2.0]) for h in (0.4, 0.2, 0.1, 0.01, 1e-4)]
    assert all(b < a for a, b in zip(values, values[1:]))
