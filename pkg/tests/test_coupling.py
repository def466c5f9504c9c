import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from polylab.coupling import (MAX_LEVELS, _hypergeom_quantile, dyadic_coupling, median_sup_gap, sup_gap)
from polylab.env import DistSpec
from polylab.errors import InvalidArgumentError, UnsupportedDistributionError


def binomial_chi2_pvalue(counts_k, n):
    """Chi-square goodness of fit of observed successes to Binomial(n, 1/2), tails pooled."""
    pmf = stats.binom.pmf(np.arange(n + 1), n, 0.5)
    observed = np.bincount(counts_k, minlength=n + 1).astype(float)
    expected = pmf * len(counts_k)
    keep = expected >= 5
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    return stats.chisquare(obs, exp).pvalue


def test_gaussian_is_identity():
    p = dyadic_coupling(DistSpec.GAUSSIAN, 10, 4)
    np.testing.assert_array_equal(p.walk, p.brownian)
    assert sup_gap(p) == 0.0


def test_endpoint_law_is_binomial():
    n_levels, seeds = 6, 10_000
    n = 1 << n_levels
    ends = np.array([dyadic_coupling("rademacher", n_levels, s).walk[-1] for s in range(seeds)])
    k = ((ends + n) // 2).astype(int)
    assert binomial_chi2_pvalue(k, n) > 0.01
    # Gaussian side is exactly N(0, n)
    gauss = np.array([dyadic_coupling("rademacher", n_levels, s).brownian[-1] for s in range(2000)])
    assert stats.kstest(gauss / np.sqrt(n), "norm").pvalue > 0.01


def test_block_sums_and_increments_have_exact_laws():
    n_levels = 8
    blocks, pairs = [], []
    for s in range(2000):
        p = dyadic_coupling("rademacher", n_levels, s)
        blocks.extend(p.block_sums[2])  # blocks of length 64
        inc = np.diff(p.walk)
        pairs.append((inc[0], inc[1]))
    k = ((np.array(blocks) + 64) // 2).astype(int)
    assert binomial_chi2_pvalue(k, 64) > 0.01
    pairs = np.array(pairs)
    table = np.array([[np.sum((pairs[:, 0] == a) & (pairs[:, 1] == b)) for b in (-1, 1)] for a in (-1, 1)])
    assert stats.chi2_contingency(table).pvalue > 0.01
    assert stats.binomtest(int(np.sum(pairs[:, 0] == 1)), len(pairs)).pvalue > 0.01


@given(st.integers(0, 10**9), st.integers(0, 12))
def test_support_parity_and_refinement(seed, levels):
    p = dyadic_coupling("rademacher", levels, seed)
    assert p.walk[0] == 0.0 and p.brownian[0] == 0.0
    steps = np.diff(p.walk)
    assert set(np.unique(steps)) <= {-1.0, 1.0}
    k = np.arange(p.n + 1)
    assert np.all((p.walk.astype(int) - k) % 2 == 0)
    for coarse, fine in zip(p.block_sums, p.block_sums[1:]):
        np.testing.assert_array_equal(coarse, fine[0::2] + fine[1::2])
    assert len(p.block_sums) == levels + 1


@given(st.integers(0, 10**9), st.sampled_from(["gaussian", "rademacher"]), st.integers(0, 10))
def test_sup_gap_dominates_endpoint(seed, dist, levels):
    p = dyadic_coupling(dist, levels, seed)
    assert sup_gap(p) >= abs(p.walk[-1] - p.brownian[-1])


def test_hypergeometric_quantile_matches_scipy():
    rng = np.random.default_rng(2)
    for _ in range(300):
        pop = int(rng.integers(2, 400))
        succ = int(rng.integers(0, pop + 1))
        draws = int(rng.integers(0, pop + 1))
        u = float(rng.uniform(1e-9, 1.0))
        expected = stats.hypergeom.ppf(u, pop, succ, draws)
        got = _hypergeom_quantile(u, pop, succ, draws)
        assert got == expected


def test_logarithmic_growth_small():
    seeds = range(60)
    ratio = median_sup_gap("rademacher", 12, seeds) / median_sup_gap("rademacher", 6, seeds)
    assert ratio <= 2 * 12 / 6


def test_errors():
    with pytest.raises(UnsupportedDistributionError):
        dyadic_coupling("centered_exponential", 4, 0)
    with pytest.raises(InvalidArgumentError):
        dyadic_coupling("rademacher", MAX_LEVELS + 1, 0)
    with pytest.raises(InvalidArgumentError):
        dyadic_coupling("rademacher", -1, 0)


def test_deterministic():
    a, b = dyadic_coupling("rademacher", 9, 77), dyadic_coupling("rademacher", 9, 77)
    np.testing.assert_array_equal(a.walk, b.walk)
