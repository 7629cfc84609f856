import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from robustci.dist import (
    FinitePmf,
    SampleSet,
    bernstein_dev,
    binom_cdf,
    binom_pmf,
    binom_pmf_array,
    binomial_finite_pmf,
    dkw_halfwidth,
    empirical_cdf,
    pois_cdf,
    pois_pmf,
    pois_sf,
    poisson_finite_pmf,
    tv_distance,
)
from oracles import binom_pmf_product


class TestBinomPmf:
    def test_hand_enumeration(self):
        # C(4,2)/2^4 = 6/16
        assert_allclose(binom_pmf(4, 0.5, 2), 0.375, rtol=1e-14)

    def test_degenerate_at_zero(self):
        assert binom_pmf(7, 0.0, 0) == 1.0
        assert binom_pmf(7, 0.0, 3) == 0.0

    def test_degenerate_at_m(self):
        assert binom_pmf(3, 1.0, 3) == 1.0
        assert binom_pmf(3, 1.0, 2) == 0.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            binom_pmf(4, 0.5, 5)
        with pytest.raises(ValueError):
            binom_pmf(4, 0.5, -1)
        with pytest.raises(ValueError):
            binom_pmf(4, 1.5, 2)

    def test_sums_to_one_on_grid(self):
        for m in range(1, 51):
            for p in np.arange(0.0, 1.0001, 0.05):
                total = sum(binom_pmf(m, p, k) for k in range(m + 1))
                assert abs(total - 1.0) < 1e-12, (m, p)

    def test_log_space_matches_direct_product(self):
        rng = np.random.default_rng(5)
        for m in (1, 5, 17, 30):
            for p in rng.uniform(0.01, 0.99, size=5):
                for k in range(m + 1):
                    direct = binom_pmf_product(m, p, k)
                    assert_allclose(binom_pmf(m, p, k), direct, rtol=1e-10)

    def test_array_matches_scalar(self):
        arr = binom_pmf_array(9, 0.37)
        for k in range(10):
            assert_allclose(arr[k], binom_pmf(9, 0.37, k), rtol=1e-13)


class TestBinomCdf:
    def test_hand_sum(self):
        expected = sum(binom_pmf(4, 0.5, k) for k in range(3))
        assert_allclose(binom_cdf(4, 0.5, 2.0), expected, rtol=1e-14)
        assert binom_cdf(4, 0.5, 2.0) == pytest.approx(0.6875)

    def test_negative_threshold(self):
        assert binom_cdf(4, 0.5, -0.5) == 0.0

    def test_floor_semantics(self):
        assert binom_cdf(4, 0.5, 2.9) == binom_cdf(4, 0.5, 2.0)

    def test_nonincreasing_in_p(self):
        for m in (1, 6, 20):
            for t in (0.0, 1.0, m / 2, m - 1):
                vals = [binom_cdf(m, p, t) for p in np.linspace(0, 1, 21)]
                assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


class TestPoisson:
    def test_pmf_closed_form(self):
        assert_allclose(pois_pmf(1.0, 0), math.exp(-1.0), rtol=1e-14)

    def test_cdf_point_mass(self):
        assert pois_cdf(0.0, 0) == 1.0

    def test_sf_hand_value(self):
        assert_allclose(pois_sf(2.0, 1.0), 1.0 - math.exp(-2.0), rtol=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            pois_pmf(-1.0, 0)
        with pytest.raises(ValueError):
            pois_cdf(-0.1, 3)

    def test_cdf_sf_monotone_in_lambda(self):
        lams = np.linspace(0.0, 12.0, 25)
        for t in (0.0, 1.0, 3.0, 7.5):
            cdfs = [pois_cdf(lam, t) for lam in lams]
            sfs = [pois_sf(lam, t) for lam in lams]
            assert all(a >= b - 1e-12 for a, b in zip(cdfs, cdfs[1:]))
            assert all(a <= b + 1e-12 for a, b in zip(sfs, sfs[1:]))

    def test_truncation_tail(self):
        pmf = poisson_finite_pmf(3.7)
        assert pois_sf(3.7, pmf.support_max + 1) < 1e-14
        assert_allclose(pmf.probs.sum(), 1.0, atol=1e-15)


class TestEmpiricalCdf:
    def test_hand_count(self):
        s = SampleSet(np.array([0, 1, 1, 3]))
        assert empirical_cdf(s, 1.0) == 0.75

    def test_below_support(self):
        s = SampleSet(np.array([0, 2, 5]))
        assert empirical_cdf(s, -1.0) == 0.0

    def test_single_point(self):
        assert empirical_cdf(SampleSet(np.array([5])), 5) == 1.0

    def test_right_continuous_nondecreasing(self):
        s = SampleSet(np.array([1, 1, 2, 4, 9]))
        ts = np.linspace(-1, 10, 67)
        vals = [empirical_cdf(s, t) for t in ts]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
        assert empirical_cdf(s, 9) == 1.0


class TestConcentration:
    def test_dkw_formula(self):
        assert_allclose(dkw_halfwidth(200, 0.05),
                        math.sqrt(math.log(40.0) / 400.0), rtol=1e-14)
        assert dkw_halfwidth(200, 0.05) == pytest.approx(0.0960323, abs=1e-6)

    def test_dkw_exact_half(self):
        # log(2 / (2/e)) = 1, sqrt(1/4) = 1/2
        assert_allclose(dkw_halfwidth(2, 2.0 / math.e), 0.5, rtol=1e-14)

    def test_dkw_scaling(self):
        for n in (3, 50, 1000):
            assert_allclose(dkw_halfwidth(4 * n, 0.1),
                            dkw_halfwidth(n, 0.1) / 2.0, rtol=1e-14)

    def test_dkw_domain(self):
        with pytest.raises(ValueError):
            dkw_halfwidth(0, 0.1)
        with pytest.raises(ValueError):
            dkw_halfwidth(5, 1.5)

    def test_bernstein_formula(self):
        expected = 100 * 0.25 / 2.0 + 2.0 * math.log(40.0)
        assert_allclose(bernstein_dev(100, 0.5, 0.05, 2.0), expected, rtol=1e-14)

    def test_bernstein_zero_variance(self):
        for p in (0.0, 1.0):
            assert_allclose(bernstein_dev(50, p, 0.1, 1.5),
                            1.5 * math.log(20.0), rtol=1e-14)

    def test_bernstein_slack_domain(self):
        with pytest.raises(ValueError):
            bernstein_dev(10, 0.5, 0.1, 1.0)


class TestTvDistance:
    def test_bernoulli_pair(self):
        a = binomial_finite_pmf(1, 0.1)
        b = binomial_finite_pmf(1, 0.0)
        assert_allclose(tv_distance(a, b), 0.1, rtol=1e-12)

    def test_identity(self):
        p = binomial_finite_pmf(6, 0.3)
        assert tv_distance(p, p) == 0.0

    def test_monotone_toward_zero(self):
        # TV(Binom(m,p), Binom(m,p')) <= TV(Binom(m,p), Binom(m,0))
        for m in (2, 7):
            for p in (0.2, 0.6, 0.9):
                base = binomial_finite_pmf(m, p)
                cap = tv_distance(base, binomial_finite_pmf(m, 0.0))
                for pp in np.linspace(0.0, p, 9):
                    assert tv_distance(base, binomial_finite_pmf(m, pp)) <= cap + 1e-12

    def test_mismatched_supports(self):
        a = FinitePmf(0, np.array([0.5, 0.5]))
        b = FinitePmf(2, np.array([1.0]))
        assert_allclose(tv_distance(a, b), 1.0, rtol=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8),
           st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8),
           st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8))
    def test_triangle_inequality(self, wa, wb, wc):
        size = max(len(wa), len(wb), len(wc))

        def pmf(w):
            arr = np.zeros(size)
            arr[: len(w)] = w
            return FinitePmf(0, arr / arr.sum())

        a, b, c = pmf(wa), pmf(wb), pmf(wc)
        assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12


class TestContainers:
    def test_pmf_rejects_negative(self):
        with pytest.raises(ValueError):
            FinitePmf(0, np.array([1.1, -0.1]))

    def test_pmf_rejects_bad_total(self):
        with pytest.raises(ValueError):
            FinitePmf(0, np.array([0.5, 0.4]))

    def test_sample_set_rejects_negative(self):
        with pytest.raises(ValueError):
            SampleSet(np.array([1, -2]))

    def test_sample_set_rejects_empty(self):
        with pytest.raises(ValueError):
            SampleSet(np.array([], dtype=int))

    def test_sample_set_rejects_fractional(self):
        with pytest.raises(ValueError):
            SampleSet(np.array([1.5, 2.0]))

    def test_sample_set_accepts_integral_floats(self):
        s = SampleSet(np.array([1.0, 2.0]))
        assert s.n == 2
