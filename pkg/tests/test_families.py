"""Model family contracts: characteristics, Fisher information, MLEs,
CDF inversion, and transform round trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from eqdesign import (
    BERNOULLI,
    GAMMA,
    CharacteristicSpec,
    characteristic_value,
    fisher_information,
    inverse_cdf,
    mle,
)
from eqdesign.errors import BoundaryMleError, DegenerateSampleError, DomainError
from eqdesign.numdiff import central_hessian

TAIL_LOGRATIO = CharacteristicSpec(
    kind="tail_probability", comparison="log_ratio", threshold=4.29
)

# Frozen oracle: adaptive quadrature of the gamma(2.11, 0.69) density over
# (4.29, inf), quad error < 1e-13.
THETA_1_0 = 0.22780512997904162

# Frozen oracle: 200x200 grid maximization of the gamma log-likelihood over
# (shape, rate) in [2, 3] x [0.5, 1.1] for 1e4 draws from gamma(2.43, 0.79)
# generated with default_rng(777); grid spacings are (0.00503, 0.00302).
GRID_MLE = (2.457286432160804, 0.7894472361809046)
GRID_SPACING = (0.005025125628140614, 0.0030150753768843908)

# Frozen oracle: bisection on the gamma(2.11, 0.69) CDF to |F - 0.5| < 1e-10.
GAMMA_MEDIAN = 2.5908003412657346

# Frozen oracle: Monte Carlo average of score outer products at gamma(1, 1),
# 1e6 draws from default_rng(20240817).  MC noise bounds agreement near
# three significant figures.
FISHER_MC_GAMMA11 = np.array(
    [[1.649460305134, -1.00285496479], [-1.00285496479, 1.006908836533]]
)


class TestCharacteristicValue:
    def test_survival_at_support_infimum_is_one(self):
        char = CharacteristicSpec("tail_probability", "ratio", threshold=0.0)
        assert characteristic_value(GAMMA, (1.0, 1.0), char) == 1.0

    def test_exponential_median_tail(self):
        char = CharacteristicSpec("tail_probability", "ratio", threshold=math.log(2))
        assert characteristic_value(GAMMA, (1.0, 1.0), char) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_reference_design_tail_probability(self):
        val = characteristic_value(GAMMA, (2.11, 0.69), TAIL_LOGRATIO)
        assert val == pytest.approx(THETA_1_0, rel=1e-10)

    def test_out_of_space_parameters_rejected(self):
        with pytest.raises(DomainError):
            characteristic_value(GAMMA, (-1.0, 1.0), TAIL_LOGRATIO)

    def test_mean_and_raw_parameter(self):
        mean_char = CharacteristicSpec("mean", "difference")
        assert characteristic_value(GAMMA, (2.0, 4.0), mean_char) == pytest.approx(0.5)
        raw = CharacteristicSpec("raw_parameter", "difference", index=1)
        assert characteristic_value(GAMMA, (2.0, 4.0), raw) == 4.0

    def test_tail_probability_monotone_decreasing_in_threshold(self):
        kappas = np.linspace(0.1, 12.0, 40)
        vals = [
            characteristic_value(
                GAMMA,
                (2.11, 0.69),
                CharacteristicSpec("tail_probability", "ratio", threshold=float(k)),
            )
            for k in kappas
        ]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestFisherInformation:
    def test_bernoulli_half(self):
        info = fisher_information(BERNOULLI, (0.5,))
        assert info.shape == (1, 1)
        assert info[0, 0] == 4.0

    def test_bernoulli_boundary_rejected(self):
        with pytest.raises(DomainError):
            fisher_information(BERNOULLI, (0.0,))
        with pytest.raises(DomainError):
            fisher_information(BERNOULLI, (1e-320,))

    def test_gamma_unit_matches_score_outer_product_oracle(self):
        info = fisher_information(GAMMA, (1.0, 1.0))
        analytic = np.array([[math.pi**2 / 6.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(info, analytic, rtol=1e-12)
        np.testing.assert_allclose(info, FISHER_MC_GAMMA11, rtol=1.2e-2)

    @pytest.mark.parametrize(
        "family,etas,m",
        [
            (GAMMA, [(0.7, 0.4), (1.5, 1.0), (2.11, 0.69), (3.2, 2.5), (5.0, 0.9)], 400_000),
            (BERNOULLI, [(0.08,), (0.3,), (0.5,), (0.62,), (0.9,)], 400_000),
        ],
    )
    def test_equals_negative_expected_hessian(self, family, etas, m):
        rng = np.random.default_rng(515)
        for eta in etas:
            y = family.sample(rng, np.asarray(eta, dtype=float), m)
            mean_ll = lambda e: float(np.mean(family.logpdf(y, e)))
            hess = central_hessian(mean_ll, np.asarray(eta, dtype=float))
            info = fisher_information(family, eta)
            np.testing.assert_allclose(-hess, info, rtol=1e-2)


class TestMle:
    def test_bernoulli_sample_proportion(self):
        assert mle(BERNOULLI, [1, 0, 1, 1])[0] == 0.75

    def test_gamma_against_grid_oracle(self):
        rng = np.random.default_rng(777)
        y = rng.gamma(shape=2.43, scale=1 / 0.79, size=10**4)
        est = mle(GAMMA, y)
        assert abs(est[0] - GRID_MLE[0]) <= GRID_SPACING[0]
        assert abs(est[1] - GRID_MLE[1]) <= GRID_SPACING[1]

    def test_zero_variance_gamma_sample(self):
        with pytest.raises(DegenerateSampleError):
            mle(GAMMA, [3.0, 3.0, 3.0])

    def test_all_ones_bernoulli(self):
        with pytest.raises(BoundaryMleError):
            mle(BERNOULLI, [1, 1, 1, 1])

    def test_empty_and_out_of_support(self):
        with pytest.raises(DomainError):
            mle(GAMMA, [])
        with pytest.raises(DomainError):
            mle(GAMMA, [1.0, -2.0])
        with pytest.raises(DomainError):
            mle(BERNOULLI, [0, 1, 2])

    @pytest.mark.parametrize(
        "family,eta0",
        [(GAMMA, (2.11, 0.69)), (GAMMA, (2.43, 0.79)), (BERNOULLI, (0.3,))],
    )
    def test_consistency_at_design_values(self, family, eta0):
        n = 100_000
        rng = np.random.default_rng(hash(eta0) % 2**32)
        y = family.sample(rng, np.asarray(eta0, dtype=float), n)
        est = mle(family, y)
        info = fisher_information(family, eta0)
        jac = family.transform_jacobian_diag(np.asarray(eta0, dtype=float))
        cov_t = jac[:, None] * np.linalg.inv(info) * jac[None, :] / n
        dev = family.transform(est) - family.transform(np.asarray(eta0, dtype=float))
        se = np.sqrt(np.diag(cov_t))
        assert np.all(np.abs(dev) < 5.0 * se)


class TestInverseCdf:
    def test_bernoulli_generalized_inverse(self):
        assert inverse_cdf(BERNOULLI, (0.5,), 0.875) == 1.0
        assert inverse_cdf(BERNOULLI, (0.5,), 0.5) == 0.0

    def test_exponential_median(self):
        assert inverse_cdf(GAMMA, (1.0, 1.0), 0.5) == pytest.approx(
            math.log(2), rel=1e-12
        )

    def test_reference_median_against_bisection_oracle(self):
        assert inverse_cdf(GAMMA, (2.11, 0.69), 0.5) == pytest.approx(
            GAMMA_MEDIAN, abs=1e-9
        )

    def test_u_outside_unit_interval(self):
        for bad in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(DomainError):
                inverse_cdf(GAMMA, (1.0, 1.0), bad)

    @given(
        shape=st.floats(0.2, 8.0),
        rate=st.floats(0.05, 5.0),
        u=st.floats(1e-6, 1.0 - 1e-6),
    )
    @settings(max_examples=250, deadline=None)
    def test_gamma_round_trip_one_sided(self, shape, rate, u):
        y = inverse_cdf(GAMMA, (shape, rate), u)
        back = float(special.gammainc(shape, rate * y))
        assert u - 1e-8 <= back <= u

    @given(theta=st.floats(0.01, 0.99), u=st.floats(1e-6, 1.0 - 1e-6))
    @settings(max_examples=200, deadline=None)
    def test_bernoulli_round_trip_generalized(self, theta, u):
        y = inverse_cdf(BERNOULLI, (theta,), u)
        assert float(BERNOULLI.cdf(y, np.array([theta]))) >= u
