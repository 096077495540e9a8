"""Sobol stream and MLE-limit draw contracts."""

import math

import numpy as np
import pytest
from scipy import special

from eqdesign import GAMMA, SobolStream, mle_limit_draw, sobol_points
from eqdesign.errors import CapabilityError, DegeneracyError, DomainError
from eqdesign.qmc import MAX_DIMENSION, split_seed, transformed_mle_covariance

from conftest import bernoulli_design, gamma_design


def analytic_gamma_transformed_cov(a, b):
    """Independent route: closed-form 2x2 inverse and log-scale Jacobian."""
    tri = special.polygamma(1, a)
    det = (tri * a - 1.0) / b**2
    inv = (1.0 / det) * np.array([[a / b**2, 1.0 / b], [1.0 / b, tri]])
    jac = np.diag([1.0 / a, 1.0 / b])
    return jac @ inv @ jac


class TestSobolStream:
    def test_van_der_corput_prefix(self):
        pts = sobol_points(1, 4, seed=None).ravel()
        assert set(pts.tolist()) == {0.0, 0.5, 0.25, 0.75}

    def test_range_with_shift(self):
        pts = sobol_points(2, 1024, seed=123)
        assert pts.shape == (1024, 2)
        assert np.all(pts >= 0.0) and np.all(pts < 1.0)

    @pytest.mark.parametrize("seed", [1, 7, 99])
    def test_shifted_mean_near_half(self, seed):
        pts = sobol_points(1, 1024, seed=seed).ravel()
        assert abs(pts.mean() - 0.5) < 0.01

    @pytest.mark.parametrize("dim", range(1, MAX_DIMENSION + 1))
    def test_dyadic_stratification_every_coordinate(self, dim):
        m = 6
        pts = sobol_points(dim, 2**m, seed=None)
        for j in range(dim):
            cells = np.floor(pts[:, j] * 2**m).astype(int)
            assert sorted(cells.tolist()) == list(range(2**m))

    def test_shift_preserves_stratification(self):
        m = 5
        pts = sobol_points(4, 2**m, seed=42)
        for j in range(4):
            cells = np.floor(pts[:, j] * 2**m).astype(int)
            assert sorted(cells.tolist()) == list(range(2**m))

    def test_deterministic_in_seed(self):
        a = sobol_points(6, 500, seed=2024)
        b = sobol_points(6, 500, seed=2024)
        np.testing.assert_array_equal(a, b)
        c = sobol_points(6, 500, seed=2025)
        assert not np.array_equal(a, c)

    def test_point_by_index_matches_stream(self):
        stream = SobolStream(3, seed=5)
        pts = stream.points(33)
        np.testing.assert_array_equal(stream.point(32), pts[32])

    def test_dimension_beyond_table(self):
        with pytest.raises(CapabilityError):
            SobolStream(MAX_DIMENSION + 1)

    def test_split_seed_decorrelates(self):
        subs = split_seed(0, 3)
        assert len(set(subs)) == 3
        assert subs == split_seed(0, 3)


class TestMleLimitDraw:
    def test_center_point_returns_design_values(self):
        design = gamma_design()
        draw = mle_limit_draw(design, 250.0, np.full(4, 0.5))
        np.testing.assert_array_equal(draw.eta1_hat, design.eta1_array)
        np.testing.assert_array_equal(draw.eta2_hat, design.eta2_array)

    def test_center_point_bernoulli(self):
        design = bernoulli_design(0.3, 0.3)
        draw = mle_limit_draw(design, 100.0, np.full(2, 0.5))
        np.testing.assert_allclose(draw.eta1_hat, [0.3], rtol=4e-16)

    def test_large_n_shrinks_to_design(self):
        design = gamma_design()
        u = np.array([0.9, 0.2, 0.6, 0.3])
        draw = mle_limit_draw(design, 1e9, u)
        dev1 = np.log(draw.eta1_hat) - np.log(design.eta1_array)
        dev2 = np.log(draw.eta2_hat) - np.log(design.eta2_array)
        assert np.all(np.abs(dev1) < 1e-3) and np.all(np.abs(dev2) < 1e-3)

    def test_log_shape_two_sigma_example(self):
        design = gamma_design()
        u = np.array([0.9772, 0.5, 0.5, 0.5])
        draw = mle_limit_draw(design, 100.0, u)
        cov = analytic_gamma_transformed_cov(2.11, 0.69)
        # chol of the analytic covariance: first row is (sqrt(c11), 0), so the
        # first transformed coordinate moves by ndtri(u1) * sqrt(c11 / n)
        expected = math.log(2.11) + special.ndtri(0.9772) * math.sqrt(cov[0, 0] / 100.0)
        assert math.log(draw.eta1_hat[0]) == pytest.approx(expected, rel=1e-12)
        assert math.log(draw.eta1_hat[0]) == pytest.approx(
            math.log(2.11) + 2.0 * math.sqrt(cov[0, 0] / 100.0), abs=2e-4
        )

    def test_transformed_covariance_matches_analytic(self):
        cov = transformed_mle_covariance(GAMMA, np.array([2.11, 0.69]))
        np.testing.assert_allclose(
            cov, analytic_gamma_transformed_cov(2.11, 0.69), rtol=1e-12
        )

    def test_inverse_sqrt_n_scaling_exact(self):
        design = gamma_design()
        u = np.array([0.8, 0.35, 0.6, 0.15])
        base = mle_limit_draw(design, 100.0, u)
        dev_base = np.log(base.eta1_hat) - np.log(design.eta1_array)
        for factor in (4.0, 25.0, 10_000.0):
            draw = mle_limit_draw(design, 100.0 * factor, u)
            dev = np.log(draw.eta1_hat) - np.log(design.eta1_array)
            np.testing.assert_allclose(dev * math.sqrt(factor), dev_base, rtol=1e-12)

    def test_allocation_scaling_of_group_two(self):
        u = np.array([0.8, 0.35, 0.6, 0.15])
        base = mle_limit_draw(gamma_design(q=1.0), 100.0, u)
        scaled = mle_limit_draw(gamma_design(q=4.0), 100.0, u)
        dev_base = np.log(base.eta2_hat) - np.log([2.43, 0.79])
        dev_scaled = np.log(scaled.eta2_hat) - np.log([2.43, 0.79])
        np.testing.assert_allclose(dev_scaled, dev_base / 2.0, rtol=1e-12)

    def test_determinism(self):
        design = gamma_design()
        u = np.array([0.12, 0.9, 0.44, 0.7])
        a = mle_limit_draw(design, 321.0, u)
        b = mle_limit_draw(design, 321.0, u)
        np.testing.assert_array_equal(a.eta1_hat, b.eta1_hat)
        np.testing.assert_array_equal(a.eta2_hat, b.eta2_hat)

    def test_invalid_inputs(self):
        design = gamma_design()
        with pytest.raises(DomainError):
            mle_limit_draw(design, -5.0, np.full(4, 0.5))
        with pytest.raises(DomainError):
            mle_limit_draw(design, 10.0, np.full(3, 0.5))
        with pytest.raises(DomainError):
            mle_limit_draw(design, 10.0, np.array([0.0, 0.5, 0.5, 0.5]))

    def test_singular_covariance_degeneracy(self):
        class _SingularFamily:
            kind = "gamma"
            param_count = 2

            def fisher_information(self, eta):
                return np.array([[1.0, 1.0], [1.0, 1.0]])

            def transform_jacobian_diag(self, eta):
                return np.ones(2)

        with pytest.raises(DegeneracyError):
            transformed_mle_covariance(_SingularFamily(), np.array([1.0, 1.0]))
