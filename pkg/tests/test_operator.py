import numpy as np
import pytest

from irdeconv import (
    Image,
    Kernel,
    LinearBlurOperator,
    PriorPatch,
    apply_adjoint,
    convergence_factors,
    convolve_circular,
    flip_kernel,
    materialize_operator,
    transfer_function,
)
from helpers import brute_force_convolve, random_image, random_kernel


class TestConvolveCircular:
    def test_delta_is_identity(self):
        rng = np.random.default_rng(0)
        x = random_image(rng, 6, 7)
        out = convolve_circular(x, Kernel.delta(3))
        assert np.abs(out.pixels - x.pixels).max() <= 1e-15

    def test_constant_preserved(self):
        rng = np.random.default_rng(1)
        k = random_kernel(rng, 5)
        x = Image(np.full((8, 8), 0.37))
        out = convolve_circular(x, k)
        assert np.abs(out.pixels - 0.37).max() <= 1e-12

    def test_matches_brute_force_4x4(self):
        rng = np.random.default_rng(2)
        x = random_image(rng, 4, 4)
        k = random_kernel(rng, 3)
        expected = brute_force_convolve(x.pixels, k.taps)
        out = convolve_circular(x, k)
        assert np.abs(out.pixels - expected).max() <= 1e-10

    def test_matches_brute_force_many(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            h, w = rng.integers(3, 9, size=2)
            kh, kw = 2 * rng.integers(0, 2, size=2) + 1
            x = random_image(rng, h, w)
            k = random_kernel(rng, kh, kw)
            expected = brute_force_convolve(x.pixels, k.taps)
            assert np.abs(convolve_circular(x, k).pixels - expected).max() <= 1e-10

    def test_kernel_larger_than_image_raises(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError):
            convolve_circular(random_image(rng, 2, 2), Kernel.delta(3))


class TestAdjoint:
    def test_equals_flip_convolution(self):
        rng = np.random.default_rng(5)
        y = random_image(rng, 6, 6)
        k = random_kernel(rng, 3)
        direct = convolve_circular(y, flip_kernel(k))
        assert np.array_equal(apply_adjoint(y, k).pixels, direct.pixels)

    def test_symmetric_kernel_self_adjoint(self):
        taps = np.array([[0.05, 0.1, 0.05], [0.1, 0.4, 0.1], [0.05, 0.1, 0.05]])
        k = Kernel(taps)
        rng = np.random.default_rng(6)
        y = random_image(rng, 5, 5)
        assert np.array_equal(apply_adjoint(y, k).pixels, convolve_circular(y, k).pixels)

    def test_delta_unchanged(self):
        rng = np.random.default_rng(7)
        y = random_image(rng, 4, 4)
        assert np.abs(apply_adjoint(y, Kernel.delta(1)).pixels - y.pixels).max() <= 1e-15

    def test_inner_product_identity_many(self):
        # <k*x, y> == <x, k_*y> across 100+ random triples.
        rng = np.random.default_rng(8)
        for _ in range(100):
            h, w = rng.integers(3, 10, size=2)
            kh, kw = 2 * rng.integers(0, 2, size=2) + 1
            x = random_image(rng, h, w)
            y = random_image(rng, h, w)
            k = random_kernel(rng, kh, kw)
            lhs = float(np.sum(convolve_circular(x, k).pixels * y.pixels))
            rhs = float(np.sum(x.pixels * apply_adjoint(y, k).pixels))
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)


class TestTransferFunction:
    def test_delta_all_ones(self):
        spec = transfer_function(Kernel.delta(3), (6, 6))
        assert np.abs(spec - 1.0).max() <= 1e-12

    def test_dc_entry_is_one(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            k = random_kernel(rng, 5)
            spec = transfer_function(k, (12, 10))
            assert abs(spec[0, 0] - 1.0) <= 1e-12

    def test_averaging_kernel_closed_form(self):
        # 1x3 box: k_hat(w) = (1 + 2 cos(2 pi w / N)) / 3 along the row axis.
        n = 16
        k = Kernel(np.full((1, 3), 1.0 / 3.0))
        spec = transfer_function(k, (4, n))
        expected = (1.0 + 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)) / 3.0
        for row in range(4):
            assert np.abs(spec[row, :] - expected).max() <= 1e-12

    def test_magnitude_bounded_by_one(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            kh, kw = 2 * rng.integers(0, 3, size=2) + 1
            k = random_kernel(rng, kh, kw)
            spec = transfer_function(k, (16, 16))
            assert np.abs(spec).max() <= 1.0 + 1e-12


class TestConvergenceFactors:
    def test_delta_kernel_factors_equal_sigma(self):
        report = convergence_factors(Kernel.delta(1), PriorPatch.delta(), 0.3, (8, 8))
        assert np.abs(report.factors - 0.3).max() <= 1e-12
        assert report.rho_max == pytest.approx(0.3, abs=1e-12)

    def test_factors_within_open_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            k = random_kernel(rng, 3)
            report = convergence_factors(k, PriorPatch.delta(), 0.01, (12, 12))
            assert report.factors.min() > -0.01 - 1e-12
            assert report.rho_max <= 0.99 + 1e-12
            assert report.rho_max < 1.0

    def test_large_kernel_on_64(self):
        rng = np.random.default_rng(12)
        k = random_kernel(rng, 21)
        report = convergence_factors(k, PriorPatch.delta(), 0.01, (64, 64))
        assert report.rho_max < 1.0
        assert report.factors.shape == (64, 64)

    def test_sigma_bounds_enforced(self):
        with pytest.raises(ValueError):
            convergence_factors(Kernel.delta(1), PriorPatch.delta(), 0.0, (4, 4))
        with pytest.raises(ValueError):
            convergence_factors(Kernel.delta(1), PriorPatch.delta(), 1.0, (4, 4))


class TestMaterializeOperator:
    def test_delta_is_identity_matrix(self):
        m = materialize_operator(Kernel.delta(3), (4, 5))
        assert np.array_equal(m, np.eye(20))

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(13)
        k = random_kernel(rng, 3)
        m = materialize_operator(k, (5, 4))
        assert np.abs(m.sum(axis=1) - 1.0).max() <= 1e-12

    def test_matches_convolution_on_6x6(self):
        rng = np.random.default_rng(14)
        k = random_kernel(rng, 3)
        m = materialize_operator(k, (6, 6))
        for _ in range(10):
            x = random_image(rng, 6, 6)
            via_dense = (m @ x.pixels.ravel()).reshape(6, 6)
            assert np.abs(via_dense - convolve_circular(x, k).pixels).max() <= 1e-12

    def test_flip_gives_transpose(self):
        rng = np.random.default_rng(15)
        for _ in range(5):
            k = random_kernel(rng, 3)
            m = materialize_operator(k, (5, 6))
            mt = materialize_operator(flip_kernel(k), (5, 6))
            assert np.array_equal(mt, m.T)

    def test_oracle_scale_cap(self):
        with pytest.raises(ValueError):
            materialize_operator(Kernel.delta(1), (65, 65))


class TestLinearBlurOperator:
    def test_apply_matches_free_function(self):
        rng = np.random.default_rng(16)
        k = random_kernel(rng, 3)
        op = LinearBlurOperator(k, (6, 6))
        x = random_image(rng, 6, 6)
        assert np.array_equal(op.apply(x).pixels, convolve_circular(x, k).pixels)
        assert np.array_equal(op.apply_adjoint(x).pixels, apply_adjoint(x, k).pixels)

    def test_shape_mismatch_raises(self):
        rng = np.random.default_rng(17)
        op = LinearBlurOperator(random_kernel(rng, 3), (6, 6))
        with pytest.raises(ValueError):
            op.apply(random_image(rng, 5, 6))

    def test_only_circular_boundary(self):
        with pytest.raises(ValueError):
            LinearBlurOperator(Kernel.delta(1), (4, 4), boundary="replicate")

    def test_spectrum_and_dense_views(self):
        rng = np.random.default_rng(18)
        k = random_kernel(rng, 3)
        op = LinearBlurOperator(k, (5, 5))
        assert np.array_equal(op.spectrum(), transfer_function(k, (5, 5)))
        assert np.array_equal(op.dense(), materialize_operator(k, (5, 5)))
