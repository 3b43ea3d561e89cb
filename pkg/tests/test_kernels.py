"""Tests for standardization, slicing, and SIR/SAVE kernel construction.

Hand-derived moment computations are frozen inline; the independence
check uses a 200-permutation Monte Carlo oracle; slice/moment identities
are asserted exactly.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from indred.errors import (
    DimensionError,
    EmptyData,
    GroupTooSmall,
    NotPositiveDefinite,
    TooFewRows,
)
from indred.kernels import (
    DataSet,
    SliceAssignment,
    Standardizer,
    fit_standardizer,
    kernel_in_x_scale,
    save_kernel_binary,
    sir_kernel,
    slice_response,
    standardize,
)
from indred.linalg import Subspace, frobenius_span_distance, sym_eigen


def dataset(rng, n=200, p=4, beta=None):
    x = rng.standard_normal((n, p))
    beta = np.zeros(p) if beta is None else beta
    y = x @ beta + 0.3 * rng.standard_normal(n)
    return DataSet(X=x, y=y)


class TestDataSet:
    def test_shapes_and_properties(self):
        d = DataSet(X=np.ones((5, 2)), y=np.zeros(5))
        assert d.n == 5 and d.p == 2 and not d.is_censored

    def test_censored_flag(self):
        d = DataSet(X=np.ones((4, 1)), y=np.arange(4.0), status=np.array([1, 0, 1, 1]))
        assert d.is_censored

    def test_rejects_bad_status(self):
        with pytest.raises(ValueError):
            DataSet(X=np.ones((3, 1)), y=np.zeros(3), status=np.array([0, 1, 2]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            DataSet(X=np.array([[np.nan], [1.0], [2.0]]), y=np.zeros(3))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            DataSet(X=np.ones((3, 1)), y=np.zeros(4))


class TestFitStandardizer:
    def test_hand_moments(self):
        # four corner points: mu = (.5, .5), Sigma = diag(.25, .25) with 1/n
        x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        std = fit_standardizer(DataSet(X=x, y=np.arange(4.0)))
        assert_allclose(std.mu_hat, [0.5, 0.5])
        assert_allclose(std.sigma_hat.values, np.diag([0.25, 0.25]), atol=1e-12)
        assert_allclose(std.sigma_inv_sqrt.values, np.diag([2.0, 2.0]), atol=1e-10)

    def test_rank_deficient_guard(self):
        d = DataSet(X=np.array([[0.0, 0.0], [2.0, 2.0]]), y=np.zeros(2))
        with pytest.raises(NotPositiveDefinite) as exc:
            fit_standardizer(d)
        assert "ridge" in str(exc.value)

    def test_too_few_rows(self):
        rng = np.random.default_rng(0)
        d = DataSet(X=rng.standard_normal((3, 2)), y=np.zeros(3))
        with pytest.raises(TooFewRows):
            fit_standardizer(d)

    def test_standardized_moments(self):
        rng = np.random.default_rng(1)
        d = dataset(rng, n=300, p=5)
        std = fit_standardizer(d)
        z = standardize(d, std)
        assert_allclose(z.mean(axis=0), np.zeros(5), atol=1e-8)
        assert_allclose(z.T @ z / d.n, np.eye(5), atol=1e-8)

    def test_inverse_identity(self):
        rng = np.random.default_rng(2)
        d = dataset(rng, n=120, p=3)
        std = fit_standardizer(d)
        prod = std.sigma_inv_sqrt.values @ std.sigma_hat.values @ std.sigma_inv_sqrt.values
        assert np.abs(prod - np.eye(3)).max() <= 1e-8

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        d = dataset(rng, n=150, p=4)
        std = fit_standardizer(d)
        z = standardize(d, std)
        pairs = sym_eigen(std.sigma_hat)
        sigma_sqrt = pairs.vectors @ np.diag(np.sqrt(pairs.values)) @ pairs.vectors.T
        back = std.mu_hat + z @ sigma_sqrt
        assert np.abs(back - d.X).max() <= 1e-8


class TestSliceResponse:
    def test_equal_counts(self):
        sl = slice_response(np.arange(1.0, 11.0), 5)
        assert sl.s == 5
        assert_allclose(sl.counts, [2, 2, 2, 2, 2])
        # slices follow sorted order: {1,2},{3,4},...
        assert list(sl.labels) == [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]

    def test_tie_rule(self):
        sl = slice_response(np.array([1.0, 1.0, 1.0, 1.0, 2.0, 3.0]), 3)
        assert sl.s == 3
        assert_allclose(sl.counts, [4, 1, 1])
        assert list(sl.labels) == [1, 1, 1, 1, 2, 3]

    def test_binary_collapses(self):
        y = np.array([0.0, 1.0] * 10)
        sl = slice_response(y, 10)
        assert sl.s == 2
        assert_allclose(sl.counts, [10, 10])

    def test_discrete_values_own_slice(self):
        sl = slice_response(np.array([1.0, 2.0, 2.0, 3.0]), 3)
        assert sl.s == 3
        assert_allclose(sl.counts, [1, 2, 1])

    def test_ties_never_split(self):
        rng = np.random.default_rng(4)
        y = np.round(rng.uniform(0, 5, size=200), 0)  # heavy ties, 6 values
        for h in (2, 3, 4, 5, 6, 10):
            sl = slice_response(y, h)
            for v in np.unique(y):
                assert len(np.unique(sl.labels[y == v])) == 1
            assert sl.counts.sum() == 200
            assert sl.proportions.sum() == pytest.approx(1.0, abs=1e-12)

    def test_labels_monotone_in_sorted_order(self):
        rng = np.random.default_rng(5)
        y = rng.standard_normal(101)
        sl = slice_response(y, 7)
        assert (np.diff(sl.labels[np.argsort(y, kind="stable")]) >= 0).all()

    def test_h_validation(self):
        with pytest.raises(DimensionError):
            slice_response(np.arange(5.0), 1)
        with pytest.raises(EmptyData):
            slice_response(np.array([]), 2)


class TestSirKernel:
    def test_zero_slice_means(self):
        z = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        labels = np.array([1, 1, 2, 2])
        sl = SliceAssignment(labels=labels, s=2, counts=np.array([2, 2]),
                             proportions=np.array([0.5, 0.5]))
        assert_allclose(sir_kernel(z, sl).values, np.zeros((2, 2)), atol=1e-14)

    def test_eight_point_hand_kernel(self):
        eps = 0.05
        z = np.array(
            [[1.0, eps], [1.0, -eps], [1.0, eps], [1.0, -eps],
             [-1.0, eps], [-1.0, -eps], [-1.0, eps], [-1.0, -eps]]
        )
        sl = SliceAssignment(labels=np.array([1] * 4 + [2] * 4), s=2,
                             counts=np.array([4, 4]), proportions=np.array([0.5, 0.5]))
        k = sir_kernel(z, sl)
        assert_allclose(k.values, np.outer([1.0, 0.0], [1.0, 0.0]), atol=1e-12)
        assert_allclose(sym_eigen(k).vectors[:, 0], [1.0, 0.0], atol=1e-12)

    def test_permutation_oracle(self):
        # with labels independent of Z the kernel norm is O(n^{-1/2})
        rng = np.random.default_rng(6)
        n, p = 2000, 4
        d = dataset(rng, n=n, p=p, beta=np.array([1.0, -1.0, 0.0, 0.0]))
        std = fit_standardizer(d)
        z = standardize(d, std)
        norms = []
        for _ in range(200):
            y_perm = rng.permutation(d.y)
            k = sir_kernel(z, slice_response(y_perm, 10))
            norms.append(np.sqrt((k.values ** 2).sum()))
        assert max(norms) < 0.2

    def test_psd_and_rank(self):
        rng = np.random.default_rng(7)
        d = dataset(rng, n=400, p=6, beta=np.array([1.0, 2.0, 0, 0, 0, 0]))
        std = fit_standardizer(d)
        z = standardize(d, std)
        for h in (3, 5, 8):
            sl = slice_response(d.y, h)
            vals = sym_eigen(sir_kernel(z, sl)).values
            assert vals.min() >= -1e-10
            # weighted slice means of exactly-standardized Z sum to zero: rank <= s-1
            if sl.s - 1 < d.p:
                assert np.abs(vals[sl.s - 1:]).max() < 1e-8

    def test_sandwich_equality(self):
        # Z-scale computation equals the literal X-scale sandwich S M S
        rng = np.random.default_rng(8)
        d = dataset(rng, n=250, p=4, beta=np.array([1.0, 0.5, 0.0, 0.0]))
        std = fit_standardizer(d)
        z = standardize(d, std)
        sl = slice_response(d.y, 6)
        k = sir_kernel(z, sl).values
        m = np.zeros((4, 4))
        for i in range(1, sl.s + 1):
            mean_x = d.X[sl.labels == i].mean(axis=0)
            f = sl.counts[i - 1] / d.n
            dev = mean_x - std.mu_hat
            m += f * np.outer(dev, dev)
        s = std.sigma_inv_sqrt.values
        assert np.abs(k - s @ m @ s).max() < 1e-10


class TestSaveKernelBinary:
    def test_identical_groups(self):
        base = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        z = np.vstack([base, base])
        labels = np.array([0] * 4 + [1] * 4)
        assert_allclose(save_kernel_binary(z, labels).values, np.zeros((2, 2)), atol=1e-14)

    def test_mean_shift_block(self):
        # groups with exact means -+e1 and identical covariances: KK' = 4 e1e1'
        v = np.array([[0.3, 0.4], [-0.3, -0.4], [0.1, -0.2], [-0.1, 0.2]])
        z = np.vstack([v + np.array([-1.0, 0.0]), v + np.array([1.0, 0.0])])
        labels = np.array([0] * 4 + [1] * 4)
        k = save_kernel_binary(z, labels)
        assert_allclose(k.values, 4.0 * np.outer([1.0, 0.0], [1.0, 0.0]), atol=1e-12)

    def test_covariance_difference_block(self):
        # equal means, covariances diag(1,1) vs diag(3,1): KK' = 4 e1e1'
        g0 = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        r = np.sqrt(3.0)
        g1 = np.array([[r, 1.0], [r, -1.0], [-r, 1.0], [-r, -1.0]])
        z = np.vstack([g0, g1])
        labels = np.array([0] * 4 + [1] * 4)
        k = save_kernel_binary(z, labels)
        assert_allclose(k.values, np.diag([4.0, 0.0]), atol=1e-12)

    def test_label_swap_invariance(self):
        rng = np.random.default_rng(9)
        z = rng.standard_normal((60, 3))
        labels = (rng.uniform(size=60) < 0.4).astype(int)
        k_a = save_kernel_binary(z, labels).values
        k_b = save_kernel_binary(z, 1 - labels).values
        assert np.array_equal(k_a, k_b)

    def test_group_too_small(self):
        z = np.ones((5, 2))
        with pytest.raises(GroupTooSmall):
            save_kernel_binary(z, np.array([1, 1, 1, 1, 0]))
        with pytest.raises(GroupTooSmall):
            save_kernel_binary(z, np.array([1, 1, 1, 1, 1]))


class TestKernelInXScale:
    def test_identity_standardizer(self):
        std = Standardizer.identity(2)
        k = np.diag([2.0, 1.0])
        g = kernel_in_x_scale(k, std, 1)
        assert_allclose(g, np.array([[1.0], [0.0]]), atol=1e-12)

    def test_diagonal_scaling(self):
        x = np.diag([4.0, 4.0])
        std = Standardizer.from_moments(np.zeros(2), x)
        g = kernel_in_x_scale(np.outer([1.0, 0.0], [1.0, 0.0]), std, 1)
        assert_allclose(g, np.array([[0.5], [0.0]]), atol=1e-10)


class TestAffineEquivariance:
    @pytest.mark.parametrize("c", [3.7, -2.1])
    def test_scalar_affine(self, c):
        rng = np.random.default_rng(10)
        d = dataset(rng, n=300, p=4, beta=np.array([1.0, 2.0, 0.0, 0.0]))
        b = rng.standard_normal(4)

        def sir_direction(data):
            std = fit_standardizer(data)
            z = standardize(data, std)
            k = sir_kernel(z, slice_response(data.y, 8))
            return Subspace.from_columns(kernel_in_x_scale(k, std, 1))

        span_x = sir_direction(d)
        span_cx = sir_direction(DataSet(X=c * d.X + b, y=d.y))
        assert frobenius_span_distance(span_x, span_cx) < 1e-6
