import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gpot.errors import DimMismatch, EmptyInput, InvalidConfig, InvalidInput
from gpot.kernels import (
    KernelSpec,
    cross_gram,
    gram,
    kernel_eval,
    kernel_sup_bound,
    rkhs_dim,
)

SE = KernelSpec.squared_exponential(0.1)
EXP = KernelSpec.exponential(1.0)


def _points(d, lo=1, hi=30):
    return st.integers(lo, hi).flatmap(
        lambda m: arrays(np.float64, (m, d), elements=st.floats(0.0, 1.0, width=64))
    )


class TestKernelSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="se", param=0.0),
            dict(kind="se", param=-1.0),
            dict(kind="exp", param=None),
            dict(kind="poly", degree=0),
            dict(kind="poly", degree=None),
            dict(kind="rbf", param=1.0),
            dict(kind="se", param=1.0, dim=0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfig):
            KernelSpec(**kwargs)

    @pytest.mark.parametrize(
        "k", [SE, EXP, KernelSpec.polynomial(3, dim=4), KernelSpec.exponential(2.5, dim=5)]
    )
    def test_dict_round_trip(self, k):
        assert KernelSpec.from_dict(k.to_dict()) == k

    def test_from_dict_dim_conflict(self):
        with pytest.raises(InvalidConfig):
            KernelSpec.from_dict({"kind": "se", "param": 0.1, "dim": 2}, dim=3)

    def test_from_dict_missing_kind(self):
        with pytest.raises(InvalidConfig):
            KernelSpec.from_dict({"param": 0.1})


class TestKernelEval:
    def test_se_coincident(self):
        assert kernel_eval(SE, [0.3], [0.3]) == 1.0

    def test_se_one_length_scale(self):
        assert kernel_eval(SE, [0.2], [0.3]) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_exp_unit_distance(self):
        assert kernel_eval(EXP, [0.0], [1.0]) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_poly(self):
        k = KernelSpec.polynomial(2, dim=3)
        x, y = [0.1, 0.2, 0.3], [1.0, 0.5, 0.25]
        assert kernel_eval(k, x, y) == pytest.approx((0.1 + 0.1 + 0.075) ** 2, rel=1e-14)

    def test_euclidean_norm_in_higher_dim(self):
        k = KernelSpec.exponential(2.0, dim=2)
        assert kernel_eval(k, [0, 0], [0.3, 0.4]) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(DimMismatch):
            kernel_eval(SE, [0.1, 0.2], [0.1])

    def test_non_finite(self):
        with pytest.raises(InvalidInput):
            kernel_eval(SE, [np.nan], [0.1])


class TestGram:
    def test_se_diagonal_ones(self, rng):
        g = gram(SE, rng.random((15, 1)))
        assert np.array_equal(np.diag(g.base.entries), np.ones(15))

    def test_single_point(self):
        g = gram(EXP, [[0.4]])
        assert g.base.entries.shape == (1, 1) and g.base.entries[0, 0] == 1.0

    def test_line_spacing(self):
        g = gram(SE, [[0.0], [0.1], [0.2]]).base.entries
        assert g[0, 1] == pytest.approx(math.exp(-1), rel=1e-12)
        assert g[1, 2] == pytest.approx(math.exp(-1), rel=1e-12)
        assert g[0, 2] == pytest.approx(math.exp(-4), rel=1e-12)

    def test_entries_match_eval(self, rng):
        k = KernelSpec.exponential(1.3, dim=3)
        X = rng.random((8, 3))
        g = gram(k, X)
        for i in range(8):
            for j in range(8):
                assert g.base.entries[i, j] == pytest.approx(kernel_eval(k, X[i], X[j]), rel=1e-14)
        assert g.m == 8

    def test_empty(self):
        with pytest.raises(EmptyInput):
            gram(SE, np.zeros((0, 1)))

    def test_wrong_dim(self):
        with pytest.raises(DimMismatch):
            gram(KernelSpec.squared_exponential(0.5, dim=2), np.zeros((3, 3)))

    def test_out_of_domain(self):
        with pytest.raises(InvalidInput):
            gram(SE, [[1.5]])

    def test_path_factor(self, rng):
        g = gram(EXP, rng.random((12, 1)))
        f = g.path_factor
        assert np.allclose(f @ f.T, g.base.entries, atol=1e-12)

    @given(_points(1), st.sampled_from([SE, EXP]))
    def test_psd_and_bounded(self, X, k):
        g = gram(k, X).base.entries
        lam = np.linalg.eigvalsh(g)
        assert lam.min() >= -1e-10 * lam.max()
        assert np.all(np.diag(g) <= kernel_sup_bound(k))

    @given(_points(3))
    def test_poly_psd_and_bounded(self, X):
        k = KernelSpec.polynomial(2, dim=3)
        g = gram(k, X).base.entries
        lam = np.linalg.eigvalsh(g)
        assert lam.min() >= -1e-10 * max(lam.max(), 1e-300)
        assert np.all(np.diag(g) <= kernel_sup_bound(k) * (1 + 1e-15))

    @given(_points(2, hi=20), st.floats(-0.5, 0.5))
    def test_translation_invariance(self, X, t):
        for k in (KernelSpec.squared_exponential(0.3, dim=2), KernelSpec.exponential(1.0, dim=2)):
            Y = np.clip(X + t, 0.0, 1.0)
            # Shift only the subset that stays inside the cube intact.
            keep = np.all(Y == X + t, axis=1)
            if not keep.any():
                continue
            a = gram(k, X[keep]).base.entries
            b = gram(k, Y[keep]).base.entries
            assert np.allclose(a, b, rtol=0, atol=1e-12)


class TestCrossGram:
    def test_same_points(self, rng):
        X = rng.random((10, 2))
        k = KernelSpec.squared_exponential(0.4, dim=2)
        assert np.allclose(cross_gram(k, X, X), gram(k, X).base.entries, rtol=0, atol=1e-15)

    def test_scalar(self):
        assert cross_gram(EXP, [[0.1]], [[0.6]])[0, 0] == pytest.approx(kernel_eval(EXP, [0.1], [0.6]))

    def test_rectangular_entries(self, rng):
        X, Y = rng.random((4, 1)), rng.random((7, 1))
        c = cross_gram(SE, X, Y)
        assert c.shape == (4, 7)
        for i in range(4):
            for j in range(7):
                assert c[i, j] == pytest.approx(kernel_eval(SE, X[i], Y[j]), rel=1e-14)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            cross_gram(SE, [[0.1]], np.zeros((0, 1)))


class TestSupBoundAndDim:
    def test_se(self):
        assert kernel_sup_bound(SE) == 1.0

    def test_exp(self):
        assert kernel_sup_bound(EXP) == 1.0

    def test_poly(self):
        assert kernel_sup_bound(KernelSpec.polynomial(2, dim=3)) == 9.0

    def test_rkhs_dim_poly(self):
        assert rkhs_dim(KernelSpec.polynomial(2, dim=3)) == 6

    def test_rkhs_dim_infinite(self):
        assert rkhs_dim(SE) is None

    def test_rkhs_dim_matches_gram_rank(self, rng):
        k = KernelSpec.polynomial(2, dim=3)
        lam = np.linalg.eigvalsh(gram(k, rng.random((40, 3))).base.entries)
        assert int(np.sum(lam > 1e-10 * lam.max())) == rkhs_dim(k)
