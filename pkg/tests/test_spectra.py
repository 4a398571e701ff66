import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from orthocert.genbench import cayley_orthogonal
from orthocert.polyalg import act_linear, homogenize, parse_polynomial
from orthocert.pwcov import pw_covariance
from orthocert.spectra import (
    EigenNotConverged,
    distinctness_check,
    min_gap,
    pw_pca,
    spectra_equal,
    sym_eigen,
)

from conftest import random_homogeneous, random_orthogonal

SCALE = math.pi**2 / 960
CUBIC_LAMBDA = SCALE * np.array(
    [47628 + 243 * math.sqrt(16273), 20655, 47628 - 243 * math.sqrt(16273)]
)


def _sign_matched(V, W, atol):
    signs = np.sign(np.sum(V * W, axis=0))
    return np.abs(V - W * signs).max() <= atol


symmetric = st.integers(1, 12).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-100, 100, allow_subnormal=False))
).map(lambda A: A + A.T)


class TestSymEigen:
    def test_diagonal(self):
        lam, V = sym_eigen(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(lam, [3.0, 2.0, 1.0])
        np.testing.assert_array_equal(V, [[1, 0, 0], [0, 0, 1], [0, 1, 0]])

    def test_cubic_block(self, cubic_f):
        C = pw_covariance(homogenize(cubic_f))[:3, :3]
        lam, V = sym_eigen(C)
        np.testing.assert_allclose(lam, CUBIC_LAMBDA, rtol=1e-13)
        np.testing.assert_allclose(C @ V, V * lam, atol=1e-10)

    @given(symmetric)
    def test_reconstruction(self, C):
        lam, V = sym_eigen(C)
        scale = max(np.linalg.norm(C), 1e-300)
        assert np.linalg.norm(V @ np.diag(lam) @ V.T - C) <= 1e-10 * scale + 1e-300
        assert np.abs(V.T @ V - np.eye(len(C))).max() <= 1e-10
        assert (np.diff(lam) <= 0).all()
        np.testing.assert_allclose(lam, np.linalg.eigvalsh(C)[::-1], atol=1e-10 * max(scale, 1))

    @given(symmetric)
    def test_sign_convention(self, C):
        _, V = sym_eigen(C)
        for j in range(V.shape[1]):
            mags = np.abs(V[:, j])
            lead = np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0]
            assert V[lead, j] > 0

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            sym_eigen([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValueError, match="square"):
            sym_eigen(np.ones((2, 3)))

    def test_non_convergence(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((6, 6))
        with pytest.raises(EigenNotConverged):
            sym_eigen(A + A.T, max_sweeps=1)

    @pytest.mark.parametrize("seed", range(10))
    def test_unique_up_to_signflips(self, seed):
        rng = np.random.default_rng(seed)
        f = random_homogeneous(4, 4, rng)
        C = pw_pca(f).cov
        lam1, V1 = sym_eigen(C)
        Q = random_orthogonal(4, rng)
        lam2, W = sym_eigen(Q @ C @ Q.T)
        V2 = Q.T @ W
        assert distinctness_check(lam1)
        np.testing.assert_allclose(lam2, lam1, rtol=1e-10)
        assert _sign_matched(V2, V1, 1e-8)


class TestPwPca:
    def test_cubic_example(self, cubic_f):
        p = pw_pca(cubic_f)
        np.testing.assert_allclose(p.lam, [808.346, 212.351, 170.966], atol=5e-3)
        expected = np.array([[0.999, 0, 0.047], [0, 1, 0], [-0.047, 0, 0.999]])
        assert _sign_matched(p.V, expected, 1e-3)
        assert p.distinct()

    def test_isotropic_square_sum_is_degenerate(self):
        for n in (2, 3, 4):
            f = parse_polynomial(" + ".join(f"x{i}^2" for i in range(1, n + 1)), n)
            p = pw_pca(f)
            off = p.cov - np.diag(np.diag(p.cov))
            assert np.abs(off).max() == 0
            np.testing.assert_allclose(p.lam, p.lam[0], rtol=1e-14)
            assert not p.distinct()

    def test_rejects_trivial_inputs(self):
        with pytest.raises(ValueError):
            pw_pca(parse_polynomial("3", 2))
        with pytest.raises(ValueError):
            pw_pca(parse_polynomial("x1^2", 1))

    @pytest.mark.parametrize("seed", range(10))
    def test_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        f = random_homogeneous(n, int(rng.integers(2, 6)), rng)
        R = cayley_orthogonal(n, rng)
        pf, pg = pw_pca(f), pw_pca(act_linear(R, f))
        np.testing.assert_allclose(pg.lam, pf.lam, rtol=1e-8)
        assert _sign_matched(pg.V, R.T @ pf.V, 1e-7)


class TestChecks:
    def test_distinctness(self):
        assert distinctness_check([808.346, 212.351, 170.966])
        assert not distinctness_check([5.0, 5.0, 1.0])
        assert not distinctness_check([1e6, 1e6 - 1e-4])
        assert min_gap([3.0]) == math.inf

    def test_spectra_equal(self):
        lam = np.array([808.346, 212.351, 170.966])
        assert spectra_equal(lam, lam * (1 + 1e-9))
        assert not spectra_equal(lam, 4 * lam)
        with pytest.raises(ValueError):
            spectra_equal(lam, lam[:2])

    def test_cubic_pair_spectra_agree(self, cubic_f, cubic_g):
        assert spectra_equal(pw_pca(cubic_f).lam, pw_pca(cubic_g).lam)
