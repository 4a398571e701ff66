import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orthocert.genbench import cayley_orthogonal, genericity_witness
from orthocert.polyalg import Polynomial, act_linear, homogenize, parse_polynomial
from orthocert.pwcov import (
    cov_oracle,
    cov_quadrature_circle,
    cov_scale,
    double_factorial,
    psi,
    pw_covariance,
    sphere_monomial_integral,
    variance_along,
)

from conftest import polynomials, random_homogeneous

CUBIC_COV = np.array(
    [[78489, 0, -2916, 0], [0, 20655, 0, 0], [-2916, 0, 16767, 0], [0, 0, 0, 12879]]
) * (math.pi**2 / 960)


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_double_factorial():
    assert [double_factorial(s) for s in (-1, 0, 1, 2, 3, 5, 7, 8)] == [1, 1, 1, 2, 3, 15, 105, 384]
    with pytest.raises(ValueError):
        double_factorial(-3)


class TestPsi:
    def test_all_even(self):
        np.testing.assert_array_equal(psi((4, 0, 0)), 3 * np.diag([5, 1, 1]))

    def test_two_odd(self):
        np.testing.assert_array_equal(psi((1, 1)), [[0, 1], [1, 0]])
        np.testing.assert_array_equal(psi((3, 2, 1)), [[0, 0, 3], [0, 0, 0], [3, 0, 0]])

    def test_one_or_three_odd_vanish(self):
        assert not psi((1, 0, 0)).any()
        assert not psi((1, 1, 1)).any()

    @given(st.lists(st.integers(0, 12), min_size=1, max_size=5))
    def test_symmetric_non_negative_integer(self, mu):
        P = psi(mu)
        np.testing.assert_array_equal(P, P.T)
        assert (P >= 0).all() and (P == np.round(P)).all()


class TestScale:
    def test_values(self):
        assert math.isclose(cov_scale(4, 3), math.pi**2 / (2**3 * 120), rel_tol=1e-14)
        assert math.isclose(cov_scale(4, 3), 0.0102808, rel_tol=1e-5)
        # Cov(x1^2) on S^2 is 4pi/105 * psi((4,0,0))
        assert math.isclose(cov_scale(3, 2), 4 * math.pi / 105, rel_tol=1e-14)
        assert math.isclose(cov_scale(2, 0), math.pi, rel_tol=1e-14)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            cov_scale(0, 1)


class TestSphereIntegral:
    def test_values(self):
        assert math.isclose(sphere_monomial_integral((0, 0)), 2 * math.pi, rel_tol=1e-14)
        assert math.isclose(sphere_monomial_integral((6, 0, 0)), 4 * math.pi / 7, rel_tol=1e-14)
        assert math.isclose(sphere_monomial_integral((0, 0, 0)), 4 * math.pi, rel_tol=1e-14)
        assert sphere_monomial_integral((1, 2)) == 0.0

    def test_against_circle_quadrature(self):
        theta = 2 * np.pi * np.arange(64) / 64
        for a, b in [(2, 4), (6, 0), (8, 2)]:
            trap = np.sum(np.cos(theta) ** a * np.sin(theta) ** b) * 2 * np.pi / 64
            assert math.isclose(sphere_monomial_integral((a, b)), trap, rel_tol=1e-12)


class TestCovariance:
    def test_cubic_example(self, cubic_f):
        C = pw_covariance(homogenize(cubic_f))
        assert _rel(C, CUBIC_COV) < 1e-12
        np.testing.assert_allclose(
            np.diag(C), [806.933, 212.351, 172.379, 132.407], atol=5e-4
        )
        assert math.isclose(C[0, 2], -29.979, abs_tol=5e-4)

    def test_variance_along_axis(self, cubic_f):
        fbar = homogenize(cubic_f)
        assert math.isclose(variance_along(fbar, [0, 1, 0, 0]), 212.351, abs_tol=5e-4)
        with pytest.raises(ValueError, match="unit"):
            variance_along(fbar, [0, 2, 0, 0])

    def test_single_square(self):
        C = pw_covariance(parse_polynomial("x1^2", 3))
        np.testing.assert_allclose(C, np.diag([4 * math.pi / 7, 4 * math.pi / 35, 4 * math.pi / 35]), rtol=1e-14)

    def test_rejects_invalid_input(self, cubic_f):
        with pytest.raises(ValueError, match="homogeneous"):
            pw_covariance(cubic_f)
        with pytest.raises(ValueError, match="zero"):
            pw_covariance(Polynomial.zero(3))

    def test_oracle_on_cubic_example(self, cubic_f):
        fbar = homogenize(cubic_f)
        assert _rel(pw_covariance(fbar), cov_oracle(fbar)) < 1e-10

    @given(polynomials(nvars=st.integers(2, 4), max_degree=6, max_terms=8, homogeneous=True))
    def test_matches_sphere_integral_oracle(self, f):
        assert _rel(pw_covariance(f), cov_oracle(f)) < 1e-9

    @given(polynomials(nvars=2, max_degree=9, max_terms=10, homogeneous=True))
    def test_matches_circle_quadrature(self, f):
        assert _rel(pw_covariance(f), cov_quadrature_circle(f)) < 1e-10

    @given(polynomials(nvars=st.integers(2, 4), max_degree=5, max_terms=8, homogeneous=True))
    def test_symmetric_psd(self, f):
        C = pw_covariance(f)
        np.testing.assert_array_equal(C, C.T)
        assert np.linalg.eigvalsh(C).min() >= -1e-9 * np.trace(C)

    @pytest.mark.parametrize("seed", range(8))
    def test_orthogonal_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(2, 5)), int(rng.integers(2, 6))
        f = random_homogeneous(n, d, rng, density=0.7)
        R = cayley_orthogonal(n, rng)
        assert _rel(pw_covariance(act_linear(R, f)), R.T @ pw_covariance(f) @ R) < 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_homogenized_block_equivariance(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 4))
        f = random_homogeneous(n, 3, rng) + random_homogeneous(n, 1, rng) + 2.0
        R = cayley_orthogonal(n, rng)
        lhs = pw_covariance(homogenize(act_linear(R, f)))[:n, :n]
        rhs = R.T @ pw_covariance(homogenize(f))[:n, :n] @ R
        assert _rel(lhs, rhs) < 1e-8

    def test_even_support_is_diagonal(self):
        C = pw_covariance(homogenize(genericity_witness(4, 6)))
        assert not (C - np.diag(np.diag(C))).any()
