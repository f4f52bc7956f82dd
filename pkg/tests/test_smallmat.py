import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stirap import smallmat
from stirap.dynamics import step_rk4
from stirap.errors import DimensionError, HermiticityViolation, NumericalError
from stirap.model import DriveConfig, SystemConfig, h_rwa

from conftest import random_hermitian

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
real3 = arrays(np.float64, (3, 3), elements=finite)


def complex_mat(n):
    return st.tuples(arrays(np.float64, (n, n), elements=finite),
                     arrays(np.float64, (n, n), elements=finite)).map(lambda p: p[0] + 1j * p[1])


class TestHermEig:
    def test_zero_matrix(self):
        w, v = smallmat.herm_eig(np.zeros((3, 3)))
        np.testing.assert_array_equal(w, [0, 0, 0])
        np.testing.assert_allclose(v, np.eye(3), atol=1e-15)

    def test_diagonal(self):
        w, _ = smallmat.herm_eig(np.diag([0.0, 0.7, 0.0]))
        np.testing.assert_allclose(w, [0, 0, 0.7])

    def test_resonant_ladder_matches_closed_form(self):
        omega = 0.8
        d = DriveConfig(omega, omega, sigma=1e12)
        w, _ = smallmat.herm_eig(h_rwa(0.0, d))
        np.testing.assert_allclose(w, [-omega / np.sqrt(2), 0, omega / np.sqrt(2)], atol=1e-15)

    def test_rejects_non_hermitian(self):
        a = np.zeros((3, 3), dtype=complex)
        a[0, 1] = 1.0
        with pytest.raises(HermiticityViolation):
            smallmat.herm_eig(a)

    @pytest.mark.parametrize("n", [3, 9])
    def test_reconstruction_and_residuals(self, rng, n):
        for _ in range(100):
            a = random_hermitian(rng, n)
            w, v = smallmat.herm_eig(a)
            norm = np.linalg.norm(a)
            assert np.all(np.diff(w) >= 0)
            assert np.linalg.norm(a - (v * w) @ v.conj().T) <= 1e-9 * norm
            assert np.linalg.norm(a @ v - v * w, axis=0).max() <= 1e-10 * norm
            assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-10

    def test_degenerate_basis_is_deterministic(self, rng):
        u = scipy.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
        a = u @ np.diag([1.0, 1.0, 2.0]) @ u.conj().T
        a = (a + a.conj().T) / 2
        v1 = smallmat.herm_eig(a)[1]
        v2 = smallmat.herm_eig(a.copy())[1]
        np.testing.assert_array_equal(v1, v2)

    def test_rejects_other_dimensions(self):
        with pytest.raises(DimensionError):
            smallmat.herm_eig(np.eye(4))


class TestExpm:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(smallmat.expm(np.zeros((9, 9))), np.eye(9))

    def test_diagonal_phase(self):
        theta = 0.9
        out = smallmat.expm(np.diag([1j * theta, 0, 0]))
        np.testing.assert_allclose(out, np.diag([np.exp(1j * theta), 1, 1]), atol=1e-15)

    def test_anti_hermitian_is_unitary(self, rng):
        for _ in range(20):
            u = smallmat.expm(-1j * random_hermitian(rng, 3, scale=5.0))
            assert np.linalg.norm(u @ u.conj().T - np.eye(3)) <= 1e-10

    @pytest.mark.parametrize("n", [3, 9])
    def test_general_matches_scipy(self, rng, n):
        for _ in range(20):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a *= rng.uniform(0.1, 10) / np.linalg.norm(a)
            ref = scipy.linalg.expm(a)
            assert np.linalg.norm(smallmat.expm(a) - ref) <= 1e-12 * np.linalg.norm(ref)

    def test_non_finite(self):
        a = np.zeros((3, 3))
        a[1, 1] = np.nan
        with pytest.raises(NumericalError):
            smallmat.expm(a)

    @settings(max_examples=100, deadline=None)
    @given(complex_mat(3))
    def test_inverse_property(self, a):
        norm = np.linalg.norm(a)
        if norm > 10:
            a = a * (10 / norm)
        prod = smallmat.expm(a) @ smallmat.expm(-a)
        assert np.abs(prod - np.eye(3)).max() <= 1e-9

    def test_unitary_step_agrees_with_rk4_to_fifth_order(self):
        # frozen envelope (sigma huge) so the exact step is exp(-i H dt)
        d = DriveConfig(0.6, 0.4, sigma=1e12, delta01=0.2, delta12=-0.2)
        s = SystemConfig(cross_coupling=False, gamma_tilde=0.0)
        rho = np.zeros((3, 3), dtype=complex)
        rho[0, 0] = 1.0
        errs = []
        for dt in (0.2, 0.1):
            u = smallmat.expm(-1j * h_rwa(0.0, d) * dt)
            exact = u @ rho @ u.conj().T
            errs.append(np.abs(step_rk4(0.0, rho, dt, d, s) - exact).max())
        order = np.log2(errs[0] / errs[1])
        assert errs[0] < 1e-5
        assert order > 4.5


class TestCommutator:
    def test_self_commutator(self, rng):
        a = random_hermitian(rng)
        np.testing.assert_array_equal(smallmat.commutator(a, a), np.zeros((3, 3)))

    def test_diagonals_commute(self):
        out = smallmat.commutator(np.diag([1.0, 2.0, 3.0]), np.diag([4.0, 5.0, 6.0]))
        np.testing.assert_array_equal(out, np.zeros((3, 3)))

    def test_matches_entrywise_product(self):
        x = np.zeros((3, 3))
        x[0, 1] = x[1, 0] = 1.0
        n1 = np.diag([0.0, 1.0, 0.0])
        expected = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                expected[i, j] = sum(x[i, k] * n1[k, j] - n1[i, k] * x[k, j] for k in range(3))
        np.testing.assert_array_equal(smallmat.commutator(x, n1), expected)
        assert smallmat.is_hermitian(1j * smallmat.commutator(x, n1))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            smallmat.commutator(np.eye(3), np.eye(9))

    @settings(max_examples=100, deadline=None)
    @given(complex_mat(3), complex_mat(3))
    def test_traceless(self, a, b):
        assert abs(np.trace(smallmat.commutator(a, b))) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(real3, real3)
    def test_anti_hermitian_for_hermitian_inputs(self, a, b):
        c = smallmat.commutator(a + a.T, b + b.T)
        assert np.abs(c + c.conj().T).max() <= 1e-12
