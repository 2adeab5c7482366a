import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg

from dunkl_qm.engine import (EigenDecomposition, SliceScheme, channel_spectrum, compose_kernels,
                             convergence_report, diagonalize, ground_state_imaginary_time,
                             radial_short_time_kernel, short_time_kernel, slice_weights,
                             time_sliced_kernel, tridiagonal_eigenvalues, tridiagonalize)
from dunkl_qm.errors import ConvergenceError, DivergenceError, DomainError, NumericalWarning
from dunkl_qm.operators import (DunklParams, HalfGrid, as_channel, hamiltonian_matrix,
                                harmonic_potential)
from dunkl_qm.propagators import ComplexTime, half_line_kernel
from dunkl_qm.reference import heat_kernel


# --- short-time kernels ------------------------------------------------------

def test_short_time_kernel_frozen():
    p = DunklParams(nu=0.5)
    got = short_time_kernel(1.0, 1.0, 0.1, 1, p, harmonic_potential(p))
    assert got == pytest.approx(1.21513358018983824, rel=1e-14)
    # the odd channel at nu = 1/2 has the same V_eff = 3/8 without a potential
    assert short_time_kernel(1.0, 1.0, 0.1, -1, p) == pytest.approx(1.21513358018983824, rel=1e-14)


def test_short_time_kernel_formula():
    p = DunklParams(nu=0.3, mass=2.0, hbar=0.5)
    eps, yb, ya = 0.05, 1.2, 1.0
    veff = 0.5 ** 2 * (0.2 ** 2 - 0.25) / (2 * 2.0 * yb ** 2)
    expected = math.sqrt(2.0 / (2 * math.pi * 0.5 * eps)) * math.exp(
        -(2.0 * (yb - ya) ** 2 / (2 * eps) + eps * veff) / 0.5)
    assert short_time_kernel(yb, ya, eps, 1, p) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        short_time_kernel(1.0, 1.0, 0.0, 1, p)


def test_radial_short_time_kernel_is_exact_free_kernel():
    p = DunklParams(nu=0.5)
    V = harmonic_potential(p)
    expected = half_line_kernel(1.3, 0.9, ComplexTime.euclidean(0.1), -1, p).real * math.exp(-0.1 * V(1.3))
    assert radial_short_time_kernel(1.3, 0.9, 0.1, -1, p, V) == pytest.approx(expected, rel=1e-14)


def test_slice_scheme():
    assert SliceScheme(1.0, 3).eps == 0.25
    for tau, n in [(0.0, 3), (1.0, 0), (1.0, 2.5)]:
        with pytest.raises(DomainError):
            SliceScheme(tau, n)


def test_one_slice_definition():
    # N = 1: k(yb, ya) = sum_j w_j k_eps(yb, y_j) k_eps(y_j, ya)
    p = DunklParams(nu=0.0)
    half = HalfGrid(6.0, 300)
    K = time_sliced_kernel(1, p, 0.2, 1, half, rule="gaussian")
    y = half.nodes
    i, j = 40, 55
    manual = np.sum(short_time_kernel(y[i], y, 0.1, 1, p) * short_time_kernel(y, y[j], 0.1, 1, p)) * half.h
    assert K.values[i, j] == pytest.approx(manual, rel=1e-13)


def test_time_sliced_heat_kernel_target():
    p = DunklParams(nu=0.0)
    half = HalfGrid(12.0, 1200)
    K = time_sliced_kernel(1, p, 1.0, 256, half)
    y = half.nodes
    i, j = np.searchsorted(y, 1.0), np.searchsorted(y, 0.5)
    exact = heat_kernel(y[i], y[j], 1.0) + heat_kernel(y[i], -y[j], 1.0)
    assert K.values[i, j] == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("s", [1, -1])
def test_time_sliced_free_nu_half(s):
    p = DunklParams(nu=0.5)
    half = HalfGrid(12.0, 1200)
    K = time_sliced_kernel(s, p, 1.0, 32, half)
    y = half.nodes
    exact = half_line_kernel(y[:, None], y[None, :], ComplexTime.euclidean(1.0), s, p).real
    window = (y > 0.2) & (y < 3.0)
    err = np.max(np.abs(K.values - exact)[np.ix_(window, window)]) / np.max(exact)
    assert err <= 1e-2


def test_time_sliced_oscillator_converges():
    p = DunklParams(nu=0.5)
    half = HalfGrid(8.0, 600)
    V = harmonic_potential(p)
    y = half.nodes
    i, j = np.searchsorted(y, 1.0), np.searchsorted(y, 0.6)
    exact = half_line_kernel(y[i], y[j], ComplexTime.euclidean(1.0), 1, p, "harmonic").real
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        errors = [(n, abs(time_sliced_kernel(1, p, 1.0, n, half, V).values[i, j] - exact))
                  for n in (8, 16, 32, 64)]
    assert errors[-1][1] / exact < 5e-3
    assert convergence_report(errors) < -0.9


def test_gaussian_rule_warns_and_diverges_in_attractive_channel():
    p = DunklParams(nu=0.5)
    half = HalfGrid(4.0, 4000)
    with pytest.warns(NumericalWarning):
        with pytest.raises(DivergenceError):
            time_sliced_kernel(1, p, 1.0, 8, half, rule="gaussian")


def test_unknown_rule():
    with pytest.raises(DomainError):
        time_sliced_kernel(1, DunklParams(), 1.0, 2, HalfGrid(2.0, 10), rule="midpoint")


@pytest.mark.filterwarnings("ignore::dunkl_qm.errors.NumericalWarning")
def test_semigroup_on_grid():
    p = DunklParams(nu=0.7)
    half = HalfGrid(10.0, 600)
    V = harmonic_potential(p)
    a = time_sliced_kernel(-1, p, 0.4, 3, half, V)
    b = time_sliced_kernel(-1, p, 0.6, 5, half, V)
    whole = time_sliced_kernel(-1, p, 1.0, 9, half, V)
    w = slice_weights(as_channel(-1), p, half, "radial", None)
    np.testing.assert_allclose(compose_kernels(a, b, w), whole.values,
                               atol=1e-12 * np.max(whole.values))
    with pytest.raises(DomainError):
        compose_kernels(a, time_sliced_kernel(-1, p, 0.6, 5, HalfGrid(10.0, 300), V), w)


# --- eigensolver -------------------------------------------------------------

def test_diagonalize_examples():
    d = diagonalize(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(d.eigenvalues, [1.0, 3.0], atol=1e-15)
    d = diagonalize(np.eye(5))
    np.testing.assert_allclose(d.eigenvalues, np.ones(5), atol=0)
    np.testing.assert_allclose(d.eigenvectors.T @ d.eigenvectors, np.eye(5), atol=1e-15)


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=0, max_value=2 ** 32 - 1))
@settings(max_examples=40, deadline=None)
def test_diagonalize_random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    H = A + A.T
    d = diagonalize(H)
    np.testing.assert_allclose(d.eigenvalues, linalg.eigvalsh(H), atol=1e-11 * max(1, np.abs(H).max()))
    V = d.eigenvectors
    assert np.max(np.abs(V.T @ V - np.eye(n))) <= 1e-10
    assert np.max(d.residuals(H)) <= 1e-9 * np.linalg.norm(H, 2) + 1e-300


def test_diagonalize_graded_and_degenerate():
    H = np.diag(10.0 ** np.arange(-8, 9)) + np.diag(np.full(16, 1e-3), 1) + np.diag(np.full(16, 1e-3), -1)
    d = diagonalize(H)
    np.testing.assert_allclose(d.eigenvalues, linalg.eigvalsh(H), rtol=1e-12, atol=1e-14)
    Q = np.linalg.qr(np.random.default_rng(1).standard_normal((6, 6)))[0]
    H = Q @ np.diag([1.0, 1.0, 1.0, 2.0, 2.0, 5.0]) @ Q.T
    d = diagonalize(H)
    np.testing.assert_allclose(d.eigenvalues, [1, 1, 1, 2, 2, 5], atol=1e-13)
    assert np.max(d.residuals(H)) < 1e-12


def test_tridiagonalize_similarity():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((12, 12))
    H = A + A.T
    diag, off, Q = tridiagonalize(H)
    T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    np.testing.assert_allclose(Q @ T @ Q.T, H, atol=1e-12)
    np.testing.assert_allclose(Q.T @ Q, np.eye(12), atol=1e-13)


def test_eigenvalues_only_path():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((20, 20))
    d = diagonalize(A + A.T, vectors=False)
    assert d.eigenvectors is None
    np.testing.assert_allclose(d.eigenvalues, linalg.eigvalsh(A + A.T), atol=1e-12)
    with pytest.raises(DomainError):
        d.residuals(A + A.T)
    diag, off = rng.standard_normal(30), rng.standard_normal(29)
    T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    np.testing.assert_allclose(tridiagonal_eigenvalues(diag, off), linalg.eigvalsh(T), atol=1e-12)


def test_diagonalize_errors():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((8, 8))
    with pytest.raises(ConvergenceError):
        diagonalize(A + A.T, max_iter=0)
    with pytest.raises(DomainError):
        diagonalize(A)
    with pytest.raises(DomainError):
        diagonalize(np.ones((2, 3)))


def test_oscillator_odd_ground_level():
    p = DunklParams(nu=0.5)
    half = HalfGrid(12.0, 2000)
    d = diagonalize(hamiltonian_matrix(-1, p, half, harmonic_potential(p)), vectors=False)
    assert d.eigenvalues[0] == pytest.approx(2.0, abs=1e-4)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.3])
def test_channel_spectrum_extrapolated(nu):
    p = DunklParams(nu=nu)
    half = HalfGrid(10.0, 1000)
    for s in (1, -1):
        levels = channel_spectrum(s, p, half, harmonic_potential(p), count=5)
        exact = 2 * np.arange(5) + nu + (0.5 if s == 1 else 1.5)
        np.testing.assert_allclose(levels, exact, atol=1e-5)
    with pytest.raises(DomainError):
        channel_spectrum(1, p, HalfGrid(10.0, 999), harmonic_potential(p))


# --- imaginary time ----------------------------------------------------------

@pytest.mark.parametrize("nu, expected", [(0.5, 1.0), (0.0, 0.5)])
def test_ground_state(nu, expected):
    p = DunklParams(nu=nu)
    half = HalfGrid(8.0, 400)
    e, phi = ground_state_imaginary_time(1, p, half, harmonic_potential(p), 0.01, 1000)
    assert e == pytest.approx(expected, abs=1e-3)
    y = half.nodes
    exact = y ** nu * np.exp(-0.5 * y * y)
    w = slice_weights(as_channel(1), p, half, "radial", None)
    exact = exact / math.sqrt(np.sum(w * exact ** 2))
    assert abs(np.sum(w * exact * phi.values.real)) > 1 - 1e-5


def test_ground_state_preconditions():
    p = DunklParams(nu=0.5)
    half = HalfGrid(8.0, 100)
    V = harmonic_potential(p)
    with pytest.raises(DomainError):
        ground_state_imaginary_time(1, p, half, V, 0.01, 100)
    with pytest.raises(DomainError):
        ground_state_imaginary_time(1, p, half, V, 0.0, 100)
    with pytest.raises(DomainError):
        ground_state_imaginary_time(1, p, half, V, 0.01, 1000, seed=np.ones(3))


def test_ground_state_gaussian_rule_diverges_in_attractive_channel():
    p = DunklParams(nu=0.5)
    half = HalfGrid(4.0, 4000)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        with pytest.raises(DivergenceError):
            ground_state_imaginary_time(1, p, half, harmonic_potential(p), 0.01, 1000, rule="gaussian")


# --- convergence report ------------------------------------------------------

def test_convergence_report():
    n = np.array([8, 16, 32, 64])
    assert convergence_report(list(zip(n, 3.0 / n))) == pytest.approx(-1.0, abs=1e-12)
    assert convergence_report(list(zip(n, 0.5 / n ** 2))) == pytest.approx(-2.0, abs=1e-12)
    for bad in ([(1, 1.0), (2, 0.5)], [(1, 1.0), (1, 0.5), (1, 0.2)],
                [(1, 1.0), (2, 0.0), (4, 0.2)], [(1, 1.0), (2, float("nan")), (4, 0.2)]):
        with pytest.raises(DomainError):
            convergence_report(bad)


def test_eigen_decomposition_container():
    d = EigenDecomposition(np.array([1.0]), np.array([[1.0]]))
    np.testing.assert_allclose(d.residuals(np.array([[1.0]])), [0.0])


def test_ground_state_agrees_with_diagonalization():
    p = DunklParams(nu=0.25)
    half = HalfGrid(10.0, 500)
    V = harmonic_potential(p)
    e, _ = ground_state_imaginary_time(1, p, half, V, 0.01, 1000)
    assert e == pytest.approx(channel_spectrum(1, p, half, V, count=1)[0], abs=1e-4)
