import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dunkl_qm.errors import DomainError, NumericalWarning
from dunkl_qm.operators import DunklParams, Grid
from dunkl_qm.reference import hermite_function
from dunkl_qm.spectrum import (SpectralLine, apply_hamiltonian, eigen_residual, energy,
                               gram_matrix, spectral_lines, wavefunction, wavefunction_table)

mpmath.mp.dps = 30


def test_energy_examples():
    assert energy(0, 1, DunklParams(nu=0.5)) == pytest.approx(1.0)
    assert energy(1, -1, DunklParams(nu=0.25)) == pytest.approx(3.75)
    assert energy(2, 1, DunklParams(hbar=2.0, omega=0.5, nu=1.0)) == pytest.approx(5.5)
    with pytest.raises(DomainError):
        energy(-1, 1, DunklParams())
    with pytest.raises(DomainError):
        energy(1.5, 1, DunklParams())


def test_wavefunction_examples():
    assert wavefunction(0, 1, DunklParams(), 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)
    assert wavefunction(0, -1, DunklParams(nu=0.7), 0.0) == 0.0
    assert wavefunction(1, 1, DunklParams(nu=0.5), 1.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        wavefunction(0, 1, DunklParams(omega=0.0), 1.0)


@given(st.integers(min_value=0, max_value=12), st.sampled_from([1, -1]),
       st.floats(min_value=-0.45, max_value=3.0), st.floats(min_value=0.0, max_value=5.0))
@settings(max_examples=80)
def test_parity(n, s, nu, x):
    p = DunklParams(nu=nu)
    assert wavefunction(n, s, p, -x) == pytest.approx(s * wavefunction(n, s, p, x), abs=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.5])
@pytest.mark.parametrize("s", [1, -1])
def test_normalization_against_adaptive_quadrature(nu, s):
    p = DunklParams(nu=nu, omega=1.3, mass=0.8)
    for n in (0, 3, 7):
        value, _ = integrate.quad(lambda x: wavefunction(n, s, p, x) ** 2 * x ** (2 * nu),
                                  0, 20, limit=200, epsabs=1e-14, epsrel=1e-13)
        assert 2 * value == pytest.approx(1.0, rel=1e-10)


def test_ground_state_against_mpmath_closed_form():
    # Psi_0^+ = c^{(nu+1/2)/2} / sqrt(Gamma(nu+1/2)) e^{-c x^2/2}
    p = DunklParams(nu=0.8, omega=2.0)
    c = p.scale
    for x in (0.0, 0.4, 1.7):
        ref = mpmath.power(c, (p.nu + 0.5) / 2) / mpmath.sqrt(mpmath.gamma(p.nu + 0.5)) * mpmath.exp(-c * x * x / 2)
        assert wavefunction(0, 1, p, x) == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("nu", [0.0, 0.25, 1.5])
def test_gram_matrix(nu):
    p = DunklParams(nu=nu)
    grid = Grid(12.0, 4000)
    for s in (1, -1):
        G = gram_matrix(10, s, p, grid, corrected=True)
        np.testing.assert_allclose(G, np.eye(11), atol=1e-8)


def test_cross_parity_orthogonal():
    p = DunklParams(nu=0.6)
    grid = Grid(12.0, 1000)
    w_even = wavefunction_table(4, 1, p, grid.nodes)
    w_odd = wavefunction_table(4, -1, p, grid.nodes)
    assert np.max(np.abs(w_even @ w_odd.T)) < 1e-12


def test_gram_resolution_warning():
    with pytest.warns(NumericalWarning):
        gram_matrix(2, 1, DunklParams(), Grid(8.0, 20))
    with pytest.raises(DomainError):
        gram_matrix(2, 1, DunklParams(), "grid")


@given(st.floats(min_value=0.0, max_value=3.0), st.integers(min_value=0, max_value=20))
def test_interleaving(nu, nmax):
    p = DunklParams(nu=nu)
    lines = spectral_lines(nmax, p)
    energies = [line.energy for line in lines]
    assert energies == sorted(energies)
    assert [line.s for line in lines[:2]] == [1, -1]
    even = [line.energy for line in lines if line.s == 1]
    odd = [line.energy for line in lines if line.s == -1]
    for n in range(nmax + 1):
        assert even[n] < odd[n]
        if n + 1 <= nmax:
            assert odd[n] < even[n + 1]
        assert odd[n] - even[n] == pytest.approx(1.0)


def test_spectral_line_callable():
    p = DunklParams(nu=0.4)
    line = spectral_lines(3, p)[3]
    assert isinstance(line, SpectralLine)
    assert (line.n, line.s) == (1, -1)
    assert line(0.9) == wavefunction(1, -1, p, 0.9)


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.0, 2.5])
@pytest.mark.parametrize("s", [1, -1])
def test_eigen_residual(nu, s):
    p = DunklParams(nu=nu, mass=1.5, omega=0.7, hbar=1.2)
    x = np.linspace(0.1, 6.0, 200)
    for n in range(6):
        assert np.max(np.abs(eigen_residual(n, s, p, x))) <= 1e-6


def _dunkl(f, nu, h=1e-4):
    """D f by central differences plus the reflection term."""
    return lambda x: (f(x + h) - f(x - h)) / (2 * h) + nu / x * (f(x) - f(-x))


@pytest.mark.parametrize("s", [1, -1])
def test_apply_hamiltonian_against_finite_differences(s):
    p = DunklParams(nu=0.6)
    x = np.array([-2.1, -0.7, 0.5, 1.3, 2.8])
    f = lambda y: wavefunction(2, s, p, y)
    dd = _dunkl(_dunkl(f, p.nu), p.nu)
    expected = -0.5 * dd(x) + 0.5 * x * x * f(x)
    np.testing.assert_allclose(apply_hamiltonian(2, s, p, x), expected, atol=1e-6)
    with pytest.raises(DomainError):
        apply_hamiltonian(0, s, p, 0.0)


@pytest.mark.parametrize("n", range(6))
def test_nu_zero_reduces_to_hermite_functions(n):
    p = DunklParams(omega=1.7, mass=0.6)
    x = np.linspace(-5, 5, 101)
    s = 1 if n % 2 == 0 else -1
    psi = wavefunction(n // 2, s, p, x)
    herm = hermite_function(n, x, p)
    # the two families agree up to a global sign
    sign = np.sign(np.sum(psi * herm))
    np.testing.assert_allclose(psi, sign * herm, atol=1e-12)


def test_nu_zero_hermite_overlap_near_continuity():
    p = DunklParams(nu=1e-7)
    grid = Grid(10.0, 2000)
    x = grid.nodes
    for n in range(4):
        s = 1 if n % 2 == 0 else -1
        overlap = np.sum(wavefunction(n // 2, s, p, x) * hermite_function(n, x, DunklParams())) * grid.h
        assert abs(overlap) == pytest.approx(1.0, abs=1e-5)
