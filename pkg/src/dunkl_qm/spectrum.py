"""Bound states of the Dunkl harmonic oscillator.

Even states are Laguerre functions of order nu - 1/2 in t = c x^2 with
c = m omega / hbar; odd states carry an extra factor x and order nu + 1/2.
They are orthonormal on the whole line under the |x|^(2 nu) measure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Union

import numpy as np

from .errors import DomainError, NumericalWarning
from .operators import (DunklParams, Grid, ParityChannel, as_channel, quadrature_weights)
from .special import laguerre_table, log_gamma

__all__ = [
    "SpectralLine",
    "energy",
    "wavefunction",
    "wavefunction_table",
    "spectral_lines",
    "gram_matrix",
    "apply_hamiltonian",
    "eigen_residual",
]


def _require_oscillator(params: DunklParams) -> None:
    if not params.omega > 0:
        raise DomainError("bound states need omega > 0")


def energy(n: int, channel: Union[ParityChannel, int], params: DunklParams) -> float:
    """hbar omega (2n + nu + 1/2) for even states, hbar omega (2n + nu + 3/2) for odd."""
    if int(n) != n or n < 0:
        raise DomainError(f"quantum number must be a non-negative integer, got {n}")
    channel = as_channel(channel)
    offset = 0.5 if channel.s == 1 else 1.5
    return params.hbar * params.omega * (2 * int(n) + params.nu + offset)


def _norms(nmax: int, channel: ParityChannel, params: DunklParams) -> np.ndarray:
    n = np.arange(nmax + 1, dtype=float)
    mu = channel.lam(params.nu)
    c = params.scale
    log_norm = 0.5 * (log_gamma(n + 1.0) - log_gamma(n + mu + 1.0))
    return np.exp(log_norm + (0.5 * mu + 0.5) * math.log(c))


def wavefunction_table(nmax: int, channel: Union[ParityChannel, int], params: DunklParams, x):
    """Psi_{n,s}(x) for n = 0..nmax, shape (nmax + 1,) + shape(x)."""
    _require_oscillator(params)
    channel = as_channel(channel)
    x = np.asarray(x, dtype=float)
    c = params.scale
    t = c * x * x
    mu = channel.lam(params.nu)
    lag = laguerre_table(nmax, mu, t)
    profile = np.exp(-0.5 * t)
    if channel.s == -1:
        profile = profile * x
    norms = _norms(nmax, channel, params).reshape((-1,) + (1,) * x.ndim)
    return norms * profile * lag


def wavefunction(n: int, channel: Union[ParityChannel, int], params: DunklParams, x):
    """Normalized eigenfunction Psi_{n,s}(x), real with positive leading coefficient."""
    if int(n) != n or n < 0:
        raise DomainError(f"quantum number must be a non-negative integer, got {n}")
    values = wavefunction_table(int(n), channel, params, x)[int(n)]
    return values if values.ndim else float(values)


@dataclass(frozen=True)
class SpectralLine:
    """One oscillator level: quantum number, parity and energy."""

    n: int
    s: int
    energy: float
    params: DunklParams

    def __call__(self, x):
        return wavefunction(self.n, self.s, self.params, x)


def spectral_lines(nmax: int, params: DunklParams) -> List[SpectralLine]:
    """Both towers for n = 0..nmax, sorted by energy (even before odd at ties)."""
    _require_oscillator(params)
    lines = [SpectralLine(n, s, energy(n, s, params), params)
             for n in range(int(nmax) + 1) for s in (1, -1)]
    return sorted(lines, key=lambda line: (line.energy, -line.s))


def gram_matrix(nmax: int, channel: Union[ParityChannel, int], params: DunklParams, grid: Grid,
                corrected: bool = False) -> np.ndarray:
    """Overlaps <Psi_m|Psi_n> for m, n <= nmax under the |x|^(2 nu) node quadrature."""
    _require_oscillator(params)
    if not isinstance(grid, Grid):
        raise DomainError("gram_matrix integrates over the symmetric full-line grid")
    length = math.sqrt(params.hbar / (params.mass * params.omega))
    if grid.h > 0.05 * length:
        warnings.warn(
            f"grid spacing {grid.h:g} exceeds 0.05 oscillator lengths ({0.05 * length:g})",
            NumericalWarning, stacklevel=2)
    psi = wavefunction_table(nmax, channel, params, grid.nodes)
    w = quadrature_weights(grid, 2.0 * params.nu, corrected)
    return (psi * w) @ psi.T


def _radial_derivatives(n: int, channel: ParityChannel, params: DunklParams, x: np.ndarray):
    """Psi, Psi' and Psi'' from Laguerre derivative identities."""
    c = params.scale
    t = c * x * x
    mu = channel.lam(params.nu)
    lag = laguerre_table(n, mu, t)[n]
    d1 = -laguerre_table(n - 1, mu + 1, t)[n - 1] if n >= 1 else np.zeros_like(t)
    d2 = laguerre_table(n - 2, mu + 2, t)[n - 2] if n >= 2 else np.zeros_like(t)
    g = np.exp(-0.5 * t)
    u = g * lag
    du = g * (d1 - 0.5 * lag)
    ddu = g * (d2 - d1 + 0.25 * lag)
    # chain rule for f(x) = u(c x^2)
    f = u
    f1 = 2 * c * x * du
    f2 = 2 * c * du + 4 * c * c * x * x * ddu
    norm = _norms(n, channel, params)[n]
    if channel.s == 1:
        return norm * f, norm * f1, norm * f2
    return norm * x * f, norm * (f + x * f1), norm * (2 * f1 + x * f2)


def apply_hamiltonian(n: int, channel: Union[ParityChannel, int], params: DunklParams, x):
    """(H Psi_{n,s})(x) with H = -hbar^2/(2m) D^2 + m omega^2 x^2 / 2.

    On a parity-s function D^2 f = f'' + (2 nu / x) f' - (1 - s) nu f / x^2,
    so everything follows from the analytic first and second derivatives.
    """
    channel = as_channel(channel)
    _require_oscillator(params)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("Hamiltonian is applied away from the origin")
    nu = params.nu
    psi, d1, d2 = _radial_derivatives(int(n), channel, params, x)
    d_sq = d2 + 2 * nu * d1 / x - (1 - channel.s) * nu * psi / (x * x)
    return -params.hbar ** 2 / (2 * params.mass) * d_sq + 0.5 * params.mass * params.omega ** 2 * x * x * psi


def eigen_residual(n: int, channel: Union[ParityChannel, int], params: DunklParams, x):
    """H Psi - E Psi sampled at x."""
    psi = wavefunction(n, channel, params, x)
    return apply_hamiltonian(n, channel, params, x) - energy(n, channel, params) * psi
