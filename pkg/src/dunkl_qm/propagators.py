"""Closed-form Dunkl kernels for the free particle and the harmonic oscillator.

Each parity channel kernel carries the prefactor (x_a x_b)^(-nu), so the
full kernel K = K_+ + sgn(x_a x_b) K_- composes under the |x|^(2 nu)
measure directly.

Every closed form is written with the entire function
G_mu(w^2/4) = (w/2)^(-mu) I_mu(w), which keeps one expression valid for
Euclidean, real and intermediate complex times. The literal Bessel form
is kept separately as an independent route.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .errors import CausticError, DomainError, NumericalWarning
from .operators import AnyGrid, DunklParams, ParityChannel, as_channel
from .special import (SeriesControl, deformed_exponential, log_gamma, modified_bessel_i,
                      reduced_bessel_i)

__all__ = [
    "ComplexTime",
    "Kernel",
    "free_kernel_parity",
    "free_kernel_parity_bessel",
    "free_kernel",
    "ho_kernel_parity",
    "ho_spectral_kernel_parity",
    "ho_spectral_kernel",
    "full_kernel",
    "half_line_kernel",
    "kernel_matrix",
]

System = Literal["free", "harmonic"]

_CAUSTIC_TOL = 1e-12


@dataclass(frozen=True)
class ComplexTime:
    """Propagation time T in the closed lower half-plane, T != 0."""

    value: complex

    def __post_init__(self):
        t = complex(self.value)
        if t == 0:
            raise DomainError("propagation time must be non-zero")
        if t.imag > 0:
            raise DomainError(f"propagation time needs Im T <= 0, got {t}")
        if not (math.isfinite(t.real) and math.isfinite(t.imag)):
            raise DomainError("propagation time must be finite")
        object.__setattr__(self, "value", t)

    @classmethod
    def euclidean(cls, tau: float) -> "ComplexTime":
        """T = -i tau with tau > 0."""
        if not tau > 0:
            raise DomainError(f"Euclidean time must be positive, got {tau}")
        return cls(complex(0.0, -tau))

    @classmethod
    def real(cls, t: float) -> "ComplexTime":
        return cls(complex(t, 0.0))

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0

    @property
    def is_euclidean(self) -> bool:
        return self.value.real == 0 and self.value.imag < 0

    @property
    def tau(self) -> float:
        """Euclidean time i T (only for Euclidean times)."""
        if not self.is_euclidean:
            raise DomainError("time is not purely Euclidean")
        return -self.value.imag


def as_time(T: Union[ComplexTime, complex]) -> ComplexTime:
    return T if isinstance(T, ComplexTime) else ComplexTime(T)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Kernel amplitudes K[b, a] = K(x_b, x_a; T) on the nodes of a grid."""

    grid: AnyGrid
    time: ComplexTime
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.size
        if vals.shape != (n, n):
            raise DomainError(f"kernel matrix must be {n}x{n}, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes


def _check_points(xb, xa):
    xb = np.asarray(xb, dtype=float)
    xa = np.asarray(xa, dtype=float)
    if np.any(xb == 0) or np.any(xa == 0):
        raise DomainError("kernels are evaluated at non-zero positions")
    return xb, xa


def _result(values):
    values = np.asarray(values)
    return complex(values) if values.ndim == 0 else values


def _channel_power(channel: ParityChannel, nu: float) -> float:
    """Exponent of the prefactor: alpha + 1 (even) or alpha + 2 (odd)."""
    return nu + 0.5 if channel.s == 1 else nu + 1.5


def free_kernel_parity(xb, xa, T, channel: Union[ParityChannel, int], params: DunklParams,
                       control: Optional[SeriesControl] = None):
    """Per-parity free kernel via the entire reduced Bessel function.

    K_+ = c^(alpha+1) e^(-c (xa^2+xb^2)) G_alpha(w^2/4),
    K_- = |xa xb| c^(alpha+2) e^(-c (xa^2+xb^2)) G_beta(w^2/4),
    with c = m/(2 i hbar T) and w = m |xa xb| / (i hbar T).
    """
    channel = as_channel(channel)
    T = as_time(T).value
    xb, xa = _check_points(xb, xa)
    nu = params.nu
    c = params.mass / (2j * params.hbar * T)
    w = params.mass * np.abs(xa * xb) / (1j * params.hbar * T)
    order = channel.lam(nu)
    power = _channel_power(channel, nu)
    gauss = -c * (xa ** 2 + xb ** 2)
    log_pref = power * cmath.log(c) + gauss
    reduced = reduced_bessel_i(order, w, scaled=True, control=control)
    # the scaled reduced function carries e^(-|Re w|); Re w >= 0 for Im T <= 0
    value = np.exp(log_pref + np.abs(w.real)) * reduced
    if channel.s == -1:
        value = value * np.abs(xa * xb)
    return _result(value)


def free_kernel_parity_bessel(xb, xa, T, channel: Union[ParityChannel, int],
                              params: DunklParams, control: Optional[SeriesControl] = None):
    """Per-parity free kernel in the literal modified-Bessel form.

    |xa xb|^(1/2 - nu) (m/(2 i hbar T)) e^(i m (xa^2+xb^2)/(2 hbar T)) I_lambda(w),
    where the order is alpha (even) or beta (odd) and w = m |xa xb|/(i hbar T).
    """
    channel = as_channel(channel)
    T = as_time(T).value
    xb, xa = _check_points(xb, xa)
    nu = params.nu
    c = params.mass / (2j * params.hbar * T)
    y = np.abs(xa * xb)
    w = params.mass * y / (1j * params.hbar * T)
    bessel = modified_bessel_i(channel.lam(nu), w.astype(complex), scaled=True, control=control)
    value = y ** (0.5 - nu) * c * np.exp(-c * (xa ** 2 + xb ** 2) + np.abs(w.real)) * bessel
    return _result(value)


def free_kernel(xb, xa, T, params: DunklParams, control: Optional[SeriesControl] = None):
    """Full free kernel from the deformed exponential.

    K = (m/(2 i hbar T))^(nu+1/2) / Gamma(nu+1/2) * e^(i m (xa^2+xb^2)/(2 hbar T))
        * E_nu(m xa xb / (i hbar T)).
    """
    T = as_time(T).value
    xb, xa = _check_points(xb, xa)
    nu = params.nu
    c = params.mass / (2j * params.hbar * T)
    z = params.mass * xa * xb / (1j * params.hbar * T)
    ex = deformed_exponential(nu, z.astype(complex), scaled=True, control=control)
    log_pref = (nu + 0.5) * cmath.log(c) - float(log_gamma(nu + 0.5))
    value = np.exp(log_pref - c * (xa ** 2 + xb ** 2) + np.abs(np.real(z))) * ex
    return _result(value)


def _ho_phase_terms(T: complex, params: DunklParams):
    """Shared pieces of the oscillator kernel for one time."""
    wT = params.omega * T
    s = cmath.sin(wT)
    if abs(s) < _CAUSTIC_TOL * max(1.0, abs(wT)):
        raise CausticError(f"oscillator kernel is singular at omega*T = {wT}")
    one_minus_z = -complex(np.expm1(-2j * wT))
    cot = cmath.cos(wT) / s
    return one_minus_z, s, cot


def ho_kernel_parity(xb, xa, T, channel: Union[ParityChannel, int], params: DunklParams,
                     control: Optional[SeriesControl] = None):
    """Closed per-parity oscillator kernel (resummed Laguerre series).

    With c = m omega / hbar and z = e^(-2 i omega T):
    K_+ = c^(alpha+1) e^(-i(alpha+1) omega T) (1-z)^(-(alpha+1))
          e^(i c (xa^2+xb^2) cot(omega T) / 2) G_alpha(w^2/4),
    K_- = |xa xb| c^(alpha+2) e^(-i(alpha+2) omega T) (1-z)^(-(alpha+2)) (...) G_beta(w^2/4),
    where w = c |xa xb| / (i sin(omega T)). The principal power of (1-z)
    fixes the Maslov phase for every T in the lower half-plane.
    """
    if not params.omega > 0:
        raise DomainError("oscillator kernel needs omega > 0")
    channel = as_channel(channel)
    T = as_time(T).value
    xb, xa = _check_points(xb, xa)
    nu = params.nu
    c = params.scale
    one_minus_z, s, cot = _ho_phase_terms(T, params)
    power = _channel_power(channel, nu)
    wT = params.omega * T
    w = c * np.abs(xa * xb) / (1j * s)
    log_pref = (power * math.log(c) - 1j * power * wT - power * cmath.log(one_minus_z))
    gauss = 0.5j * c * (xa ** 2 + xb ** 2) * cot
    reduced = reduced_bessel_i(channel.lam(nu), w, scaled=True, control=control)
    value = np.exp(log_pref + gauss + np.abs(w.real)) * reduced
    if channel.s == -1:
        value = value * np.abs(xa * xb)
    return _result(value)


def ho_spectral_kernel_parity(xb, xa, T, channel: Union[ParityChannel, int],
                              params: DunklParams, nmax: int, rel_tol: float = 1e-10):
    """Truncated eigenfunction expansion of one parity channel, n = 0..nmax.

    Like the closed forms, the odd channel is returned for |xa|, |xb|; the
    sign of xa xb enters only when the channels are recombined.
    """
    from .spectrum import energy, wavefunction_table

    if not params.omega > 0:
        raise DomainError("spectral kernel needs omega > 0")
    if int(nmax) < 0:
        raise DomainError("nmax must be non-negative")
    channel = as_channel(channel)
    time = as_time(T)
    xb, xa = _check_points(xb, xa)
    xb, xa = np.abs(xb), np.abs(xa)
    psi_b = wavefunction_table(nmax, channel, params, xb)
    psi_a = wavefunction_table(nmax, channel, params, xa)
    n = np.arange(nmax + 1)
    e = np.array([energy(k, channel, params) for k in n])
    phase = np.exp(-1j * e * time.value / params.hbar)
    terms = psi_b * psi_a * phase.reshape((-1,) + (1,) * psi_b[0].ndim)
    total = terms.sum(axis=0)
    if time.is_euclidean and nmax >= 1:
        # next term is bounded by the last one times the level-spacing decay
        tail = np.abs(terms[-1]) * math.exp(-2 * params.omega * time.tau) / (
            1 - math.exp(-2 * params.omega * time.tau))
        scale = np.maximum(np.abs(total), np.abs(terms).max(axis=0))
        if np.any(tail > rel_tol * scale):
            warnings.warn(
                f"spectral sum truncated at nmax={nmax} has estimated relative tail "
                f"{float(np.max(tail / scale)):.2e} > {rel_tol:.1e}",
                NumericalWarning, stacklevel=2)
    return _result(total)


def ho_spectral_kernel(xb, xa, T, params: DunklParams, nmax: int, rel_tol: float = 1e-10):
    """Both parity towers combined with the sign rule."""
    xb, xa = _check_points(xb, xa)
    even = ho_spectral_kernel_parity(xb, xa, T, 1, params, nmax, rel_tol)
    odd = ho_spectral_kernel_parity(xb, xa, T, -1, params, nmax, rel_tol)
    return _result(np.asarray(even) + np.sign(xa * xb) * np.asarray(odd))


def full_kernel(xb, xa, T, params: DunklParams, system: System = "free",
                control: Optional[SeriesControl] = None):
    """K_+ + sgn(xa xb) K_- for the free particle or the oscillator."""
    xb, xa = _check_points(xb, xa)
    if system == "free":
        parity = free_kernel_parity
    elif system == "harmonic":
        parity = ho_kernel_parity
    else:
        raise DomainError(f"unknown system {system!r}")
    even = parity(xb, xa, T, 1, params, control)
    odd = parity(xb, xa, T, -1, params, control)
    return _result(np.asarray(even) + np.sign(xa * xb) * np.asarray(odd))


def half_line_kernel(yb, ya, T, channel: Union[ParityChannel, int], params: DunklParams,
                     system: System = "free", control: Optional[SeriesControl] = None):
    """Flat-measure channel kernel k_s = 2 (ya yb)^nu K_s on the half line.

    This is the kernel of the reduced problem for phi = y^nu psi, the
    object produced by lattice time slicing.
    """
    yb, ya = _check_points(yb, ya)
    if np.any(yb < 0) or np.any(ya < 0):
        raise DomainError("half-line kernel needs positive positions")
    parity = free_kernel_parity if system == "free" else ho_kernel_parity
    value = 2.0 * (ya * yb) ** params.nu * np.asarray(parity(yb, ya, T, channel, params, control))
    return _result(value)


def kernel_matrix(grid: AnyGrid, T, params: DunklParams, system: System = "free",
                  channel: Union[ParityChannel, int, None] = None) -> Kernel:
    """Kernel on all node pairs; a channel selects one parity kernel."""
    time = as_time(T)
    x = grid.nodes
    xb, xa = np.meshgrid(x, x, indexing="ij")
    if channel is None:
        values = full_kernel(xb, xa, time, params, system)
    else:
        parity = free_kernel_parity if system == "free" else ho_kernel_parity
        values = parity(xb, xa, time, channel, params)
    return Kernel(grid, time, values)
