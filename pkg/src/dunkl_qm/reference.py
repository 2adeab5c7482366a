"""Standard (nu = 0) quantum-mechanics kernels and states used as references."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .operators import DunklParams
from .propagators import ComplexTime, as_time

__all__ = ["heat_kernel", "free_particle_kernel", "mehler_kernel", "hermite_function"]


def heat_kernel(xb, xa, tau: float, params: DunklParams = DunklParams()):
    """sqrt(m/(2 pi hbar tau)) exp(-m (xb-xa)^2 / (2 hbar tau))."""
    m, hbar = params.mass, params.hbar
    d = np.asarray(xb, dtype=float) - np.asarray(xa, dtype=float)
    return math.sqrt(m / (2 * math.pi * hbar * tau)) * np.exp(-m * d * d / (2 * hbar * tau))


def free_particle_kernel(xb, xa, T, params: DunklParams = DunklParams()):
    """sqrt(m/(2 pi i hbar T)) exp(i m (xb-xa)^2 / (2 hbar T)) for complex T."""
    T = as_time(T).value
    m, hbar = params.mass, params.hbar
    d = np.asarray(xb, dtype=float) - np.asarray(xa, dtype=float)
    return cmath.sqrt(m / (2j * math.pi * hbar * T)) * np.exp(1j * m * d * d / (2 * hbar * T))


def mehler_kernel(xb, xa, T, params: DunklParams):
    """Oscillator kernel sqrt(c / (2 pi i sin wT)) exp(i c [(xa^2+xb^2) cos wT - 2 xa xb] / (2 sin wT)).

    The square root is continued from small |T| through the lower
    half-plane so that Maslov phases are right in real time.
    """
    T = as_time(T).value
    c = params.scale
    wT = params.omega * T
    s = cmath.sin(wT)
    xb = np.asarray(xb, dtype=float)
    xa = np.asarray(xa, dtype=float)
    # (2 i sin wT)^(-1/2) = e^(-i wT/2) (1 - e^(-2 i wT))^(-1/2)
    root = cmath.exp(-0.5j * wT) * (-complex(np.expm1(-2j * wT))) ** -0.5
    phase = 1j * c * ((xa ** 2 + xb ** 2) * cmath.cos(wT) - 2 * xa * xb) / (2 * s)
    return math.sqrt(c / math.pi) * root * np.exp(phase)


def hermite_function(n: int, x, params: DunklParams):
    """Normalized oscillator eigenfunction (c/pi)^(1/4) H_n(sqrt(c) x) e^(-c x^2/2) / sqrt(2^n n!)."""
    c = params.scale
    u = math.sqrt(c) * np.asarray(x, dtype=float)
    # normalized recurrence avoids overflow of H_n
    prev = np.zeros_like(u)
    cur = (c / math.pi) ** 0.25 * np.exp(-0.5 * u * u)
    for k in range(int(n)):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * u * cur - math.sqrt(k / (k + 1)) * prev
    return cur
