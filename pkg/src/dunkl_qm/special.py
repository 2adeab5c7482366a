"""Special functions used by the Dunkl kernels.

Everything here is self-contained numpy code: the Lanczos log-gamma, the
modified Bessel function of the first kind at real order and complex
argument, generalized Laguerre polynomials, the Dunkl deformed exponential
and a two-sided evaluator of the Hille-Hardy bilinear generating formula.

Bessel functions are evaluated through the entire "reduced" function

    G_mu(z) = (z/2)**(-mu) * I_mu(z) = sum_k (z**2/4)**k / (k! Gamma(k+mu+1))

which has no branch cut. The principal-branch ``I_mu`` is recovered as
``(z/2)**mu * G_mu(z)``. For large ``|z|`` the Hankel expansion is used
with both exponentials kept, so purely imaginary arguments (real-time
kernels) stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesControl",
    "log_gamma",
    "gamma",
    "modified_bessel_i",
    "reduced_bessel_i",
    "laguerre",
    "laguerre_table",
    "laguerre_derivative",
    "deformed_exponential",
    "hille_hardy_pair",
]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy shared by every series in this module."""

    rel_tol: float = 1e-13
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Hankel remainder is ~e^{-2|z|}: below 4e-11 from here on.
_ASYMPTOTIC_MIN = 12.0
_SERIES_MAX = 30.0
# Digits the ascending series may lose to cancellation, as log(magnitude ratio).
_CANCELLATION_BUDGET = 9.0


def _lanczos(x):
    x = x - 1.0
    a = np.full_like(x, _LANCZOS_P[0])
    for i in range(1, len(_LANCZOS_P)):
        a = a + _LANCZOS_P[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(a)


def log_gamma(x):
    """ln Gamma(x) for real x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma is only defined here for x > 0")
    small = arr < 0.5
    out = np.empty_like(arr)
    big = ~small
    out[big] = _lanczos(arr[big])
    if np.any(small):
        xs = arr[small]
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        out[small] = np.log(np.pi / np.sin(np.pi * xs)) - _lanczos(1.0 - xs)
    return out if out.ndim else float(out)


def gamma(x):
    """Gamma(x) for real x > 0."""
    return np.exp(log_gamma(x))


def _inv_gamma(x: float) -> float:
    return math.exp(-log_gamma(x))


def _check_order(order: float) -> float:
    # order > -1 covers every channel exponent nu -+ 1/2 with nu > -1/2
    order = float(order)
    if not order > -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {order}")
    return order


def _use_series(z: np.ndarray) -> np.ndarray:
    r = np.abs(z)
    loss = r - np.abs(z.real)
    return (r <= _ASYMPTOTIC_MIN) | ((r <= _SERIES_MAX) & (loss <= _CANCELLATION_BUDGET))


def _reduced_series(order: float, z: np.ndarray, control: SeriesControl) -> np.ndarray:
    """sum_k (z^2/4)^k / (k! Gamma(k+order+1)), all elements converged."""
    q = 0.25 * z * z
    term = np.full(z.shape, _inv_gamma(order + 1.0), dtype=complex)
    total = term.copy()
    active = np.ones(z.shape, dtype=bool)
    # terms grow until k ~ sqrt|q|; never stop before the peak
    peak = np.sqrt(np.abs(q))
    k = 0
    while np.any(active):
        if k >= control.max_terms:
            raise ConvergenceError(
                f"Bessel series for order {order} not converged after {k} terms")
        idx = np.nonzero(active)[0]
        term[idx] = term[idx] * q[idx] / ((k + 1) * (k + 1 + order))
        total[idx] += term[idx]
        k += 1
        done = (np.abs(term[idx]) <= control.rel_tol * np.abs(total[idx])) & (k > peak[idx])
        done |= term[idx] == 0
        active[idx[done]] = False
    return total


def _hankel(order: float, z: np.ndarray, control: SeriesControl, scaled: bool) -> np.ndarray:
    """Large-|z| expansion of I_order(z), optionally times exp(-|Re z|)."""
    mu2 = 4.0 * order * order
    inv = 1.0 / z
    # sum_k a_k (-1/z)^k and sum_k a_k (1/z)^k
    s_minus = np.ones(z.shape, dtype=complex)
    s_plus = np.ones(z.shape, dtype=complex)
    a = np.ones(z.shape, dtype=complex)
    best = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    k = 0
    while np.any(active):
        if k >= control.max_terms:
            raise ConvergenceError("Hankel expansion did not converge")
        idx = np.nonzero(active)[0]
        a_new = a[idx] * (mu2 - (2 * k + 1) ** 2) / ((k + 1) * 8.0) * inv[idx]
        mag = np.abs(a_new)
        growing = mag > best[idx]
        # asymptotic series: stop before terms start to grow
        upd = ~growing
        iu = idx[upd]
        a[iu] = a_new[upd]
        sign = -1.0 if (k + 1) % 2 else 1.0
        s_minus[iu] += sign * a_new[upd]
        s_plus[iu] += a_new[upd]
        best[iu] = mag[upd]
        k += 1
        done = growing | (mag <= control.rel_tol) | (a_new == 0)
        active[idx[done]] = False
    root = np.sqrt(2.0 * np.pi * z)
    shift = np.abs(z.real) if scaled else 0.0
    phase = np.where(z.imag >= 0, 1.0, -1.0) * 1j * np.pi * (order + 0.5)
    with np.errstate(over="ignore", invalid="ignore"):
        return (np.exp(z - shift) * s_minus + np.exp(-z - shift + phase) * s_plus) / root


def _prepare(z):
    zc = np.asarray(z)
    real_input = not np.iscomplexobj(zc)
    flat = np.atleast_1d(zc).astype(complex).ravel()
    return zc.shape, real_input, flat


def _finish(values, shape, real_out):
    values = values.reshape(shape)
    if real_out:
        values = values.real
    return values if values.ndim else values[()]


def reduced_bessel_i(order, z, scaled: bool = False, control: SeriesControl | None = None):
    """Entire function (z/2)**(-order) * I_order(z) for order > -1.

    With ``scaled=True`` the result is multiplied by ``exp(-|Re z|)``.
    Real inputs give real outputs (the function is even in z).
    """
    control = control or DEFAULT_CONTROL
    order = _check_order(order)
    shape, real_input, flat = _prepare(z)
    out = np.empty(flat.shape, dtype=complex)
    series = _use_series(flat)
    if np.any(series):
        zs = flat[series]
        vals = _reduced_series(order, zs, control)
        if scaled:
            vals = vals * np.exp(-np.abs(zs.real))
        out[series] = vals
    if np.any(~series):
        za = flat[~series]
        # series and Hankel agree on the principal branch of (z/2)^order
        out[~series] = _hankel(order, za, control, scaled) * (0.5 * za) ** (-order)
    return _finish(out, shape, real_input)


def modified_bessel_i(order, z, scaled: bool = False, control: SeriesControl | None = None):
    """Principal-branch modified Bessel function I_order(z).

    ``order > -1``; ``z`` may be a complex scalar or array. Ascending
    series for |z| <= 30 (tighter when the argument is far from the real
    axis, where the series cancels), Hankel expansion beyond. With
    ``scaled=True`` returns ``exp(-|Re z|) * I_order(z)``.
    """
    control = control or DEFAULT_CONTROL
    order = _check_order(order)
    shape, real_input, flat = _prepare(z)
    if real_input and np.any(flat.real < 0) and order != int(order):
        real_input = False
    out = np.empty(flat.shape, dtype=complex)
    series = _use_series(flat)
    if np.any(series):
        zs = flat[series]
        vals = _reduced_series(order, zs, control)
        with np.errstate(divide="ignore", invalid="ignore"):
            power = (0.5 * zs) ** order if order != 0 else np.ones_like(zs)
        vals = vals * power
        if scaled:
            vals = vals * np.exp(-np.abs(zs.real))
        out[series] = vals
    if np.any(~series):
        out[~series] = _hankel(order, flat[~series], control, scaled)
    return _finish(out, shape, real_input)


def laguerre_table(nmax: int, mu: float, x):
    """All generalized Laguerre values L_0^mu(x) .. L_nmax^mu(x).

    Returns an array of shape ``(nmax + 1,) + shape(x)`` built with the
    three-term upward recurrence.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError("Laguerre degree must be non-negative")
    if not mu > -1:
        raise DomainError(f"Laguerre parameter must exceed -1, got {mu}")
    x = np.asarray(x, dtype=float)
    table = np.empty((nmax + 1,) + x.shape)
    table[0] = 1.0
    if nmax >= 1:
        table[1] = 1.0 + mu - x
    for n in range(1, nmax):
        table[n + 1] = ((2 * n + 1 + mu - x) * table[n] - (n + mu) * table[n - 1]) / (n + 1)
    return table


def laguerre(n: int, mu: float, x):
    """Generalized Laguerre polynomial L_n^mu(x) by upward recurrence."""
    values = laguerre_table(n, mu, x)[int(n)]
    return values if values.ndim else float(values)


def laguerre_derivative(n: int, mu: float, x, order: int = 1):
    """d^k/dx^k L_n^mu(x) = (-1)^k L_{n-k}^{mu+k}(x)."""
    if n < order:
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    return (-1) ** order * laguerre(n - order, mu + order, x)


def deformed_exponential(nu: float, z, scaled: bool = False, control: SeriesControl | None = None):
    """Dunkl deformed exponential E_nu(z).

    For real z this is Gamma(nu+1/2) (2/|z|)^(nu-1/2) [I_{nu-1/2}(|z|) +
    sgn(z) I_{nu+1/2}(|z|)]. It is evaluated as the entire function

        Gamma(nu+1/2) * [G_{nu-1/2}(z) + (z/2) G_{nu+1/2}(z)],

    which is the analytic continuation used for complex arguments.
    ``scaled=True`` multiplies by exp(-|Re z|).
    """
    if not nu > -0.5:
        raise DomainError(f"deformed exponential needs nu > -1/2, got {nu}")
    zarr = np.asarray(z)
    g_even = reduced_bessel_i(nu - 0.5, zarr, scaled=scaled, control=control)
    g_odd = reduced_bessel_i(nu + 0.5, zarr, scaled=scaled, control=control)
    return gamma(nu + 0.5) * (g_even + 0.5 * zarr * g_odd)


def hille_hardy_pair(x: float, y: float, z: complex, mu: float, nterms: int = 200,
                     control: SeriesControl | None = None):
    """Both sides of the Hille-Hardy formula.

    Left side: ``sum_{n<nterms} n! L_n^mu(x) L_n^mu(y) z^n / Gamma(n+mu+1) * exp(-(x+y)/2)``.
    Right side: ``(xyz)^(-mu/2) / (1-z) * exp(-(x+y)(1+z) / (2(1-z))) * I_mu(2 sqrt(xyz)/(1-z))``,
    computed branch-free as ``(1-z)^(-1-mu) exp(...) G_mu(2 sqrt(xyz)/(1-z))``.

    Raises ConvergenceError if the geometric tail estimate of the left sum
    exceeds ``control.rel_tol`` relative to its value.
    """
    control = control or DEFAULT_CONTROL
    if not (x > 0 and y > 0):
        raise DomainError("Hille-Hardy arguments x, y must be positive")
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError(f"Hille-Hardy series needs |z| < 1, got {abs(z)}")
    if not mu > -1:
        raise DomainError(f"mu must exceed -1, got {mu}")
    nterms = int(nterms)
    if nterms < 1:
        raise DomainError("nterms must be >= 1")

    n = np.arange(nterms)
    lx = laguerre_table(nterms - 1, mu, x)
    ly = laguerre_table(nterms - 1, mu, y)
    coef = np.exp(log_gamma(n + 1.0) - log_gamma(n + mu + 1.0))
    terms = coef * lx * ly * z ** n * math.exp(-0.5 * (x + y))
    lhs = complex(terms.sum())

    one_minus = 1.0 - z
    w = 2.0 * np.sqrt(complex(x * y) * z) / one_minus
    rhs = complex(one_minus ** (-1.0 - mu)
                  * np.exp(-0.5 * (x + y) * (1.0 + z) / one_minus)
                  * reduced_bessel_i(mu, w, control=control))

    tail = np.max(np.abs(terms[-2:])) * abs(z) / (1.0 - abs(z))
    if tail > control.rel_tol * max(abs(lhs), np.finfo(float).tiny):
        raise ConvergenceError(
            f"Hille-Hardy tail estimate {tail:.3e} exceeds tolerance at {nterms} terms")
    return lhs, rhs
