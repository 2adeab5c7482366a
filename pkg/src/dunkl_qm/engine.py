"""Numerical cross-checks: Euclidean time slicing, eigensolver, imaginary-time propagation.

All lattice work happens per parity channel on the half line in the flat
variable phi = y^nu psi, where the kernel to reproduce is
k_s = 2 (ya yb)^nu K_s.

Two short-time rules are available:

* ``"gaussian"``: the free Gaussian with the full effective potential at
  the slice endpoint. It is exact only for nu = 0 odd and is unstable in
  the attractive even channel (0 <= nu < 1/2 gives a negative 1/y^2 term).
* ``"radial"`` (default): the exact free channel kernel, which resums the
  centrifugal term, times exp(-eps V(yb)/hbar) for the regular potential.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from ._ql import tql
from .errors import ConvergenceError, DivergenceError, DomainError, NumericalWarning
from .operators import (DunklParams, HalfGrid, ParityChannel, Potential, SampledFunction,
                        as_channel, effective_potential, flat_weights, hamiltonian_bands)
from .propagators import ComplexTime, Kernel, half_line_kernel

__all__ = [
    "SliceScheme",
    "EigenDecomposition",
    "short_time_kernel",
    "radial_short_time_kernel",
    "slice_matrix",
    "slice_weights",
    "time_sliced_kernel",
    "compose_kernels",
    "tridiagonalize",
    "diagonalize",
    "tridiagonal_eigenvalues",
    "channel_spectrum",
    "ground_state_imaginary_time",
    "convergence_report",
]

SliceRule = Literal["radial", "gaussian"]


@dataclass(frozen=True)
class SliceScheme:
    """N intermediate integrations over total Euclidean time tau, eps = tau/(N+1)."""

    tau: float
    slices: int

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"Euclidean time must be positive, got {self.tau}")
        if int(self.slices) != self.slices or self.slices < 1:
            raise DomainError(f"need at least one slice, got {self.slices}")

    @property
    def eps(self) -> float:
        return self.tau / (self.slices + 1)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Ascending eigenvalues with column-orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]

    def residuals(self, H: np.ndarray) -> np.ndarray:
        """||H v - lambda v|| for every pair."""
        if self.eigenvectors is None:
            raise DomainError("decomposition was computed without eigenvectors")
        V = self.eigenvectors
        return np.linalg.norm(H @ V - V * self.eigenvalues, axis=0)


# --- short-time kernels -----------------------------------------------------

def short_time_kernel(yb, ya, eps: float, channel: Union[ParityChannel, int],
                      params: DunklParams, potential: Optional[Potential] = None):
    """sqrt(m/(2 pi hbar eps)) exp{-[m (yb-ya)^2/(2 eps) + eps V_eff(yb)] / hbar}."""
    if not eps > 0:
        raise DomainError(f"slice length must be positive, got {eps}")
    yb = np.asarray(yb, dtype=float)
    ya = np.asarray(ya, dtype=float)
    veff = effective_potential(yb, channel, params, potential)
    m, hbar = params.mass, params.hbar
    action = m * (yb - ya) ** 2 / (2 * eps) + eps * np.asarray(veff)
    out = math.sqrt(m / (2 * math.pi * hbar * eps)) * np.exp(-action / hbar)
    return out if out.ndim else float(out)


def radial_short_time_kernel(yb, ya, eps: float, channel: Union[ParityChannel, int],
                             params: DunklParams, potential: Optional[Potential] = None):
    """Exact free channel kernel over eps times exp(-eps V(yb)/hbar)."""
    if not eps > 0:
        raise DomainError(f"slice length must be positive, got {eps}")
    yb = np.asarray(yb, dtype=float)
    ya = np.asarray(ya, dtype=float)
    free = np.real(half_line_kernel(yb, ya, ComplexTime.euclidean(eps), channel, params))
    if potential is not None:
        free = free * np.exp(-eps * np.asarray(potential(yb)) / params.hbar)
    return free if np.ndim(free) else float(free)


def slice_matrix(channel: Union[ParityChannel, int], params: DunklParams, half: HalfGrid,
                 eps: float, potential: Optional[Potential] = None,
                 rule: SliceRule = "radial") -> np.ndarray:
    """Short-time kernel on all node pairs, rows indexed by the endpoint yb."""
    y = half.nodes
    yb, ya = np.meshgrid(y, y, indexing="ij")
    if rule == "radial":
        return radial_short_time_kernel(yb, ya, eps, channel, params, potential)
    if rule == "gaussian":
        return short_time_kernel(yb, ya, eps, channel, params, potential)
    raise DomainError(f"unknown slice rule {rule!r}")


def slice_weights(channel: ParityChannel, params: DunklParams, half: HalfGrid,
                   rule: SliceRule, corrected: Optional[bool]) -> np.ndarray:
    # radial slices behave like y^(lambda+1/2) at the origin, so the
    # integrand of one composition behaves like y^(2a)
    if corrected is None:
        corrected = rule == "radial"
    if not corrected:
        return np.full(half.m, half.h)
    return flat_weights(half, 2.0 * channel.radial_index(params.nu), corrected=True)


def _check_slice_resolution(channel, params, half, eps, potential, rule) -> None:
    y = half.nodes
    if rule == "gaussian":
        v = np.abs(effective_potential(y, channel, params, potential))
    elif potential is not None:
        v = np.abs(np.asarray(potential(y), dtype=float))
    else:
        return
    worst = eps * float(np.max(v)) / params.hbar
    if worst > 0.5:
        warnings.warn(f"slice too coarse for the potential: eps*max|V|/hbar = {worst:.3g} > 0.5",
                      NumericalWarning, stacklevel=3)


def time_sliced_kernel(channel: Union[ParityChannel, int], params: DunklParams, tau: float,
                       N: int, half: HalfGrid, potential: Optional[Potential] = None,
                       rule: SliceRule = "radial", corrected: Optional[bool] = None) -> Kernel:
    """Compose N+1 short-time kernels with N flat-measure quadratures over the half grid.

    Returns the half-line channel kernel k_s(yb, ya; tau) on the nodes.
    ``corrected`` selects endpoint-corrected quadrature weights (default:
    on for the radial rule, off for the Gaussian rule).
    """
    channel = as_channel(channel)
    scheme = SliceScheme(tau, N)
    eps = scheme.eps
    _check_slice_resolution(channel, params, half, eps, potential, rule)
    # overflow is reported as DivergenceError below
    with np.errstate(over="ignore", invalid="ignore"):
        S = slice_matrix(channel, params, half, eps, potential, rule)
        w = slice_weights(channel, params, half, rule, corrected)
        K = np.linalg.matrix_power(S * w[None, :], scheme.slices) @ S
    if not np.all(np.isfinite(K)):
        raise DivergenceError("time-sliced kernel overflowed; the slice rule is unstable here")
    return Kernel(half, ComplexTime.euclidean(tau), K)


def compose_kernels(first: Kernel, second: Kernel, weights: np.ndarray) -> np.ndarray:
    """Flat-measure composition k1 * k2 on a shared half grid (first acts last)."""
    if first.grid != second.grid:
        raise DomainError("kernels live on different grids")
    return (first.values * weights[None, :]) @ second.values


# --- eigensolver ------------------------------------------------------------

def tridiagonalize(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Householder reduction H = Q T Q^T; returns (diag, off, Q)."""
    A = np.array(H, dtype=float)
    n = A.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = A[k + 1:, k]
        alpha = -math.copysign(np.linalg.norm(x), x[0] if x[0] != 0 else 1.0)
        if alpha == 0 or np.allclose(x[1:], 0.0, atol=0.0):
            continue
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = A[k + 1:, k + 1:]
        p = sub @ v
        w = 2.0 * (p - (v @ p) * v)
        sub -= np.outer(v, w) + np.outer(w, v)
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2:, k] = 0.0
        A[k, k + 2:] = 0.0
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v)
    return np.diag(A).copy(), np.diag(A, 1).copy(), Q


def _is_tridiagonal(H: np.ndarray) -> bool:
    n = H.shape[0]
    if n < 3:
        return True
    return not np.any(np.triu(H, 2)) and not np.any(np.tril(H, -2))


def diagonalize(H: np.ndarray, vectors: bool = True, max_iter: int = 60) -> EigenDecomposition:
    """Symmetric eigendecomposition: Householder reduction then implicit QL."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError("diagonalize needs a square matrix")
    if not np.array_equal(H, H.T):
        if not np.allclose(H, H.T, rtol=1e-12, atol=1e-14 * np.max(np.abs(H))):
            raise DomainError("diagonalize needs a symmetric matrix")
        H = 0.5 * (H + H.T)
    n = H.shape[0]
    if _is_tridiagonal(H):
        diag, off = np.diag(H).copy(), np.diag(H, 1).copy()
        Q = np.eye(n)
    else:
        diag, off, Q = tridiagonalize(H)
    values, rows, status = tql(diag, off, Q if vectors else None, max_iter)
    if status:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {status - 1}")
    order = np.argsort(values, kind="stable")
    vecs = rows[order].T.copy() if vectors else None
    return EigenDecomposition(values[order], vecs)


def tridiagonal_eigenvalues(diag: np.ndarray, off: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending."""
    values, _, status = tql(diag, off, None, max_iter)
    if status:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {status - 1}")
    return np.sort(values)


def channel_spectrum(channel: Union[ParityChannel, int], params: DunklParams, half: HalfGrid,
                     potential: Optional[Potential] = None, count: int = 9,
                     extrapolate: bool = True) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the channel Hamiltonian.

    The scheme converges as h^2, so with ``extrapolate`` the M and M/2
    spectra are combined as (4 E_M - E_{M/2}) / 3.
    """
    fine = tridiagonal_eigenvalues(*hamiltonian_bands(channel, params, half, potential))[:count]
    if not extrapolate:
        return fine
    if half.m % 2:
        raise DomainError("Richardson extrapolation needs an even node count")
    coarse_grid = HalfGrid(half.half_width, half.m // 2)
    coarse = tridiagonal_eigenvalues(*hamiltonian_bands(channel, params, coarse_grid, potential))
    return (4.0 * fine - coarse[:count]) / 3.0


# --- imaginary time ---------------------------------------------------------

def ground_state_imaginary_time(channel: Union[ParityChannel, int], params: DunklParams,
                                half: HalfGrid, potential: Optional[Potential], tau_step: float,
                                steps: int, rule: SliceRule = "radial",
                                corrected: Optional[bool] = None,
                                seed: Optional[np.ndarray] = None
                                ) -> Tuple[float, SampledFunction]:
    """Power iteration with the one-slice transfer matrix.

    Returns the energy -hbar log(r)/tau_step from the last norm ratio r and
    the flat-measure state phi on the half grid, normalized so that
    sum_j w_j phi_j^2 = 1 with the slice quadrature weights.
    """
    channel = as_channel(channel)
    if not tau_step > 0 or int(steps) < 1:
        raise DomainError("need tau_step > 0 and steps >= 1")
    if params.omega > 0 and math.exp(-2.0 * params.omega * tau_step * steps) > 1e-6:
        raise DomainError(
            f"total imaginary time {tau_step * steps:g} cannot suppress the excited "
            f"states to 1e-6 (need at least {math.log(1e6) / (2 * params.omega):.3g})")
    _check_slice_resolution(channel, params, half, tau_step, potential, rule)
    with np.errstate(over="ignore", invalid="ignore"):
        S = slice_matrix(channel, params, half, tau_step, potential, rule)
        w = slice_weights(channel, params, half, rule, corrected)
        transfer = S * w[None, :]
    phi = np.exp(-half.nodes) if seed is None else np.array(seed, dtype=float)
    if phi.shape != (half.m,):
        raise DomainError("seed must have one value per half-grid node")

    def norm(v):
        return math.sqrt(abs(float(np.sum(w * v * v))))

    phi = phi / norm(phi)
    ratio = 1.0
    for _ in range(int(steps)):
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = transfer @ phi
            ratio = norm(nxt)
        if not math.isfinite(ratio) or ratio == 0.0 or math.log(ratio) > 700.0:
            raise DivergenceError(f"norm ratio {ratio} after one step; propagation diverges")
        phi = nxt / ratio
    energy = -params.hbar * math.log(ratio) / tau_step
    return energy, SampledFunction(half, phi)


def convergence_report(series: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(N)."""
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise DomainError("need at least three (N, error) pairs")
    n, err = data[:, 0], data[:, 1]
    if np.any(n <= 0) or np.any(~(err > 0)) or not np.all(np.isfinite(err)):
        raise DomainError("N and errors must be positive and finite")
    if np.unique(n).size < 2:
        raise DomainError("degenerate fit: all N coincide")
    slope, _ = np.polyfit(np.log(n), np.log(err), 1)
    return float(slope)
