"""Named numerical checks shared by the command line and the acceptance tests.

Every check returns a ``CheckResult``; ``measured`` is the worst error (or
the fitted quantity) and ``tolerance`` the bound it is compared with.
Random samples come from fixed seeds so reports are reproducible.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .engine import (channel_spectrum, convergence_report, ground_state_imaginary_time,
                     slice_weights, time_sliced_kernel)
from .errors import NumericalWarning
from .operators import (DunklParams, Grid, HalfGrid, ParityChannel, SampledFunction, EVEN,
                        commutator_residual, harmonic_potential, quadrature_weights)
from .propagators import (ComplexTime, free_kernel, free_kernel_parity_bessel, full_kernel,
                          half_line_kernel, ho_kernel_parity, ho_spectral_kernel_parity)
from .reference import heat_kernel
from .special import hille_hardy_pair
from .spectrum import energy, gram_matrix, wavefunction

__all__ = ["CheckResult", "CHECKS", "run_checks", "check_names"]

_SEED = 20240611


@dataclass
class CheckResult:
    """Outcome of one named check."""

    check: str
    status: str
    measured: float
    tolerance: float
    details: Dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return asdict(self)


def _result(name: str, measured: float, tolerance: float, passed: bool,
            details: Optional[Dict[str, float]] = None) -> CheckResult:
    status = "pass" if passed and math.isfinite(measured) else "fail"
    return CheckResult(name, status, float(measured), float(tolerance),
                       {k: float(v) for k, v in (details or {}).items()})


def check_ho_spectrum(M: int = 2000, L: float = 12.0, nmax: int = 8,
                      nus: Sequence[float] = (0.0, 0.25, 0.5, 1.5), tol: float = 1e-4,
                      extrapolate: bool = True) -> CheckResult:
    """Grid eigenvalues against hbar omega (2n + nu + 1/2) and (2n + nu + 3/2)."""
    start = time.perf_counter()
    worst = 0.0
    worst_raw = 0.0
    half = HalfGrid(L, M)
    for nu in nus:
        params = DunklParams(nu=nu)
        V = harmonic_potential(params)
        for s in (1, -1):
            exact = np.array([energy(n, s, params) for n in range(nmax + 1)])
            grid = channel_spectrum(s, params, half, V, nmax + 1, extrapolate=extrapolate)
            raw = channel_spectrum(s, params, half, V, nmax + 1, extrapolate=False)
            worst = max(worst, float(np.max(np.abs(grid - exact))))
            worst_raw = max(worst_raw, float(np.max(np.abs(raw - exact))))
    elapsed = time.perf_counter() - start
    return _result("ho-spectrum", worst, tol, worst <= tol and elapsed < 60.0,
                   {"unextrapolated_error": worst_raw})


def check_interleaving(M: int = 2000, L: float = 12.0, kmax: int = 17,
                       tol_exact: float = 1e-6, tol_grid: float = 1e-4) -> CheckResult:
    """At nu = 0 the two towers merge into k + 1/2."""
    params = DunklParams(nu=0.0)
    nmax = kmax // 2
    target = np.arange(kmax + 1) + 0.5
    exact = sorted(energy(n, s, params) for n in range(nmax + 1) for s in (1, -1))
    err_exact = float(np.max(np.abs(np.array(exact[:kmax + 1]) - target)))
    V = harmonic_potential(params)
    half = HalfGrid(L, M)
    grid = np.sort(np.concatenate([channel_spectrum(s, params, half, V, nmax + 1)
                                   for s in (1, -1)]))[:kmax + 1]
    err_grid = float(np.max(np.abs(grid - target)))
    return _result("interleaving", err_exact, tol_exact,
                   err_exact <= tol_exact and err_grid <= tol_grid,
                   {"grid_error": err_grid, "grid_tolerance": tol_grid})


def check_free_kernel_identity(samples: int = 200, tol: float = 1e-10) -> CheckResult:
    """Deformed-exponential closed form against the parity sum of Bessel kernels."""
    rng = np.random.default_rng(_SEED)
    nu = rng.uniform(-0.4, 2.0, samples)
    tau = rng.uniform(1.0, 3.0, samples)
    xa = rng.uniform(0.05, 2.0, samples) * rng.choice([-1, 1], samples)
    xb = rng.uniform(0.05, 2.0, samples) * rng.choice([-1, 1], samples)
    worst = 0.0
    worst_heat = 0.0
    for k in range(samples):
        params = DunklParams(nu=float(nu[k]))
        T = ComplexTime.euclidean(float(tau[k]))
        closed = free_kernel(xb[k], xa[k], T, params)
        even = free_kernel_parity_bessel(xb[k], xa[k], T, 1, params)
        odd = free_kernel_parity_bessel(xb[k], xa[k], T, -1, params)
        parity = even + np.sign(xa[k] * xb[k]) * odd
        worst = max(worst, abs(closed - parity) / abs(closed))
        zero = DunklParams(nu=0.0)
        heat = heat_kernel(xb[k], xa[k], float(tau[k]))
        worst_heat = max(worst_heat, abs(free_kernel(xb[k], xa[k], T, zero) - heat) / heat)
    measured = max(worst, worst_heat)
    return _result("free-kernel-identity", measured, tol, measured <= tol,
                   {"parity_sum_error": worst, "heat_kernel_error": worst_heat})


def check_hille_hardy(samples: int = 100, tol: float = 1e-9) -> CheckResult:
    """Both sides of the bilinear Laguerre generating function."""
    rng = np.random.default_rng(_SEED + 1)
    worst = 0.0
    for _ in range(samples):
        x, y = rng.uniform(0.05, 5.0, 2)
        z = rng.uniform(0.0, 0.7) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        mu = rng.uniform(-0.4, 3.0)
        lhs, rhs = hille_hardy_pair(x, y, z, mu, nterms=200)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return _result("hille-hardy", worst, tol, worst <= tol)


def check_spectral_sum(nmax: int = 120, taus: Sequence[float] = (0.3, 0.7, 1.5),
                       pairs: int = 50, nus: Sequence[float] = (0.0, 0.25, 0.5, 1.5),
                       tol: float = 1e-8) -> CheckResult:
    """Truncated eigenfunction sum against the closed oscillator kernel, per parity."""
    rng = np.random.default_rng(_SEED + 2)
    xa = rng.uniform(0.05, 3.0, pairs) * rng.choice([-1, 1], pairs)
    xb = rng.uniform(0.05, 3.0, pairs) * rng.choice([-1, 1], pairs)
    worst = 0.0
    worst_full = 0.0
    for nu in nus:
        params = DunklParams(nu=nu)
        for tau in taus:
            T = ComplexTime.euclidean(tau)
            parts = {}
            for s in (1, -1):
                closed = ho_kernel_parity(xb, xa, T, s, params)
                summed = ho_spectral_kernel_parity(xb, xa, T, s, params, nmax)
                worst = max(worst, float(np.max(np.abs(closed - summed) / np.abs(closed))))
                parts[s] = (closed, summed)
            sign = np.sign(xa * xb)
            full_closed = parts[1][0] + sign * parts[-1][0]
            full_sum = parts[1][1] + sign * parts[-1][1]
            scale = np.abs(parts[1][0]) + np.abs(parts[-1][0])
            worst_full = max(worst_full, float(np.max(np.abs(full_closed - full_sum) / scale)))
    return _result("spectral-sum", worst, tol, worst <= tol,
                   {"recombined_error_over_scale": worst_full})


def check_orthonormality(nmax: int = 10, nus: Sequence[float] = (0.25, 0.5, 1.5),
                         L: float = 12.0, M: int = 4000, tol: float = 1e-8) -> CheckResult:
    """Gram matrices of both towers under the corrected |x|^(2 nu) quadrature."""
    grid = Grid(L, M)
    worst = 0.0
    worst_cross = 0.0
    for nu in nus:
        params = DunklParams(nu=nu)
        for s in (1, -1):
            G = gram_matrix(nmax, s, params, grid, corrected=True)
            worst = max(worst, float(np.max(np.abs(G - np.eye(nmax + 1)))))
        w = quadrature_weights(grid, 2 * nu, corrected=True)
        even = np.array([wavefunction(n, 1, params, grid.nodes) for n in range(nmax + 1)])
        odd = np.array([wavefunction(n, -1, params, grid.nodes) for n in range(nmax + 1)])
        worst_cross = max(worst_cross, float(np.max(np.abs((even * w) @ odd.T))))
    return _result("orthonormality", worst, tol, worst <= tol and worst_cross <= 1e-12,
                   {"cross_parity": worst_cross})


def check_chapman_kolmogorov(nus: Sequence[float] = (0.0, 0.25, 0.5, 1.5), tau1: float = 0.5,
                             tau2: float = 0.5, L: float = 12.0, M: int = 2400,
                             tol: float = 1e-6) -> CheckResult:
    """Euclidean composition of free kernels under the weighted quadrature."""
    grid = Grid(L, M)
    x = grid.nodes
    rng = np.random.default_rng(_SEED + 3)
    points = rng.uniform(0.1, 2.5, (8, 2)) * rng.choice([-1, 1], (8, 2))
    worst = 0.0
    for nu in nus:
        params = DunklParams(nu=nu)
        w = quadrature_weights(grid, 2 * nu, corrected=True)
        T1 = ComplexTime.euclidean(tau1)
        T2 = ComplexTime.euclidean(tau2)
        T = ComplexTime.euclidean(tau1 + tau2)
        for xb, xa in points:
            left = full_kernel(xb, x, T1, params)
            right = full_kernel(x, xa, T2, params)
            composed = np.sum(left * right * w)
            direct = full_kernel(xb, xa, T, params)
            worst = max(worst, abs(composed - direct) / abs(direct))
    return _result("chapman-kolmogorov", worst, tol, worst <= tol)


def check_time_slicing(Ns: Sequence[int] = (16, 32, 64, 128, 256), L: float = 12.0,
                       M: int = 1200, max_order: float = -0.8) -> CheckResult:
    """Fitted order of lattice-kernel error against N for two systems.

    Free odd channel (nu = 1/2) with Gaussian slices and the oscillator
    even channel (nu = 1/2) with radial slices, both at (yb, ya) ~ (1, 1.5).
    """
    half = HalfGrid(L, M)
    y = half.nodes
    ib = int(np.argmin(np.abs(y - 1.0)))
    ia = int(np.argmin(np.abs(y - 1.5)))
    params = DunklParams(nu=0.5)
    cases = {
        "free_odd_gaussian": (-1, None, "gaussian", "free"),
        "harmonic_even_radial": (1, harmonic_potential(params), "radial", "harmonic"),
    }
    orders = {}
    for label, (s, V, rule, system) in cases.items():
        exact = half_line_kernel(y[ib], y[ia], ComplexTime.euclidean(1.0), s, params, system).real
        errors = []
        for N in Ns:
            with warnings.catch_warnings():
                # the Gaussian rule always sees the 1/y^2 spike at the first node
                warnings.simplefilter("ignore", NumericalWarning)
                K = time_sliced_kernel(s, params, 1.0, N, half, V, rule=rule)
            errors.append(abs(K.values[ib, ia].real - exact) / exact)
        orders[label] = convergence_report(list(zip(Ns, errors)))
        orders[label + "_error_N%d" % Ns[-1]] = errors[-1]
    worst = max(orders["free_odd_gaussian"], orders["harmonic_even_radial"])
    return _result("time-slicing", worst, max_order, worst <= max_order, orders)


_TEST_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "1": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "x^2": lambda x: x * x,
    "exp(-x^2)": lambda x: np.exp(-x * x),
    "x exp(-x^2)": lambda x: x * np.exp(-x * x),
}


def check_commutator(nus: Sequence[float] = (0.0, 0.25, 0.7, 1.5), L: float = 2.0, M: int = 100,
                     min_ratio: float = 3.5) -> CheckResult:
    """[x, p] - i hbar (1 + 2 nu R) on five test functions, at h and h/2."""
    worst_ratio = math.inf
    details = {}
    for nu in nus:
        params = DunklParams(nu=nu)
        residuals = []
        for m in (M, 2 * M):
            grid = Grid(L, m)
            residuals.append(max(
                commutator_residual(SampledFunction.from_callable(grid, f), params).max_norm()
                for f in _TEST_FUNCTIONS.values()))
        ratio = residuals[0] / residuals[1]
        details[f"ratio_nu={nu}"] = ratio
        worst_ratio = min(worst_ratio, ratio)
    return _result("commutator", worst_ratio, min_ratio, worst_ratio >= min_ratio, details)


def check_imaginary_time(nus: Sequence[float] = (0.0, 0.25, 0.5), L: float = 12.0, M: int = 600,
                         tau_step: float = 0.005, steps: int = 2000, tol: float = 1e-3,
                         min_fidelity: float = 0.9999) -> CheckResult:
    """Imaginary-time ground state of the even channel against the exact state."""
    worst = 0.0
    worst_fid = 1.0
    details = {}
    for nu in nus:
        params = DunklParams(nu=nu)
        half = HalfGrid(L, M)
        E, state = ground_state_imaginary_time(EVEN, params, half, harmonic_potential(params),
                                               tau_step, steps)
        y = half.nodes
        w = slice_weights(EVEN, params, half, "radial", None)
        exact = math.sqrt(2.0) * y ** nu * wavefunction(0, 1, params, y)
        phi = state.values.real
        overlap = np.sum(w * exact * phi) / math.sqrt(np.sum(w * exact ** 2) * np.sum(w * phi ** 2))
        fidelity = float(overlap ** 2)
        err = abs(E - energy(0, 1, params))
        details[f"energy_error_nu={nu}"] = err
        details[f"fidelity_nu={nu}"] = fidelity
        worst = max(worst, err)
        worst_fid = min(worst_fid, fidelity)
    details["min_fidelity"] = worst_fid
    return _result("imaginary-time", worst, tol, worst <= tol and worst_fid >= min_fidelity,
                   details)


CHECKS: Dict[str, Callable[[], CheckResult]] = {
    "ho-spectrum": check_ho_spectrum,
    "interleaving": check_interleaving,
    "free-kernel-identity": check_free_kernel_identity,
    "hille-hardy": check_hille_hardy,
    "spectral-sum": check_spectral_sum,
    "orthonormality": check_orthonormality,
    "chapman-kolmogorov": check_chapman_kolmogorov,
    "time-slicing": check_time_slicing,
    "commutator": check_commutator,
    "imaginary-time": check_imaginary_time,
}


def check_names() -> List[str]:
    return list(CHECKS)


def run_checks(only: Optional[Sequence[str]] = None) -> List[CheckResult]:
    """Run the selected checks (all by default) in a fixed order."""
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    results = []
    for name in names:
        start = time.perf_counter()
        result = CHECKS[name]()
        result.seconds = time.perf_counter() - start
        results.append(result)
    return results
