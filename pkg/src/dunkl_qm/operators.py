"""Dunkl operator algebra on a symmetric, zero-excluding grid.

Nodes sit at half-integer multiples of the spacing, ``x_j = (j + 1/2) h``,
so 1/x and |x|^(2 nu) are finite everywhere and reflection x -> -x maps
nodes onto nodes exactly.

Per-parity dynamics live on the half line in the flat-measure variable
``phi = y^nu psi``. The channel Hamiltonian is assembled in flux
(Sturm-Liouville) form, which selects the regular behaviour psi ~ const
(even) or psi ~ y (odd) at the origin for every nu > -1/2, including the
attractive band 0 <= nu < 1/2 of the even channel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import zeta

from .errors import DomainError, GridError, NumericalWarning

Potential = Callable[[np.ndarray], np.ndarray]

__all__ = [
    "DunklParams",
    "ParityChannel",
    "EVEN",
    "ODD",
    "Grid",
    "HalfGrid",
    "SampledFunction",
    "reflect",
    "dunkl_derivative",
    "weighted_inner_product",
    "parity_project",
    "effective_potential",
    "hamiltonian_bands",
    "hamiltonian_matrix",
    "quadrature_weights",
    "flat_weights",
    "commutator_residual",
    "harmonic_potential",
]


@dataclass(frozen=True)
class DunklParams:
    """Physical constants and the Wigner parameter (natural units by default)."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    nu: float = 0.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if not self.omega >= 0:
            raise DomainError(f"omega must be non-negative, got {self.omega}")
        if not self.nu > -0.5:
            raise DomainError(f"Wigner parameter must satisfy nu > -1/2, got {self.nu}")

    @property
    def scale(self) -> float:
        """Inverse squared oscillator length m*omega/hbar."""
        return self.mass * self.omega / self.hbar

    def replace(self, **changes) -> "DunklParams":
        fields = dict(hbar=self.hbar, mass=self.mass, omega=self.omega, nu=self.nu)
        fields.update(changes)
        return DunklParams(**fields)


@dataclass(frozen=True)
class ParityChannel:
    """Eigenspace of the reflection operator, s = +1 (even) or -1 (odd)."""

    s: int

    def __post_init__(self):
        if self.s not in (1, -1):
            raise DomainError(f"parity must be +1 or -1, got {self.s}")

    def lam(self, nu: float) -> float:
        """Channel exponent nu - s/2."""
        return nu - 0.5 * self.s

    @staticmethod
    def alpha(nu: float) -> float:
        return nu - 0.5

    @staticmethod
    def beta(nu: float) -> float:
        return nu + 0.5

    def centrifugal(self, nu: float) -> float:
        """lambda^2 - 1/4, the strength of the induced inverse-square term."""
        lam = self.lam(nu)
        return lam * lam - 0.25

    def radial_index(self, nu: float) -> float:
        """Exponent a with psi = y^(0 or 1) u and measure y^(2a) for u."""
        return nu if self.s == 1 else nu + 1.0

    @property
    def label(self) -> str:
        return "even" if self.s == 1 else "odd"


EVEN = ParityChannel(1)
ODD = ParityChannel(-1)


def as_channel(channel: Union[ParityChannel, int]) -> ParityChannel:
    if isinstance(channel, ParityChannel):
        return channel
    return ParityChannel(int(channel))


@dataclass(frozen=True)
class Grid:
    """Symmetric grid of 2M nodes (j + 1/2) h, j = -M..M-1, h = L/M."""

    half_width: float
    m: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError("grid half-width must be positive")
        if int(self.m) < 1:
            raise DomainError("grid needs M >= 1")

    @property
    def h(self) -> float:
        return self.half_width / self.m

    @property
    def size(self) -> int:
        return 2 * self.m

    @cached_property
    def nodes(self) -> np.ndarray:
        j = np.arange(-self.m, self.m)
        return (j + 0.5) * self.h

    def half(self) -> "HalfGrid":
        return HalfGrid(self.half_width, self.m)

    symmetric = True


@dataclass(frozen=True)
class HalfGrid:
    """Positive nodes y_j = (j + 1/2) h, j = 0..M-1, h = L/M."""

    half_width: float
    m: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError("grid half-width must be positive")
        if int(self.m) < 1:
            raise DomainError("grid needs M >= 1")

    @property
    def h(self) -> float:
        return self.half_width / self.m

    @property
    def size(self) -> int:
        return self.m

    @cached_property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.h

    def full(self) -> Grid:
        return Grid(self.half_width, self.m)

    symmetric = False


AnyGrid = Union[Grid, HalfGrid]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function at the nodes of a grid."""

    grid: AnyGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.size,):
            raise GridError(
                f"expected {self.grid.size} samples, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: AnyGrid, f: Callable) -> "SampledFunction":
        return cls(grid, f(grid.nodes))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)

    def scale(self, factor: complex) -> "SampledFunction":
        return SampledFunction(self.grid, factor * self.values)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid != g.grid:
        raise GridError("sampled functions live on different grids")


def _require_symmetric(f: SampledFunction) -> Grid:
    if not isinstance(f.grid, Grid):
        raise GridError("operation needs a symmetric grid (x -> -x maps nodes to nodes)")
    return f.grid


def reflect(f: SampledFunction) -> SampledFunction:
    """(R f)(x) = f(-x), exact node to node."""
    _require_symmetric(f)
    return SampledFunction(f.grid, f.values[::-1])


def dunkl_derivative(f: SampledFunction, params: DunklParams) -> SampledFunction:
    """D f = f' + (nu/x)(f - R f).

    f' uses second-order central differences inside and second-order
    one-sided stencils at the two outer nodes.
    """
    grid = _require_symmetric(f)
    x = grid.nodes
    deriv = np.gradient(f.values, grid.h, edge_order=2)
    return SampledFunction(grid, deriv + params.nu / x * (f.values - f.values[::-1]))


def parity_project(f: SampledFunction, s: Union[int, ParityChannel]) -> SampledFunction:
    """(f + s R f) / 2."""
    _require_symmetric(f)
    s = as_channel(s).s
    return SampledFunction(f.grid, 0.5 * (f.values + s * f.values[::-1]))


def commutator_residual(f: SampledFunction, params: DunklParams) -> SampledFunction:
    """[x, p] f - i hbar (1 + 2 nu R) f with p = (hbar/i) D."""
    grid = _require_symmetric(f)
    x = grid.nodes
    p = -1j * params.hbar

    def momentum(g: SampledFunction) -> np.ndarray:
        return p * dunkl_derivative(g, params).values

    xf = SampledFunction(grid, x * f.values)
    comm = x * momentum(f) - momentum(xf)
    target = 1j * params.hbar * (f.values + 2.0 * params.nu * f.values[::-1])
    return SampledFunction(grid, comm - target)


# --- quadrature -------------------------------------------------------------

_CORRECTION_NODES = 4


def _hurwitz_half(s: float) -> float:
    """zeta(s, 1/2) = (2^s - 1) zeta(s) for s <= 0."""
    if s == 0 or (s < 0 and float(s).is_integer() and int(s) % 2 == 0):
        return 0.0
    riemann = (2.0 ** s * math.pi ** (s - 1.0) * math.sin(math.pi * s / 2.0)
               * math.gamma(1.0 - s) * float(zeta(1.0 - s)))
    return (2.0 ** s - 1.0) * riemann


def _endpoint_correction(exponent: float, nodes: int) -> np.ndarray:
    """Weights c_j with sum_j c_j (j+1/2)^(2k) = -zeta(-exponent-2k, 1/2), k < nodes.

    Adding h^(exponent+1) c_j to the midpoint weights removes the leading
    error terms of sum h f(y_j) for f = y^exponent * (smooth even function).
    """
    j = np.arange(nodes) + 0.5
    k = np.arange(nodes)
    vander = j[None, :] ** (2 * k[:, None])
    rhs = np.array([-_hurwitz_half(-exponent - 2.0 * kk) for kk in k])
    return np.linalg.solve(vander, rhs)


def quadrature_weights(grid: AnyGrid, exponent: float, corrected: bool = False) -> np.ndarray:
    """Weights w_j so that sum_j w_j F(x_j) ~ integral |x|^exponent F(x) dx.

    The plain rule is the uniform-cell rule with the weight evaluated at
    the nodes. ``corrected=True`` adds endpoint corrections at the four
    nodes nearest the origin, accurate for smooth F that decays before the
    outer boundary; the error then no longer scales as h^(exponent+1).
    """
    x = np.abs(grid.nodes)
    h = grid.h
    w = h * x ** exponent
    if corrected:
        nodes = min(_CORRECTION_NODES, grid.m)
        c = _endpoint_correction(exponent, nodes) * h ** (exponent + 1.0)
        if isinstance(grid, Grid):
            w[grid.m:grid.m + nodes] += c
            w[grid.m - nodes:grid.m] += c[::-1]
        else:
            w[:nodes] += c
    return w


def flat_weights(half: HalfGrid, exponent: float, corrected: bool = True) -> np.ndarray:
    """Flat-measure weights for integrands behaving like y^exponent at the origin."""
    y = half.nodes
    return quadrature_weights(half, exponent, corrected) / y ** exponent


def weighted_inner_product(f: SampledFunction, g: SampledFunction, params: DunklParams,
                           corrected: bool = False) -> complex:
    """<f|g> = integral conj(f) g |x|^(2 nu) dx by node quadrature."""
    _same_grid(f, g)
    w = quadrature_weights(f.grid, 2.0 * params.nu, corrected)
    return complex(np.sum(np.conj(f.values) * g.values * w))


# --- channel Hamiltonian ----------------------------------------------------

def harmonic_potential(params: DunklParams) -> Potential:
    k = params.mass * params.omega ** 2

    def potential(y):
        return 0.5 * k * np.asarray(y, dtype=float) ** 2

    return potential


def effective_potential(y, channel: Union[ParityChannel, int], params: DunklParams,
                        potential: Optional[Potential] = None):
    """hbar^2 (lambda_s^2 - 1/4) / (2 m y^2) + V(y) on the half line."""
    channel = as_channel(channel)
    y_arr = np.asarray(y, dtype=float)
    if np.any(~(y_arr > 0)):
        raise DomainError("effective potential is defined for y > 0 only")
    out = params.hbar ** 2 * channel.centrifugal(params.nu) / (2.0 * params.mass * y_arr ** 2)
    if potential is not None:
        out = out + potential(y_arr)
    return out if out.ndim else float(out)


def _cell_moments(q: float, m: int) -> np.ndarray:
    """((j+1)^q - j^q) for j = 0..m-1 without cancellation."""
    j = np.arange(m, dtype=float)
    out = np.empty(m)
    out[0] = 1.0
    jj = j[1:]
    out[1:] = jj ** q * np.expm1(q * np.log1p(1.0 / jj))
    return out


def hamiltonian_bands(channel: Union[ParityChannel, int], params: DunklParams, half: HalfGrid,
                      potential: Optional[Potential] = None):
    """Diagonal and off-diagonal of the channel Hamiltonian acting on phi = y^nu psi.

    The radial operator -hbar^2/(2m) y^(-2a) d/dy (y^(2a) d/dy) is
    discretized in flux form with interface coefficients y^(2a) at
    (j+1) h, zero flux through the origin and cell-averaged weights, then
    symmetrized. Here a = nu (even) or nu + 1 (odd, psi = y u). Away from
    the origin this is the three-point kinetic stencil plus V_eff(y_j) up
    to O(h^2); for nu = 0, s = +1 it is exactly the stencil.
    Dirichlet truncation at y = L.
    """
    channel = as_channel(channel)
    nu = params.nu
    a = channel.radial_index(nu)
    m = half.m
    h = half.h
    if channel.centrifugal(nu) < 0 and params.omega > 0 and h * math.sqrt(params.scale) > 0.05:
        warnings.warn(
            f"attractive inverse-square channel (nu={nu}, s=+1) on a coarse grid "
            f"(h={h:g}); eigenvalues near the origin may be poorly resolved",
            NumericalWarning, stacklevel=2)
    q = 2.0 * a + 1.0
    w = _cell_moments(q, m) / q
    p = np.arange(1, m + 1, dtype=float) ** (2.0 * a)
    p_left = np.concatenate([[0.0], p[:-1]])
    kin = params.hbar ** 2 / (2.0 * params.mass * h * h)
    diag = kin * (p + p_left) / w
    if potential is not None:
        diag = diag + potential(half.nodes)
    off = -kin * p[:-1] / np.sqrt(w[:-1] * w[1:])
    return diag, off


def hamiltonian_matrix(channel: Union[ParityChannel, int], params: DunklParams, half: HalfGrid,
                       potential: Optional[Potential] = None) -> np.ndarray:
    """Dense symmetric tridiagonal channel Hamiltonian (see ``hamiltonian_bands``)."""
    diag, off = hamiltonian_bands(channel, params, half, potential)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
