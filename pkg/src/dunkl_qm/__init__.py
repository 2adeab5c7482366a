"""Dunkl quantum mechanics: kernels, oscillator spectra and lattice cross-checks."""

from .errors import (CausticError, ConvergenceError, DivergenceError, DomainError, DunklError,
                     GridError, NumericalWarning)
from .special import (SeriesControl, deformed_exponential, hille_hardy_pair, laguerre,
                      log_gamma, modified_bessel_i, reduced_bessel_i)
from .operators import (EVEN, ODD, DunklParams, Grid, HalfGrid, ParityChannel, SampledFunction,
                        commutator_residual, dunkl_derivative, effective_potential,
                        hamiltonian_matrix, harmonic_potential, parity_project, reflect,
                        weighted_inner_product)
from .propagators import (ComplexTime, Kernel, free_kernel, free_kernel_parity, full_kernel,
                          ho_kernel_parity, ho_spectral_kernel)
from .spectrum import SpectralLine, energy, gram_matrix, spectral_lines, wavefunction
from .engine import (EigenDecomposition, SliceScheme, channel_spectrum, convergence_report,
                     diagonalize, ground_state_imaginary_time, short_time_kernel,
                     time_sliced_kernel)

__version__ = "0.1.0"

__all__ = [
    "CausticError", "ConvergenceError", "DivergenceError", "DomainError", "DunklError",
    "GridError", "NumericalWarning",
    "SeriesControl", "deformed_exponential", "hille_hardy_pair", "laguerre", "log_gamma",
    "modified_bessel_i", "reduced_bessel_i",
    "EVEN", "ODD", "DunklParams", "Grid", "HalfGrid", "ParityChannel", "SampledFunction",
    "commutator_residual", "dunkl_derivative", "effective_potential", "hamiltonian_matrix",
    "harmonic_potential", "parity_project", "reflect", "weighted_inner_product",
    "ComplexTime", "Kernel", "free_kernel", "free_kernel_parity", "full_kernel",
    "ho_kernel_parity", "ho_spectral_kernel",
    "SpectralLine", "energy", "gram_matrix", "spectral_lines", "wavefunction",
    "EigenDecomposition", "SliceScheme", "channel_spectrum", "convergence_report",
    "diagonalize", "ground_state_imaginary_time", "short_time_kernel", "time_sliced_kernel",
]
