"""Weakly orthogonal polynomials and algebraic spectra of the Razavy double well
``V = (zeta cosh 2x - M)^2`` and its periodic partner ``U = -(zeta cos 2x - M)^2``.
"""
from .errors import (
    BasisTooSmall, CrossCheckFailed, DomainTooSmall, EdgeMismatch, EnergyNotCritical, FormMismatch,
    GridTooCoarse, InvalidParameters, OrderingViolation, RazavyError, RootsCoincide, RootsNotReal,
    SingularSystem, VerificationError,
)
from .families import (
    FamilySpec, Kind, PotentialParams, coeffs, enumerate_hat_branches, hat_spec, hat_spec_from_label,
    make_tilde,
)
from .polyseq import MonicPoly, critical_poly, eval_poly, poly_coeffs, poly_sequence
from .spectrum import CriticalSpectrum, MomentFunctional, algebraic_energies, moment_functional, positivity_report
from .wavefunc import hyperbolic_states, trig_states
from .oracle import FdConfig, band_edges, bound_states_fd, dispersion, hill_eigenvalues
from .bands import classify, consecutive_gap_check, fig2_sweep

__version__ = "0.1.0"

__all__ = [
    "BasisTooSmall", "CrossCheckFailed", "DomainTooSmall", "EdgeMismatch", "EnergyNotCritical",
    "FormMismatch", "GridTooCoarse", "InvalidParameters", "OrderingViolation", "RazavyError",
    "RootsCoincide", "RootsNotReal", "SingularSystem", "VerificationError",
    "FamilySpec", "Kind", "PotentialParams", "coeffs", "enumerate_hat_branches", "hat_spec",
    "hat_spec_from_label", "make_tilde",
    "MonicPoly", "critical_poly", "eval_poly", "poly_coeffs", "poly_sequence",
    "CriticalSpectrum", "MomentFunctional", "algebraic_energies", "moment_functional", "positivity_report",
    "hyperbolic_states", "trig_states",
    "FdConfig", "band_edges", "bound_states_fd", "dispersion", "hill_eigenvalues",
    "classify", "consecutive_gap_check", "fig2_sweep",
]
