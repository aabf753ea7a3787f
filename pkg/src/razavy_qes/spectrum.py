"""Algebraic energies, moment functionals and the positivity criterion."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import CrossCheckFailed, RootsCoincide, RootsNotReal, SingularSystem
from .families import FamilySpec, coeffs, make_tilde
from .polyseq import critical_poly, values

log = logging.getLogger(__name__)

IMAG_TOL = 1e-8
DISTINCT_TOL = 1e-12
ROOT_TOL = 1e-8
CROSS_CHECK_TOL = 1e-7
SYSTEM_TOL = 1e-8
EXT = np.longdouble


@dataclass(frozen=True)
class CriticalSpectrum:
    family: FamilySpec
    energies: np.ndarray
    max_imag_discarded: float
    min_root_separation: float


@dataclass(frozen=True)
class MomentFunctional:
    """Finite-support functional ``L = sum_k w_k delta(E - E_k)``.

    ``nodes`` and ``weights`` are ``np.longdouble``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    system_residual: float

    def apply(self, f_values) -> float:
        """``L(f) = sum_k w_k f(E_k)`` for ``f`` given by its values at the nodes."""
        return float(np.dot(self.weights, f_values))

    @property
    def nodes64(self) -> np.ndarray:
        return self.nodes.astype(np.float64)

    @property
    def weights64(self) -> np.ndarray:
        return self.weights.astype(np.float64)


@dataclass(frozen=True)
class PositivityReport:
    all_weights_positive: bool
    a_signs_ok: bool

    @property
    def consistent(self) -> bool:
        return self.all_weights_positive == self.a_signs_ok


def _diagonal(spec: FamilySpec) -> tuple[np.ndarray, np.ndarray]:
    c = coeffs(spec, spec.n + 1)
    return spec.shift_sign * c.b[: spec.n + 1], np.array(c.a[1: spec.n + 1])


def jacobi_matrix(spec: FamilySpec) -> np.ndarray:
    """Tridiagonal matrix whose characteristic polynomial is ``P_{n+1}``.

    Diagonal ``s*b_k``, superdiagonal ones, subdiagonal ``a_1..a_n``.
    """
    diag, sub = _diagonal(spec)
    return np.diag(diag) + np.diag(np.ones(sub.size), 1) + np.diag(sub, -1)


def _separation(energies):
    if energies.size < 2:
        return float("inf")
    return float(np.min(np.diff(energies)))


def algebraic_energies(spec: FamilySpec, check_distinct: bool = True) -> CriticalSpectrum:
    """Sorted real roots of the critical polynomial, via the Jacobi matrix.

    Tilde families have ``a_k > 0`` and are symmetrized (off-diagonal
    ``sqrt(a_k)``). Hat families have ``a_k < 0`` and go through a general
    eigensolver; their roots are then checked against the tilde spectrum.
    """
    diag, sub = _diagonal(spec)
    if not spec.is_hat:
        energies = scipy.linalg.eigh_tridiagonal(diag, np.sqrt(sub), eigvals_only=True)
        imag = 0.0
    else:
        mat = jacobi_matrix(spec)
        raw = scipy.linalg.eigvals(mat)
        norm = max(np.linalg.norm(mat, np.inf), 1.0)
        imag = float(np.max(np.abs(raw.imag)))
        if imag > IMAG_TOL * norm:
            raise RootsNotReal(
                f"{spec.describe()}: imaginary part {imag:.3e} exceeds {IMAG_TOL:g}*|J|"
            )
        energies = raw.real
    energies = np.sort(energies)
    sep = _separation(energies)
    scale = max(1.0, float(np.max(np.abs(energies))))
    if check_distinct and sep < DISTINCT_TOL * scale:
        log.error("coincident critical roots at M=%d zeta=%r", spec.params.m_int, spec.params.zeta)
        raise RootsCoincide(f"{spec.describe()}: root separation {sep:.3e}")
    if spec.is_hat:
        _cross_check(spec, energies)
    return CriticalSpectrum(spec, energies, imag, sep)


def _cross_check(spec, energies):
    tilde = make_tilde(spec.params, spec.is_periodic)
    diag, sub = _diagonal(tilde)
    ref = scipy.linalg.eigh_tridiagonal(diag, np.sqrt(sub), eigvals_only=True)
    for e in energies:
        gap = np.min(np.abs(ref - e))
        if gap > CROSS_CHECK_TOL * max(1.0, abs(e)):
            raise CrossCheckFailed(
                f"{spec.describe()}: root {e!r} is not a root of the tilde critical polynomial"
            )


def root_residuals(spectrum: CriticalSpectrum) -> np.ndarray:
    """``|P_crit(E_j)| / max|coeff|`` at each energy; should be below ``ROOT_TOL``."""
    spec = spectrum.family
    crit = critical_poly(spec)
    vals = values(spec, spec.critical_index, spectrum.energies)[-1]
    return np.abs(vals) / np.max(np.abs(crit.coeffs))


def _ext_coeffs(spec, k_max):
    c = coeffs(spec, max(k_max, 1))
    return c.a.astype(EXT), c.b.astype(EXT)


def ext_values(spec: FamilySpec, k_max: int, energies) -> np.ndarray:
    """Like :func:`polyseq.values` but carried out in ``np.longdouble``."""
    a, b = _ext_coeffs(spec, k_max)
    e = np.atleast_1d(np.asarray(energies)).astype(EXT)
    return _kernels.recurrence_table_numpy(a, b, EXT(spec.shift_sign), e, k_max)


def refine_roots(spec: FamilySpec, energies, iterations: int = 4) -> np.ndarray:
    """Newton-polish critical roots in extended precision.

    Near-degenerate pairs (tunnelling doublets at small zeta) are split by far
    less than float64 resolves relative to their size; the moment functional
    needs the extra digits to stay exact up to degree 2n.
    """
    a, b = _ext_coeffs(spec, spec.critical_index)
    s = EXT(spec.shift_sign)
    roots = np.asarray(energies).astype(EXT)
    limit = EXT(CROSS_CHECK_TOL) * np.maximum(EXT(1), np.abs(roots))
    x = roots.copy()
    for _ in range(iterations):
        p_prev = np.zeros_like(x)
        p = np.ones_like(x)
        dp_prev = np.zeros_like(x)
        dp = np.zeros_like(x)
        for k in range(spec.critical_index):
            lin = x - s * b[k]
            p_next = lin * p - a[k] * p_prev
            dp_next = p + lin * dp - a[k] * dp_prev
            p_prev, p = p, p_next
            dp_prev, dp = dp, dp_next
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, EXT(0))
        x = x - step
    # a wandering Newton step means the float64 root was not in its basin
    bad = ~np.isfinite(x) | (np.abs(x - roots) > limit)
    x[bad] = roots[bad]
    if x.size > 1 and np.any(np.diff(np.sort(x)) <= 0):
        raise RootsCoincide(f"{spec.describe()}: Newton polish merged two critical roots")
    return x


def solve_partial_pivot(matrix, rhs) -> np.ndarray:
    """Gaussian elimination with partial pivoting, in the dtype of ``matrix``."""
    a = np.array(matrix, copy=True)
    x = np.array(rhs, dtype=a.dtype, copy=True)
    n = a.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            raise SingularSystem("singular weight system (coincident nodes)")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= factors[:, None] * a[col, col:]
        x[col + 1:] -= factors * x[col]
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def moment_functional(spec: FamilySpec, spectrum: CriticalSpectrum | None = None) -> MomentFunctional:
    """Weights ``w`` solving ``sum_k P_l(E_k) w_k = delta_{l0}``, ``l = 0..n``.

    Nodes are Newton-polished and the system is solved in extended precision.
    Row ``l`` is scaled by ``|a_1 ... a_l|^(-1/2)``, which makes the matrix
    close to orthogonal for positive families.
    """
    if spectrum is None:
        spectrum = algebraic_energies(spec)
    nodes = refine_roots(spec, np.sort(spectrum.energies))
    system = ext_values(spec, spec.n, nodes)
    norms = np.abs(expected_norms(spec, spec.n)).astype(EXT)
    if np.any(norms == 0):
        raise SingularSystem(f"{spec.describe()}: vanishing recurrence coefficient below n+1")
    row_scale = 1 / np.sqrt(norms)
    rhs = np.zeros(spec.n + 1, dtype=EXT)
    rhs[0] = 1
    weights = solve_partial_pivot(system * row_scale[:, None], rhs * row_scale)
    magnitude = np.abs(system) @ np.abs(weights) + np.abs(rhs)
    residual = float(np.max(np.abs(system @ weights - rhs) / magnitude))
    if not np.all(np.isfinite(weights)) or residual > SYSTEM_TOL:
        raise SingularSystem(f"{spec.describe()}: weight system residual {residual:.3e}")
    return MomentFunctional(nodes, weights, residual)


def positivity_report(spec: FamilySpec) -> PositivityReport:
    mf = moment_functional(spec)
    a = coeffs(spec, spec.n + 1).a[1: spec.n + 1]
    return PositivityReport(bool(np.all(mf.weights > 0)), bool(np.all(a > 0)))


def norm_sequence(spec: FamilySpec, k_max: int, mf: MomentFunctional | None = None) -> np.ndarray:
    """``L(P_k^2)`` for ``k = 0..k_max`` under the family's moment functional."""
    if mf is None:
        mf = moment_functional(spec)
    table = ext_values(spec, k_max, mf.nodes)
    return (table ** 2 @ mf.weights).astype(np.float64)


def expected_norms(spec: FamilySpec, k_max: int) -> np.ndarray:
    """``prod_{j<=k} a_j``, which vanishes from ``k = n + 1`` on."""
    a = np.array(coeffs(spec, max(k_max, 1)).a[: k_max + 1])
    a[0] = 1.0
    return np.cumprod(a)


def orthogonality_matrix(spec: FamilySpec, mf: MomentFunctional | None = None) -> np.ndarray:
    """Gram matrix ``L(P_k P_l)`` for ``k, l <= n``."""
    if mf is None:
        mf = moment_functional(spec)
    table = ext_values(spec, spec.n, mf.nodes)
    return ((table * mf.weights) @ table.T).astype(np.float64)
