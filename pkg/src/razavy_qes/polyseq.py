"""Evaluation and materialization of the recurrence-defined polynomials."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .families import FamilySpec, PotentialParams, coeffs, enumerate_hat_branches, make_tilde

OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class MonicPoly:
    """Monic polynomial, coefficients in ascending degree."""

    coeffs: np.ndarray
    overflow: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or c.size == 0 or c[-1] != 1.0:
            raise ValueError("MonicPoly needs a non-empty coefficient vector ending in 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, e):
        return np.polynomial.polynomial.polyval(e, self.coeffs)

    def abs_bound(self, e):
        """``sum |c_i| |e|^i``: the magnitude scale of a floating-point evaluation at ``e``."""
        return np.polynomial.polynomial.polyval(np.abs(e), np.abs(self.coeffs))

    def reflected(self) -> "MonicPoly":
        """``(-1)^deg p(-E)``, again monic."""
        signs = (-1.0) ** (self.degree - np.arange(self.degree + 1))
        return MonicPoly(self.coeffs * signs, self.overflow)

    def roots(self) -> np.ndarray:
        return np.polynomial.polynomial.polyroots(self.coeffs)


def values(spec: FamilySpec, k_max: int, energies) -> np.ndarray:
    """Table of ``P_k(E)`` for ``k = 0..k_max``, shape ``(k_max + 1, len(energies))``."""
    c = coeffs(spec, max(k_max, 1))
    return _kernels.recurrence_table(c.a, c.b, spec.shift_sign, np.atleast_1d(energies), k_max)


def eval_poly(spec: FamilySpec, k: int, e):
    """``P_k(e)`` by forward recurrence; ``e`` may be a scalar or an array."""
    if k < 0:
        raise ValueError("k must be >= 0")
    scalar = np.ndim(e) == 0
    out = values(spec, k, e)[k]
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(e))


def coefficient_rows(spec: FamilySpec, k_max: int) -> np.ndarray:
    c = coeffs(spec, max(k_max, 1))
    return _kernels.coefficient_table(c.a, c.b, spec.shift_sign, k_max)


def _monic(row, k):
    c = np.array(row[: k + 1])
    overflow = bool(np.any(~np.isfinite(c)) or np.max(np.abs(c)) > OVERFLOW_LIMIT)
    return MonicPoly(c, overflow)


def poly_coeffs(spec: FamilySpec, k: int) -> MonicPoly:
    if k < 0:
        raise ValueError("k must be >= 0")
    return _monic(coefficient_rows(spec, k)[k], k)


def poly_sequence(spec: FamilySpec, k_max: int) -> list[MonicPoly]:
    rows = coefficient_rows(spec, k_max)
    return [_monic(rows[k], k) for k in range(k_max + 1)]


def critical_poly(spec: FamilySpec) -> MonicPoly:
    """``P_{n+1}``; its roots are the algebraic energies of the family."""
    return poly_coeffs(spec, spec.critical_index)


def _tail_coeffs(spec, j):
    c = coeffs(spec, spec.critical_index + max(j, 1))
    start = spec.critical_index
    a = np.array(c.a[start:])
    a[0] = 0.0
    return a, np.array(c.b[start:])


def tail_factor(spec: FamilySpec, j: int) -> MonicPoly:
    """Monic ``Q_j`` with ``P_{n+1+j} = Q_j * P_{n+1}``.

    Built from the recurrence shifted by ``n + 1``, which is valid because
    ``a_{n+1} = 0`` decouples the tail from ``P_n``.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    a, b = _tail_coeffs(spec, j)
    rows = _kernels.coefficient_table(a, b, spec.shift_sign, j)
    return _monic(rows[j], j)


def tail_values(spec: FamilySpec, j: int, energies) -> np.ndarray:
    a, b = _tail_coeffs(spec, j)
    return _kernels.recurrence_table(a, b, spec.shift_sign, np.atleast_1d(energies), j)[j]


def check_tilde_hat_factorization(params: PotentialParams, grid, periodic: bool = False) -> float:
    """Largest relative residual of ``P~_M - prod(hat critical polys)`` over ``grid``.

    Relative means scaled by ``max(1, |P~_M(E)|)`` pointwise.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    tilde = make_tilde(params, periodic)
    ref = values(tilde, tilde.critical_index, grid)[-1]
    prod = np.ones_like(grid)
    for hat in enumerate_hat_branches(params, periodic):
        prod *= values(hat, hat.critical_index, grid)[-1]
    return float(np.max(np.abs(ref - prod) / np.maximum(1.0, np.abs(ref))))


def duality_residual(per: FamilySpec, hyp: FamilySpec, k_max: int, grid) -> float:
    """Largest relative ``|P^per_k(E) - (-1)^k P_k(-E)|`` for ``k <= k_max``, ``E`` in ``grid``."""
    if not per.is_periodic or hyp.is_periodic:
        raise ValueError("expected a (periodic, hyperbolic) pair")
    if per.hyperbolic() != hyp:
        raise ValueError("families do not share parameters and base kind")
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    lhs = values(per, k_max, grid)
    rhs = values(hyp, k_max, -grid) * ((-1.0) ** np.arange(k_max + 1))[:, None]
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))))
