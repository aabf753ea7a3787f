"""Polynomial families attached to the Razavy potentials.

Each family is identified by a :class:`FamilySpec` and is fully described by
the coefficients of its monic three-term recurrence

    P_{k+1}(E) = (E - s*b_k) P_k(E) - a_k P_{k-1}(E),

with ``s = +1`` for the hyperbolic potential ``(zeta cosh 2x - M)^2`` and
``s = -1`` for its periodic dual ``-(zeta cos 2x - M)^2``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters


class Kind(enum.Enum):
    HYPERBOLIC_HAT = "hyperbolic-hat"
    HYPERBOLIC_TILDE = "hyperbolic-tilde"
    PERIODIC_HAT = "periodic-hat"
    PERIODIC_TILDE = "periodic-tilde"

    @property
    def is_hat(self) -> bool:
        return self in (Kind.HYPERBOLIC_HAT, Kind.PERIODIC_HAT)

    @property
    def is_periodic(self) -> bool:
        return self in (Kind.PERIODIC_HAT, Kind.PERIODIC_TILDE)

    def dual(self) -> "Kind":
        return {
            Kind.HYPERBOLIC_HAT: Kind.PERIODIC_HAT,
            Kind.PERIODIC_HAT: Kind.HYPERBOLIC_HAT,
            Kind.HYPERBOLIC_TILDE: Kind.PERIODIC_TILDE,
            Kind.PERIODIC_TILDE: Kind.HYPERBOLIC_TILDE,
        }[self]


# (sigma, eta) -> label; the order is the enumeration order used everywhere
BRANCH_LABELS = {
    (1, 0): "sigma=+1",
    (-1, 0): "sigma=-1",
    (0, 1): "eta=+1",
    (0, -1): "eta=-1",
}
LABEL_TO_BRANCH = {v: k for k, v in BRANCH_LABELS.items()}
TILDE_LABEL = "tilde"


@dataclass(frozen=True)
class PotentialParams:
    """Coupling ``zeta > 0`` and integer ``M >= 1``."""

    zeta: float
    m_int: int

    def __post_init__(self):
        if isinstance(self.m_int, bool) or int(self.m_int) != self.m_int:
            raise InvalidParameters(f"M must be an integer, got {self.m_int!r}")
        object.__setattr__(self, "m_int", int(self.m_int))
        object.__setattr__(self, "zeta", float(self.zeta))
        if self.m_int < 1:
            raise InvalidParameters(f"M must be >= 1, got {self.m_int}")
        if not np.isfinite(self.zeta) or self.zeta <= 0:
            raise InvalidParameters(f"zeta must be finite and > 0, got {self.zeta}")

    @property
    def energy_scale(self) -> float:
        return (self.zeta + self.m_int) ** 2

    def hyperbolic_potential(self, x):
        """``V(x) = (zeta cosh 2x - M)^2``."""
        return (self.zeta * np.cosh(2 * np.asarray(x)) - self.m_int) ** 2

    def periodic_potential(self, x):
        """``U(x) = -(zeta cos 2x - M)^2``, period pi."""
        return -((self.zeta * np.cos(2 * np.asarray(x)) - self.m_int) ** 2)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """``a[k]`` for k >= 1 (``a[0]`` is an unused zero) and ``b[k]`` for k >= 0."""

    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class FamilySpec:
    kind: Kind
    params: PotentialParams
    n: int
    sigma: int = 0
    eta: int = 0
    branch_label: str = TILDE_LABEL

    def __post_init__(self):
        m = self.params.m_int
        if self.kind.is_hat:
            if (self.sigma, self.eta) not in BRANCH_LABELS:
                raise InvalidParameters(
                    f"(sigma, eta) = ({self.sigma}, {self.eta}) is not an admissible branch"
                )
            if self.n < 0 or m != 2 * (self.n + 1) - self.sigma:
                raise InvalidParameters(
                    f"branch {BRANCH_LABELS[(self.sigma, self.eta)]} with n={self.n} "
                    f"does not give M={m}"
                )
        else:
            if self.n != m - 1 or self.sigma != 0 or self.eta != 0:
                raise InvalidParameters("tilde families require n = M - 1 and sigma = eta = 0")

    @property
    def is_hat(self) -> bool:
        return self.kind.is_hat

    @property
    def is_periodic(self) -> bool:
        return self.kind.is_periodic

    @property
    def shift_sign(self) -> float:
        """Sign ``s`` multiplying ``b_k`` in the recurrence."""
        return -1.0 if self.is_periodic else 1.0

    @property
    def critical_index(self) -> int:
        return self.n + 1

    @property
    def factorial_offset(self) -> int:
        """Integer ``(eta - sigma + 1) / 2`` appearing in the hat-series normalization."""
        twice = self.eta - self.sigma + 1
        if twice % 2:
            raise InvalidParameters("non-integer factorial offset; invalid branch")
        return twice // 2

    def dual(self) -> "FamilySpec":
        return FamilySpec(
            self.kind.dual(), self.params, self.n, self.sigma, self.eta, self.branch_label
        )

    def hyperbolic(self) -> "FamilySpec":
        return self.dual() if self.is_periodic else self

    def describe(self) -> str:
        return f"{self.kind.value}[{self.branch_label}] M={self.params.m_int} zeta={self.params.zeta:g} n={self.n}"


def hat_spec(params: PotentialParams, sigma: int, eta: int, periodic: bool = False) -> FamilySpec:
    """Hat family for the branch ``(sigma, eta)``; ``n`` is solved from ``M = 2(n+1) - sigma``."""
    if (sigma, eta) not in BRANCH_LABELS:
        raise InvalidParameters(f"unknown branch (sigma, eta) = ({sigma}, {eta})")
    twice = params.m_int + sigma
    if twice % 2:
        raise InvalidParameters(
            f"branch {BRANCH_LABELS[(sigma, eta)]} is incompatible with M={params.m_int}"
        )
    n = twice // 2 - 1
    kind = Kind.PERIODIC_HAT if periodic else Kind.HYPERBOLIC_HAT
    return FamilySpec(kind, params, n, sigma, eta, BRANCH_LABELS[(sigma, eta)])


def hat_spec_from_label(params: PotentialParams, label: str, periodic: bool = False) -> FamilySpec:
    try:
        sigma, eta = LABEL_TO_BRANCH[label]
    except KeyError:
        raise InvalidParameters(
            f"unknown branch label {label!r}; expected one of {sorted(LABEL_TO_BRANCH)}"
        ) from None
    return hat_spec(params, sigma, eta, periodic)


def enumerate_hat_branches(params: PotentialParams, periodic: bool = False) -> list[FamilySpec]:
    """Hat families compatible with ``M``.

    Even ``M`` gives the ``eta = +1, -1`` rows (both with ``n = M/2 - 1``); odd
    ``M >= 3`` gives the ``sigma = +1, -1`` rows; ``M = 1`` admits only
    ``sigma = +1``.
    """
    m = params.m_int
    if m % 2 == 0:
        branches = [(0, 1), (0, -1)]
    elif m == 1:
        branches = [(1, 0)]
    else:
        branches = [(1, 0), (-1, 0)]
    return [hat_spec(params, s, e, periodic) for s, e in branches]


def make_tilde(params: PotentialParams, periodic: bool = False) -> FamilySpec:
    kind = Kind.PERIODIC_TILDE if periodic else Kind.HYPERBOLIC_TILDE
    return FamilySpec(kind, params, params.m_int - 1)


@functools.lru_cache(maxsize=512)
def _coeff_arrays(spec: FamilySpec, k_max: int):
    zeta = spec.params.zeta
    n = spec.n
    k = np.arange(k_max + 1, dtype=np.float64)
    if spec.is_hat:
        sigma, eta = spec.sigma, spec.eta
        a = 16.0 * zeta * k * (2 * k - sigma + eta) * (k - n - 1)
        b = -4.0 * k * (k + 1 - sigma + 2 * zeta) + (2 * n + 1) * (2 * (n - sigma) + 3) \
            + zeta * (zeta - 2 * eta + 4 * n)
    else:
        a = 4.0 * k * (n + 1 - k) * zeta ** 2
        b = 4.0 * k * (n - k) + 2 * n + 1 + zeta ** 2
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def coeffs(spec: FamilySpec, k_max: int) -> RecurrenceCoeffs:
    """Recurrence coefficients ``a_0..a_kmax`` and ``b_0..b_kmax``.

    Periodic kinds return the same arrays as their hyperbolic base; the sign
    flip lives in :attr:`FamilySpec.shift_sign`.
    """
    if k_max < 0:
        raise InvalidParameters("k_max must be >= 0")
    a, b = _coeff_arrays(spec.hyperbolic(), int(k_max))
    return RecurrenceCoeffs(a, b)
