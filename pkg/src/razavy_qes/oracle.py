"""Brute-force numerical ground truth, independent of the polynomial machinery.

* ``bound_states_fd``: central differences for ``-d^2/dx^2 + (zeta cosh 2x - M)^2``
  on ``[-L, L]`` with Dirichlet ends, optionally Richardson-extrapolated.
* ``hill_eigenvalues``: plane waves ``exp(i(2m + q)x)`` for the periodic
  potential. ``-(zeta cos 2x - M)^2`` has only the harmonics 0, 2, 4, so the
  matrix is pentadiagonal and the method is spectrally exact.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .errors import BasisTooSmall, DomainTooSmall, InvalidParameters, OrderingViolation
from .families import PotentialParams

log = logging.getLogger(__name__)

FD_MARGIN = 10.0
FD_DECAY = 20.0
BASIS_TOL = 1e-10
INTERLEAVE_TOL = 1e-9
CLOSED_GAP = 1e-9


@dataclass(frozen=True)
class FdConfig:
    """``half_width`` L of the box, ``points`` N grid intervals on ``[-L, L]``."""

    half_width: float = 4.0
    points: int = 4000
    extrapolate: bool = True
    grow: bool = True

    def __post_init__(self):
        if self.half_width <= 0:
            raise InvalidParameters("half_width must be positive")
        if self.points < 200:
            raise InvalidParameters("points must be >= 200")


def _fd_levels(params: PotentialParams, half_width: float, intervals: int, count: int) -> np.ndarray:
    x, h = np.linspace(-half_width, half_width, intervals + 1, retstep=True)
    x = x[1:-1]
    diag = 2.0 / h ** 2 + params.hyperbolic_potential(x)
    off = np.full(x.size - 1, -1.0 / h ** 2)
    return scipy.linalg.eigh_tridiagonal(
        diag, off, eigvals_only=True, select="i", select_range=(0, count - 1)
    )


def decay_exponent(params: PotentialParams, energy: float, half_width: float) -> float:
    """WKB exponent ``int sqrt(max(V - E, 0)) dx`` over ``[0, L]``.

    The bound state at ``energy`` has shrunk by about ``exp(-exponent)`` at the
    wall, so the Dirichlet condition perturbs it at order ``exp(-2 exponent)``.
    """
    x = np.linspace(0.0, half_width, 2001)
    return float(scipy.integrate.trapezoid(np.sqrt(np.maximum(params.hyperbolic_potential(x) - energy, 0.0)), x))


def _fd_domain(params: PotentialParams, cfg: FdConfig, count: int) -> float:
    half_width = cfg.half_width
    for _ in range(40):
        top = _fd_levels(params, half_width, cfg.points, count)[-1]
        margin_ok = params.hyperbolic_potential(half_width) >= top + FD_MARGIN
        if margin_ok and decay_exponent(params, top, half_width) >= FD_DECAY:
            return half_width
        if not cfg.grow:
            break
        half_width += 0.25
        log.info("growing FD box to L=%g", half_width)
    raise DomainTooSmall(
        f"at L={half_width} the {count}-th level is not confined: need V(L) >= E + {FD_MARGIN} "
        f"and decay exponent >= {FD_DECAY}"
    )


def bound_states_fd(params: PotentialParams, cfg: FdConfig = FdConfig(), count: int = 1) -> np.ndarray:
    """Lowest ``count`` levels of the double well.

    With ``cfg.extrapolate`` the results on ``N`` and ``2N`` intervals are
    combined as ``(4 E_2N - E_N) / 3`` (leading error ``O(h^2)``).
    """
    if count < 1 or count > cfg.points // 10:
        raise InvalidParameters(f"count must be in [1, {cfg.points // 10}]")
    half_width = _fd_domain(params, cfg, count)
    coarse = _fd_levels(params, half_width, cfg.points, count)
    if not cfg.extrapolate:
        return coarse
    fine = _fd_levels(params, half_width, 2 * cfg.points, count)
    return (4.0 * fine - coarse) / 3.0


def fd_convergence_ratio(params: PotentialParams, cfg: FdConfig = FdConfig(), count: int = 1) -> np.ndarray:
    """``(E_N - E_2N) / (E_2N - E_4N)`` per level; close to 4 for an ``h^2`` scheme."""
    half_width = _fd_domain(params, cfg, count)
    e1, e2, e4 = (_fd_levels(params, half_width, f * cfg.points, count) for f in (1, 2, 4))
    return (e1 - e2) / (e2 - e4)


# -- periodic potential ------------------------------------------------------------


def hill_banded(params: PotentialParams, q: float, basis_cut: int) -> np.ndarray:
    """Upper banded storage (``scipy.linalg.eig_banded``) of the plane-wave Hamiltonian.

    ``U = -M^2 - zeta^2/2 + 2 M zeta cos 2x - (zeta^2/2) cos 4x`` couples
    ``m`` to ``m +- 1`` with ``M zeta`` and to ``m +- 2`` with ``-zeta^2/4``.
    """
    m, zeta = params.m_int, params.zeta
    size = 2 * basis_cut + 1
    k = 2 * np.arange(-basis_cut, basis_cut + 1) + q
    band = np.zeros((3, size))
    band[2] = k ** 2 - m ** 2 - 0.5 * zeta ** 2
    band[1, 1:] = m * zeta
    band[0, 2:] = -0.25 * zeta ** 2
    return band


def _hill_solve(params, q, basis_cut, count):
    return scipy.linalg.eig_banded(
        hill_banded(params, q, basis_cut), eigvals_only=True, select="i",
        select_range=(0, count - 1),
    )


def hill_eigenvalues(params: PotentialParams, q: float, basis_cut: int = 64, count: int = 1,
                     check: bool = True) -> np.ndarray:
    """Lowest ``count`` Floquet eigenvalues at Bloch parameter ``q``.

    ``q = 0`` gives the periodic problem (period pi), ``q = 1`` the
    antiperiodic one.
    """
    if not 0.0 <= q <= 2.0:
        raise InvalidParameters("q must lie in [0, 2]")
    if count < 1 or count > basis_cut:
        raise InvalidParameters("need 1 <= count <= basis_cut")
    ev = _hill_solve(params, q, basis_cut, count)
    if check:
        bigger = _hill_solve(params, q, basis_cut + 8, count)
        shift = abs(float(bigger[-1] - ev[-1]))
        if shift > BASIS_TOL * max(1.0, abs(float(ev[-1]))):
            raise BasisTooSmall(f"eigenvalues move by {shift:.3e} when K={basis_cut} -> {basis_cut + 8}")
    return ev


@dataclass(frozen=True)
class BandEdges:
    """``periodic`` = (E_0, E_1, ...), ``antiperiodic`` = (Ebar_1, Ebar_2, ...)."""

    periodic: np.ndarray
    antiperiodic: np.ndarray

    def gaps(self) -> list[tuple[str, int, float, float]]:
        """Gaps in energy order as ``(type, k, lower, upper)``.

        Antiperiodic gaps are ``(Ebar_k, Ebar_{k+1})`` for odd ``k``, periodic
        ones ``(E_k, E_{k+1})`` for odd ``k``. Closed gaps are kept.
        """
        out = []
        for k in range(1, self.antiperiodic.size, 2):
            out.append(("antiperiodic", k, self.antiperiodic[k - 1], self.antiperiodic[k]))
        for k in range(1, self.periodic.size - 1, 2):
            out.append(("periodic", k, self.periodic[k], self.periodic[k + 1]))
        return sorted(out, key=lambda g: (g[2], g[3]))

    def bands(self, n_bands: int) -> list[tuple[tuple[str, int], tuple[str, int]]]:
        """Edge labels of the first ``n_bands`` allowed bands.

        Band 0 is ``[E_0, Ebar_1]``; odd band ``b`` is ``[Ebar_{b+1}, E_b]``,
        even band ``b >= 2`` is ``[E_b, Ebar_{b+1}]``.
        """
        out = []
        for b in range(n_bands):
            if b % 2:
                out.append((("antiperiodic", b + 1), ("periodic", b)))
            else:
                out.append((("periodic", b), ("antiperiodic", b + 1)))
        return out

    def edge(self, label: tuple[str, int]) -> float:
        kind, k = label
        return float(self.periodic[k] if kind == "periodic" else self.antiperiodic[k - 1])


def check_interleaving(edges: BandEdges, tol: float = INTERLEAVE_TOL) -> None:
    """``E_0 < Ebar_1 <= Ebar_2 < E_1 <= E_2 < Ebar_3 <= ...`` up to ``tol * scale``."""
    seq = [edges.periodic[0]]
    strict = []
    n = min(edges.antiperiodic.size // 2, (edges.periodic.size - 1) // 2)
    for j in range(n):
        seq += [edges.antiperiodic[2 * j], edges.antiperiodic[2 * j + 1],
                edges.periodic[2 * j + 1], edges.periodic[2 * j + 2]]
        strict += [True, False, True, False]
    seq = np.array(seq)
    scale = max(1.0, float(np.max(np.abs(seq))))
    for i, is_strict in enumerate(strict):
        lo, hi = seq[i], seq[i + 1]
        ok = hi > lo - tol * scale if not is_strict else hi > lo
        if not ok:
            raise OrderingViolation(f"band edges out of order at position {i}: {lo!r} vs {hi!r}")


def band_edges(params: PotentialParams, n_gaps: int, basis_cut: int = 64) -> BandEdges:
    """``2 n_gaps + 1`` periodic and ``2 n_gaps`` antiperiodic edges, order-checked."""
    if n_gaps < 0:
        raise InvalidParameters("n_gaps must be >= 0")
    per = hill_eigenvalues(params, 0.0, basis_cut, 2 * n_gaps + 1)
    anti = hill_eigenvalues(params, 1.0, basis_cut, 2 * n_gaps) if n_gaps else np.empty(0)
    edges = BandEdges(per, anti)
    check_interleaving(edges)
    return edges


@dataclass(frozen=True)
class Dispersion:
    q_grid: np.ndarray
    bands: np.ndarray  # shape (n_bands, q_points)


def _check_continuity(bands: np.ndarray) -> None:
    jumps = np.abs(np.diff(bands, axis=1))
    for b, row in enumerate(jumps):
        for i, d in enumerate(row):
            nb = [row[j] for j in (i - 1, i + 1) if 0 <= j < row.size]
            bound = 4.0 * max(nb) + 1e-9 * max(1.0, float(np.max(np.abs(bands[b]))))
            if nb and d > bound:
                raise OrderingViolation(f"band {b} jumps by {d:.3e} at q index {i}")


def ordered_map(func, items, jobs: int = 1) -> list:
    """``[func(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def dispersion(params: PotentialParams, q_points: int = 65, n_bands: int = 5,
               basis_cut: int = 64, jobs: int = 1) -> Dispersion:
    """Band functions on a uniform grid of ``q`` in ``[0, 2]``."""
    if q_points < 16:
        raise InvalidParameters("q_points must be >= 16")
    if n_bands < 1:
        raise InvalidParameters("n_bands must be >= 1")
    q = np.linspace(0.0, 2.0, q_points)
    cols = ordered_map(lambda qi: hill_eigenvalues(params, qi, basis_cut, n_bands), q, jobs)
    bands = np.column_stack(cols)
    _check_continuity(bands)
    return Dispersion(q, bands)


def integrate_periodic_ode(params: PotentialParams, energy: float, xs, psi0: float = 1.0,
                           dpsi0: float = 0.0) -> np.ndarray:
    """Solution of ``-psi'' + U psi = E psi`` from ``xs[0]`` with the given initial data."""
    xs = np.asarray(xs, dtype=np.float64)

    def rhs(x, y):
        return [y[1], (params.periodic_potential(x) - energy) * y[0]]

    sol = scipy.integrate.solve_ivp(rhs, (xs[0], xs[-1]), [psi0, dpsi0], t_eval=xs,
                                    method="DOP853", rtol=1e-12, atol=1e-12)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y[0]
