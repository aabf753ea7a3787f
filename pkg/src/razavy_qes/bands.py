"""Where the algebraic energies sit in the band structure of the periodic potential.

For M even the critical roots are the antiperiodic edges of the first M/2 odd
gaps; for M odd they are the ground state plus the periodic edges of the first
[M/2] even gaps. Gaps are numbered from 1 in energy order. A closed gap (width
below ``CLOSED_GAP``) keeps its index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeMismatch, InvalidParameters, OrderingViolation
from .families import PotentialParams, make_tilde
from .oracle import CLOSED_GAP, BandEdges, band_edges, ordered_map
from .spectrum import algebraic_energies

MATCH_TOL = 1e-6
# two edges inside the cap are only ambiguous if the oracle cannot tell which is nearer
RESOLUTION = 1e-9
GAP_CONVENTION = "inclusive"

FIG2_COLUMNS = ("zeta", "band", "edge_lo", "edge_hi", "lo_tag", "hi_tag")


@dataclass(frozen=True)
class MatchedEdge:
    label: tuple[str, int]
    oracle_value: float
    algebraic_value: float
    abs_error: float


@dataclass(frozen=True)
class GapClassification:
    m_int: int
    zeta: float
    algebraic_energies: np.ndarray
    matched_edges: tuple[MatchedEdge, ...]
    gap_indices: tuple[int, ...]
    includes_ground_state: bool
    closed_gaps: tuple[int, ...] = ()
    gap_convention: str = GAP_CONVENTION
    edges: BandEdges | None = field(default=None, repr=False, compare=False)


def edge_type(m_int: int) -> str:
    """Boundary condition of the algebraic states: period pi for M odd."""
    return "periodic" if m_int % 2 else "antiperiodic"


def _labelled(edges: BandEdges, kind: str) -> list[tuple[tuple[str, int], float]]:
    if kind == "periodic":
        return [(("periodic", k), float(e)) for k, e in enumerate(edges.periodic)]
    return [(("antiperiodic", k + 1), float(e)) for k, e in enumerate(edges.antiperiodic)]


def _cap(e: float) -> float:
    return MATCH_TOL * max(1.0, abs(e))


def _gap_numbering(edges: BandEdges) -> tuple[dict[tuple[str, int], int], tuple[int, ...]]:
    """Map each gap-bounding edge to its 1-based gap index; also list closed gaps."""
    index_of, closed = {}, []
    for i, (kind, k, lo, hi) in enumerate(edges.gaps(), start=1):
        index_of[(kind, k)] = i
        index_of[(kind, k + 1)] = i
        if hi - lo < CLOSED_GAP * max(1.0, abs(hi)):
            closed.append(i)
    return index_of, tuple(closed)


def classify(params: PotentialParams, basis_cut: int = 64) -> GapClassification:
    """Match every critical root to a band edge and report the gaps they bound."""
    m = params.m_int
    energies = algebraic_energies(make_tilde(params, periodic=True)).energies
    edges = band_edges(params, m // 2 + 2, basis_cut)
    kind = edge_type(m)
    candidates = _labelled(edges, kind)
    values = np.array([v for _, v in candidates])

    matched = []
    for e in energies:
        dist = np.abs(values - e)
        close = np.flatnonzero(dist <= _cap(e))
        if close.size == 0:
            raise EdgeMismatch(
                f"no {kind} edge within {_cap(e):.1e} of E={e!r} (nearest off by {dist.min():.3e})"
            )
        order = close[np.argsort(dist[close])]
        i = int(order[0])
        if order.size > 1 and dist[order[1]] - dist[i] <= RESOLUTION * max(1.0, abs(e)):
            raise EdgeMismatch(f"E={e!r} is equally close to {order.size} {kind} edges")
        matched.append(MatchedEdge(candidates[i][0], candidates[i][1], float(e), float(dist[i])))

    labels = [me.label for me in matched]
    lowest = [lab for lab, _ in candidates[:m]]
    if labels != lowest:
        raise OrderingViolation(f"matched edges {labels} are not the lowest {m} {kind} edges")

    index_of, closed = _gap_numbering(edges)
    gaps = sorted({index_of[lab] for lab in labels if lab in index_of})
    return GapClassification(
        m_int=m,
        zeta=params.zeta,
        algebraic_energies=energies,
        matched_edges=tuple(matched),
        gap_indices=tuple(gaps),
        includes_ground_state=("periodic", 0) in labels,
        closed_gaps=tuple(g for g in closed if g in gaps),
        edges=edges,
    )


def consecutive_gap_check(params: PotentialParams, basis_cut: int = 64) -> bool:
    """True iff no two algebraic gaps are adjacent and no band has both edges algebraic."""
    cls = classify(params, basis_cut)
    g = cls.gap_indices
    if any(b - a == 1 for a, b in zip(g, g[1:])):
        return False
    algebraic = {me.label for me in cls.matched_edges}
    n_bands = 2 * (params.m_int // 2 + 2)
    return not any(lo in algebraic and hi in algebraic for lo, hi in cls.edges.bands(n_bands))


def _sweep_point(m_int: int, zeta: float, n_bands: int, basis_cut: int) -> list[tuple]:
    params = PotentialParams(zeta, m_int)
    n_gaps = max(n_bands // 2 + 1, m_int // 2 + 1)
    edges = band_edges(params, n_gaps, basis_cut)
    roots = algebraic_energies(make_tilde(params, periodic=True), check_distinct=False).energies
    candidates = _labelled(edges, edge_type(m_int))[:m_int]
    for (label, value), e in zip(candidates, roots):
        if abs(value - e) > _cap(e):
            raise EdgeMismatch(f"zeta={zeta!r}: edge {label} = {value!r} but root = {e!r}")
    algebraic = {label for label, _ in candidates}
    rows = []
    for b, (lo, hi) in enumerate(edges.bands(n_bands)):
        rows.append((
            float(zeta), b, edges.edge(lo), edges.edge(hi),
            "algebraic" if lo in algebraic else "numeric",
            "algebraic" if hi in algebraic else "numeric",
        ))
    return rows


def fig2_sweep(m_int: int, zeta_grid, n_bands: int = 5, basis_cut: int = 64,
               jobs: int = 1) -> list[tuple]:
    """Rows ``(zeta, band, edge_lo, edge_hi, lo_tag, hi_tag)`` for each ``zeta``.

    Edges coinciding with a critical root are tagged ``algebraic``, the rest
    ``numeric``. Row order follows ``zeta_grid`` regardless of ``jobs``.
    """
    grid = np.asarray(zeta_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameters("zeta_grid must be a non-empty 1-d sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidParameters("zeta_grid must be positive and strictly increasing")
    if n_bands < 1:
        raise InvalidParameters("n_bands must be >= 1")
    PotentialParams(float(grid[0]), m_int)
    chunks = ordered_map(lambda z: _sweep_point(m_int, float(z), n_bands, basis_cut), grid, jobs)
    return [row for chunk in chunks for row in chunk]
