"""Algebraic eigenfunctions and the checks run on sampled functions."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import EnergyNotCritical, FormMismatch, GridTooCoarse, InvalidParameters
from .families import (
    FamilySpec,
    PotentialParams,
    enumerate_hat_branches,
    hat_spec,
    make_tilde,
)
from .polyseq import critical_poly, values
from .spectrum import algebraic_energies

TRUNCATION_TOL = 1e-8
FINITE_TOL = 1e-8

# real trigonometric forms, keyed by the hat branch (sigma, eta) they come from
FORM_OF_BRANCH = {(0, 1): "ee", (0, -1): "eo", (1, 0): "oe", (-1, 0): "oo"}
BRANCH_OF_FORM = {v: k for k, v in FORM_OF_BRANCH.items()}
REAL_FORMS = tuple(BRANCH_OF_FORM)


class Realization(enum.Enum):
    HAT_COSH = "hat-cosh"
    TILDE_EXP = "tilde-exp"
    PERIODIC_COMPLEX = "periodic-complex"
    PERIODIC_REAL = "periodic-real"


@dataclass(frozen=True)
class SampledFunction:
    xs: np.ndarray
    values: np.ndarray
    domain: str
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        vals = np.asarray(self.values)
        if xs.ndim != 1 or xs.shape != vals.shape:
            raise ValueError("xs and values must be 1-d arrays of equal length")
        if xs.size > 1 and np.any(np.diff(xs) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vals)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


@dataclass(frozen=True)
class EigenfunctionSeries:
    """Gauge factor times a truncated series, evaluable anywhere.

    ``coeffs[k]`` already includes the normalization of the ``k``-th term.
    """

    realization: Realization
    energy: float
    coeffs: np.ndarray
    family: FamilySpec
    form: Optional[str] = None
    truncation_residual: float = 0.0

    def __call__(self, xs):
        x = np.asarray(xs, dtype=np.float64)
        r = self.realization
        zeta = self.family.params.zeta
        if r is Realization.HAT_COSH:
            z = np.cosh(2 * x)
            # (z+1)^k with (z+1) = 2 cosh^2 x
            series = np.polynomial.polynomial.polyval(z + 1, self.coeffs)
            gauge = np.exp(-0.5 * zeta * z)
            if _has_sin_factor(self.family):
                gauge = gauge * np.sqrt(2.0) * np.sinh(x)
            if _has_cos_factor(self.family):
                gauge = gauge * np.sqrt(2.0) * np.cosh(x)
            return gauge * series
        if r is Realization.TILDE_EXP:
            m = self.family.params.m_int
            k = np.arange(self.coeffs.size)
            # z^((1-M)/2) e^{-zeta/4 (z + 1/z)} z^k with z = e^{2x}, in one exponent
            expo = (2 * k[:, None] + 1 - m) * x[None, :] - 0.5 * zeta * np.cosh(2 * x)[None, :]
            return (self.coeffs[:, None] * np.exp(expo)).sum(axis=0)
        if r is Realization.PERIODIC_COMPLEX:
            m = self.family.params.m_int
            w = np.exp(2j * x)
            series = np.polynomial.polynomial.polyval(w, self.coeffs)
            return np.exp(-0.5 * zeta * np.cos(2 * x) - 1j * (m - 1) * x) * series
        # PERIODIC_REAL: cos^{2k} x basis, (z+1)/2 = cos^2 x for z = cos 2x
        c = np.cos(x)
        series = np.polynomial.polynomial.polyval(c * c, self.coeffs)
        gauge = np.exp(-0.5 * zeta * np.cos(2 * x))
        if _has_sin_factor(self.family):
            gauge = gauge * np.sin(x)
        if _has_cos_factor(self.family):
            gauge = gauge * c
        return gauge * series

    def sample(self, xs, domain: Optional[str] = None) -> SampledFunction:
        if domain is None:
            domain = "periodic" if self.family.is_periodic else "hyperbolic"
        return SampledFunction(np.asarray(xs, dtype=np.float64), self(xs), domain, evaluator=self)

    @property
    def ince_label(self) -> Optional[str]:
        """Classical Ince-polynomial name of ``exp(zeta/2 cos 2x) psi``; metadata only."""
        if self.realization is not Realization.PERIODIC_REAL:
            return None
        m = self.family.params.m_int
        rank = int(np.searchsorted(algebraic_energies(self.family).energies, self.energy - 1e-9 * max(1.0, abs(self.energy))))
        letter = "C" if self.form in ("ee", "oe") else "S"
        upper = {"ee": 2 * rank + 1, "eo": 2 * rank + 1, "oe": 2 * rank, "oo": 2 * rank + 2}[self.form]
        return f"{letter}_{m - 1}^{upper}"


def _has_sin_factor(spec: FamilySpec) -> bool:
    # exponent (1 - sigma - eta)/4 of (z - 1) equals 1/2
    return spec.is_hat and spec.sigma + spec.eta == -1


def _has_cos_factor(spec: FamilySpec) -> bool:
    # exponent (1 - sigma + eta)/4 of (z + 1) equals 1/2
    return spec.is_hat and spec.eta - spec.sigma == 1


def _poly_values(spec: FamilySpec, energy: float):
    """``P_0..P_{n+1}`` at ``energy`` and the truncation residual of ``P_{n+1}``."""
    vals = values(spec, spec.critical_index, [energy])[:, 0]
    bound = critical_poly(spec).abs_bound(energy)
    resid = abs(vals[-1]) / max(bound, np.finfo(float).tiny)
    return vals, float(resid)


def _require_critical(spec, energy, resid):
    if not resid <= TRUNCATION_TOL:
        raise EnergyNotCritical(
            f"E={energy!r} is not a root of the critical polynomial of {spec.describe()} "
            f"(relative residual {resid:.3e})"
        )


def hyperbolic_series(spec: FamilySpec, energy: float) -> EigenfunctionSeries:
    if spec.is_periodic:
        raise InvalidParameters("hyperbolic_series needs a hyperbolic family")
    vals, resid = _poly_values(spec, energy)
    _require_critical(spec, energy, resid)
    n = spec.n
    k = np.arange(n + 1)
    if spec.is_hat:
        off = spec.factorial_offset
        norm = np.array([2.0 ** i * factorial(2 * i + off) for i in k])
        return EigenfunctionSeries(Realization.HAT_COSH, float(energy), vals[: n + 1] / norm, spec,
                                   truncation_residual=resid)
    zeta = spec.params.zeta
    norm = np.array([(-2.0 * zeta) ** i * factorial(i) for i in k])
    return EigenfunctionSeries(Realization.TILDE_EXP, float(energy), vals[: n + 1] / norm, spec,
                               truncation_residual=resid)


def hyperbolic_eigenfunction(spec: FamilySpec, energy: float, xs) -> SampledFunction:
    """Samples of the algebraic eigenfunction of ``-d^2/dx^2 + (zeta cosh 2x - M)^2``."""
    return hyperbolic_series(spec, energy).sample(xs)


def _branch_for_form(params: PotentialParams, form: str) -> FamilySpec:
    if form not in BRANCH_OF_FORM:
        raise InvalidParameters(f"unknown form {form!r}; expected one of {REAL_FORMS + ('complex', 'real')}")
    sigma, eta = BRANCH_OF_FORM[form]
    m = params.m_int
    if (form in ("ee", "eo")) != (m % 2 == 0) or (form == "oo" and m == 1):
        raise FormMismatch(f"form {form!r} does not exist for M={m}")
    return hat_spec(params, sigma, eta, periodic=True)


def _detect_form(params: PotentialParams, energy: float) -> str:
    best, best_resid = None, np.inf
    for spec in enumerate_hat_branches(params, periodic=True):
        resid = _poly_values(spec, energy)[1]
        if resid < best_resid:
            best, best_resid = spec, resid
    return FORM_OF_BRANCH[(best.sigma, best.eta)]


def trig_series(spec: FamilySpec, energy: float, form: str = "complex") -> EigenfunctionSeries:
    """Series for the periodic potential ``-(zeta cos 2x - M)^2``.

    ``form="complex"`` gives ``exp(-zeta/2 cos 2x - i(M-1)x) * phi(exp(2ix))``;
    ``"ee"``, ``"eo"``, ``"oe"``, ``"oo"`` give the real forms built from hat
    polynomials at ``-E``; ``"real"`` picks whichever real form fits ``energy``.
    """
    if not spec.is_periodic:
        raise InvalidParameters("trig_series needs a periodic family")
    params = spec.params
    if form == "complex":
        tilde = make_tilde(params, periodic=True)
        vals, resid = _poly_values(tilde, energy)
        _require_critical(tilde, energy, resid)
        m = params.m_int
        norm = np.array([(2.0 * params.zeta) ** i * factorial(i) for i in range(m)])
        return EigenfunctionSeries(Realization.PERIODIC_COMPLEX, float(energy), vals[:m] / norm,
                                   tilde, "complex", resid)
    if form == "real":
        form = _detect_form(params, energy)
    branch = _branch_for_form(params, form)
    if spec.is_hat and (spec.sigma, spec.eta) != (branch.sigma, branch.eta):
        raise FormMismatch(f"form {form!r} does not belong to branch {spec.branch_label}")
    _, resid = _poly_values(branch, energy)
    _require_critical(branch, energy, resid)
    hyp = branch.hyperbolic()
    vals = values(hyp, hyp.n, [-energy])[:, 0]
    off = hyp.factorial_offset
    norm = np.array([factorial(2 * i + off) for i in range(hyp.n + 1)], dtype=np.float64)
    return EigenfunctionSeries(Realization.PERIODIC_REAL, float(energy), vals / norm, branch, form, resid)


def trig_eigenfunction(spec: FamilySpec, energy: float, xs, form: str = "complex") -> SampledFunction:
    return trig_series(spec, energy, form).sample(xs)


def periodic_tan_form(params: PotentialParams, energy: float, xs) -> np.ndarray:
    """Complex eigenfunction evaluated literally in the variable ``z = tan x``.

    Undefined where ``cos x = 0``. Equal to the ``"complex"`` form up to the
    constant ``i^(M-1) exp(-zeta/2)``.
    """
    tilde = make_tilde(params, periodic=True)
    vals, resid = _poly_values(tilde, energy)
    _require_critical(tilde, energy, resid)
    m, zeta = params.m_int, params.zeta
    z = np.tan(np.asarray(xs, dtype=np.float64)).astype(complex)
    gauge = (z * z + 1) ** ((1 - m) / 2) * np.exp(-zeta / (z * z + 1))
    ratio = (z - 1j) / (z + 1j)
    series = sum((-1) ** k * vals[k] / ((2 * zeta) ** k * factorial(k)) * ratio ** k for k in range(m))
    return gauge * (z + 1j) ** (m - 1) * series


@dataclass(frozen=True)
class AlgebraicState:
    energy: float
    series: EigenfunctionSeries


def hyperbolic_states(params: PotentialParams, realization: str = "tilde") -> list[AlgebraicState]:
    """All ``M`` algebraic states of the double well, sorted by energy."""
    if realization == "tilde":
        spec = make_tilde(params)
        return [AlgebraicState(e, hyperbolic_series(spec, e)) for e in algebraic_energies(spec).energies]
    states = []
    for spec in enumerate_hat_branches(params):
        states += [AlgebraicState(e, hyperbolic_series(spec, e)) for e in algebraic_energies(spec).energies]
    return sorted(states, key=lambda s: s.energy)


def trig_states(params: PotentialParams, form: str = "real") -> list[AlgebraicState]:
    """All ``M`` algebraic states of the periodic potential, sorted by energy."""
    if form == "complex":
        spec = make_tilde(params, periodic=True)
        return [AlgebraicState(e, trig_series(spec, e, "complex")) for e in algebraic_energies(spec).energies]
    states = []
    for spec in enumerate_hat_branches(params, periodic=True):
        f = FORM_OF_BRANCH[(spec.sigma, spec.eta)]
        states += [AlgebraicState(e, trig_series(spec, e, f)) for e in algebraic_energies(spec).energies]
    return sorted(states, key=lambda s: s.energy)


def default_period_points(m_int: int) -> int:
    return int(1024 * max(1, m_int / 4))


# -- checks on sampled functions -------------------------------------------------


def schrodinger_residual(f: SampledFunction, potential, energy: float) -> float:
    """``max |-psi'' + U psi - E psi| / (max|psi| * max(1, |E|))`` on the grid interior.

    The grid must be uniform; ``psi''`` uses an 8th-order central stencil.
    """
    xs = f.xs
    h = xs[1] - xs[0]
    if not np.allclose(np.diff(xs), h, rtol=1e-9, atol=0):
        raise ValueError("schrodinger_residual needs a uniform grid")
    pot = potential(xs[4:-4])
    worst = 0.0
    parts = (f.values.real, f.values.imag) if f.is_complex else (f.values,)
    for part in parts:
        d2 = _kernels.second_derivative(part, h)
        r = -d2 + (pot - energy) * part[4:-4]
        worst = max(worst, float(np.max(np.abs(r))))
    scale = float(np.max(np.abs(f.values))) * max(1.0, abs(energy))
    return worst / scale


def ratio_spread(f: SampledFunction, g: SampledFunction, floor: float = 1e-3) -> float:
    """Relative spread of ``f/g`` where ``|g|`` exceeds ``floor * max|g|``; 0 for proportional samples."""
    mask = np.abs(g.values) > floor * np.max(np.abs(g.values))
    ratio = f.values[mask] / g.values[mask]
    ref = ratio[np.argmax(np.abs(g.values[mask]))]
    return float(np.max(np.abs(ratio - ref)) / abs(ref))


def periodicity_sign(series: EigenfunctionSeries, xs) -> tuple[int, float]:
    """Sign ``p`` with ``psi(x + pi) = p psi(x)`` and the relative mismatch."""
    a = series(xs)
    b = series(np.asarray(xs) + np.pi)
    scale = np.max(np.abs(a))
    p = 1 if np.real(np.vdot(a, b)) >= 0 else -1
    return p, float(np.max(np.abs(b - p * a)) / scale)


@dataclass(frozen=True)
class ZeroCount:
    count: int
    positions: np.ndarray
    tangential: np.ndarray


def _bisect(func, lo, hi, flo, tol=1e-13):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = func(np.array([mid]))[0]
        if fm == 0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def count_zeros(f: SampledFunction, period: float = np.pi, parity: Optional[int] = None,
                rel_tol: float = 1e-12) -> ZeroCount:
    """Zeros of a periodic or antiperiodic real function in one period ``[x0, x0 + period)``.

    Samples must cover the period starting at ``f.xs[0]``. ``parity`` is the
    sign ``p`` in ``f(x + period) = p f(x)``; it is read off the end samples
    when not given. Sign changes are located by bisection when ``f`` carries
    an evaluator, by linear interpolation otherwise. Sub-threshold runs
    without a sign change are reported as tangential zeros.
    """
    if f.is_complex:
        raise ValueError("count_zeros needs a real-valued function")
    x0 = f.xs[0]
    end = x0 + period
    spacing = np.min(np.diff(f.xs))
    keep = f.xs <= end + 0.5 * spacing
    xs, v = f.xs[keep], np.asarray(f.values, dtype=np.float64)[keep]
    closed = abs(xs[-1] - end) <= 0.5 * spacing
    if not closed and end - xs[-1] > 2 * spacing:
        raise ValueError("samples must cover one full period")
    thresh = rel_tol * np.max(np.abs(v))
    if parity is None:
        if not closed or abs(v[0]) <= thresh:
            raise ValueError("cannot infer parity from the samples; pass parity explicitly")
        parity = 1 if v[0] * v[-1] > 0 else -1
    cx, cv = (xs[:-1], v[:-1]) if closed else (xs, v)

    i0 = int(np.argmax(np.abs(cv)))
    seq_x = np.concatenate([cx[i0:], cx[:i0] + period, [cx[i0] + period]])
    seq_v = np.concatenate([cv[i0:], parity * cv[:i0], [parity * cv[i0]]])
    signs = np.where(np.abs(seq_v) <= thresh, 0, np.sign(seq_v))

    func = f.evaluator
    positions, tangential = [], []
    last = 0
    for i in range(1, seq_v.size):
        if signs[i] == 0:
            continue
        if signs[i] != signs[last]:
            lo, hi = seq_x[last], seq_x[i]
            if func is not None:
                _check_cell(func, lo, hi)
                pos = _bisect(lambda t: np.real(func(t)), lo, hi, seq_v[last])
            elif i == last + 1:
                pos = lo - seq_v[last] * (hi - lo) / (seq_v[i] - seq_v[last])
            else:
                pos = 0.5 * (seq_x[last + 1] + seq_x[i - 1])
            positions.append(pos)
        elif i > last + 1:
            tangential.append(0.5 * (seq_x[last + 1] + seq_x[i - 1]))
        last = i

    def wrap(p):
        return np.sort((np.asarray(p, dtype=np.float64) - x0) % period + x0)

    return ZeroCount(len(positions), wrap(positions), wrap(tangential))


def _check_cell(func, lo, hi, sub=16):
    t = np.linspace(lo, hi, sub + 1)
    s = np.sign(np.real(func(t)))
    s = s[s != 0]
    if np.count_nonzero(np.diff(s)) > 1:
        raise GridTooCoarse(f"several sign changes inside the cell [{lo}, {hi}]")


def expected_zero_count(m_int: int, j: int) -> int:
    """Zeros in one period of the ``j``-th (0-based, by energy) algebraic state.

    Odd ``M``: the states are the periodic ``psi_k``, ``k = j``, with
    ``k + pi(k)`` zeros. Even ``M``: antiperiodic ``psi-bar_k``, ``k = j + 1``,
    with ``k + pi(k) - 1`` zeros. ``pi(k)`` is 1 for odd ``k``, 0 for even.
    """
    if m_int % 2:
        k = j
        return k + k % 2
    k = j + 1
    return k + k % 2 - 1


@dataclass(frozen=True)
class FiniteSolutionReport:
    is_finite: bool
    trig_degree: int
    residual: float


def finite_solution_check(f: SampledFunction, m_int: int, zeta: float,
                          energy: Optional[float] = None) -> FiniteSolutionReport:
    """Is ``exp(zeta/2 cos 2x) f`` a trigonometric polynomial of degree ``<= M - 1``?

    ``f`` must be sampled uniformly over one ``2*pi`` window; a closing sample
    at ``x0 + 2*pi`` is dropped. ``energy`` is informational.
    """
    xs, vals = f.xs, np.asarray(f.values)
    span = 2 * np.pi
    if abs(xs[-1] - xs[0] - span) < 0.5 * (xs[1] - xs[0]):
        xs, vals = xs[:-1], vals[:-1]
    n = xs.size
    h = xs[1] - xs[0]
    if abs(n * h - span) > 1e-9 * span or not np.allclose(np.diff(xs), h, rtol=1e-9, atol=0):
        raise ValueError("finite_solution_check needs a uniform grid covering [x0, x0 + 2 pi)")
    phi = vals * np.exp(0.5 * zeta * np.cos(2 * xs))
    spectrum = np.abs(np.fft.fft(phi)) / n
    harmonic = np.abs(np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(int))
    top = spectrum.max()
    if top == 0:
        return FiniteSolutionReport(True, 0, 0.0)
    above = harmonic > m_int - 1
    residual = float(spectrum[above].max() / top) if above.any() else 0.0
    degree = int(harmonic[spectrum > FINITE_TOL * top].max())
    return FiniteSolutionReport(residual <= FINITE_TOL, degree, residual)
