"""Property checks for one ``(M, zeta)`` point and the acceptance grids built from them.

Each ``check_*`` returns a list of :class:`CheckResult`; ``verify`` runs all of
them, ``run_criterion`` sweeps one of the ten acceptance criteria over its grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracle
from .bands import classify, consecutive_gap_check
from .errors import RazavyError
from .families import PotentialParams, enumerate_hat_branches, hat_spec, make_tilde
from .polyseq import check_tilde_hat_factorization, duality_residual, poly_sequence
from .spectrum import algebraic_energies, expected_norms, moment_functional, norm_sequence, positivity_report
from .wavefunc import (
    count_zeros, default_period_points, expected_zero_count, finite_solution_check,
    hyperbolic_states, trig_states, schrodinger_residual, SampledFunction,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""
    lower_bound: bool = False  # the value must exceed the tolerance rather than stay below it

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rel = ">" if self.lower_bound else "<="
        text = f"{status} {self.name}: {self.value:.3e} (needs {rel} {self.tolerance:.1e})"
        return f"{text} {self.detail}" if self.detail else text


def _result(name, value, tol, detail="") -> CheckResult:
    value = float(value)
    ok = bool(np.isfinite(value) and value <= tol)
    return CheckResult(name, ok, value, tol, detail)


def _failure(name, tol, exc: Exception) -> CheckResult:
    return CheckResult(name, False, float("nan"), tol, f"{type(exc).__name__}: {exc}")


# -- closed forms for M = 4 ----------------------------------------------------------


def reference_hat_plus(zeta: float) -> list[np.ndarray]:
    """Ascending coefficients of the ``(sigma, eta) = (0, 1)`` polynomials, ``k <= 2``, ``M = 4``."""
    z = zeta
    return [
        np.array([1.0]),
        np.array([-(z ** 2) - 2 * z - 15, 1.0]),
        np.array([z ** 4 - 4 * z ** 3 + 10 * z ** 2 - 28 * z + 105, -2 * (z ** 2 - 2 * z + 11), 1.0]),
    ]


def reference_hat_minus(zeta: float) -> list[np.ndarray]:
    """Ascending coefficients of the ``(sigma, eta) = (0, -1)`` polynomials, ``k <= 2``, ``M = 4``."""
    z = zeta
    return [
        np.array([1.0]),
        np.array([-(z ** 2) - 6 * z - 15, 1.0]),
        np.array([z ** 4 + 4 * z ** 3 + 10 * z ** 2 + 28 * z + 105, -2 * (z ** 2 + 2 * z + 11), 1.0]),
    ]


def reference_tilde(zeta: float) -> list[np.ndarray]:
    """Ascending coefficients of the tilde polynomials, ``k <= 4``, ``M = 4``."""
    z2 = zeta ** 2
    return [
        np.array([1.0]),
        np.array([-z2 - 7, 1.0]),
        np.array([z2 ** 2 + 10 * z2 + 105, -2 * (z2 + 11), 1.0]),
        np.array([-(z2 ** 3) - 9 * z2 ** 2 - 143 * z2 - 1575, 3 * z2 ** 2 + 46 * z2 + 435, -(3 * z2 + 37), 1.0]),
        np.array([
            z2 ** 4 + 4 * z2 ** 3 + 86 * z2 ** 2 + 1316 * z2 + 11025,
            -4 * (z2 ** 3 + 13 * z2 ** 2 + 159 * z2 + 1155),
            2 * (3 * z2 ** 2 + 46 * z2 + 347),
            -4 * (z2 + 11),
            1.0,
        ]),
    ]


def _coeff_error(spec, refs) -> float:
    worst = 0.0
    for poly, ref in zip(poly_sequence(spec, len(refs) - 1), refs):
        got = np.asarray(poly.coeffs)
        if got.size != ref.size:
            return float("inf")
        worst = max(worst, float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300))))
    return worst


def check_closed_forms(zeta: float, tol: float = 1e-12) -> list[CheckResult]:
    params = PotentialParams(zeta, 4)
    pairs = (
        ("closed_form.hat_eta+1", hat_spec(params, 0, 1), reference_hat_plus(zeta)),
        ("closed_form.hat_eta-1", hat_spec(params, 0, -1), reference_hat_minus(zeta)),
        ("closed_form.tilde", make_tilde(params), reference_tilde(zeta)),
    )
    return [_result(name, _coeff_error(spec, refs), tol, f"M=4 zeta={zeta}") for name, spec, refs in pairs]


# -- polynomial identities -----------------------------------------------------------


def energy_grid(params: PotentialParams, points: int = 33) -> np.ndarray:
    r = 2.0 * params.energy_scale
    return np.linspace(-r, r, points)


def check_factorization(params: PotentialParams, tol: float = 1e-9) -> list[CheckResult]:
    grid = energy_grid(params)
    return [
        _result(f"factorization.{'periodic' if per else 'hyperbolic'}",
                check_tilde_hat_factorization(params, grid, periodic=per), tol)
        for per in (False, True)
    ]


def check_duality(params: PotentialParams, tol: float = 1e-12) -> list[CheckResult]:
    grid = energy_grid(params)
    k_max = params.m_int + 3
    out = []
    for hyp in [make_tilde(params)] + enumerate_hat_branches(params):
        out.append(_result(f"duality.{hyp.branch_label}", duality_residual(hyp.dual(), hyp, k_max, grid), tol))
    return out


# -- oracles ---------------------------------------------------------------------


def _exact_levels(params: PotentialParams):
    z = params.zeta
    if params.m_int == 1:
        return np.array([z ** 2 + 1])
    if params.m_int == 2:
        return np.sort([(z - 1) ** 2 + 2, (z + 1) ** 2 + 2])
    return None


def check_fd_oracle(params: PotentialParams, tol: float = 1e-5,
                    cfg: oracle.FdConfig = oracle.FdConfig()) -> list[CheckResult]:
    name = "oracle.finite_difference"
    try:
        roots = algebraic_energies(make_tilde(params)).energies
        fd = oracle.bound_states_fd(params, cfg, params.m_int)
    except RazavyError as exc:
        return [_failure(name, tol, exc)]
    err = np.max(np.abs(roots - fd) / np.maximum(1.0, np.abs(roots)))
    out = [_result(name, err, tol)]
    exact = _exact_levels(params)
    if exact is not None:
        out.append(_result("oracle.exact_levels.algebraic",
                           np.max(np.abs(roots - exact) / np.maximum(1.0, exact)), 1e-12))
        out.append(_result("oracle.exact_levels.finite_difference",
                           np.max(np.abs(fd - exact) / np.maximum(1.0, exact)), tol))
    return out


def check_floquet_oracle(params: PotentialParams, tol: float = 1e-8, basis_cut: int = 64) -> list[CheckResult]:
    name = "oracle.floquet"
    q = 0.0 if params.m_int % 2 else 1.0
    try:
        roots = algebraic_energies(make_tilde(params, periodic=True)).energies
        ev = oracle.hill_eigenvalues(params, q, basis_cut, params.m_int)
    except RazavyError as exc:
        return [_failure(name, tol, exc)]
    return [_result(name, np.max(np.abs(roots - ev)), tol, f"q={q:g}")]


def check_gaps(params: PotentialParams, basis_cut: int = 64) -> list[CheckResult]:
    m = params.m_int
    try:
        cls = classify(params, basis_cut)
        no_consecutive = consecutive_gap_check(params, basis_cut)
    except RazavyError as exc:
        return [_failure("gaps.classification", 0.0, exc)]
    want = tuple(range(2, m, 2)) if m % 2 else tuple(range(1, m, 2))
    ok = cls.gap_indices == want and cls.includes_ground_state == bool(m % 2)
    detail = f"gaps={list(cls.gap_indices)} ground_state={cls.includes_ground_state}"
    return [
        CheckResult("gaps.classification", ok, float(not ok), 0.0, detail),
        CheckResult("gaps.non_consecutive", no_consecutive, float(not no_consecutive), 0.0),
    ]


# -- moment functional -------------------------------------------------------------


def all_families(params: PotentialParams):
    out = []
    for per in (False, True):
        out.append(make_tilde(params, periodic=per))
        out += enumerate_hat_branches(params, periodic=per)
    return out


def _family_name(spec) -> str:
    return f"{'periodic' if spec.is_periodic else 'hyperbolic'}.{spec.branch_label}"


def check_positivity(params: PotentialParams) -> list[CheckResult]:
    """Weights positive iff all ``a_k > 0``; tilde weights positive; hat weights not."""
    out = []
    for spec in all_families(params):
        name = f"positivity.{_family_name(spec)}"
        try:
            rep = positivity_report(spec)
            mf = moment_functional(spec)
        except RazavyError as exc:
            out.append(_failure(name, 0.0, exc))
            continue
        ok = rep.consistent
        if not spec.is_hat:
            ok = ok and rep.all_weights_positive
        elif spec.n >= 1:
            ok = ok and bool(np.any(mf.weights < 0))
        detail = f"min_weight={float(mf.weights.min()):.3e} a_positive={rep.a_signs_ok}"
        out.append(CheckResult(name, ok, float(not ok), 0.0, detail))
    return out


def norm_errors(spec) -> tuple[float, float]:
    """Relative error of ``L(P_k^2)`` for ``k <= n`` and scaled ``|L(P_{n+1}^2)|``."""
    n = spec.n
    got = norm_sequence(spec, n + 1)
    want = expected_norms(spec, n + 1)
    rel = float(np.max(np.abs(got[: n + 1] - want[: n + 1]) / np.abs(want[: n + 1])))
    scale = float(np.max(np.abs(want[: n + 1])))
    return rel, abs(float(got[n + 1])) / scale


def check_norms(params: PotentialParams, tol: float = 1e-7, tail_tol: float = 1e-8) -> list[CheckResult]:
    out = []
    for spec in all_families(params):
        name = f"norms.{_family_name(spec)}"
        try:
            rel, tail = norm_errors(spec)
        except RazavyError as exc:
            out += [_failure(name, tol, exc)]
            continue
        out += [_result(name, rel, tol), _result(name + ".critical", tail, tail_tol)]
    return out


# -- eigenfunctions ----------------------------------------------------------------


def hyperbolic_grid(points: int = 4001, half_width: float = 2.0) -> np.ndarray:
    return np.linspace(-half_width, half_width, points)


def trig_grid(m_int: int) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, 4 * default_period_points(m_int) + 1)


def check_eigenfunctions(params: PotentialParams, tol: float = 1e-6) -> list[CheckResult]:
    xh, xt = hyperbolic_grid(), trig_grid(params.m_int)
    cases = (
        ("hyperbolic.tilde", lambda: hyperbolic_states(params, "tilde"), xh, params.hyperbolic_potential),
        ("hyperbolic.hat", lambda: hyperbolic_states(params, "hat"), xh, params.hyperbolic_potential),
        ("periodic.complex", lambda: trig_states(params, "complex"), xt, params.periodic_potential),
        ("periodic.real", lambda: trig_states(params, "real"), xt, params.periodic_potential),
    )
    out = []
    for name, states, xs, pot in cases:
        name = f"eigenfunction.{name}"
        try:
            worst = max(schrodinger_residual(s.series.sample(xs), pot, s.energy) for s in states())
        except RazavyError as exc:
            out.append(_failure(name, tol, exc))
            continue
        out.append(_result(name, worst, tol))
    return out


def _finite_grid(points: int = 512) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, points, endpoint=False)


def non_critical_energy(params: PotentialParams) -> float:
    """An energy halfway between the two lowest critical roots (or above the only one)."""
    roots = algebraic_energies(make_tilde(params, periodic=True)).energies
    return float(0.5 * (roots[0] + roots[1])) if roots.size > 1 else float(roots[0] + 1.0)


def check_finite_solutions(params: PotentialParams, tol: float = 1e-8) -> list[CheckResult]:
    m = params.m_int
    xs = _finite_grid()
    out = []
    for form in ("complex", "real"):
        name = f"finite_solution.{form}"
        try:
            reports = [finite_solution_check(s.series.sample(xs), m, params.zeta) for s in trig_states(params, form)]
        except RazavyError as exc:
            out.append(_failure(name, tol, exc))
            continue
        worst = max(r.residual for r in reports)
        degree = max(r.trig_degree for r in reports)
        ok = worst <= tol and degree <= m - 1 and all(r.is_finite for r in reports)
        out.append(CheckResult(name, ok, worst, tol, f"max_degree={degree}"))

    e = non_critical_energy(params)
    xo = np.linspace(0.0, 2 * np.pi, xs.size + 1)
    psi = oracle.integrate_periodic_ode(params, e, xo)
    rep = finite_solution_check(SampledFunction(xo, psi, (0.0, 2 * np.pi)), m, params.zeta, e)
    out.append(CheckResult("finite_solution.non_critical_rejected", not rep.is_finite,
                           rep.residual, tol, f"E={e:.6g}", lower_bound=True))

    name = "zero_counts"
    xz = np.linspace(0.0, np.pi, default_period_points(m) + 1)
    try:
        got = [count_zeros(s.series.sample(xz), parity=(-1) ** (m - 1)).count for s in trig_states(params)]
    except RazavyError as exc:
        out.append(_failure(name, 0.0, exc))
        return out
    want = [expected_zero_count(m, j) for j in range(m)]
    out.append(CheckResult(name, got == want, float(got != want), 0.0, f"got={got} want={want}"))
    return out


# -- aggregation ---------------------------------------------------------------------


def verify(params: PotentialParams, fd_cfg: oracle.FdConfig = oracle.FdConfig(),
           basis_cut: int = 64) -> list[CheckResult]:
    """Every property check at one ``(M, zeta)``; the closed forms are checked at ``M = 4``."""
    groups = (
        ("closed_form", lambda: check_closed_forms(params.zeta)),
        ("factorization", lambda: check_factorization(params)),
        ("duality", lambda: check_duality(params)),
        ("oracle.finite_difference", lambda: check_fd_oracle(params, cfg=fd_cfg)),
        ("oracle.floquet", lambda: check_floquet_oracle(params, basis_cut=basis_cut)),
        ("gaps", lambda: check_gaps(params, basis_cut)),
        ("positivity", lambda: check_positivity(params)),
        ("norms", lambda: check_norms(params)),
        ("eigenfunction", lambda: check_eigenfunctions(params)),
        ("finite_solution", lambda: check_finite_solutions(params)),
    )
    out = []
    for name, fn in groups:
        try:
            out += fn()
        except RazavyError as exc:
            out.append(_failure(name, 0.0, exc))
    return out


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    points: tuple[tuple[int, float], ...]
    run: Callable[[PotentialParams], list[CheckResult]]


def _grid(ms, zetas) -> tuple[tuple[int, float], ...]:
    return tuple((m, z) for m in ms for z in zetas)


def _literal_hat_negativity(params: PotentialParams) -> list[CheckResult]:
    """Every hat family with ``M >= 2`` has a negative weight, taken at face value."""
    out = check_positivity(params)
    if params.m_int < 2:
        return out
    for spec in all_families(params):
        if spec.is_hat and spec.n == 0:
            w = moment_functional(spec).weights
            neg = bool(np.any(w < 0))
            out.append(CheckResult(
                f"positivity.{_family_name(spec)}.negative_weight", neg, float(w.min()), 0.0,
                "single node, weight fixed to L(1) = 1",
            ))
    return out


CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "closed-form polynomials", _grid([4], [0.5, 1.0, 2.0]),
              lambda p: check_closed_forms(p.zeta)),
    Criterion(2, "tilde = product of hat criticals", _grid(range(1, 11), [0.5, 1.0, 3.0]), check_factorization),
    Criterion(3, "hyperbolic/periodic duality", _grid(range(1, 11), [0.5, 1.0, 3.0]), check_duality),
    Criterion(4, "finite-difference agreement", _grid(range(1, 7), [0.5, 1.0, 2.0]), check_fd_oracle),
    Criterion(5, "Floquet agreement", _grid(range(1, 9), [0.5, 1.0, 2.0]), check_floquet_oracle),
    Criterion(6, "gap classification", _grid(range(2, 9), [0.5, 1.0, 2.0]), check_gaps),
    Criterion(7, "weight positivity", _grid(range(1, 11), [0.5, 1.0, 3.0]), _literal_hat_negativity),
    Criterion(8, "norm identity", _grid(range(1, 11), [0.5, 1.0, 3.0]), check_norms),
    Criterion(9, "eigenfunction residual", _grid(range(1, 7), [0.5, 1.0, 2.0]), check_eigenfunctions),
    Criterion(10, "finite solutions and zero counts", _grid(range(1, 7), [0.5, 1.0, 2.0]), check_finite_solutions),
)


def run_criterion(number: int) -> tuple[bool, list[CheckResult]]:
    """All checks of one acceptance criterion over its parameter grid."""
    crit = CRITERIA[number - 1]
    results = []
    for m, z in crit.points:
        for r in crit.run(PotentialParams(z, m)):
            results.append(CheckResult(f"M={m} zeta={z:g} {r.name}", r.passed, r.value, r.tolerance,
                                       r.detail, r.lower_bound))
    return all(r.passed for r in results), results
