"""The ten acceptance criteria, each over its full parameter grid.

Every criterion prints one ``PASS``/``FAIL`` line to the terminal.
"""
import math

import pytest

from razavy_qes.checks import CRITERIA, check_positivity, run_criterion
from razavy_qes.families import PotentialParams

N_ZERO_HAT_NOTE = (
    "hat families with n = 0 (both branches at M = 2, sigma = -1 at M = 3) have a single node "
    "whose weight is fixed to L(1) = 1 > 0, so 'every hat family with M >= 2 has a negative "
    "weight' cannot hold; the n >= 1 statement is asserted separately"
)


def _report(capsys, number, ok, results):
    crit = CRITERIA[number - 1]
    failed = [r for r in results if not r.passed]
    finite = [r for r in results
              if r.tolerance > 0 and not r.lower_bound and math.isfinite(r.value) and r.passed]
    worst = max(finite, key=lambda r: r.value / r.tolerance, default=None)
    text = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {crit.title}: {len(results)} checks"
    if worst is not None:
        text += f", worst {worst.value:.2e} (tol {worst.tolerance:.0e})"
    if failed:
        text += f", {len(failed)} failed, e.g. {failed[0].name} ({failed[0].detail})"
    with capsys.disabled():
        print("\n" + text)


@pytest.mark.parametrize("number", [c.number for c in CRITERIA if c.number != 7])
def test_criterion(number, capsys):
    ok, results = run_criterion(number)
    _report(capsys, number, ok, results)
    assert ok, "\n".join(r.line() for r in results if not r.passed)


@pytest.mark.xfail(strict=True, reason=N_ZERO_HAT_NOTE)
def test_criterion_7(capsys):
    ok, results = run_criterion(7)
    _report(capsys, 7, ok, results)
    failed = [r for r in results if not r.passed]
    # the only failures are the single-node hat families
    assert all(r.name.endswith("negative_weight") and r.value == 1.0 for r in failed)
    assert ok


@pytest.mark.parametrize("zeta", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("m", range(1, 11))
def test_criterion_7_for_families_with_coefficients(m, zeta):
    # consistency for every family, tilde weights positive, a negative weight whenever n >= 1
    results = check_positivity(PotentialParams(zeta, m))
    assert all(r.passed for r in results), "\n".join(r.line() for r in results if not r.passed)
