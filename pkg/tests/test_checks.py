import numpy as np
import pytest

from razavy_qes.checks import (
    CRITERIA, CheckResult, non_critical_energy, reference_hat_minus, reference_hat_plus, reference_tilde,
    verify,
)
from razavy_qes.families import PotentialParams


def test_reference_polynomials_at_one():
    assert reference_tilde(1.0)[4].tolist() == [12432, -5312, 792, -48, 1]
    assert reference_hat_plus(1.0)[2].tolist() == [84, -20, 1]
    assert reference_hat_minus(1.0)[1].tolist() == [-22, 1]
    # the tilde critical polynomial is the product of the two hat ones
    for z in (0.5, 2.0):
        prod = np.polynomial.polynomial.polymul(reference_hat_plus(z)[2], reference_hat_minus(z)[2])
        np.testing.assert_allclose(prod, reference_tilde(z)[4], rtol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_verify_small_m(m):
    results = verify(PotentialParams(1.0, m))
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]


def test_verify_reports_instead_of_raising():
    # at M = 10, zeta = 0.25 tunnelling doublets are closer than double precision can resolve
    results = verify(PotentialParams(0.25, 10))
    assert any(not r.passed and "RootsCoincide" in r.detail for r in results)


def test_non_critical_energy_between_roots():
    e = non_critical_energy(PotentialParams(1.0, 1))
    assert e == pytest.approx(-2.0 + 1.0)


def test_result_line():
    r = CheckResult("x", False, 2.0, 1.0, "why")
    assert r.line() == "FAIL x: 2.000e+00 (needs <= 1.0e+00) why"
    assert CheckResult("y", True, 5.0, 1.0, lower_bound=True).line().startswith("PASS y: 5.000e+00 (needs >")


def test_criteria_numbering():
    assert [c.number for c in CRITERIA] == list(range(1, 11))
