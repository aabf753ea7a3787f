import numpy as np
import pytest
from hypothesis import given, strategies as st

from razavy_qes.families import PotentialParams, enumerate_hat_branches, hat_spec, make_tilde
from razavy_qes.polyseq import (
    MonicPoly, check_tilde_hat_factorization, coefficient_rows, critical_poly, duality_residual,
    eval_poly, poly_coeffs, poly_sequence, tail_factor, tail_values, values,
)

zetas = st.sampled_from([0.25, 0.5, 1.0, 1.7, 3.0, 5.0])
ms = st.integers(min_value=1, max_value=12)


def test_hand_values():
    t = make_tilde(PotentialParams(1.0, 4))
    assert eval_poly(t, 2, 0.0) == pytest.approx(116.0)
    assert eval_poly(t, 0, 3.7) == 1.0
    per = t.dual()
    assert eval_poly(per, 2, -5.0) == pytest.approx(eval_poly(t, 2, 5.0))


def test_coefficient_examples():
    p = PotentialParams(1.0, 4)
    t = make_tilde(p)
    np.testing.assert_array_equal(poly_coeffs(t, 1).coeffs, [-8, 1])
    np.testing.assert_array_equal(poly_coeffs(t, 0).coeffs, [1])
    np.testing.assert_array_equal(poly_coeffs(hat_spec(p, 0, -1), 1).coeffs, [-22, 1])
    np.testing.assert_allclose(critical_poly(t).coeffs, [12432, -5312, 792, -48, 1], rtol=1e-14)
    np.testing.assert_allclose(critical_poly(hat_spec(p, 0, 1)).coeffs, [84, -20, 1], rtol=1e-14)
    np.testing.assert_allclose(critical_poly(make_tilde(PotentialParams(1.5, 1))).coeffs, [-3.25, 1])


def test_monic_poly_contract():
    with pytest.raises(ValueError):
        MonicPoly(np.array([1.0, 2.0]))
    p = MonicPoly(np.array([2.0, -3.0, 1.0]))
    assert p.degree == 2
    np.testing.assert_allclose(np.sort(p.roots()), [1, 2])
    q = p.reflected()
    assert q(-1.0) == pytest.approx(p(1.0))


def test_overflow_flag():
    spec = make_tilde(PotentialParams(1e40, 12))
    assert critical_poly(spec).overflow


def _divide(num: MonicPoly, den: MonicPoly):
    q, r = np.polynomial.polynomial.polydiv(num.coeffs, den.coeffs)
    return q, r


@pytest.mark.parametrize("spec_fn", [
    lambda p: hat_spec(p, 0, 1),
    lambda p: hat_spec(p, 0, -1),
    lambda p: make_tilde(p),
])
@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_tail_factor_matches_long_division(spec_fn, j):
    spec = spec_fn(PotentialParams(1.0, 4))
    n1 = spec.critical_index
    q, r = _divide(poly_coeffs(spec, n1 + j), poly_coeffs(spec, n1))
    scale = np.abs(poly_coeffs(spec, n1 + j).coeffs).max()
    assert np.max(np.abs(r)) <= 1e-9 * scale
    np.testing.assert_allclose(tail_factor(spec, j).coeffs, q, rtol=1e-9, atol=1e-12 * scale)


def test_tail_pointwise_tilde_m4():
    spec = make_tilde(PotentialParams(1.0, 4))
    grid = np.arange(-3.0, 4.0)
    lhs = values(spec, 6, grid)[6]
    rhs = tail_values(spec, 2, grid) * values(spec, 4, grid)[4]
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)
    assert tail_factor(spec, 0).coeffs.tolist() == [1.0]


def test_factorization_examples():
    assert check_tilde_hat_factorization(PotentialParams(1.0, 4), np.linspace(-10, 10, 21)) <= 1e-9
    assert check_tilde_hat_factorization(PotentialParams(2.0, 1), np.linspace(-10, 10, 21)) <= 1e-12
    assert check_tilde_hat_factorization(PotentialParams(1.0, 5), np.linspace(-40, 40, 41)) <= 1e-9


def test_factorization_is_product_of_critical_polys():
    p = PotentialParams(1.0, 4)
    prod = np.polynomial.polynomial.polymul(*[critical_poly(s).coeffs for s in enumerate_hat_branches(p)])
    np.testing.assert_allclose(prod, critical_poly(make_tilde(p)).coeffs, rtol=1e-13)


def test_duality_examples():
    grid = np.linspace(-20, 20, 17)
    t = make_tilde(PotentialParams(1.0, 3))
    assert duality_residual(t.dual(), t, 6, grid) <= 1e-12
    h = hat_spec(PotentialParams(1.0, 4), 0, 1)
    assert duality_residual(h.dual(), h, 5, grid) <= 1e-12
    with pytest.raises(ValueError):
        duality_residual(t, t, 3, grid)


@given(ms, zetas)
def test_recurrence_and_coefficients_agree(m, zeta):
    p = PotentialParams(zeta, m)
    grid = np.linspace(-2 * p.energy_scale, 2 * p.energy_scale, 17)
    for spec in [make_tilde(p)] + enumerate_hat_branches(p):
        k_max = spec.n + 4
        vals = values(spec, k_max, grid)
        rows = coefficient_rows(spec, k_max)
        for k in range(k_max + 1):
            c = rows[k, : k + 1]
            assert c[-1] == 1.0
            direct = np.polynomial.polynomial.polyval(grid, c)
            bound = np.polynomial.polynomial.polyval(np.abs(grid), np.abs(c))
            assert np.all(np.abs(direct - vals[k]) <= 1e-10 * np.maximum(bound, 1.0))


@given(ms, zetas, st.integers(min_value=0, max_value=4))
def test_tail_factorization_property(m, zeta, j):
    p = PotentialParams(zeta, m)
    grid = np.linspace(-2 * p.energy_scale, 2 * p.energy_scale, 17)
    for spec in [make_tilde(p)] + enumerate_hat_branches(p):
        n1 = spec.critical_index
        lhs = values(spec, n1 + j, grid)[n1 + j]
        rhs = tail_values(spec, j, grid) * values(spec, n1, grid)[n1]
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * np.maximum(1.0, np.abs(lhs)))


@given(ms, zetas)
def test_periodic_critical_is_reflection(m, zeta):
    p = PotentialParams(zeta, m)
    for spec in [make_tilde(p)] + enumerate_hat_branches(p):
        hyp = critical_poly(spec).reflected().coeffs
        per = critical_poly(spec.dual()).coeffs
        np.testing.assert_allclose(per, hyp, rtol=1e-12, atol=1e-12 * np.abs(hyp).max())


def test_sequence_degrees():
    seq = poly_sequence(make_tilde(PotentialParams(1.0, 5)), 7)
    assert [p.degree for p in seq] == list(range(8))
