import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from razavy_qes.errors import RootsCoincide
from razavy_qes.families import PotentialParams, coeffs, enumerate_hat_branches, hat_spec, make_tilde
from razavy_qes.polyseq import critical_poly, eval_poly, values
from razavy_qes.spectrum import (
    algebraic_energies, expected_norms, jacobi_matrix, moment_functional, norm_sequence,
    orthogonality_matrix, positivity_report, root_residuals,
)


def families(p, periodic=(False, True)):
    out = []
    for per in periodic:
        out.append(make_tilde(p, per))
        out += enumerate_hat_branches(p, per)
    return out


def test_jacobi_examples():
    j = jacobi_matrix(make_tilde(PotentialParams(1.0, 2)))
    np.testing.assert_array_equal(np.diag(j), [4, 4])
    assert j[0, 1] * j[1, 0] == 4
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(j).real), [2, 6])
    np.testing.assert_array_equal(jacobi_matrix(make_tilde(PotentialParams(1.5, 1))), [[3.25]])
    h = jacobi_matrix(hat_spec(PotentialParams(1.0, 4), 0, 1))
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(h).real), [6, 14])


def test_energy_examples():
    assert algebraic_energies(make_tilde(PotentialParams(1.0, 1))).energies.tolist() == pytest.approx([2.0])
    np.testing.assert_allclose(algebraic_energies(make_tilde(PotentialParams(1.0, 2))).energies, [2, 6])
    np.testing.assert_allclose(algebraic_energies(make_tilde(PotentialParams(1.0, 2), True)).energies, [-6, -2])


@pytest.mark.parametrize("zeta", [0.25, 1.0, 5.0])
@pytest.mark.parametrize("m", range(1, 13))
def test_tilde_roots_are_roots(m, zeta):
    spec = make_tilde(PotentialParams(zeta, m))
    sp = algebraic_energies(spec, check_distinct=False)
    assert sp.energies.size == m
    assert np.all(np.diff(sp.energies) >= 0)
    assert np.all(root_residuals(sp) <= 1e-8)


@pytest.mark.parametrize("zeta", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("m", range(1, 11))
def test_roots_match_companion_oracle(m, zeta):
    # independent route: eigenvalues of the companion matrix of the coefficient vector
    for spec in families(PotentialParams(zeta, m)):
        got = algebraic_energies(spec).energies
        ref = np.sort(np.real(np.polynomial.polynomial.polyroots(critical_poly(spec).coeffs)))
        scale = max(1.0, np.abs(ref).max())
        assert np.max(np.abs(got - ref)) <= 1e-6 * scale


@pytest.mark.parametrize("zeta", [0.25, 1.0, 5.0])
@pytest.mark.parametrize("m", range(1, 11))
def test_union_of_hat_spectra(m, zeta):
    p = PotentialParams(zeta, m)
    tilde = algebraic_energies(make_tilde(p), check_distinct=False).energies
    hats = np.sort(np.concatenate([algebraic_energies(s, check_distinct=False).energies
                                   for s in enumerate_hat_branches(p)]))
    np.testing.assert_allclose(hats, tilde, rtol=1e-7, atol=1e-7)


@pytest.mark.parametrize("m", range(1, 9))
def test_periodic_spectrum_is_reflected(m):
    p = PotentialParams(0.9, m)
    for spec in families(p, (False,)):
        hyp = algebraic_energies(spec).energies
        per = algebraic_energies(spec.dual()).energies
        np.testing.assert_allclose(per, np.sort(-hyp), atol=1e-10 * max(1, np.abs(hyp).max()))


def test_coincident_roots_are_reported():
    with pytest.raises(RootsCoincide):
        algebraic_energies(make_tilde(PotentialParams(0.25, 12)))


def test_weight_examples():
    for spec in families(PotentialParams(1.3, 1)):
        np.testing.assert_allclose(moment_functional(spec).weights64, [1.0])
    for zeta in (0.3, 1.0, 4.0):
        mf = moment_functional(make_tilde(PotentialParams(zeta, 2)))
        np.testing.assert_allclose(mf.weights64, [0.5, 0.5], rtol=1e-12)
    assert np.any(moment_functional(hat_spec(PotentialParams(1.0, 4), 0, 1)).weights < 0)


def golub_welsch(spec):
    """Weights as squared first components of the symmetric Jacobi eigenvectors."""
    c = coeffs(spec, spec.n + 1)
    diag = spec.shift_sign * np.asarray(c.b[: spec.n + 1])
    off = np.sqrt(np.asarray(c.a[1: spec.n + 1]))
    nodes, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
    return nodes, vecs[0] ** 2


def christoffel_darboux(spec):
    """``w_k = prod a_j / (P_n(E_k) P'_{n+1}(E_k))``."""
    nodes = algebraic_energies(spec).energies
    n = spec.n
    a = np.asarray(coeffs(spec, n + 1).a[1: n + 1])
    crit = critical_poly(spec).coeffs
    deriv = np.polynomial.polynomial.polyval(nodes, np.polynomial.polynomial.polyder(crit))
    return nodes, np.prod(a) / (values(spec, n, nodes)[n] * deriv)


@pytest.mark.parametrize("zeta", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("m", range(1, 9))
def test_weights_match_golub_welsch(m, zeta):
    for per in (False, True):
        spec = make_tilde(PotentialParams(zeta, m), per)
        nodes, w = golub_welsch(spec)
        mf = moment_functional(spec)
        np.testing.assert_allclose(mf.nodes64, nodes, rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(mf.weights64, w, rtol=1e-6, atol=1e-12)


@pytest.mark.parametrize("zeta", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("m", range(1, 9))
def test_weights_match_christoffel_darboux(m, zeta):
    for spec in families(PotentialParams(zeta, m)):
        _, w = christoffel_darboux(spec)
        got = moment_functional(spec).weights64
        np.testing.assert_allclose(got, w, rtol=1e-5, atol=1e-9 * np.abs(w).max())


def test_functional_rows():
    spec = hat_spec(PotentialParams(1.0, 8), 0, -1)
    mf = moment_functional(spec)
    assert float(mf.weights.sum()) == pytest.approx(1.0, abs=1e-12)
    for l in range(1, spec.n + 1):
        assert abs(mf.apply(values(spec, l, mf.nodes64)[l])) <= 1e-8 * np.abs(values(spec, l, mf.nodes64)[l]).max()


def test_positivity_examples():
    r = positivity_report(make_tilde(PotentialParams(2.0, 6)))
    assert (r.all_weights_positive, r.a_signs_ok, r.consistent) == (True, True, True)
    r = positivity_report(hat_spec(PotentialParams(2.0, 6), 0, -1))
    assert (r.all_weights_positive, r.a_signs_ok, r.consistent) == (False, False, True)
    r = positivity_report(make_tilde(PotentialParams(1.0, 1)))
    assert (r.all_weights_positive, r.a_signs_ok, r.consistent) == (True, True, True)


def test_norm_examples():
    spec = make_tilde(PotentialParams(1.0, 2))
    norms = norm_sequence(spec, 2)
    assert norms[0] == pytest.approx(1.0)
    assert norms[1] == pytest.approx(4.0)
    assert abs(norms[2]) <= 1e-8 * 4.0


@given(st.integers(1, 10), st.sampled_from([0.5, 1.0, 3.0]))
def test_weighted_orthogonality(m, zeta):
    for spec in families(PotentialParams(zeta, m)):
        gram = orthogonality_matrix(spec)
        norms = np.abs(expected_norms(spec, spec.n))
        off = gram - np.diag(np.diag(gram))
        bound = 1e-7 * np.sqrt(np.outer(norms, norms) + 1)
        assert np.all(np.abs(off) <= bound)
        np.testing.assert_allclose(np.diag(gram), expected_norms(spec, spec.n), rtol=1e-7)
