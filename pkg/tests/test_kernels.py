import numpy as np
import pytest

from razavy_qes import _kernels as K
from razavy_qes.families import PotentialParams, coeffs, hat_spec, make_tilde


def _inputs(spec, k_max):
    c = coeffs(spec, k_max)
    return np.asarray(c.a, dtype=np.float64), np.asarray(c.b, dtype=np.float64)


@pytest.mark.parametrize("periodic", [False, True])
@pytest.mark.parametrize("m", [1, 4, 7])
def test_recurrence_backends_agree(m, periodic):
    spec = make_tilde(PotentialParams(1.3, m), periodic)
    k_max = m + 3
    a, b = _inputs(spec, k_max)
    e = np.linspace(-60, 60, 37)
    s = spec.shift_sign
    ref = K.recurrence_table_numpy(a, b, s, e, k_max)
    fast = K.recurrence_table_numba(a, b, s, e, k_max)
    np.testing.assert_allclose(fast, ref, rtol=1e-14, atol=0)


def test_coefficient_backends_agree():
    spec = hat_spec(PotentialParams(0.7, 6), 0, -1)
    a, b = _inputs(spec, 6)
    np.testing.assert_array_equal(
        K.coefficient_table_numba(a, b, 1.0, 6), K.coefficient_table_numpy(a, b, 1.0, 6)
    )


def test_coefficient_rows_evaluate_like_recurrence():
    spec = make_tilde(PotentialParams(2.0, 5))
    a, b = _inputs(spec, 6)
    rows = K.coefficient_table(a, b, 1.0, 6)
    e = np.linspace(-5, 80, 11)
    vals = K.recurrence_table(a, b, 1.0, e, 6)
    for k in range(7):
        np.testing.assert_allclose(np.polynomial.polynomial.polyval(e, rows[k, : k + 1]), vals[k],
                                   rtol=1e-10, atol=1e-10 * np.abs(vals[k]).max())


def test_second_derivative_is_eighth_order():
    errs = []
    for n in (11, 21):
        x, h = np.linspace(0, 1, n, retstep=True)
        d2 = K.second_derivative(np.sin(3 * x), h)
        errs.append(np.max(np.abs(d2 + 9 * np.sin(3 * x[4:-4]))))
    assert errs[1] < 1e-8
    assert errs[0] / errs[1] > 150  # 2^8 = 256 asymptotically


def test_second_derivative_backends_agree():
    x, h = np.linspace(-2, 2, 501, retstep=True)
    f = np.exp(-x ** 2) * np.cos(5 * x)
    np.testing.assert_allclose(K.second_derivative_numba(f, h), K.second_derivative_numpy(f, h),
                               rtol=1e-13, atol=1e-9)


def test_numpy_kernel_keeps_extended_precision():
    spec = make_tilde(PotentialParams(1.0, 3))
    c = coeffs(spec, 3)
    a = np.asarray(c.a, dtype=np.longdouble)
    b = np.asarray(c.b, dtype=np.longdouble)
    out = K.recurrence_table_numpy(a, b, np.longdouble(1), np.array([1.0], dtype=np.longdouble), 3)
    assert out.dtype == np.longdouble


def test_wrappers_reject_short_inputs():
    with pytest.raises(ValueError):
        K.recurrence_table(np.zeros(2), np.zeros(2), 1.0, [0.0], 5)
    with pytest.raises(ValueError):
        K.second_derivative(np.zeros(5), 0.1)


def test_backend_flag():
    assert K.BACKEND in ("numba", "numpy")
