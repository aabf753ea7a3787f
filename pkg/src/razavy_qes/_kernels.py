"""Inner loops, compiled with numba when available.

numba kernels are float64 only; extended-precision callers use the numpy
variants directly.

Set ``RAZAVY_QES_BACKEND=numpy`` to force the pure-numpy implementations
(``numba`` is the default when it imports). Both variants are always
importable as ``<name>_numpy`` / ``<name>_numba`` so they can be compared.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


def _select_backend():
    requested = os.environ.get("RAZAVY_QES_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(f"RAZAVY_QES_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        raise ImportError("RAZAVY_QES_BACKEND=numba but numba is not installed")
    return requested


BACKEND = _select_backend()

# 8th-order central stencil for the second derivative
D2_STENCIL = np.array(
    [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
)


# -- recurrence table ---------------------------------------------------------
# P_{k+1}(E) = (E - s*b_k) P_k(E) - a_k P_{k-1}(E), P_{-1} = 0, P_0 = 1.
# a[0] is ignored (multiplies P_{-1} = 0).


def recurrence_table_numpy(a, b, s, energies, k_max):
    # dtype follows the inputs, so np.longdouble arrays give an extended-precision table
    dtype = np.result_type(a, b, energies)
    out = np.empty((k_max + 1, energies.size), dtype=dtype)
    out[0] = 1
    prev = np.zeros(energies.size, dtype=dtype)
    for k in range(k_max):
        out[k + 1] = (energies - s * b[k]) * out[k] - a[k] * prev
        prev = out[k]
    return out


@njit(cache=True)
def recurrence_table_numba(a, b, s, energies, k_max):
    out = np.empty((k_max + 1, energies.size))
    for j in range(energies.size):
        e = energies[j]
        prev = 0.0
        cur = 1.0
        out[0, j] = 1.0
        for k in range(k_max):
            nxt = (e - s * b[k]) * cur - a[k] * prev
            prev = cur
            cur = nxt
            out[k + 1, j] = cur
    return out


# -- coefficient vectors ------------------------------------------------------
# Row k holds the ascending-degree coefficients of P_k, zero padded.


def coefficient_table_numpy(a, b, s, k_max):
    out = np.zeros((k_max + 1, k_max + 1))
    out[0, 0] = 1.0
    # overflow is reported by the caller's finiteness check, as in the numba kernel
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(k_max):
            out[k + 1, 1:] = out[k, :-1]
            out[k + 1] -= s * b[k] * out[k]
            if k > 0:
                out[k + 1] -= a[k] * out[k - 1]
    return out


@njit(cache=True)
def coefficient_table_numba(a, b, s, k_max):
    out = np.zeros((k_max + 1, k_max + 1))
    out[0, 0] = 1.0
    for k in range(k_max):
        shift = s * b[k]
        for i in range(k + 2):
            v = -shift * out[k, i]
            if i > 0:
                v += out[k, i - 1]
            if k > 0:
                v -= a[k] * out[k - 1, i]
            out[k + 1, i] = v
    return out


# -- second derivative ----------------------------------------------------------


def second_derivative_numpy(values, h):
    """Second derivative at interior points ``values[4:-4]``."""
    n = values.size - 8
    acc = np.zeros(n)
    for i in range(9):
        acc += D2_STENCIL[i] * values[i:i + n]
    return acc / (h * h)


@njit(cache=True)
def second_derivative_numba(values, h):
    n = values.size - 8
    acc = np.zeros(n)
    c = D2_STENCIL
    for j in range(n):
        v = 0.0
        for i in range(9):
            v += c[i] * values[j + i]
        acc[j] = v / (h * h)
    return acc


if BACKEND == "numba":
    _recurrence_table = recurrence_table_numba
    _coefficient_table = coefficient_table_numba
    _second_derivative = second_derivative_numba
else:
    _recurrence_table = recurrence_table_numpy
    _coefficient_table = coefficient_table_numpy
    _second_derivative = second_derivative_numpy


def recurrence_table(a, b, s, energies, k_max):
    """Values ``P_0..P_kmax`` at every energy, shape ``(k_max + 1, len(energies))``."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    energies = np.ascontiguousarray(np.ravel(energies), dtype=np.float64)
    if a.size < k_max or b.size < k_max:
        raise ValueError("need at least k_max recurrence coefficients")
    return _recurrence_table(a, b, float(s), energies, int(k_max))


def coefficient_table(a, b, s, k_max):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.size < k_max or b.size < k_max:
        raise ValueError("need at least k_max recurrence coefficients")
    return _coefficient_table(a, b, float(s), int(k_max))


def second_derivative(values, h):
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.size < 9:
        raise ValueError("need at least 9 samples for the 8th-order stencil")
    return _second_derivative(values, float(h))
