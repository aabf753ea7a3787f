"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Compilation happens once before timing; the numba variants are cached on disk.
"""
import argparse
import timeit

import numpy as np

from razavy_qes import _kernels as K
from razavy_qes.families import PotentialParams, coeffs, make_tilde


def cases():
    spec = make_tilde(PotentialParams(1.0, 12))
    c = coeffs(spec, 16)
    a, b = np.asarray(c.a, dtype=np.float64), np.asarray(c.b, dtype=np.float64)
    energies = np.linspace(-400, 400, 4096)
    x, h = np.linspace(0, 2 * np.pi, 16385, retstep=True)
    f = np.exp(-0.5 * np.cos(2 * x)) * np.cos(3 * x)
    return [
        ("recurrence_table k=16 x 4096 energies",
         lambda: K.recurrence_table_numpy(a, b, 1.0, energies, 16),
         lambda: K.recurrence_table_numba(a, b, 1.0, energies, 16)),
        ("recurrence_table k=16 x 33 energies",
         lambda: K.recurrence_table_numpy(a, b, 1.0, energies[:33], 16),
         lambda: K.recurrence_table_numba(a, b, 1.0, energies[:33], 16)),
        ("coefficient_table k=16",
         lambda: K.coefficient_table_numpy(a, b, 1.0, 16),
         lambda: K.coefficient_table_numba(a, b, 1.0, 16)),
        ("second_derivative 16385 samples",
         lambda: K.second_derivative_numpy(f, h),
         lambda: K.second_derivative_numba(f, h)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    print(f"{'kernel':40s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speed-up':>9s}")
    for name, slow, fast in cases():
        np.testing.assert_allclose(fast(), slow(), rtol=1e-12, atol=1e-12 * np.abs(slow()).max())
        t_np = min(timeit.repeat(slow, number=10, repeat=args.repeat)) / 10 * 1e6
        t_nb = min(timeit.repeat(fast, number=10, repeat=args.repeat)) / 10 * 1e6
        print(f"{name:40s} {t_np:12.1f} {t_nb:12.1f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
