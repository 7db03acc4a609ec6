"""Time a cross-validated fit at a few sample sizes.

    python scripts/bench_fit.py
"""

import time

from rulsif.estimator import RulsifConfig, fit
from rulsif.synthdata import benchmark_dataset


def main():
    for n in (100, 300, 500, 1000):
        ds = benchmark_dataset("d", n, n, seed=0)
        fit(ds.numerator, ds.denominator)  # warm up BLAS
        reps = 5
        start = time.perf_counter()
        for r in range(reps):
            fit(ds.numerator, ds.denominator, RulsifConfig(seed=r))
        ms = 1000 * (time.perf_counter() - start) / reps
        print(f"n = n' = {n:5d}: {ms:7.1f} ms per fit (30 grid points, 5 folds)")


if __name__ == "__main__":
    main()
