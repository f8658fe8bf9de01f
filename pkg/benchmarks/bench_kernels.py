"""Time the propagation kernels with and without numba.

    python benchmarks/bench_kernels.py [--repeat 5]

Sizes match the default pipeline: 4096 disc-plane samples, 1024 detector
samples. Also reports the largest difference between the two backends.
"""

import argparse
import time

import numpy as np

from discread import _accel, kernels


def _time(fn, repeat):
    fn()  # warm-up (numba compilation)
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-src", type=int, default=4096)
    ap.add_argument("--n-out", type=int, default=1024)
    args = ap.parse_args()

    lam, f = 780e-9, 4e-3
    k = 2 * np.pi / lam
    x = np.linspace(-3.5e-6, 3.5e-6, args.n_src)
    wu = np.exp(-(x / 1e-6) ** 2) * (1 + 0.3j * np.sign(x)) * (x[1] - x[0])
    xi = np.linspace(-2.5e-3, 2.5e-3, args.n_out)
    kappa = k * xi / np.hypot(xi, f)

    cases = {
        "far_field_sum": lambda: kernels.far_field_sum(x[0], x[1] - x[0], wu, kappa),
        "rayleigh_sommerfeld_sum": lambda: kernels.rayleigh_sommerfeld_sum(x[0], x[1] - x[0], wu, xi, f, k),
    }
    if not _accel.HAVE_NUMBA:
        print("numba not installed: numpy backend only")
    print(f"{'kernel':26s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases.items():
        _accel.USE_NUMBA = False
        t_np, ref = _time(fn, args.repeat), fn()
        if _accel.HAVE_NUMBA:
            _accel.USE_NUMBA = True
            t_nb, got = _time(fn, args.repeat), fn()
            diff = np.abs(got - ref).max() / np.abs(ref).max()
            print(f"{name:26s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.2f} {diff:13.2e}")
        else:
            print(f"{name:26s} {t_np:10.4f} {'-':>10s} {'-':>8s} {'-':>13s}")


if __name__ == "__main__":
    main()
