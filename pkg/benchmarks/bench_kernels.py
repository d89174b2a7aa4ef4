"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are called through the same entry points with ``use_numba``
forced, so the numbers compare only the inner loops.
"""

import argparse
import time

import numpy as np

from theta_lab import _kernels as K

CASES = [
    ("mellin a=0 s=1.3", lambda nb: K.mellin_sums(0, 1.3, 0.2 + 1.1j, 0.31 - 0.4j, 0j, 1.0, 12.0, 12.0, None, None, nb)),
    ("mellin a=2 s=1", lambda nb: K.mellin_sums(2, 1.0, 0.2 + 1.1j, 0.31 - 0.4j, 0j, 1.0, 12.0, 12.0, None, None, nb)),
    ("direct a=1 s=3", lambda nb: K.direct_sum(1, 3.0, 0.2 + 1.1j, 0.31 - 0.4j, 0j, 30.0, 60.0, None, nb)),
    ("phi grid", lambda nb: K.phi(1.5 + 0.2j, np.linspace(0.05, 8.0, 2000), nb)),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not importable; only the numpy path can run")
    print(f"{'case':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>13}")
    for name, call in CASES:
        t_np, v_np = best_of(lambda: call(False), args.repeat)
        if K.HAVE_NUMBA:
            call(True)  # compile outside the timed region
            t_nb, v_nb = best_of(lambda: call(True), args.repeat)
            diff = float(np.max(np.abs(np.asarray(v_np) - np.asarray(v_nb))))
            print(f"{name:<20}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>13.2e}")
        else:
            print(f"{name:<20}{1e3 * t_np:>12.2f}{'-':>12}{'-':>10}{'-':>13}")


if __name__ == "__main__":
    main()
