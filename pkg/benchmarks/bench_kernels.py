"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 3] [--n 100000]
"""
import argparse
import time

import numpy as np

from siegel_lab import _kernels as K
from siegel_lab.blaschke import BlaschkeProduct, CircleLift


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    L = CircleLift(BlaschkeProduct.douady_ghys(0.61))
    c0, p, a, spread = L.c0, L.p, L.a, L.spread
    xs = np.random.default_rng(0).uniform(0, 1, 4096)
    lam = np.exp(2j * np.pi * 0.6180339887498949)
    return {
        f"orbit n={n}": lambda: K.orbit(0.0, n, c0, p, a),
        "forward 4096 pts x 64": lambda: K.forward(xs, 64, c0, p, a),
        "inverse 4096 pts": lambda: K.inverse(xs, c0, p, a, spread),
        "backward 256 pts x 32": lambda: K.backward(xs[:256], 32, c0, p, a, spread),
        "series 2000 terms": lambda: K.series(lam, 1.0, 0.326, 2000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=100_000, help="orbit length")
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':<26}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, fn in cases(args.n).items():
        K.USE_NUMBA = True
        fn()  # compile outside the timing
        t_nb = best_of(fn, args.repeat)
        K.USE_NUMBA = False
        t_np = best_of(fn, args.repeat)
        print(f"{name:<26}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")
    K.USE_NUMBA = True


if __name__ == "__main__":
    main()
