"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py --size 60 --repeat 20

Each row reports the median wall time per call for both variants and the
speedup. The numba side is called once before timing so compilation is not
counted. Results are checked for equality before anything is timed.
"""
import argparse
import statistics
import time

import numpy as np
import scipy.sparse as sp

from tpgmatch import kernels


def _csr(rng, n, density):
    m = sp.random(n, n, density=density, format="csr", random_state=rng, dtype=float)
    m.sort_indices()
    return m.indptr.astype(np.int64), m.indices.astype(np.int64), m.data


def _cases(size, rng):
    n_tpg = size * size
    ptr, idx, dat = _csr(rng, n_tpg, min(1.0, 8.0 / n_tpg))
    x = rng.random(n_tpg)
    p1, d1, _ = _csr(rng, size, 0.3)
    p2, d2, _ = _csr(rng, size, 0.3)
    a, b = rng.random((size, 4)), rng.random((size, 4))
    ia, ib = rng.integers(0, size, 20 * size), rng.integers(0, size, 20 * size)
    cost = rng.random((size, size))
    return {
        "csr_matvec": (ptr, idx, dat, x),
        "csr_square_diag": (ptr, idx, dat),
        "product_arcs": (size, size, p1, d1, p2, d2),
        "paired_sqdist": (a, b, ia, ib),
        "lsap_min": (cost,),
    }


def _median_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _same(r1, r2):
    if isinstance(r1, tuple):
        return all(np.allclose(u, v) for u, v in zip(r1, r2))
    return np.allclose(r1, r2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=60, help="nodes per graph (TPG has size^2 nodes)")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, call_args in _cases(args.size, rng).items():
        fast = getattr(kernels, name + "_numba")
        slow = getattr(kernels, name + "_numpy")
        if not _same(fast(*call_args), slow(*call_args)):
            raise SystemExit(f"{name}: numba and numpy results differ")
        t_fast = _median_time(fast, call_args, args.repeat)
        t_slow = _median_time(slow, call_args, args.repeat)
        print(f"{name:<18}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>12.3f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
