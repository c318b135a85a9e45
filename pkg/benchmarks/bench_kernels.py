#!/usr/bin/env python3
"""Times the numba kernels against their pure-numpy fallbacks.

The numpy path is what you get with DIOCURVE_NO_NUMBA=1; this script calls
both implementations directly so a single run compares them side by side.

    python benchmarks/bench_kernels.py [--spf-limit 4194304] [--profile-qmax 3000]
"""

import argparse
import time

from diocurve import _kernels


def timeit(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--spf-limit", type=int, default=1 << 22)
    ap.add_argument("--profile-qmax", type=int, default=3000)
    ap.add_argument("--omega-limit", type=int, default=1 << 20)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or DIOCURVE_NO_NUMBA set): timing numpy path only")

    rows = []

    def bench(name, numba_fn, numpy_fn, *fnargs):
        t_np, ref = timeit(numpy_fn, *fnargs)
        if numba_fn is not None:
            numba_fn(*fnargs)  # warm the JIT
            t_nb, out = timeit(numba_fn, *fnargs)
        else:
            t_nb, out = float("nan"), ref
        rows.append((name, t_nb, t_np, t_np / t_nb if t_nb > 0 else float("nan")))

    bench(
        f"spf_sieve({args.spf_limit})",
        _kernels.spf_sieve_numba,
        _kernels.spf_sieve_numpy,
        args.spf_limit,
    )
    bench(
        f"residue_profiles(1..{args.profile_qmax}, d=2)",
        _kernels.residue_profiles_numba,
        _kernels.residue_profiles_numpy,
        1,
        args.profile_qmax,
        2,
    )
    bench(
        f"scaled_counts(1..{args.profile_qmax // 2}, d=2, ad=6)",
        _kernels.scaled_counts_numba,
        _kernels.scaled_counts_numpy,
        1,
        args.profile_qmax // 2,
        2,
        6,
    )
    bench(
        f"omega_table({args.omega_limit})",
        _kernels.omega_table_numba,
        _kernels.omega_table_numpy,
        args.omega_limit,
    )

    print(f"{'kernel':<40} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, t_nb, t_np, speedup in rows:
        print(f"{name:<40} {t_nb:>10.4f} {t_np:>10.4f} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
