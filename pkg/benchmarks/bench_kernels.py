"""Time each kernel under the compiled loop and the numpy fallback.

Both implementations see the same pre-drawn inputs and must return identical
results; the table reports median seconds per call and the speed ratio.

    python3 benchmarks/bench_kernels.py [--repeat 7] [--size 65536]
"""
import argparse
import statistics
import time

import numpy as np

from simplexangles import kernels
from simplexangles._backend import HAVE_NUMBA
from simplexangles.mc import RandomStream


def cases(size):
    s = RandomStream(2024)
    out = []
    for d in (3, 5):
        y = s.normal((size, d - 1, d + 1))
        out.append((f"hull_status d={d}", kernels.hull_status, (y[:, :, 1:] - y[:, :, :1], 1e-10)))
    for d in (3, 6):
        out.append((f"count_nonnegative d={d}", kernels.count_nonnegative_images,
                    (s.normal((size, d)), s.normal((d, d)), 1e-10)))
    out.append(("sign_codes d=4", kernels.sign_codes, (s.normal((size, 4)), s.normal((5, 4)), 1e-12)))
    return out


def timed(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--size", type=int, default=65536)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; only the numpy path can be timed")
    print(f"{'kernel':<24}{'numba s':>12}{'numpy s':>12}{'ratio':>9}")
    for name, fn, fargs in cases(args.size):
        np_time, np_res = timed(fn.numpy_impl, fargs, args.repeat)
        if HAVE_NUMBA:
            fn(*fargs)  # compile outside the timing loop
            jit_time, jit_res = timed(fn, fargs, args.repeat)
            if not np.array_equal(np.asarray(jit_res), np.asarray(np_res)):
                raise SystemExit(f"{name}: backends disagree")
            print(f"{name:<24}{jit_time:>12.5f}{np_time:>12.5f}{np_time / jit_time:>8.1f}x")
        else:
            print(f"{name:<24}{'-':>12}{np_time:>12.5f}{'-':>9}")


if __name__ == "__main__":
    main()
