"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-repeat wall time per call and the speedup.
Outputs of the two backends are compared before timing.
"""
import argparse
import timeit

import numpy as np

from siep._backend import BACKENDS


def _sym(rng, n):
    x = rng.standard_normal((n, n))
    return (x + x.T) / 2


def cases(rng):
    for n in (8, 16, 32, 64):
        a = _sym(rng, n)
        yield f"jacobi_eigh n={n}", "jacobi_eigh", (a,)
    for n in (6, 10, 14):
        m = n * (n - 1) // 2
        b = rng.standard_normal((m, m))
        yield f"jacobi_svd m={m}", "jacobi_svd", (b,)
    for n in (8, 12, 16, 64):
        a = _sym(rng, n) / n
        yield f"power_diagonals n={n} k={n}", "power_diagonals", (a, n)


def _agree(name, py_out, c_out):
    if name == "jacobi_eigh":
        return np.allclose(py_out[0], c_out[0], atol=1e-10)
    if name == "jacobi_svd":
        return np.allclose(py_out[1], c_out[1], atol=1e-10)
    scale = np.maximum(1.0, np.abs(py_out).max(axis=1, keepdims=True))
    return np.allclose(py_out / scale, c_out / scale, atol=1e-10)


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if "cython" not in BACKENDS:
        print("compiled extension not built; only the fallback is available")
        return 1
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    print(f"{'case':<28} {'python':>11} {'cython':>11} {'speedup':>8}  agree")
    for label, name, fargs in cases(np.random.default_rng(args.seed)):
        f_py, f_cy = getattr(py, name), getattr(cy, name)
        ok = _agree(name, f_py(*fargs), f_cy(*fargs))
        t_py = best_time(f_py, fargs, args.repeat)
        t_cy = best_time(f_cy, fargs, args.repeat)
        print(f"{label:<28} {t_py * 1e3:9.3f}ms {t_cy * 1e3:9.3f}ms {t_py / t_cy:7.1f}x  {'yes' if ok else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
