"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall time per kernel and backend, the speed-up, and the
largest disagreement between the two results.
"""

import argparse
import timeit

import numpy as np

from angqudit._backend import compiled_kernels, python_kernels


def cases(rng):
    L = 10
    c = np.full(2 * L + 1, 1 / np.sqrt(2 * L + 1), dtype=np.complex128)
    ls, li = np.meshgrid(np.arange(-40, 41), np.arange(-40, 41))
    ls = np.ascontiguousarray(ls.ravel(), dtype=np.int64)
    li = np.ascontiguousarray(li.ravel(), dtype=np.int64)
    g = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    herm = g + g.conj().T
    return {
        "envelope_sum (81x81 grid, L=10)": lambda k: k.envelope_sum(c, np.pi / 10, np.pi / 10, ls, li),
        "arc_quadrature (10^4 points)": lambda k: k.arc_quadrature(-0.1, 0.2, 37, 10_000),
        "jacobi_eigh (40x40 Hermitian)": lambda k: k.jacobi_eigh(herm, 1e-14, 100, False)[0],
    }


def _diff(a, b):
    a, b = np.sort_complex(np.ravel(a)), np.sort_complex(np.ravel(b))
    return float(np.max(np.abs(a - b)))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if compiled_kernels is None:
        print("compiled kernels are not built; only the fallback is available")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speed-up':>9s} {'max diff':>10s}")
    for name, fn in cases(rng).items():
        times = {}
        for label, k in (("cython", compiled_kernels), ("python", python_kernels)):
            times[label] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) * 1e3
        diff = _diff(fn(compiled_kernels), fn(python_kernels))
        print(f"{name:34s} {times['cython']:12.3f} {times['python']:12.3f} "
              f"{times['python'] / times['cython']:8.1f}x {diff:10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
