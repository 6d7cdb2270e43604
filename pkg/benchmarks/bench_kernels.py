"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 16]
"""

import argparse
import sys
import timeit

from quasimodular import kernels
from quasimodular.derivation import generator_poly, get_level, iterate_D
from quasimodular.qseries import eisenstein_fricke


def workloads(n):
    lv = get_level(2)
    big = iterate_D(2, "x", n).terms
    mid = iterate_D(2, "z", n // 2).terms
    e2, e4 = eisenstein_fricke(2, 2, 400), eisenstein_fricke(2, 4, 400)
    a = [int(c) for c in e2.coefficients()]
    b = [int(c) for c in e4.coefficients()]
    start = dict(generator_poly("x").terms)
    return {
        "mul_terms": lambda be: be.mul_terms(big, mid),
        "derive_terms": lambda be: be.derive_terms(big, lv.A, lv.B),
        "iterate 0..n": lambda be: _iterate(be, start, lv, n),
        "convolve": lambda be: be.convolve(a, b, 400),
    }


def _iterate(backend, terms, lv, n):
    for _ in range(n):
        terms = backend.derive_terms(terms, lv.A, lv.B)
    return terms


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=16, help="iteration order of the test polynomials")
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
    backends = {"python": kernels.python_backend, "cython": kernels.compiled_backend}
    print(f"{'kernel':<14}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in workloads(args.n).items():
        times = {}
        for label, be in backends.items():
            if be is None:
                continue
            times[label] = min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat)) * 1e3
        if "cython" in times:
            res_py, res_c = fn(backends["python"]), fn(backends["cython"])
            assert res_py == res_c, f"backend mismatch in {name}"
            print(f"{name:<14}{times['python']:>14.2f}{times['cython']:>14.2f}"
                  f"{times['python'] / times['cython']:>9.1f}x")
        else:
            print(f"{name:<14}{times['python']:>14.2f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
