"""Compare the compiled kernels with their numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py --sizes 100 1000 10000 --repeat 5
    python benchmarks/bench_kernels.py --output bench.csv
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from symdom import kernels
from symdom.reports import csv_text


def _stack(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "gram":
        z = rng.normal(size=(n, 2, 3)) + 1j * rng.normal(size=(n, 2, 3))
        return 0.3 * z / np.linalg.norm(z, axis=(1, 2), keepdims=True)
    z = rng.normal(size=(n, 5)) + 1j * rng.normal(size=(n, 5))
    return 0.4 * z / np.linalg.norm(z, axis=1, keepdims=True)


CASES = {
    "gram": (kernels.py_logdet_unit_minus_gram, kernels.logdet_unit_minus_gram),
    "lie_ball": (kernels.py_log_lie_ball_norm, kernels.log_lie_ball_norm),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    if kernels.BACKEND != "cython":
        print("compiled extension not built; both columns time the numpy path", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    rows = []
    for kind, (ref, fast) in CASES.items():
        for n in args.sizes:
            z = _stack(kind, n, rng)
            err = float(np.max(np.abs(ref(z) - fast(z))))
            t_ref = min(timeit.repeat(lambda: ref(z), number=1, repeat=args.repeat))
            t_fast = min(timeit.repeat(lambda: fast(z), number=1, repeat=args.repeat))
            rows.append((kind, n, t_ref, t_fast, t_ref / t_fast, err))
            print(f"{kind:9s} n={n:<7d} numpy {t_ref * 1e3:8.3f} ms  {kernels.BACKEND} {t_fast * 1e3:8.3f} ms  "
                  f"speedup {t_ref / t_fast:5.1f}x  max diff {err:.1e}", file=sys.stderr)
    text = csv_text(("kernel", "n", "numpy_s", "backend_s", "speedup", "max_abs_diff"), rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
