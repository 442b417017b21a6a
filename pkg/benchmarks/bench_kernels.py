"""Compiled vs numpy kernels on composition tables of growing size.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Also times one end-to-end contract solve per backend (the backend is chosen at
import time, so each solve runs in a fresh interpreter).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from rfmarket import kernels
from rfmarket.combinatorics import composition_table

SOLVE = (
    "import time; from rfmarket.model import Market; from rfmarket.contract import solve_contract; "
    "m = Market({n}, tuple(range(1, {k} + 1)), 2.2); t = time.perf_counter(); "
    "solve_contract(m, monotonicity='enforce'); print(time.perf_counter() - t)"
)


def bench_table(n, k, repeat):
    counts, probs = composition_table(n, k)
    B = np.ascontiguousarray(2.2 * counts, dtype=float)
    A = np.ascontiguousarray(counts / np.arange(1, k + 1), dtype=float)
    x = np.full(k, 0.1)
    s = np.ascontiguousarray(B[:, 0])
    out = {}
    for name, mod in (("python", kernels.python_backend), ("cython", kernels.compiled_backend)):
        if mod is None:
            continue
        calls = {
            "eval": lambda: mod.logquad_eval(probs, B, A, x, 1.4427),
            "hess": lambda: mod.logquad_hess(probs, B, A, x, 1.4427),
            "recip": lambda: mod.reciprocal_sum(probs, s, 2.0, 0.3),
        }
        out[name] = {c: min(timeit.repeat(f, number=1, repeat=repeat)) * 1e3 for c, f in calls.items()}
    return len(probs), out


def bench_solve(n, k):
    res = {}
    for name, flag in (("python", "1"), ("cython", "0")):
        env = dict(os.environ, RFMARKET_PURE_PYTHON=flag)
        p = subprocess.run([sys.executable, "-c", SOLVE.format(n=n, k=k)], env=env, capture_output=True, text=True)
        res[name] = float(p.stdout) * 1e3 if p.returncode == 0 else float("nan")
    return res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if kernels.compiled_backend is None:
        print("compiled extension not built; showing numpy timings only")
    print(f"{'N':>3} {'K':>3} {'rows':>7}  {'kernel':<6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n, k in [(2, 5), (5, 10), (10, 10), (12, 10)]:
        rows, t = bench_table(n, k, args.repeat)
        for c in ("eval", "hess", "recip"):
            py = t["python"][c]
            cy = t.get("cython", {}).get(c, float("nan"))
            print(f"{n:>3} {k:>3} {rows:>7}  {c:<6} {py:>10.3f} {cy:>10.3f} {py / cy:>8.1f}")
    print()
    print(f"{'N':>3} {'K':>3}  {'contract solve python ms':>25} {'cython ms':>10}")
    for n, k in [(5, 10), (10, 10)]:
        r = bench_solve(n, k)
        print(f"{n:>3} {k:>3}  {r['python']:>25.1f} {r['cython']:>10.1f}")


if __name__ == "__main__":
    main()
