"""Time the compiled partition kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--max-pairs 7] [--max-set 10]
"""

import argparse
import json
import timeit

from qdeform import _kernels_py

try:
    from qdeform import _kernels as compiled
except ImportError:
    compiled = None


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-pairs", type=int, default=7)
    ap.add_argument("--max-set", type=int, default=10)
    a = ap.parse_args()
    cases = [("pair_stat_histogram", (n,)) for n in range(4, a.max_pairs + 1)]
    cases += [("set_partition_table", (n, "biane_cr")) for n in range(6, a.max_set + 1)]
    for name, args in cases:
        row = {"kernel": name, "args": list(args), "python_s": bench(getattr(_kernels_py, name), args, a.repeat)}
        if compiled is not None:
            row["cython_s"] = bench(getattr(compiled, name), args, a.repeat)
            row["speedup"] = round(row["python_s"] / row["cython_s"], 1)
        print(json.dumps(row))


if __name__ == "__main__":
    main()
