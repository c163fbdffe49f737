"""Time the compiled and pure-Python kernels side by side.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``
"""

import argparse
import timeit

import numpy as np

from lagtime.kernels import backends


def cases():
    x = np.linspace(0.0, 80.0, 4001)
    z = np.linspace(-0.9, 0.9, 4001)
    n = 200
    diag = 2.0 * np.arange(n) + 21.0
    off = -np.sqrt(np.arange(1, n) * (np.arange(1, n) + 20.0))
    return {
        "laguerre_table(60, 2.0, 4001 pts)": lambda k: k.laguerre_table(60, 2.0, x),
        "laguerre_array(60, 20.0, 4001 pts)": lambda k: k.laguerre_array(60, 20.0, x),
        "hyp2f1_terminating_array(12, 4001 pts)": lambda k: k.hyp2f1_terminating_array(12, 3.5, 4.0, z),
        "tridiag_ql(200, first components)": lambda k: k.tridiag_ql(diag, off, 1, 1e-15, 60),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    found = backends()
    names = list(found)
    print(f"{'kernel':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases().items():
        best = {}
        for name, mod in found.items():
            timer = timeit.Timer(lambda: fn(mod))
            loops, _ = timer.autorange()
            best[name] = min(timer.repeat(args.repeat, loops)) / loops
        row = f"{label:42s}" + "".join(f"{best[n] * 1e3:10.3f}ms" for n in names)
        if "cython" in best:
            row += f"{best['python'] / best['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
