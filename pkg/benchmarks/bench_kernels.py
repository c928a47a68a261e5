"""Compare the compiled and pure-Python comparison-ODE integrators.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends run the same rate-matched RK4 loop to U = 1e12 and must agree
bit for bit; the script prints per-call times and the speedup.
"""

from __future__ import annotations

import argparse
import timeit

from liewave import _kernels_py

try:
    from liewave import _kernels
except ImportError:  # extension not built
    _kernels = None

CASES = [(1.5, 0.0, 1.0), (2.0, 0.0, 1.0), (3.0, 1.0, 0.0), (5.0, 0.3, 0.7)]


def run(mod, p, a, b):
    return mod.integrate_blowup(p, a, b, 1e-3, 1e-3, 1e12, 10_000_000)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"{'case':>18} {'steps':>7} {'python [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for p, a, b in CASES:
        ref = run(_kernels_py, p, a, b)
        t_py = min(timeit.repeat(lambda: run(_kernels_py, p, a, b), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{f'p={p} a={a} b={b}':>18} {ref[3]:>7} {1e3 * t_py:>12.2f} {'n/a':>14} {'n/a':>8}")
            continue
        out = run(_kernels, p, a, b)
        if out != ref:
            raise SystemExit(f"backends disagree for {(p, a, b)}: {out} vs {ref}")
        t_c = min(timeit.repeat(lambda: run(_kernels, p, a, b), number=1, repeat=args.repeat))
        print(f"{f'p={p} a={a} b={b}':>18} {ref[3]:>7} {1e3 * t_py:>12.2f} {1e3 * t_c:>14.2f} "
              f"{t_py / t_c:>8.1f}")


if __name__ == "__main__":
    main()
