"""Time the compiled kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py --q 2 --n 6 --repeat 5
"""

import argparse
import timeit

import numpy as np

from thmm import _kernels_py as pure

try:
    from thmm import _kernels as compiled
except ImportError:
    compiled = None


def cases(q, n, points, rng):
    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    coeffs = cplx(2 * n + 2, 2 * q, 2 * q)
    zs = cplx(points)
    row, col = cplx(n + 1, q, q), cplx(n + 1, q, 2 * q)
    s = cplx(2 * n + 3, q, q)
    return {
        "horner_batch": (coeffs, zs),
        "sandwich_coeffs": (row, col),
        "hankel_dense": (s, n + 1, n + 1, 1),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=int, default=2)
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--points", type=int, default=25)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"q={args.q} n={args.n} points={args.points}; best of {args.repeat} x {args.number} calls, microseconds per call")
    print(f"{'kernel':<16}{'numpy':>12}{'compiled':>12}{'speedup':>10}")
    for name, call_args in cases(args.q, args.n, args.points, rng).items():
        timings = {}
        for label, mod in (("numpy", pure), ("compiled", compiled)):
            if mod is None:
                continue
            fn = getattr(mod, name)
            best = min(timeit.repeat(lambda: fn(*call_args), repeat=args.repeat, number=args.number))
            timings[label] = 1e6 * best / args.number
        if compiled is not None:
            same = np.allclose(getattr(pure, name)(*call_args), getattr(compiled, name)(*call_args), atol=1e-12)
            ratio = timings["numpy"] / timings["compiled"]
            print(f"{name:<16}{timings['numpy']:>12.1f}{timings['compiled']:>12.1f}{ratio:>9.1f}x"
                  + ("" if same else "  MISMATCH"))
        else:
            print(f"{name:<16}{timings['numpy']:>12.1f}{'n/a':>12}{'':>10}")


if __name__ == "__main__":
    main()
