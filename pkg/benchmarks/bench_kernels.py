"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba column excludes compilation (each kernel is warmed up once first).
"""

import argparse
import timeit

import numpy as np

from algdomain import _kernels
from algdomain.geometry import ShapeSpec, make_shape


def _cases():
    curve = make_shape(ShapeSpec("ellipse"), 512)
    p = ShapeSpec("two-overlapping-circles").polynomial()
    ex, ey, c, deg = _kernels.poly_arrays(p)
    g = np.linspace(-3.0, 3.0, 32)
    seeds = np.ascontiguousarray(np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2))
    s = float(np.max(np.abs(c)))
    no_targets = np.zeros((0, 2))
    bx, by = 1.3, float(np.sqrt(1.0 - 0.3**2))
    return {
        "assemble (N=512)": lambda b: b.assemble(curve.nodes, curve.normals, curve.curvature,
                                                 curve.weights),
        "trace (arclength 10)": lambda b: b.trace(ex, ey, c, deg, 0.0, 0.0, no_targets, 1.0, 1e-3,
                                                  1e-2, 10.0, 10**6, 5e-2, 1e-2, 10.0,
                                                  1e-10 * s, 1e-12 * s),
        "critical_points (32x32)": lambda b: b.critical_points(ex, ey, c, deg, seeds, 100, -3.0, 3.0),
        "circle_zeros (n=1000)": lambda b: b.circle_zeros(ex, ey, c, deg, bx, by, 0.05, 1000,
                                                          1e-10 * s, 200),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = [_kernels.numpy_backend]
    if _kernels.numba_backend is not None:
        backends.append(_kernels.numba_backend)
    print(f"{'kernel':26s}" + "".join(f"{b.name:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in _cases().items():
        times = []
        for b in backends:
            fn(b)  # warm-up, triggers jit compilation
            times.append(min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)))
        row = f"{name:26s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
