"""Compare the compiled and numpy plane-wave kernels.

    python benchmarks/bench_kernels.py [--nodes 512] [--points 20000] [--repeat 5]

Reports wall time per call for the grid sum and for the per-point current
used by the trajectory integrator, plus the largest difference between
the two backends.
"""
import argparse
import timeit

import numpy as np

from kleinflow import _kernels
from kleinflow.dispersion import PhysicalParams
from kleinflow.packets import Packet, PacketKind, gaussian_amplitude


def _sums(nodes):
    P = Packet(PacketKind.STEP_IN, gaussian_amplitude(0.3, 0.1), PhysicalParams(1.0, 4.0), nodes)
    return P._left


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=512)
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    sums = _sums(args.nodes)
    rng = np.random.default_rng(0)
    x0 = rng.uniform(-180, 200, args.points)
    x1 = rng.uniform(-100, 0, args.points)
    backends = [("python", _kernels.python_backend)]
    if _kernels.compiled_backend is not None:
        backends.append(("cython", _kernels.compiled_backend))
    else:
        print("compiled backend not built; timing the numpy fallback only")

    grid_t, point_t, results = {}, {}, {}
    for name, mod in backends:
        results[name] = mod.plane_wave_sum(x0, x1, *sums)
        grid_t[name] = min(timeit.repeat(lambda: mod.plane_wave_sum(x0, x1, *sums),
                                         number=1, repeat=args.repeat))
        pts = list(zip(x0[:2000].tolist(), x1[:2000].tolist()))
        point_t[name] = min(timeit.repeat(lambda: [mod.current_at(a, b, *sums) for a, b in pts],
                                          number=1, repeat=args.repeat)) / len(pts)

    print(f"nodes={args.nodes} points={args.points}")
    print(f"{'backend':<8} {'grid sum [s]':>14} {'current_at [us]':>16}")
    for name, _ in backends:
        print(f"{name:<8} {grid_t[name]:>14.4f} {point_t[name] * 1e6:>16.2f}")
    if len(backends) == 2:
        diff = max(np.max(np.abs(results["python"][i] - results["cython"][i])) for i in (0, 1))
        print(f"speedup  grid x{grid_t['python'] / grid_t['cython']:.1f}, "
              f"current_at x{point_t['python'] / point_t['cython']:.1f}")
        print(f"max |python - cython| = {diff:.3e}")


if __name__ == "__main__":
    main()
