"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py --sizes 100,200,400 --repeat 3

The eigensolver rows also time numpy.linalg.eigh as a LAPACK reference.
"""
import argparse
import time

import numpy as np

from wxcompress import kernels
from wxcompress.geo_graph import EARTH_RADIUS_MI, graph_from_edges, laplacian


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def sites(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(25.1, 45.4, n), rng.uniform(-124.8, -66.9, n)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="100,200,400,800")
    p.add_argument("--threshold-mi", type=float, default=150.0)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; timing the pure-Python backend only")
    print(f"{'kernel':<16}{'n':>6}" + "".join(f"{name:>12}" for name in impls) + f"{'lapack':>12}{'speedup':>10}")

    for n in (int(s) for s in args.sizes.split(",")):
        lat, lon = sites(n, args.seed)
        row, results = {}, {}
        for name, mod in impls.items():
            row[name], results[name] = best_of(
                lambda: mod.threshold_edges(lat, lon, args.threshold_mi, EARTH_RADIUS_MI), args.repeat)
        ref = results["python"]
        for out in results.values():
            assert np.array_equal(out[0], ref[0]) and np.array_equal(out[1], ref[1])
            assert np.allclose(out[2], ref[2], rtol=1e-12)
        _print("threshold_edges", n, row, None)

        i, j, _ = ref
        H = laplacian(graph_from_edges(n, np.column_stack([i, j])))
        row = {}
        for name, mod in impls.items():
            row[name], (w, V, failed) = best_of(lambda: mod.symmetric_eigh(H), args.repeat)
            assert failed < 0
        lapack, _ = best_of(lambda: np.linalg.eigh(H), args.repeat)
        _print("symmetric_eigh", n, row, lapack)


def _print(kernel, n, row, lapack):
    cells = "".join(f"{t * 1e3:>10.2f}ms" for t in row.values())
    ref = f"{lapack * 1e3:>10.2f}ms" if lapack is not None else f"{'':>12}"
    speed = f"{row['python'] / row['cython']:>9.1f}x" if "cython" in row else ""
    print(f"{kernel:<16}{n:>6}{cells}{ref}{speed}")


if __name__ == "__main__":
    main()
