"""Run the full pipeline on one AWC METAR snapshot and print compressibility levels.

    python scripts/reproduce.py --input metars.cache.csv --out-dir repro/

For each quantity the script builds the scene, a proximity graph and its
spectral basis over that scene's stations, then prints L(K) at K = 10, 50, 100
next to published reference levels. The references come from a contiguous-US
snapshot of about 2400 stations, so only qualitative agreement is expected on
other data. ``--demo N`` swaps the input for a synthetic snapshot (smooth
temperature plus a few low-visibility blobs) to exercise the script without data.
"""
import argparse
import io
import math
import sys
import time
from pathlib import Path

import numpy as np

from wxcompress import compress, geo_graph, metar, persistence, report, spectral
from wxcompress.geo_graph import DEFAULT_THRESHOLD_MI
from wxcompress.scene import WeatherQuantity, build_scene

K_LIST = (10, 50, 100)
REFERENCE = {
    WeatherQuantity.TEMPERATURE: {10: 0.90},
    WeatherQuantity.FLIGHT_CATEGORY: {50: 0.60, 100: 0.75},
}
BASIS_FRACTIONS = (0.005, 0.04)
REFERENCE_BAND = (0.75, 0.95)


def demo_snapshot(n, seed=0):
    rng = np.random.default_rng(seed)
    lat = rng.uniform(25.5, 45.0, n)
    lon = rng.uniform(-124.0, -67.5, n)
    temp = 30 - 0.9 * (lat - 25) + 4 * np.sin(np.radians(lon) * 6) + rng.normal(0, 1.5, n)
    blobs = rng.uniform([28, -120], [44, -70], (6, 2))
    d = np.min(np.hypot(lat[:, None] - blobs[:, 0], (lon[:, None] - blobs[:, 1]) * 0.8), axis=1)
    vis = np.clip(10 * d / 3, 0.25, 10)
    out = io.StringIO()
    out.write("station_id,observation_time,latitude,longitude,temp_c,visibility_statute_mi,flight_category\n")
    for i in range(n):
        cat = metar.derive_flight_category(None, float(vis[i]))
        out.write(f"D{i:04d},2021-01-18T17:53:00Z,{lat[i]:.4f},{lon[i]:.4f},{temp[i]:.1f},{vis[i]:.2f},{cat.value}\n")
    out.seek(0)
    return out


def analyze_quantity(observations, quantity, threshold, solver, out_dir):
    sites, scene = build_scene(observations, quantity)
    t0 = time.perf_counter()
    graph = geo_graph.build_graph(sites, threshold)
    H = geo_graph.laplacian(graph)
    basis = spectral.eigendecompose(H, sites, threshold, method=solver)
    elapsed = time.perf_counter() - t0
    components, _ = geo_graph.connected_components(graph)
    n = basis.n
    coeffs = compress.analyze(basis, scene)
    ks = sorted({k for k in K_LIST if k <= n} | {max(1, math.ceil(f * n)) for f in BASIS_FRACTIONS})
    curve = compress.compressibility_curve(coeffs, ks)
    full = compress.compressibility_curve(coeffs, list(range(n + 1)))
    assert all(b >= a for a, b in zip(full.levels, full.levels[1:])), "curve is not monotone"

    if out_dir is not None:
        persistence.save_basis(basis, sites, out_dir / f"basis_{quantity.value}.gsb")
        report.export_curve_csv(full, out_dir / f"curve_{quantity.value}.csv")

    print(f"\n{quantity.value}: n = {n}, edges = {graph.edge_count}, components = {components}, "
          f"basis built in {elapsed:.1f}s")
    refs = REFERENCE.get(quantity, {})
    print(f"  {'K':>5} {'K/n':>7} {'L(K)':>8} {'reference':>10}")
    for k, level in curve.points:
        ref = f"{refs[k]:.2f}" if k in refs else ""
        print(f"  {k:>5} {k / n:>7.3%} {level:>8.4f} {ref:>10}")
    lo, hi = (math.ceil(f * n) for f in BASIS_FRACTIONS)
    levels = dict(curve.points)
    print(f"  {BASIS_FRACTIONS[0]:.1%}-{BASIS_FRACTIONS[1]:.0%} of the basis captures "
          f"{levels[max(1, lo)]:.1%}-{levels[hi]:.1%} (reference band "
          f"{REFERENCE_BAND[0]:.0%}-{REFERENCE_BAND[1]:.0%})")
    return elapsed


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="AWC METAR CSV snapshot")
    src.add_argument("--demo", type=int, metavar="N", help="use a synthetic snapshot of N stations")
    p.add_argument("--threshold-mi", type=float, default=DEFAULT_THRESHOLD_MI)
    p.add_argument("--solver", default="auto", choices=["auto", "lapack", "ql", "ql-python"])
    p.add_argument("--out-dir", type=Path)
    args = p.parse_args(argv)

    if args.input is not None:
        with open(args.input, encoding="utf-8", errors="replace", newline="") as fh:
            observations, rep = metar.parse_awc_csv(fh)
    else:
        observations, rep = metar.parse_awc_csv(demo_snapshot(args.demo))
    kept = metar.filter_observations(observations)
    print(f"ingest: accepted {rep.accepted_count}, skipped {rep.skipped_count}, {len(kept)} inside the box")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    total = 0.0
    for quantity in WeatherQuantity:
        total += analyze_quantity(kept, quantity, args.threshold_mi, args.solver, args.out_dir)
    print(f"\ntotal basis time {total:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
