"""Command-line pipeline: ingest -> scene -> basis -> analyze / reconstruct.

Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 bad file format,
5 empty scene, 6 numerical failure, 7 scene/basis fingerprint mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path

import numpy as np

from . import compress, geo_graph, metar, persistence, report, spectral
from .errors import ArgumentError, CompatibilityError, WxError
from .scene import WeatherQuantity, build_scene, read_scene_csv, write_scene_csv

log = logging.getLogger("wxcompress")

DEFAULT_K_LIST = (1, 2, 5, 10, 20, 50, 100, 200)
DEFAULT_THRESHOLDS = {
    WeatherQuantity.TEMPERATURE: (2.0, 5.0),
    WeatherQuantity.VISIBILITY_REDUCTION: (1.0, 3.0),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bbox(text):
    try:
        s, n, w, e = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--bbox expects S,N,W,E; got {text!r}") from None
    return metar.BoundingBox(south=s, north=n, west=w, east=e)


def _window(text):
    try:
        start, end = text.split(",")
        return metar.parse_time(start), metar.parse_time(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--window expects START,END in RFC 3339; got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="wxcompress", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ing = sub.add_parser("ingest", help="parse, locate and filter reports into an observation CSV")
    ing.add_argument("--input", required=True, nargs="+", type=Path)
    ing.add_argument("--format", choices=["metar-text", "awc-csv"], default="awc-csv")
    ing.add_argument("--stations", type=Path, help="station table CSV (metar-text only)")
    ing.add_argument("--bbox", type=_bbox, default=metar.CONUS_BOX, help="S,N,W,E degrees")
    ing.add_argument("--window", type=_window, help="START,END (half-open, RFC 3339)")
    ing.add_argument("--out-dir", type=Path, default=Path("."))

    sc = sub.add_parser("scene", help="build a scene CSV for one quantity")
    sc.add_argument("--input", required=True, type=Path, help="observation CSV")
    sc.add_argument("--quantity", required=True, type=WeatherQuantity)
    sc.add_argument("--out-dir", type=Path, default=Path("."))

    ba = sub.add_parser("basis", help="build the proximity graph and its spectral basis")
    ba.add_argument("--input", required=True, type=Path, help="scene CSV")
    ba.add_argument("--threshold-mi", type=float, default=geo_graph.DEFAULT_THRESHOLD_MI)
    ba.add_argument("--solver", choices=["auto", "ql", "ql-python", "lapack"], default="auto")
    ba.add_argument("--out-dir", type=Path, default=Path("."))

    an = sub.add_parser("analyze", help="compressibility curve and dominant basis vectors")
    an.add_argument("--input", required=True, type=Path, help="scene CSV")
    an.add_argument("--basis", required=True, type=Path, help=".gsb file")
    an.add_argument("--quantity", type=WeatherQuantity, default=WeatherQuantity.TEMPERATURE)
    an.add_argument("--k-list", type=_int_list, default=list(DEFAULT_K_LIST))
    an.add_argument("--dominant", type=int, default=0)
    an.add_argument("--display-fraction", type=float, default=report.DEFAULT_DISPLAY_FRACTION)
    an.add_argument("--out-dir", type=Path, default=Path("."))

    rc = sub.add_parser("reconstruct", help="reconstruct a scene from its K-sparse approximation")
    rc.add_argument("--input", required=True, type=Path, help="scene CSV")
    rc.add_argument("--basis", required=True, type=Path, help=".gsb file")
    rc.add_argument("--quantity", type=WeatherQuantity, default=WeatherQuantity.TEMPERATURE)
    rc.add_argument("--k", required=True, type=int)
    rc.add_argument("--thresholds", type=_float_list, help="error tolerances (default 2,5 for temperature)")
    rc.add_argument("--out-dir", type=Path, default=Path("."))
    return p


def _open_text(path):
    return open(path, encoding="utf-8", errors="replace", newline="")


def cmd_ingest(args):
    if args.format == "metar-text" and args.stations is None:
        raise ArgumentError("--stations is required with --format metar-text")
    observations, rep = [], metar.IngestReport()
    if args.format == "awc-csv":
        for path in args.input:
            with _open_text(path) as fh:
                obs, r = metar.parse_awc_csv(fh)
            observations += obs
            rep = rep.merge(r)
    else:
        with _open_text(args.stations) as fh:
            table = metar.read_station_table(fh)
        reference = args.window[0] if args.window else datetime.now().astimezone()
        for path in args.input:
            with _open_text(path) as fh:
                partial, r1 = metar.parse_metar_lines(fh, reference)
            located, r2 = metar.join_locations(partial, table)
            observations += located
            rep = rep.merge(r1)
            rep.skipped_count += r2.skipped_count
            rep.skip_reasons += r2.skip_reasons
            rep.accepted_count -= r2.skipped_count

    kept = metar.filter_observations(observations, args.bbox, args.window)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "observations.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        metar.write_observations_csv(kept, fh)
    print(f"ingest: accepted {rep.accepted_count}, skipped {rep.skipped_count}, "
          f"kept {len(kept)} after box/window filter", file=sys.stderr)
    for number, reason in rep.skip_reasons:
        print(f"  record {number}: {reason}", file=sys.stderr)
    print(out)
    return 0


def cmd_scene(args):
    with _open_text(args.input) as fh:
        observations, rep = metar.parse_awc_csv(fh)
    if rep.skipped_count:
        print(f"scene: {rep.skipped_count} observation rows skipped", file=sys.stderr)
    sites, scene = build_scene(observations, args.quantity)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / f"scene_{args.quantity.value}.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        write_scene_csv(sites, scene.values, fh)
    print(f"scene: {len(sites)} sites, quantity {args.quantity.value}", file=sys.stderr)
    print(out)
    return 0


def _load_scene(path, quantity=None):
    with _open_text(path) as fh:
        return read_scene_csv(fh, quantity)


def cmd_basis(args):
    if not args.threshold_mi > 0:
        raise ArgumentError(f"--threshold-mi must be positive, got {args.threshold_mi}")
    sites, _ = _load_scene(args.input)
    graph = geo_graph.build_graph(sites, args.threshold_mi)
    H = geo_graph.laplacian(graph)
    count, _ = geo_graph.connected_components(graph)
    basis = spectral.eigendecompose(H, sites, args.threshold_mi, method=args.solver)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "basis.gsb"
    size = persistence.save_basis(basis, sites, out)
    lam2 = basis.eigenvalues[1] if basis.n > 1 else float("nan")
    head = ", ".join(report.fmt_float(v) for v in basis.eigenvalues[:10])
    print(f"n = {basis.n}")
    print(f"edges = {graph.edge_count}")
    print(f"components = {count}")
    print(f"lambda_2 = {lam2:.17g}")
    print(f"eigenvalues[:10] = {head}")
    print(f"wrote {out} ({size} bytes)", file=sys.stderr)
    return 0


def _scene_and_basis(args):
    basis, basis_sites = persistence.load_basis(args.basis)
    sites, scene = _load_scene(args.input, args.quantity)
    if sites.fingerprint != basis_sites.fingerprint:
        raise CompatibilityError(
            "scene sites differ from the sites the basis was built on",
            expected=basis_sites.fingerprint, actual=sites.fingerprint)
    return basis, sites, scene


def cmd_analyze(args):
    basis, sites, scene = _scene_and_basis(args)
    coeffs = compress.analyze(basis, scene)
    k_list = sorted({k for k in args.k_list if k <= basis.n})
    dropped = sorted(set(args.k_list) - set(k_list))
    if dropped:
        print(f"analyze: k values above n = {basis.n} dropped: {dropped}", file=sys.stderr)
    curve = compress.compressibility_curve(coeffs, k_list)
    count = min(args.dominant, basis.n)
    dom = compress.dominant_vectors(coeffs, count) if count > 0 else []

    args.out_dir.mkdir(parents=True, exist_ok=True)
    report.export_curve_csv(curve, args.out_dir / "curve.csv")
    meta = {"quantity": args.quantity, "n_sites": basis.n, "threshold_mi": basis.threshold_mi,
            "site_fingerprint": basis.site_fingerprint}
    dominant = [(i, basis.eigenvalues[i], coeffs.coeffs[i]) for i in dom]
    report.export_summary_json(meta, curve, dominant, None, args.out_dir / "summary.json")
    if dom:
        report.export_dominant_geojson(basis, sites, dom, args.out_dir / "dominant.geojson",
                                       args.display_fraction, coeffs.coeffs)
    for k, level in curve.points:
        print(f"K = {k}\tL = {level:.6f}")
    return 0


def cmd_reconstruct(args):
    basis, sites, scene = _scene_and_basis(args)
    coeffs = compress.analyze(basis, scene)
    sparse = compress.top_k(coeffs, args.k)
    x = scene.values
    if args.quantity.categorical:
        x_hat = compress.reconstruct_categorical(basis, sparse, float(np.linalg.norm(x)))
        stats = compress.classification_stats(x, x_hat).to_dict()
    else:
        x_hat = compress.synthesize(basis, sparse)
        thresholds = args.thresholds if args.thresholds is not None else DEFAULT_THRESHOLDS[args.quantity]
        stats = compress.reconstruction_error_stats(x, x_hat, thresholds).to_dict()
    stats = {"quantity": args.quantity.value, "k": args.k, "n_sites": basis.n,
             "level": compress.compressibility_level(coeffs, args.k) if coeffs.total_energy > 0 else None,
             **stats}

    args.out_dir.mkdir(parents=True, exist_ok=True)
    err = np.abs(x - x_hat)
    with open(args.out_dir / "reconstruction.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("station_id,latitude,longitude,value,reconstruction,abs_error\n")
        for (sid, lat, lon), a, b, e in zip(sites.entries, x, x_hat, err):
            fh.write(",".join([sid] + [format(float(v), ".17g") for v in (lat, lon, a, b, e)]) + "\n")
    report.export_scene_geojson(sites, err, args.out_dir / "reconstruction_error.geojson", "abs_error")
    (args.out_dir / "error_stats.json").write_text(report.dumps(stats) + "\n", encoding="utf-8")
    print(report.dumps(stats))
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "scene": cmd_scene,
    "basis": cmd_basis,
    "analyze": cmd_analyze,
    "reconstruct": cmd_reconstruct,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"wxcompress: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CompatibilityError as exc:
        print(f"wxcompress: error: {exc}", file=sys.stderr)
        if exc.expected is not None:
            print(f"  basis fingerprint: {exc.expected.hex()}", file=sys.stderr)
            print(f"  scene fingerprint: {exc.actual.hex()}", file=sys.stderr)
        return exc.exit_code
    except WxError as exc:
        print(f"wxcompress: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"wxcompress: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
