"""File exports: compressibility curves, GeoJSON overlays and run summaries.

All floats are written with 17 significant digits so every export is a
byte-stable, exactly round-tripping function of its inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArgumentError

DEFAULT_DISPLAY_FRACTION = 0.25


def fmt_float(v) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ArgumentError(f"cannot export non-finite value {v}")
    text = format(v, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj, indent=2, _level=0) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(destination, text: str):
    Path(destination).write_text(text, encoding="utf-8", newline="")


def export_curve_csv(curve, destination):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["K", "level"])
    for k, level in curve.points:
        w.writerow([int(k), format(float(level), ".17g")])
    _write_text(destination, buf.getvalue())


def read_curve_csv(source):
    with open(source, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return [(int(k), float(v)) for k, v in rows[1:]]


def _point(lat, lon, properties):
    return {
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [float(lon), float(lat)]},
        "properties": properties,
    }


def scene_geojson(sites, values, value_name="value") -> dict:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (len(sites),):
        raise ArgumentError(f"{values.shape} values for {len(sites)} sites")
    features = [_point(lat, lon, {"station_id": sid, value_name: float(v)})
                for (sid, lat, lon), v in zip(sites.entries, values)]
    return {"type": "FeatureCollection", "features": features}


def export_scene_geojson(sites, values, destination, value_name="value"):
    _write_text(destination, dumps(scene_geojson(sites, values, value_name)) + "\n")


@dataclass(frozen=True)
class DominantVectorOverlay:
    basis_index: int
    eigenvalue: float
    rank: int
    entries: tuple  # (station_id, lat, lon, component, display_class)


def display_classes(vector, display_fraction=DEFAULT_DISPLAY_FRACTION):
    """'positive' / 'negative' for entries at or above the display threshold
    (a fraction of the vector's largest magnitude), 'suppressed' otherwise."""
    if not 0 < display_fraction <= 1:
        raise ArgumentError(f"display fraction must be in (0, 1], got {display_fraction}")
    v = np.asarray(vector, dtype=np.float64)
    cut = display_fraction * np.abs(v).max() if v.size else 0.0
    out = []
    for c in v:
        if abs(c) < cut or c == 0:
            out.append("suppressed")
        else:
            out.append("positive" if c > 0 else "negative")
    return out


def dominant_overlays(basis, sites, indices, display_fraction=DEFAULT_DISPLAY_FRACTION):
    overlays = []
    for rank, k in enumerate(indices):
        if int(k) != k or not 0 <= k < basis.n:
            raise ArgumentError(f"basis index {k} out of range for n = {basis.n}")
        vec = basis.eigenvectors[:, int(k)]
        classes = display_classes(vec, display_fraction)
        entries = tuple((sid, lat, lon, float(c), cls)
                        for (sid, lat, lon), c, cls in zip(sites.entries, vec, classes))
        overlays.append(DominantVectorOverlay(int(k), float(basis.eigenvalues[int(k)]), rank, entries))
    return overlays


def dominant_geojson(basis, sites, indices, display_fraction=DEFAULT_DISPLAY_FRACTION, coefficients=None):
    """One FeatureCollection; each feature carries its overlay's ``basis_index``."""
    features = []
    overlays = dominant_overlays(basis, sites, indices, display_fraction)
    for ov in overlays:
        for sid, lat, lon, comp, cls in ov.entries:
            props = {
                "basis_index": ov.basis_index,
                "rank": ov.rank,
                "eigenvalue": ov.eigenvalue,
                "station_id": sid,
                "component": comp,
                "display_class": cls,
            }
            features.append(_point(lat, lon, props))
    overlay_meta = []
    for ov in overlays:
        meta = {"basis_index": ov.basis_index, "rank": ov.rank, "eigenvalue": ov.eigenvalue}
        if coefficients is not None:
            meta["coefficient"] = float(coefficients[ov.basis_index])
        overlay_meta.append(meta)
    return {
        "type": "FeatureCollection",
        "display_fraction": float(display_fraction),
        "overlays": overlay_meta,
        "features": features,
    }


def export_dominant_geojson(basis, sites, indices, destination,
                            display_fraction=DEFAULT_DISPLAY_FRACTION, coefficients=None):
    doc = dominant_geojson(basis, sites, indices, display_fraction, coefficients)
    _write_text(destination, dumps(doc) + "\n")


def summary_document(metadata, curve, dominant, error_stats=None) -> dict:
    """``metadata`` needs quantity, n_sites, threshold_mi, site_fingerprint
    (bytes or hex). ``dominant`` is a list of (basis_index, eigenvalue, coefficient)."""
    fp = metadata["site_fingerprint"]
    return {
        "quantity": str(getattr(metadata["quantity"], "value", metadata["quantity"])),
        "n_sites": int(metadata["n_sites"]),
        "threshold_mi": float(metadata["threshold_mi"]),
        "site_fingerprint": fp.hex() if isinstance(fp, (bytes, bytearray)) else str(fp),
        "levels": [{"k": int(k), "level": float(level)} for k, level in curve.points],
        "dominant": [{"basis_index": int(i), "eigenvalue": float(lam), "coefficient": float(c)}
                     for i, lam, c in dominant],
        "error_stats": error_stats,
    }


def export_summary_json(metadata, curve, dominant, error_stats, destination):
    _write_text(destination, dumps(summary_document(metadata, curve, dominant, error_stats)) + "\n")
