import csv
import json
import math

import numpy as np
import pytest

from wxcompress.cli import main
from wxcompress.geo_graph import EARTH_RADIUS_MI

HEADER = "station_id,observation_time,latitude,longitude,temp_c,visibility_statute_mi,flight_category\n"


def awc_file(path, n=40, seed=5, hour=17):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        lat, lon = rng.uniform(35, 42), rng.uniform(-105, -90)
        temp = round(0.5 * (lat - 35) + rng.normal(), 1)
        vis = float(rng.choice([0.5, 2, 4, 10, 12]))
        cat = "VFR" if vis > 5 else "IFR"
        rows.append(f"K{i:03d},2021-01-18T{hour}:{i % 60:02d}:00Z,{lat:.4f},{lon:.4f},{temp},{vis},{cat}\n")
    path.write_text(HEADER + "".join(rows))
    return path


@pytest.fixture
def pipeline(tmp_path):
    src = awc_file(tmp_path / "awc.csv")
    out = tmp_path / "out"
    assert main(["ingest", "--input", str(src), "--out-dir", str(out)]) == 0
    return tmp_path, out


def run_scene(out, quantity):
    assert main(["scene", "--input", str(out / "observations.csv"), "--quantity", quantity,
                 "--out-dir", str(out)]) == 0
    return out / f"scene_{quantity}.csv"


def run_basis(scene, out, threshold="150"):
    return main(["basis", "--input", str(scene), "--threshold-mi", threshold, "--out-dir", str(out)])


def test_ingest_counts(pipeline, capsys):
    _, out = pipeline
    with open(out / "observations.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 40


def test_ingest_all_malformed(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text(HEADER + "A,2021-01-18T17:00:00Z,x,1,,,\nB,nope,1,1,,,\n")
    assert main(["ingest", "--input", str(src), "--out-dir", str(tmp_path)]) == 0
    err = capsys.readouterr().err
    assert "skipped 2" in err and "record 1" in err and "record 2" in err
    assert (tmp_path / "observations.csv").read_text().count("\n") == 1


def test_ingest_metar_text_requires_stations(tmp_path, capsys):
    src = tmp_path / "m.txt"
    src.write_text("KSEA 181753Z 10SM CLR 05/01\n")
    assert main(["ingest", "--input", str(src), "--format", "metar-text"]) == 2
    assert "--stations" in capsys.readouterr().err


def test_ingest_metar_text(tmp_path, capsys):
    src = tmp_path / "m.txt"
    src.write_text("KDEN 181753Z 10SM CLR 05/01\nKXXX 181753Z 10SM CLR 05/01\ngarbage line\n")
    st = tmp_path / "st.csv"
    st.write_text("station_id,latitude,longitude\nKDEN,39.86,-104.67\n")
    code = main(["ingest", "--input", str(src), "--format", "metar-text", "--stations", str(st),
                 "--window", "2021-01-18T17:00:00Z,2021-01-18T18:00:00Z", "--out-dir", str(tmp_path)])
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "observations.csv")))
    assert [r["station_id"] for r in rows] == ["KDEN"]
    assert rows[0]["observation_time"] == "2021-01-18T17:53:00Z"
    err = capsys.readouterr().err
    assert "accepted 1, skipped 2" in err and "unknown station" in err


def test_ingest_bad_bbox_and_missing_file(tmp_path):
    assert main(["ingest", "--input", "x.csv", "--bbox", "45,25,-120,-70"]) == 2
    assert main(["ingest", "--input", str(tmp_path / "missing.csv"), "--out-dir", str(tmp_path)]) == 3
    bad = tmp_path / "h.csv"
    bad.write_text("station_id,latitude\nA,1\n")
    assert main(["ingest", "--input", str(bad), "--out-dir", str(tmp_path)]) == 4


def test_scene_quantities(pipeline):
    _, out = pipeline
    rows = list(csv.DictReader(open(run_scene(out, "flight-category"))))
    assert {r["value"] for r in rows} <= {"0", "1"}
    rows = list(csv.DictReader(open(run_scene(out, "visibility-reduction"))))
    vals = [float(r["value"]) for r in rows]
    assert min(vals) >= 0 and max(vals) <= 10 and 0.0 in vals


def test_scene_visibility_12_is_zero(tmp_path):
    src = tmp_path / "a.csv"
    src.write_text(HEADER + "KAAA,2021-01-18T17:00:00Z,40,-100,,12,VFR\n")
    assert main(["scene", "--input", str(src), "--quantity", "visibility-reduction", "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "scene_visibility-reduction.csv")))
    assert float(rows[0]["value"]) == 0.0


def test_scene_empty_exit_5(tmp_path):
    src = tmp_path / "a.csv"
    src.write_text(HEADER + "KAAA,2021-01-18T17:00:00Z,40,-100,,10,VFR\n")
    assert main(["scene", "--input", str(src), "--quantity", "temperature", "--out-dir", str(tmp_path)]) == 5


def test_basis_path3(tmp_path, capsys):
    step = math.degrees(50 / EARTH_RADIUS_MI)
    scene = tmp_path / "s.csv"
    scene.write_text("station_id,latitude,longitude,value\n"
                     f"A,40,-100,1\nB,{40 + step!r},-100,2\nC,{40 + 2 * step!r},-100,3\n")
    assert main(["basis", "--input", str(scene), "--threshold-mi", "70", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "n = 3" in out and "edges = 2" in out and "components = 1" in out
    line = [l for l in out.splitlines() if l.startswith("eigenvalues")][0]
    vals = [float(v) for v in line.split("=")[1].split(",")]
    np.testing.assert_allclose(vals, [0, 1, 3], atol=1e-8)


def test_basis_threshold_zero(tmp_path):
    assert main(["basis", "--input", "whatever.csv", "--threshold-mi", "0"]) == 2


def test_basis_deterministic(pipeline):
    _, out = pipeline
    scene = run_scene(out, "temperature")
    assert run_basis(scene, out) == 0
    first = (out / "basis.gsb").read_bytes()
    assert run_basis(scene, out) == 0
    assert (out / "basis.gsb").read_bytes() == first


def test_analyze(pipeline, capsys):
    _, out = pipeline
    scene = run_scene(out, "temperature")
    run_basis(scene, out)
    code = main(["analyze", "--input", str(scene), "--basis", str(out / "basis.gsb"), "--k-list", "10,20,30",
                 "--dominant", "6", "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.reader(open(out / "curve.csv")))
    levels = [float(r[1]) for r in rows[1:]]
    assert len(levels) == 3 and levels == sorted(levels)
    summary = json.loads((out / "summary.json").read_text())
    assert [l["k"] for l in summary["levels"]] == [10, 20, 30]
    assert len(summary["dominant"]) == 6 and summary["error_stats"] is None
    dom = json.loads((out / "dominant.geojson").read_text())
    assert len(dom["overlays"]) == 6
    assert len({f["properties"]["basis_index"] for f in dom["features"]}) == 6
    before = {p: (out / p).read_bytes() for p in ("curve.csv", "summary.json", "dominant.geojson")}
    main(["analyze", "--input", str(scene), "--basis", str(out / "basis.gsb"), "--k-list", "10,20,30",
          "--dominant", "6", "--out-dir", str(out)])
    assert before == {p: (out / p).read_bytes() for p in before}


def test_analyze_fingerprint_mismatch(tmp_path, capsys):
    a = awc_file(tmp_path / "a.csv", n=20, seed=1)
    b = awc_file(tmp_path / "b.csv", n=20, seed=2)
    for name, src in (("a", a), ("b", b)):
        d = tmp_path / name
        main(["ingest", "--input", str(src), "--out-dir", str(d)])
        run_scene(d, "temperature")
    run_basis(tmp_path / "a" / "scene_temperature.csv", tmp_path / "a")
    capsys.readouterr()
    code = main(["analyze", "--input", str(tmp_path / "b" / "scene_temperature.csv"),
                 "--basis", str(tmp_path / "a" / "basis.gsb"), "--out-dir", str(tmp_path)])
    assert code == 7
    err = capsys.readouterr().err
    assert "basis fingerprint" in err and "scene fingerprint" in err


def test_reconstruct_temperature_full(pipeline):
    _, out = pipeline
    scene = run_scene(out, "temperature")
    run_basis(scene, out)
    n = sum(1 for _ in open(scene)) - 1
    assert main(["reconstruct", "--input", str(scene), "--basis", str(out / "basis.gsb"), "--k", str(n),
                 "--out-dir", str(out)]) == 0
    stats = json.loads((out / "error_stats.json").read_text())
    assert stats["max_abs_error"] <= 1e-8
    assert [w["threshold"] for w in stats["within"]] == [2.0, 5.0]
    assert all(w["fraction"] == 1.0 for w in stats["within"])


def test_reconstruct_temperature_sparse(pipeline):
    _, out = pipeline
    scene = run_scene(out, "temperature")
    run_basis(scene, out)
    assert main(["reconstruct", "--input", str(scene), "--basis", str(out / "basis.gsb"), "--k", "5",
                 "--thresholds", "1,3", "--out-dir", str(out)]) == 0
    stats = json.loads((out / "error_stats.json").read_text())
    assert [w["threshold"] for w in stats["within"]] == [1.0, 3.0]
    rows = list(csv.DictReader(open(out / "reconstruction.csv")))
    errs = [float(r["abs_error"]) for r in rows]
    assert max(errs) == pytest.approx(stats["max_abs_error"])


def test_reconstruct_categorical_full(pipeline):
    _, out = pipeline
    scene = run_scene(out, "flight-category")
    run_basis(scene, out)
    n = sum(1 for _ in open(scene)) - 1
    assert main(["reconstruct", "--input", str(scene), "--basis", str(out / "basis.gsb"), "--k", str(n),
                 "--quantity", "flight-category", "--out-dir", str(out)]) == 0
    stats = json.loads((out / "error_stats.json").read_text())
    assert stats["accuracy"] == 1.0


def test_bad_quantity_and_help(capsys):
    assert main(["scene", "--input", "x", "--quantity", "pressure"]) == 2
    assert main(["--help"]) == 0
