import zipfile

import numpy as np
import pytest

from idlewatch.audit import RouteShape, ShapeIndex, load_gtfs_static
from idlewatch.audit.gtfs_static import route_shapes
from tests.utils.builders import write_gtfs

LINE = [(40.75, -74.0 + k / 100) for k in range(5)]


def _bundle(tmp_path):
    return write_gtfs(
        tmp_path / "nyc",
        {"S1": LINE, "S2": [(40.80, -73.95), (40.81, -73.95)], "bad": [(40.7, -73.9)]},
        [("M42", "T1", "S1"), ("M42", "T2", "S2"), ("BX9", "T3", "S2"), ("M7", "T4", "")],
    )


def test_load_directory_and_order_points(tmp_path):
    directory = _bundle(tmp_path)
    shapes_txt = directory / "shapes.txt"
    lines = shapes_txt.read_text().splitlines()
    shapes_txt.write_text("\n".join([lines[0], *reversed(lines[1:])]) + "\n")

    shapes = {s.shape_id: s for s in route_shapes(load_gtfs_static(directory))}

    assert sorted(shapes) == ["S1", "S2"]
    assert shapes["S1"].points.tolist() == [list(p) for p in LINE]


def test_load_zip_with_nested_folder(tmp_path):
    directory = _bundle(tmp_path)
    archive = tmp_path / "gtfs.zip"
    with zipfile.ZipFile(archive, "w") as z:
        for name in ("routes.txt", "trips.txt", "shapes.txt"):
            z.write(directory / name, f"google_transit/{name}")

    static = load_gtfs_static(archive)

    assert set(static.routes["route_id"]) == {"M42", "BX9", "M7"}
    assert len(static.shapes) == len(LINE) + 3


def test_zip_without_shapes_is_rejected(tmp_path):
    directory = _bundle(tmp_path)
    archive = tmp_path / "gtfs.zip"
    with zipfile.ZipFile(archive, "w") as z:
        z.write(directory / "routes.txt", "routes.txt")
        z.write(directory / "trips.txt", "trips.txt")

    with pytest.raises(ValueError, match="shapes.txt"):
        load_gtfs_static(archive)


def test_missing_columns_are_rejected(tmp_path):
    directory = _bundle(tmp_path)
    (directory / "trips.txt").write_text("route_id,trip_id\nM42,T1\n")

    with pytest.raises(ValueError, match="shape_id"):
        load_gtfs_static(directory)


def test_route_shape_validation():
    with pytest.raises(ValueError):
        RouteShape("one", np.array([[40.7, -73.9]]))
    with pytest.raises(ValueError):
        RouteShape("far", np.array([[91.0, -73.9], [40.7, -73.9]]))


def test_candidates_prefer_route_then_trip(tmp_path):
    index = ShapeIndex.build("NYC", load_gtfs_static(_bundle(tmp_path)))

    assert len(index) == 2
    assert index.candidates("NYC", "M42", "T9") == ["NYC:S1", "NYC:S2"]
    assert index.candidates("NYC", None, "T3") == ["NYC:S2"]
    assert index.candidates("NYC", "unknown", "T1") == ["NYC:S1"]
    assert index.candidates("NYC", "M7", "T4") == []
    assert index.candidates("BOS", "M42", "T1") == []


def test_combined_indexes_keep_agencies_apart(tmp_path):
    nyc = ShapeIndex.build("NYC", load_gtfs_static(_bundle(tmp_path)))
    jer = ShapeIndex.build(
        "JER",
        load_gtfs_static(write_gtfs(tmp_path / "jer", {"S1": [(40.72, -74.05), (40.73, -74.05)]}, [("M42", "J1", "S1")])),
    )

    merged = ShapeIndex.combine([nyc, jer])

    assert len(merged) == 3
    assert merged.candidates("JER", "M42", None) == ["JER:S1"]
    assert merged.candidates("NYC", "M42", None) == ["NYC:S1", "NYC:S2"]
