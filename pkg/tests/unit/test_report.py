import json
from itertools import islice

import pandas as pd
import pytest

from idlewatch.audit import AuditReport, ShapeIndex, load_gtfs_static, read_operations, render_text, run_battery
from idlewatch.audit.report import spatial_numbers, write_report
from idlewatch.database import EXPORT_COLUMNS
from idlewatch.exceptions import AuditError
from tests.utils.builders import LON, T0, event, export_row, write_export, write_gtfs

FIXED = [*range(1, 39), *range(105, 114)]


def _clean_rows():
    rows = []
    for k in range(6):
        rows += [export_row(event(f"v{k}", datetime=T0 + 30 * k, duration=d)) for d in (60, 90)]
    rows += [export_row(event("l1", iata_id="LON", route_id="25", latitude=51.5, longitude=-0.12, datetime=T0))]
    return rows


@pytest.fixture()
def indexes(tmp_path) -> dict[str, ShapeIndex]:
    nyc = write_gtfs(tmp_path / "nyc", {"S1": [(40.75, -73.99), (40.75, -73.98), (40.75, -73.97)]}, [("M42", "T1", "S1")])
    lon = write_gtfs(tmp_path / "lon", {"L25": [(51.5, -0.13), (51.5, -0.12), (51.5, -0.11)]}, [("25", "L1", "L25")])
    return {"NYC": ShapeIndex.build("NYC", load_gtfs_static(nyc)), "LON": ShapeIndex.build("LON", load_gtfs_static(lon))}


def test_clean_export_passes_every_validity_test(tmp_path):
    report = run_battery(write_export(tmp_path / "events.csv", _clean_rows()))

    assert report.rows == 13
    assert not report.errors
    assert report.failed == []
    assert [e.number for e in report.entries] == FIXED
    assert all(report.entry(n).passed for n in range(1, 17))
    assert all(report.entry(n).passed for n in (*range(31, 37), 105, 106, 110, 111))


def test_route_and_trip_missingness_is_informational(tmp_path):
    report = run_battery(write_export(tmp_path / "events.csv", _clean_rows()))

    names = {e.number: e.name for e in report.entries if 17 <= e.number <= 30}
    assert names[24] == "route_id missing"
    assert names[25] == "trip_id missing"
    assert names[26] == "route_id | trip_id missing"
    assert report.entry(24).passed is report.entry(25).passed is None
    assert report.entry(26).passed is True


def test_corrupted_file_fails_exactly_duplication_and_latitude(tmp_path):
    rows = _clean_rows()
    rows.append(dict(rows[0]))
    rows[3] = {**rows[3], "latitude": 95.0}

    report = run_battery(write_export(tmp_path / "events.csv", rows))

    assert [e.number for e in report.failed] == [16, 32]
    assert report.value(16) == pytest.approx(100 / 14)
    assert report.value(32) == pytest.approx(100 / 14)
    assert "FAIL" in render_text(report)


def test_spatial_entries_follow_regions_then_cities(tmp_path, indexes):
    report = run_battery(write_export(tmp_path / "events.csv", _clean_rows()), indexes)

    spatial = [(e.number, e.scope, e.subject) for e in report.entries if 39 <= e.number <= 104]
    assert spatial == [
        (39, "city", LON.city),
        (40, "region", "Europe"),
        (41, "region", "Europe"),
        (42, "city", "New York"),
        (43, "region", "United States East"),
        (44, "region", "United States East"),
    ]
    assert report.value(37) == report.value(38) == 0.0
    assert len(report.sweep) == 101
    assert report.excluded == {}


def test_spatial_numbers_continue_after_fixed_tests():
    numbers = list(islice(spatial_numbers(), 68))

    assert numbers[0] == 39
    assert numbers[65] == 104
    assert numbers[66:] == [114, 115]


def test_missing_gtfs_is_reported_as_excluded(tmp_path, indexes):
    report = run_battery(write_export(tmp_path / "events.csv", _clean_rows()), {"NYC": indexes["NYC"]})

    assert report.excluded == {"London": "no GTFS static bundle for LON"}
    assert [e.subject for e in report.entries if e.scope == "city"] == ["New York"]


def test_header_only_export(tmp_path):
    report = run_battery(write_export(tmp_path / "events.csv", []))

    assert report.zero_rows
    assert not report.errors
    assert report.failed == []
    assert report.value(37) is None


def test_empty_file_reports_errors_and_keeps_numbering(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("")

    report = run_battery(path)

    assert report.zero_rows
    assert {"types", "missingness", "geobounds", "temporal", "duration"} <= set(report.errors)
    assert [e.number for e in report.entries] == FIXED
    assert report.entry(2).passed is False


def test_foreign_header_fails_type_tests(tmp_path):
    header = [*EXPORT_COLUMNS[:-1], "seconds"]
    rows = [{**row, "seconds": row["duration"]} for row in _clean_rows()]

    report = run_battery(write_export(tmp_path / "events.csv", rows, header))

    assert "SchemaMismatch" in report.errors["types"]
    assert all(report.entry(n).passed is False for n in range(1, 15))
    assert report.entry(15).passed


def test_operations_feed_idle_share(tmp_path):
    rows = [export_row(event("v1", datetime=T0, duration=d)) for d in range(60, 2401, 30)]
    ops = tmp_path / "ops.csv"
    ops.write_text("iata_id,vehicle_id,seconds\nNYC,v1,3600\nNYC,v1,2400\n")

    report = run_battery(write_export(tmp_path / "events.csv", rows), operations=read_operations(ops))

    assert report.value(112) == pytest.approx(40.0)
    assert report.value(113) == pytest.approx(40.0)


def test_operations_file_needs_its_columns(tmp_path):
    ops = tmp_path / "ops.csv"
    ops.write_text("iata_id,vehicle\nNYC,v1\n")

    with pytest.raises(AuditError, match="seconds"):
        read_operations(ops)


def test_write_report(tmp_path, indexes):
    report = run_battery(write_export(tmp_path / "events.csv", _clean_rows()), indexes)

    paths = write_report(report, tmp_path / "out")

    assert AuditReport.model_validate(json.loads(paths["json"].read_text())) == report
    assert paths["text"].read_text().startswith(f"Audit of {tmp_path / 'events.csv'}: 13 rows")
    sweep = pd.read_csv(paths["sweep"])
    assert list(sweep.columns) == ["d_m", "unweighted", "weighted"]
    assert len(sweep) == 101
