import math
import random

import numpy as np
import pandas as pd
import pytest

from idlewatch.audit import ShapeIndex, audit_spatial, event_distances, load_gtfs_static, meters_to_degrees
from idlewatch.audit import spatial_point_error, threshold_sweep
from idlewatch.exceptions import DegenerateLatitude, NoMapping
from tests.utils.builders import BOS, LON, event, export_frame, export_row, write_gtfs

NYC_LINE = [(40.75, -74.0 + k / 1000) for k in range(101)]
BOS_LINE = [(42.35, -71.10 + k / 1000) for k in range(51)]


@pytest.fixture()
def nyc_index(tmp_path) -> ShapeIndex:
    bundle = write_gtfs(
        tmp_path / "nyc",
        {"S1": NYC_LINE, "S2": [(40.80, -73.95 + k / 1000) for k in range(20)]},
        [("M42", "T1", "S1"), ("BX9", "T2", "S2")],
    )
    return ShapeIndex.build("NYC", load_gtfs_static(bundle))


@pytest.fixture()
def bos_index(tmp_path) -> ShapeIndex:
    bundle = write_gtfs(tmp_path / "bos", {"B1": BOS_LINE}, [("216", "60487628", "B1")])
    return ShapeIndex.build("BOS", load_gtfs_static(bundle))


def _frame(*events, agency=None):
    return export_frame(export_row(e, agency) for e in events)


def _brute_force_error(frame: pd.DataFrame, index: ShapeIndex, d_m: float) -> float:
    distances, latitudes = [], []
    for row in frame.itertuples(index=False):
        keys = index.candidates(row.iata_id, row.route_id or None, row.trip_id or None)
        if not keys:
            continue
        best = math.inf
        for key in keys:
            for lat, lon in index.points[key]:
                best = min(best, math.hypot(row.latitude - lat, row.longitude - lon))
        distances.append(best)
        latitudes.append(row.latitude)
    threshold = d_m / (111_320 * math.cos(math.radians(sum(latitudes) / len(latitudes))))
    return 100 * sum(d > threshold for d in distances) / len(distances)


@pytest.mark.parametrize(("d_m", "phi", "expected"), [(25, 0, 25 / 111_320), (25, 60, 50 / 111_320), (0, 40, 0.0)])
def test_meters_to_degrees(d_m, phi, expected):
    assert meters_to_degrees(d_m, phi) == pytest.approx(expected)


@pytest.mark.parametrize("phi", [90, -90, 95, float("nan")])
def test_meters_to_degrees_rejects_degenerate_latitudes(phi):
    with pytest.raises(DegenerateLatitude):
        meters_to_degrees(25, phi)


def test_events_on_and_off_route(nyc_index):
    frame = _frame(
        event("on", latitude=40.7501, longitude=-73.95),
        event("off", latitude=40.755, longitude=-73.95),
        event("trip-only", route_id=None, trip_id="T1", latitude=40.75, longitude=-73.9201),
        event("other-route", route_id="BX9", trip_id=None, latitude=40.7501, longitude=-73.95),
    )

    assert spatial_point_error(frame, nyc_index, 25) == pytest.approx(50.0)


def test_unmapped_events_leave_the_denominator(nyc_index):
    frame = _frame(
        event("on", latitude=40.75, longitude=-73.95),
        event("nowhere", route_id="Q99", trip_id="X1", latitude=40.9, longitude=-73.5),
    )

    distances = event_distances(frame, nyc_index)

    assert (distances.n, distances.unmapped) == (1, 1)
    assert distances.error_pct(25) == 0.0


def test_no_mappable_event_is_no_mapping(nyc_index):
    frame = _frame(event("nowhere", route_id="Q99", trip_id=None))

    with pytest.raises(NoMapping):
        spatial_point_error(frame, nyc_index)


@pytest.mark.parametrize("seed", range(5))
def test_matches_brute_force(nyc_index, seed):
    rng = random.Random(seed)
    events = [
        event(
            f"v{k}",
            route_id=rng.choice(["M42", "BX9", None]),
            trip_id=rng.choice(["T1", "T2", None]),
            latitude=40.75 + rng.uniform(-0.01, 0.06),
            longitude=-74.0 + rng.uniform(0, 0.1),
        )
        for k in range(200)
    ]
    frame = _frame(*events)

    for d_m in (0, 5, 25, 80, 400):
        expected = _brute_force_error(frame, nyc_index, d_m)
        assert spatial_point_error(frame, nyc_index, d_m) == pytest.approx(expected, abs=1e-9)


def test_city_region_and_global_averages(nyc_index, bos_index):
    frame = pd.concat(
        [
            _frame(*(event(f"n{k}", latitude=40.75 + (0.001 if k < 1 else 0), longitude=-73.95) for k in range(4))),
            _frame(
                event("b0", iata_id="BOS", route_id="216", latitude=42.35, longitude=-71.09),
                event("b1", iata_id="BOS", route_id="216", latitude=42.36, longitude=-71.09),
                agency=BOS,
            ),
            _frame(event("l0", iata_id="LON", route_id="25"), agency=LON),
        ],
        ignore_index=True,
    )

    audit = audit_spatial(frame, {"NYC": nyc_index, "BOS": bos_index}, 25)

    by_city = {c.city: c for c in audit.cities}
    assert by_city["New York"].error_pct == pytest.approx(25.0)
    assert by_city["Boston"].error_pct == pytest.approx(50.0)
    assert audit.unweighted == pytest.approx(37.5)
    assert audit.weighted == pytest.approx((25.0 * 4 + 50.0 * 2) / 6)
    assert [r.region for r in audit.regions] == ["United States East"]
    assert audit.excluded == {"London": "no GTFS static bundle for LON"}


def test_single_city_weighted_equals_unweighted(nyc_index):
    frame = _frame(event("a", latitude=40.75, longitude=-73.95), event("b", latitude=40.76, longitude=-73.95))

    audit = audit_spatial(frame, {"NYC": nyc_index})

    assert audit.weighted == audit.unweighted == pytest.approx(50.0)


def test_unmappable_city_is_excluded(nyc_index):
    frame = _frame(event("nowhere", route_id="Q99", trip_id=None))

    audit = audit_spatial(frame, {"NYC": nyc_index})

    assert audit.cities == []
    assert "New York" in audit.excluded
    assert audit.unweighted is None and audit.weighted is None


def test_sweep_is_monotone(nyc_index, bos_index):
    rng = random.Random(7)

    def boston(vehicle_id, latitude):
        return event(vehicle_id, iata_id="BOS", route_id="216", latitude=latitude, longitude=-71.09)

    frame = pd.concat(
        [
            _frame(*(event(f"n{k}", latitude=40.75 + rng.uniform(0, 0.002), longitude=-73.95) for k in range(30))),
            _frame(*(boston(f"b{k}", 42.35 + rng.uniform(0, 0.001)) for k in range(10)), agency=BOS),
        ],
        ignore_index=True,
    )
    audit = audit_spatial(frame, {"NYC": nyc_index, "BOS": bos_index})

    sweep = threshold_sweep(audit.distances.values())

    assert sweep["d_m"].tolist() == list(range(101))
    assert np.all(np.diff(sweep["unweighted"]) <= 0)
    assert np.all(np.diff(sweep["weighted"]) <= 0)
    assert sweep.loc[sweep["d_m"] == 25, "unweighted"].item() == pytest.approx(audit.unweighted)


def test_sweep_without_cities_is_nan():
    sweep = threshold_sweep([], [0, 25])

    assert sweep["unweighted"].isna().all()
