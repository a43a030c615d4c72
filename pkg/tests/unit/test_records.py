import math
import random
from collections import Counter

import pytest

from idlewatch.core import AgencyInfo, DetectorParams, FeedSnapshot, Rejection, validate_record
from idlewatch.enums import RejectReason
from tests.utils.builders import T0, event, record


def test_valid_record_passes_through():
    rec = record(latitude=40.7625617980957, longitude=-74.00098419189453)

    assert validate_record(rec) is rec


def _random_record(rng: random.Random):
    def coordinate(bound: float) -> float:
        return rng.choice([rng.uniform(-bound - 10, bound + 10), bound, -bound, 0.0, math.nan, math.inf])

    return record(
        rng.choice(["", "v1", "MTA NYCT_9750"]),
        coordinate(90.0),
        coordinate(180.0),
        route_id=rng.choice([None, "", "M42"]),
        trip_id=rng.choice([None, "", "T1"]),
        timestamp=rng.choice([-5, 0, T0, rng.randint(1, 2**40)]),
    )


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_accepted_records_hold_every_invariant(seed):
    rng = random.Random(seed)
    outcomes: Counter[bool] = Counter()

    for _ in range(2000):
        rec = _random_record(rng)
        result = validate_record(rec)
        outcomes[bool(result)] += 1

        if not result:
            assert validate_record(rec) == result
            continue
        assert result is rec
        assert validate_record(result) is rec
        assert -90.0 <= rec.latitude <= 90.0 and rec.latitude != 0.0
        assert -180.0 <= rec.longitude <= 180.0 and rec.longitude != 0.0
        assert rec.vehicle_id
        assert rec.route_id or rec.trip_id
        assert rec.timestamp > 0

    assert outcomes[True] and outcomes[False]


@pytest.mark.parametrize(
    ("latitude", "longitude", "reason"),
    [
        (91.0, -74.0, RejectReason.OutOfBoundsLat),
        (-90.5, -74.0, RejectReason.OutOfBoundsLat),
        (math.nan, -74.0, RejectReason.OutOfBoundsLat),
        (40.7, 180.5, RejectReason.OutOfBoundsLon),
        (0.0, -74.0, RejectReason.ZeroCoordinate),
        (40.7, 0.0, RejectReason.ZeroCoordinate),
    ],
)
def test_coordinate_rejections(latitude, longitude, reason):
    result = validate_record(record(latitude=latitude, longitude=longitude))

    assert isinstance(result, Rejection)
    assert result.reason is reason
    assert not result


def test_latitude_checked_before_zero_longitude():
    result = validate_record(record(latitude=95.0, longitude=0.0))

    assert result.reason is RejectReason.OutOfBoundsLat


def test_missing_ids():
    assert validate_record(record(vehicle_id="")).reason is RejectReason.MissingIds
    assert validate_record(record(route_id=None, trip_id=None)).reason is RejectReason.MissingIds
    assert validate_record(record(route_id=None)) == record(route_id=None)
    assert validate_record(record(trip_id=None)) == record(trip_id=None)


@pytest.mark.parametrize("timestamp", [0, -5])
def test_bad_timestamp(timestamp):
    assert validate_record(record(timestamp=timestamp)).reason is RejectReason.BadTimestamp


def test_snapshot_merge_prefers_newer_timestamp():
    older = record("v1", 40.1, -73.1, timestamp=T0)
    newer = record("v1", 40.2, -73.2, timestamp=T0 + 10)

    snap = FeedSnapshot.from_records("r", T0 + 30, [newer, older])

    assert len(snap) == 1
    assert snap.records[("NYC", "v1")] is newer


def test_snapshot_merge_tie_keeps_later_record():
    first = record("v1", 40.1, -73.1)
    second = record("v1", 40.2, -73.2)

    snap = FeedSnapshot.from_records("r", T0, [first, second])

    assert snap.records[("NYC", "v1")] is second


def test_same_vehicle_id_in_two_agencies_is_two_records():
    snap = FeedSnapshot.from_records("r", T0, [record("v1"), record("v1", iata_id="BOS")])

    assert set(snap.records) == {("NYC", "v1"), ("BOS", "v1")}


def test_snapshot_is_read_only():
    snap = FeedSnapshot.from_records("r", T0, [record()], rejected=Counter({RejectReason.MissingIds: 2}))

    with pytest.raises(TypeError):
        snap.records[("NYC", "v2")] = record("v2")  # type: ignore[index]
    assert snap.rejected[RejectReason.MissingIds] == 2


def test_event_row_order_and_sort_key():
    ev = event(datetime=T0 + 5)

    assert list(ev.as_row()) == [
        "iata_id",
        "vehicle_id",
        "route_id",
        "trip_id",
        "latitude",
        "longitude",
        "datetime",
        "duration",
    ]
    assert ev.sort_key == (T0 + 5, "NYC", "v1")
    assert ev == event(datetime=T0 + 5)


@pytest.mark.parametrize("kwargs", [{"r": 0}, {"h": 0}, {"m": -1}, {"r": 1.5}, {"h": True}, {"epsilon": -0.1}])
def test_detector_params_validation(kwargs):
    with pytest.raises(ValueError):
        DetectorParams(**kwargs)


def test_detector_params_derived_values():
    params = DetectorParams(r=30, h=2, m=5)

    assert params.window == 4
    assert params.min_duration == 90


def test_agency_info_requires_iata_code():
    with pytest.raises(ValueError):
        AgencyInfo("nyc", "MTA", "New York", "United States", "United States East", "North America")
