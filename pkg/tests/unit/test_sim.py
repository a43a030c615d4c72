import httpx
import pytest
from google.transit import gtfs_realtime_pb2

from idlewatch.exceptions import ScriptError
from idlewatch.extract import decode_feed
from idlewatch.sim import (
    FEED_PATH,
    as_float32,
    create_feed_app,
    encode_feed,
    load_script,
    operational_spans,
    parse_script,
    random_script,
)
from idlewatch.utils.clock import VirtualClock

T0 = 1_706_572_800


def _data(**overrides):
    data = {
        "start_time": T0,
        "tick": 30,
        "vehicles": [
            {
                "vehicle_id": "y0811",
                "iata_id": "BOS",
                "route_id": "216",
                "trip_id": "60487628",
                "waypoints": [[0, 42.25, -71.00], [600, 42.30, -70.90]],
            },
            {
                "vehicle_id": "y0920",
                "iata_id": "NYC",
                "trip_id": "T1",
                "waypoints": [[300, 40.7, -73.9], [900, 40.8, -73.8]],
            },
        ],
        "idle_segments": [{"vehicle_id": "y0811", "start": 120, "length": 95, "latitude": 42.2721, "longitude": -70.9509}],
    }
    data.update(overrides)
    return data


def test_positions_interpolate_and_round_to_float32():
    script = parse_script(_data())

    [rec] = script.state_at(T0 + 60)

    assert rec.vehicle_id == "y0811"
    assert rec.latitude == as_float32(42.255)
    assert rec.longitude == as_float32(-70.99)
    assert rec.timestamp == T0 + 60


def test_positions_change_once_per_tick():
    script = parse_script(_data())

    assert script.state_at(T0 + 61) == script.state_at(T0 + 89) == script.state_at(T0 + 60)


def test_idle_segment_holds_position():
    script = parse_script(_data())
    spot = (as_float32(42.2721), as_float32(-70.9509))

    held = [script.state_at(T0 + t)[0] for t in (120, 150, 180, 210)]

    assert {(r.latitude, r.longitude) for r in held} == {spot}
    assert (script.state_at(T0 + 240)[0].latitude, script.state_at(T0 + 240)[0].longitude) != spot


def test_vehicles_appear_only_within_their_timeline():
    script = parse_script(_data())

    assert script.state_at(T0 - 30) == []
    assert [r.vehicle_id for r in script.state_at(T0 + 300)] == ["y0811", "y0920"]
    assert [r.vehicle_id for r in script.state_at(T0 + 900)] == ["y0920"]
    assert script.state_at(T0 + 930) == []
    assert script.end_time == T0 + 900


def test_state_filters_by_iata():
    script = parse_script(_data())

    assert [r.iata_id for r in script.state_at(T0 + 300, "NYC")] == ["NYC"]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["vehicles"][0].update(iata_id="bos"),
        lambda d: d["vehicles"][0].update(route_id=None, trip_id=None),
        lambda d: d["vehicles"][0].update(waypoints=[[60, 42.2, -71.0], [0, 42.3, -71.0]]),
        lambda d: d["vehicles"][0].update(waypoints=[[0, 0.0, -71.0]]),
        lambda d: d["vehicles"][1].update(vehicle_id="y0811"),
        lambda d: d["idle_segments"].append(
            {"vehicle_id": "ghost", "start": 0, "length": 60, "latitude": 1, "longitude": 1}
        ),
        lambda d: d["idle_segments"].append(
            {"vehicle_id": "y0811", "start": 200, "length": 60, "latitude": 42.0, "longitude": -71.0}
        ),
    ],
)
def test_invalid_scripts_are_rejected(mutate):
    data = _data()
    mutate(data)

    with pytest.raises(ScriptError):
        parse_script(data)


def test_yaml_round_trip(tmp_path):
    script = random_script(11, vehicles=5, ticks=40)
    path = tmp_path / "fleet.yaml"
    path.write_text(script.to_yaml(), encoding="utf-8")

    loaded = load_script(path)

    assert loaded == script
    assert loaded.state_at(T0 + 600) == script.state_at(T0 + 600)


def test_load_script_errors(tmp_path):
    with pytest.raises(ScriptError, match="cannot read"):
        load_script(tmp_path / "absent.yaml")

    broken = tmp_path / "broken.yaml"
    broken.write_text("vehicles: [\n", encoding="utf-8")
    with pytest.raises(ScriptError, match="not valid YAML"):
        load_script(broken)


def test_random_script_is_reproducible():
    assert random_script(5) == random_script(5)
    assert random_script(5) != random_script(6)


def test_operational_spans():
    script = parse_script(_data())

    assert operational_spans(script) == {("BOS", "y0811"): 600, ("NYC", "y0920"): 600}


def test_encoded_feed_decodes_to_script_state():
    script = parse_script(_data())

    decoded = decode_feed(encode_feed(script, T0 + 330), "XXX", T0 + 330)
    expected = script.state_at(T0 + 330)

    assert [(r.vehicle_id, r.route_id, r.trip_id, r.latitude, r.longitude) for r in decoded.records] == [
        (r.vehicle_id, r.route_id, r.trip_id, r.latitude, r.longitude) for r in expected
    ]
    assert decoded.header_timestamp == T0 + 330


async def test_feed_app_serves_protobuf_at_clock_time():
    script = parse_script(_data())
    clock = VirtualClock(T0 + 300)
    transport = httpx.ASGITransport(app=create_feed_app(script, clock))

    async with httpx.AsyncClient(transport=transport, base_url="http://sim.test") as client:
        first = await client.get(FEED_PATH)
        await clock.sleep(30)
        filtered = await client.get(FEED_PATH, params={"iata": "NYC"})
        health = await client.get("/health")

    assert first.headers["content-type"] == "application/x-protobuf"
    feed = gtfs_realtime_pb2.FeedMessage.FromString(first.content)
    assert feed.header.timestamp == T0 + 300
    assert [e.vehicle.vehicle.id for e in feed.entity] == ["y0811", "y0920"]

    feed = gtfs_realtime_pb2.FeedMessage.FromString(filtered.content)
    assert feed.header.timestamp == T0 + 330
    assert [e.vehicle.vehicle.id for e in feed.entity] == ["y0920"]

    assert health.json() == {"vehicles": 2, "now": T0 + 330}
