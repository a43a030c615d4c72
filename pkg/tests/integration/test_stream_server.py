"""Event stream and fleet simulator on real sockets."""
import asyncio
import json

import httpx
import pytest
import pytest_asyncio
import websockets
from websockets.exceptions import ConnectionClosed, InvalidHandshake

from idlewatch.api import StreamService, serve
from idlewatch.exceptions import BindFailure
from idlewatch.extract import decode_feed
from idlewatch.sim import FEED_PATH, random_script, serve_script
from idlewatch.utils.clock import VirtualClock
from tests.utils.builders import STREAM_BATCH


@pytest_asyncio.fixture()
async def service():
    service = await serve(["us-east", "europe"], "127.0.0.1", 0, queue_depth=8)
    yield service
    await service.stop()


async def _wait_for_subscriber(service: StreamService, region_id: str) -> None:
    for _ in range(200):
        if service.registry.subscriber_count(region_id):
            return
        await asyncio.sleep(0.01)
    raise AssertionError(f"no subscriber on {region_id}")


async def test_client_receives_broadcast_batch(service: StreamService):
    async with websockets.connect(service.url_for("us-east")) as ws:
        await _wait_for_subscriber(service, "us-east")

        assert service.broadcast("us-east", STREAM_BATCH) == 1
        assert service.broadcast("europe", STREAM_BATCH) == 0

        message = await asyncio.wait_for(ws.recv(), timeout=5)

    payload = json.loads(message)
    assert [item["vehicle_id"] for item in payload] == [e.vehicle_id for e in STREAM_BATCH]
    assert payload[0]["iata_id"] == "NYC"


async def test_health_over_http(service: StreamService):
    async with httpx.AsyncClient(base_url=service.handle.base_url) as client:
        response = await client.get("/health")

    assert response.status_code == 200
    assert response.json() == {"regions": {"us-east": 0, "europe": 0}}


async def test_unknown_region_is_rejected(service: StreamService):
    with pytest.raises((InvalidHandshake, ConnectionClosed)):
        async with websockets.connect(service.url_for("asia")) as ws:
            await asyncio.wait_for(ws.recv(), timeout=5)


async def test_stop_closes_subscribers_with_going_away(service: StreamService):
    async with websockets.connect(service.url_for("europe")) as ws:
        await _wait_for_subscriber(service, "europe")
        service.registry.close_all()

        with pytest.raises(ConnectionClosed) as e:
            await asyncio.wait_for(ws.recv(), timeout=5)

    assert e.value.rcvd.code == 1001


async def test_port_in_use_is_a_bind_failure(service: StreamService):
    with pytest.raises(BindFailure) as e:
        await serve(["us-east"], "127.0.0.1", service.port)

    assert e.value.port == service.port


async def test_simulator_serves_script_over_http():
    script = random_script(7, vehicles=5, ticks=20)
    clock = VirtualClock(script.start_time + 90)
    handle = await serve_script(script, "127.0.0.1", 0, clock)
    try:
        async with httpx.AsyncClient(base_url=handle.base_url) as client:
            response = await client.get(FEED_PATH)
    finally:
        await handle.stop()

    assert response.status_code == 200
    decoded = decode_feed(response.content, "NYC", script.start_time + 90)
    assert sorted(decoded.records, key=lambda r: r.vehicle_id) == sorted(
        script.state_at(script.start_time + 90), key=lambda r: r.vehicle_id
    )
