import json
import time

import pytest
from starlette.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from idlewatch.api import SubscriptionRegistry, create_app, serialize_batch
from tests.utils.builders import STREAM_BATCH


@pytest.fixture()
def registry() -> SubscriptionRegistry:
    return SubscriptionRegistry(["us-east", "local-sim"], queue_depth=4)


@pytest.fixture()
def client(registry):
    with TestClient(create_app(registry)) as client:
        yield client


def _wait_for_subscribers(client: TestClient, region_id: str, count: int) -> None:
    deadline = time.monotonic() + 2
    while client.get("/health").json()["regions"][region_id] != count:
        assert time.monotonic() < deadline, f"{region_id} never reached {count} subscribers"
        time.sleep(0.01)


def test_health_lists_regions(client):
    assert client.get("/health").json() == {"regions": {"us-east": 0, "local-sim": 0}}


def test_unknown_region_is_rejected(client):
    with pytest.raises(WebSocketDisconnect):
        with client.websocket_connect("/events/eu-west"):
            pass


def test_subscriber_receives_its_region_only(client, registry):
    with client.websocket_connect("/events/us-east") as ws:
        _wait_for_subscribers(client, "us-east", 1)

        client.portal.call(registry.broadcast, "local-sim", STREAM_BATCH[:1])
        client.portal.call(registry.broadcast, "us-east", STREAM_BATCH)

        message = ws.receive_text()

    assert message == serialize_batch(STREAM_BATCH)
    assert [e["vehicle_id"] for e in json.loads(message)] == [e.vehicle_id for e in STREAM_BATCH]


def test_batches_arrive_in_broadcast_order(client, registry):
    batches = [STREAM_BATCH[i:] for i in range(3)]

    with client.websocket_connect("/events/us-east") as ws:
        _wait_for_subscribers(client, "us-east", 1)
        for batch in batches:
            client.portal.call(registry.broadcast, "us-east", batch)

        received = [ws.receive_text() for _ in batches]

    assert received == [serialize_batch(b) for b in batches]


def test_disconnect_unsubscribes(client):
    with client.websocket_connect("/events/local-sim"):
        _wait_for_subscribers(client, "local-sim", 1)

    _wait_for_subscribers(client, "local-sim", 0)


def test_close_all_ends_the_stream(client, registry):
    with client.websocket_connect("/events/us-east") as ws:
        _wait_for_subscribers(client, "us-east", 1)
        client.portal.call(registry.close_all)

        with pytest.raises(WebSocketDisconnect) as e:
            ws.receive_text()

    assert e.value.code == 1001
