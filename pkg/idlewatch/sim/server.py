from __future__ import annotations

import logging

from fastapi import FastAPI, Query, Response
from google.transit import gtfs_realtime_pb2

from idlewatch.sim.script import FleetScript
from idlewatch.utils.clock import Clock, SystemClock
from idlewatch.utils.serving import ServiceHandle, start_server

logger = logging.getLogger(__name__)

FEED_PATH = "/gtfs-rt/vehicle-positions"
PROTOBUF_MEDIA_TYPE = "application/x-protobuf"


def build_feed_message(script: FleetScript, t: float, iata: str | None = None) -> gtfs_realtime_pb2.FeedMessage:
    feed = gtfs_realtime_pb2.FeedMessage()
    feed.header.gtfs_realtime_version = "2.0"
    feed.header.incrementality = gtfs_realtime_pb2.FeedHeader.FULL_DATASET
    feed.header.timestamp = int(t)

    for rec in script.state_at(t, iata):
        entity = feed.entity.add()
        entity.id = rec.vehicle_id
        vp = entity.vehicle
        vp.vehicle.id = rec.vehicle_id
        if rec.trip_id is not None:
            vp.trip.trip_id = rec.trip_id
        if rec.route_id is not None:
            vp.trip.route_id = rec.route_id
        vp.position.latitude = rec.latitude
        vp.position.longitude = rec.longitude
        vp.timestamp = rec.timestamp

    return feed


def encode_feed(script: FleetScript, t: float, iata: str | None = None) -> bytes:
    return build_feed_message(script, t, iata).SerializeToString()


def create_feed_app(script: FleetScript, clock: Clock | None = None) -> FastAPI:
    clock = clock or SystemClock()
    app = FastAPI(title="idlewatch fleet simulator", docs_url=None, redoc_url=None)

    @app.get(FEED_PATH)
    async def vehicle_positions(iata: str | None = Query(default=None)) -> Response:
        payload = encode_feed(script, clock.now(), iata)
        return Response(content=payload, media_type=PROTOBUF_MEDIA_TYPE)

    @app.get("/health")
    async def health() -> dict[str, object]:
        return {"vehicles": len(script.vehicles), "now": int(clock.now())}

    return app


async def serve_script(script: FleetScript, host: str, port: int, clock: Clock | None = None) -> ServiceHandle:
    """Serve ``script`` over HTTP until the returned handle is stopped; raises ``BindFailure``."""
    handle = await start_server(create_feed_app(script, clock), host, port, name="simulator")
    logger.info("Serving %s vehicles at http://%s:%s%s", len(script.vehicles), host, handle.port, FEED_PATH)
    return handle
