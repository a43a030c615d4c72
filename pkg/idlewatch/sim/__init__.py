from .oracle import oracle_events
from .script import (
    FleetScript,
    IdleSegment,
    ScriptVehicle,
    Waypoint,
    as_float32,
    load_script,
    operational_spans,
    parse_script,
    random_script,
)
from .server import FEED_PATH, build_feed_message, create_feed_app, encode_feed, serve_script

__all__ = [
    "oracle_events",
    "FleetScript",
    "IdleSegment",
    "ScriptVehicle",
    "Waypoint",
    "as_float32",
    "load_script",
    "operational_spans",
    "parse_script",
    "random_script",
    "FEED_PATH",
    "build_feed_message",
    "create_feed_app",
    "encode_feed",
    "serve_script",
]
