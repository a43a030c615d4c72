from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

from google.protobuf.message import DecodeError
from google.transit import gtfs_realtime_pb2

from idlewatch.core import Rejection, VehicleRecord, validate_record
from idlewatch.enums import RejectReason
from idlewatch.exceptions import MalformedPayload

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class DecodedFeed:
    records: list[VehicleRecord] = field(default_factory=list)
    header_timestamp: int | None = None
    rejected: Counter[RejectReason] = field(default_factory=Counter)

    def __len__(self) -> int:
        return len(self.records)


def parse_feed_message(payload: bytes) -> gtfs_realtime_pb2.FeedMessage:
    feed = gtfs_realtime_pb2.FeedMessage()
    try:
        feed.ParseFromString(payload)
    except (DecodeError, ValueError) as e:
        raise MalformedPayload(f"cannot parse FeedMessage: {e}") from e
    if not feed.IsInitialized():
        raise MalformedPayload("FeedMessage is missing required fields")
    return feed


def decode_feed(payload: bytes, iata: str, fallback_time: int) -> DecodedFeed:
    """Turn one GTFS Realtime payload into validated ``VehicleRecord`` objects stamped with ``iata``.

    Entities without a vehicle position are ignored. Entities whose record
    fails validation are dropped and counted per reason in ``rejected``.
    """
    feed = parse_feed_message(payload)

    header_ts = int(feed.header.timestamp) if feed.header.HasField("timestamp") else 0
    result = DecodedFeed(header_timestamp=header_ts or None)

    for entity in feed.entity:
        if not entity.HasField("vehicle") or not entity.vehicle.HasField("position"):
            continue

        vp = entity.vehicle
        vehicle_id = vp.vehicle.id if vp.HasField("vehicle") and vp.vehicle.id else entity.id
        entity_ts = int(vp.timestamp) if vp.HasField("timestamp") else 0

        rec = VehicleRecord(
            iata_id=iata,
            vehicle_id=vehicle_id,
            route_id=vp.trip.route_id or None,
            trip_id=vp.trip.trip_id or None,
            latitude=float(vp.position.latitude),
            longitude=float(vp.position.longitude),
            timestamp=entity_ts or header_ts or int(fallback_time),
        )

        checked = validate_record(rec)
        if isinstance(checked, Rejection):
            result.rejected[checked.reason] += 1
            logger.debug("Dropped entity %s of %s: %s %s", entity.id, iata, checked.reason.value, checked.detail)
            continue
        result.records.append(checked)

    return result
