from __future__ import annotations

import math
from dataclasses import dataclass

from idlewatch.core.records import VehicleRecord
from idlewatch.enums import RejectReason


@dataclass(frozen=True, slots=True)
class Rejection:
    reason: RejectReason
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def validate_record(rec: VehicleRecord) -> VehicleRecord | Rejection:
    """Return ``rec`` unchanged when it satisfies every record invariant, otherwise a ``Rejection``.

    Checks run in a fixed order, so a record with several problems always
    reports the same reason.
    """
    lat, lon = rec.latitude, rec.longitude

    if not isinstance(lat, (int, float)) or math.isnan(lat) or not -90.0 <= lat <= 90.0:
        return Rejection(RejectReason.OutOfBoundsLat, f"latitude={lat!r}")
    if not isinstance(lon, (int, float)) or math.isnan(lon) or not -180.0 <= lon <= 180.0:
        return Rejection(RejectReason.OutOfBoundsLon, f"longitude={lon!r}")
    if lat == 0.0 or lon == 0.0:
        return Rejection(RejectReason.ZeroCoordinate, f"latitude={lat!r} longitude={lon!r}")
    if not rec.vehicle_id or not (rec.route_id or rec.trip_id):
        return Rejection(RejectReason.MissingIds, f"vehicle_id={rec.vehicle_id!r}")
    if isinstance(rec.timestamp, bool) or not isinstance(rec.timestamp, int) or rec.timestamp <= 0:
        return Rejection(RejectReason.BadTimestamp, f"timestamp={rec.timestamp!r}")

    return rec
