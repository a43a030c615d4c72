from enum import Enum


class RejectReason(str, Enum):
    OutOfBoundsLat = "OutOfBoundsLat"
    OutOfBoundsLon = "OutOfBoundsLon"
    ZeroCoordinate = "ZeroCoordinate"
    MissingIds = "MissingIds"
    BadTimestamp = "BadTimestamp"
