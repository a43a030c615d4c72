from .records import (
    IATA_PATTERN,
    AgencyInfo,
    DetectorParams,
    EventBatch,
    FeedSnapshot,
    IdlingEvent,
    RecordKey,
    SourceFailure,
    VehicleRecord,
)
from .validation import Rejection, validate_record

__all__ = [
    "IATA_PATTERN",
    "AgencyInfo",
    "DetectorParams",
    "EventBatch",
    "FeedSnapshot",
    "IdlingEvent",
    "RecordKey",
    "Rejection",
    "SourceFailure",
    "VehicleRecord",
    "validate_record",
]
