"""Shared value types for feeds, the detector and the store.

All types are frozen and slotted, so instances can be handed between region
tasks without copying.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from idlewatch.enums import RejectReason

IATA_PATTERN = re.compile(r"^[A-Z]{3}$")

RecordKey = tuple[str, str]


@dataclass(frozen=True, slots=True)
class VehicleRecord:
    iata_id: str
    vehicle_id: str
    route_id: str | None
    trip_id: str | None
    latitude: float
    longitude: float
    timestamp: int

    @property
    def key(self) -> RecordKey:
        return self.iata_id, self.vehicle_id


@dataclass(frozen=True, slots=True)
class SourceFailure:
    endpoint_url: str
    iata_id: str
    reason: str


@dataclass(frozen=True, slots=True)
class FeedSnapshot:
    region_id: str
    poll_time: int
    records: Mapping[RecordKey, VehicleRecord] = field(default_factory=dict)
    failures: tuple[SourceFailure, ...] = ()
    rejected: Mapping[RejectReason, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", MappingProxyType(dict(self.records)))
        object.__setattr__(self, "rejected", MappingProxyType(dict(self.rejected)))

    @classmethod
    def from_records(
        cls,
        region_id: str,
        poll_time: int,
        records: list[VehicleRecord],
        failures: tuple[SourceFailure, ...] = (),
        rejected: Counter[RejectReason] | None = None,
    ) -> FeedSnapshot:
        """Build a snapshot, resolving duplicate keys by larger timestamp, later record on ties."""
        merged: dict[RecordKey, VehicleRecord] = {}
        for rec in records:
            current = merged.get(rec.key)
            if current is None or rec.timestamp >= current.timestamp:
                merged[rec.key] = rec
        return cls(region_id, poll_time, merged, failures, dict(rejected or {}))

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True, slots=True)
class IdlingEvent:
    iata_id: str
    vehicle_id: str
    route_id: str | None
    trip_id: str | None
    latitude: float
    longitude: float
    datetime: int
    duration: int

    @property
    def key(self) -> RecordKey:
        return self.iata_id, self.vehicle_id

    @property
    def sort_key(self) -> tuple[int, str, str]:
        return self.datetime, self.iata_id, self.vehicle_id

    def as_row(self) -> dict[str, object]:
        """Events-table field order."""
        return {
            "iata_id": self.iata_id,
            "vehicle_id": self.vehicle_id,
            "route_id": self.route_id,
            "trip_id": self.trip_id,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "datetime": self.datetime,
            "duration": self.duration,
        }


@dataclass(frozen=True, slots=True)
class EventBatch:
    """Events emitted for one region at one detector tick; may be empty."""

    region_id: str
    poll_time: int
    events: tuple[IdlingEvent, ...] = ()

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, slots=True)
class AgencyInfo:
    iata_id: str
    agency: str
    city: str
    country: str
    region: str
    continent: str

    def __post_init__(self) -> None:
        if not IATA_PATTERN.match(self.iata_id):
            raise ValueError(f"iata_id must be three uppercase letters, got {self.iata_id!r}")


@dataclass(frozen=True, slots=True)
class DetectorParams:
    r: int = 30
    h: int = 1
    m: int = 10
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r", "h", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    @property
    def window(self) -> int:
        """Buffer capacity, h+2 snapshots."""
        return self.h + 2

    @property
    def min_duration(self) -> int:
        return (self.h + 1) * self.r
