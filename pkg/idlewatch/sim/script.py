"""Fleet scripts for the synthetic GTFS Realtime feed.

A script lists vehicles with a waypoint timeline and idle segments during
which a vehicle holds a fixed position. Times are seconds from
``start_time``. Positions change once per ``tick`` and are rounded to float32,
the precision GTFS Realtime carries coordinates in, so what the feed serves
is exactly what ``state_at`` reports.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveInt,
    PrivateAttr,
    ValidationError,
    field_validator,
    model_validator,
)

from idlewatch.core import IATA_PATTERN, VehicleRecord
from idlewatch.exceptions import ScriptError


def as_float32(value: float) -> float:
    return float(np.float32(value))


def _check_coordinate(lat: float, lon: float) -> None:
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ValueError(f"coordinate ({lat}, {lon}) is outside WGS84 bounds")
    if lat == 0.0 or lon == 0.0:
        raise ValueError(f"coordinate ({lat}, {lon}) has a zero component")


class Waypoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: int = Field(ge=0)
    latitude: float
    longitude: float

    @model_validator(mode="before")
    @classmethod
    def from_triple(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            t, lat, lon = data
            return {"t": t, "latitude": lat, "longitude": lon}
        return data

    @model_validator(mode="after")
    def check_bounds(self) -> Waypoint:
        _check_coordinate(self.latitude, self.longitude)
        return self


class ScriptVehicle(BaseModel):
    model_config = ConfigDict(frozen=True)

    vehicle_id: str = Field(min_length=1)
    iata_id: str
    route_id: str | None = None
    trip_id: str | None = None
    waypoints: list[Waypoint] = Field(min_length=1)

    @field_validator("iata_id")
    @classmethod
    def check_iata(cls, value: str) -> str:
        if not IATA_PATTERN.match(value):
            raise ValueError(f"iata_id must be three uppercase letters, got {value!r}")
        return value

    @model_validator(mode="after")
    def check_ids(self) -> ScriptVehicle:
        if not (self.route_id or self.trip_id):
            raise ValueError(f"vehicle {self.vehicle_id} needs a route_id or a trip_id")
        times = [w.t for w in self.waypoints]
        if times != sorted(set(times)):
            raise ValueError(f"waypoints of {self.vehicle_id} must have strictly increasing times")
        return self

    @property
    def first_seen(self) -> int:
        return self.waypoints[0].t

    @property
    def last_seen(self) -> int:
        return self.waypoints[-1].t


class IdleSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    vehicle_id: str
    start: int = Field(ge=0)
    length: PositiveInt
    latitude: float
    longitude: float

    @model_validator(mode="after")
    def check_bounds(self) -> IdleSegment:
        _check_coordinate(self.latitude, self.longitude)
        return self

    @property
    def end(self) -> int:
        return self.start + self.length


class FleetScript(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = 0
    tick: PositiveInt = 30
    start_time: PositiveInt = 1_706_572_800
    vehicles: list[ScriptVehicle] = Field(default_factory=list)
    idle_segments: list[IdleSegment] = Field(default_factory=list)

    _segments: dict[str, list[IdleSegment]] = PrivateAttr(default_factory=dict)
    _times: dict[str, list[int]] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: Any) -> None:
        for seg in sorted(self.idle_segments, key=lambda s: s.start):
            self._segments.setdefault(seg.vehicle_id, []).append(seg)
        self._times = {v.vehicle_id: [w.t for w in v.waypoints] for v in self.vehicles}

    @model_validator(mode="after")
    def check_segments(self) -> FleetScript:
        ids = [v.vehicle_id for v in self.vehicles]
        if len(ids) != len(set(ids)):
            raise ValueError("vehicle_id must be unique within a script")

        known = {v.vehicle_id for v in self.vehicles}
        by_vehicle: dict[str, list[IdleSegment]] = {}
        for seg in self.idle_segments:
            if seg.vehicle_id not in known:
                raise ValueError(f"idle segment for unknown vehicle {seg.vehicle_id}")
            by_vehicle.setdefault(seg.vehicle_id, []).append(seg)

        for vehicle_id, segments in by_vehicle.items():
            segments.sort(key=lambda s: s.start)
            for prev, cur in zip(segments, segments[1:]):
                if cur.start < prev.end:
                    raise ValueError(f"idle segments of {vehicle_id} overlap at {cur.start}")
        return self

    @property
    def end_time(self) -> int:
        return self.start_time + max((v.last_seen for v in self.vehicles), default=0)

    def segments_for(self, vehicle_id: str) -> list[IdleSegment]:
        return self._segments.get(vehicle_id, [])

    def state_at(self, t: float, iata: str | None = None) -> list[VehicleRecord]:
        """Records the feed reports at epoch time ``t``, in script order."""
        offset = math.floor(t - self.start_time)
        if offset < 0:
            return []
        te = offset - offset % self.tick

        records = []
        for vehicle in self.vehicles:
            if iata is not None and vehicle.iata_id != iata:
                continue
            if not vehicle.first_seen <= te <= vehicle.last_seen:
                continue

            lat, lon = self._position(vehicle, te)
            records.append(
                VehicleRecord(
                    iata_id=vehicle.iata_id,
                    vehicle_id=vehicle.vehicle_id,
                    route_id=vehicle.route_id,
                    trip_id=vehicle.trip_id,
                    latitude=as_float32(lat),
                    longitude=as_float32(lon),
                    timestamp=self.start_time + te,
                )
            )
        return records

    def _position(self, vehicle: ScriptVehicle, te: int) -> tuple[float, float]:
        for seg in self.segments_for(vehicle.vehicle_id):
            if seg.start <= te < seg.end:
                return seg.latitude, seg.longitude

        points = vehicle.waypoints
        i = bisect_right(self._times[vehicle.vehicle_id], te) - 1
        if i >= len(points) - 1:
            return points[-1].latitude, points[-1].longitude
        a, b = points[i], points[i + 1]
        frac = (te - a.t) / (b.t - a.t)
        return a.latitude + (b.latitude - a.latitude) * frac, a.longitude + (b.longitude - a.longitude) * frac

    def to_yaml(self) -> str:
        data = self.model_dump(mode="json")
        for vehicle in data["vehicles"]:
            vehicle["waypoints"] = [[w["t"], w["latitude"], w["longitude"]] for w in vehicle["waypoints"]]
        return yaml.safe_dump(data, sort_keys=False)


def operational_spans(script: FleetScript) -> dict[tuple[str, str], int]:
    """Seconds each vehicle is in service, keyed by (iata_id, vehicle_id)."""
    return {(v.iata_id, v.vehicle_id): v.last_seen - v.first_seen for v in script.vehicles}


def parse_script(data: Any) -> FleetScript:
    try:
        return FleetScript.model_validate(data)
    except ValidationError as e:
        raise ScriptError(str(e)) from e


def load_script(path: str | Path) -> FleetScript:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ScriptError(f"cannot read {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ScriptError(f"{path} is not valid YAML: {e}") from e
    return parse_script(data)


def random_script(
    seed: int,
    *,
    vehicles: int = 10,
    ticks: int = 120,
    tick: int = 30,
    iata_ids: tuple[str, ...] = ("NYC",),
    center: tuple[float, float] = (40.75, -73.98),
    max_idles: int = 3,
) -> FleetScript:
    """Random but reproducible fleet: moving vehicles with idle segments of assorted lengths."""
    rng = random.Random(seed)
    span = ticks * tick
    fleet: list[dict[str, Any]] = []
    segments: list[dict[str, Any]] = []

    for n in range(vehicles):
        vehicle_id = f"v{n:03d}"
        first = rng.randrange(0, span // 4 + 1, tick)
        last = rng.randrange(max(first + tick, span * 3 // 4), span + 1, tick)

        waypoints = []
        t = first
        while True:
            waypoints.append([t, center[0] + rng.uniform(-0.1, 0.1), center[1] + rng.uniform(-0.1, 0.1)])
            if t >= last:
                break
            t = min(last, t + rng.randrange(tick, 10 * tick + 1, tick))

        route_id = f"R{rng.randrange(1, 40)}" if rng.random() > 0.1 else None
        trip_id = f"T{rng.randrange(10_000, 99_999)}" if route_id is None or rng.random() > 0.1 else None
        fleet.append(
            {
                "vehicle_id": vehicle_id,
                "iata_id": rng.choice(iata_ids),
                "route_id": route_id,
                "trip_id": trip_id,
                "waypoints": waypoints,
            }
        )

        cursor = first
        for _ in range(rng.randrange(0, max_idles + 1)):
            start = cursor + rng.randrange(0, 20 * tick)
            length = rng.randrange(1, 12 * tick)
            if start + length > last:
                break
            segments.append(
                {
                    "vehicle_id": vehicle_id,
                    "start": start,
                    "length": length,
                    "latitude": center[0] + rng.uniform(-0.1, 0.1),
                    "longitude": center[1] + rng.uniform(-0.1, 0.1),
                }
            )
            cursor = start + length

    return parse_script({"seed": seed, "tick": tick, "vehicles": fleet, "idle_segments": segments})
