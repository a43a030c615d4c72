"""Set algebra over buffered snapshots.

A vehicle is stationary when its whole attribute tuple (vehicle, route,
trip, latitude, longitude) repeats. The candidate set ``H`` maps each
stationary tuple to a ``CandidateEntry``; events are the armed entries
found again in the newest snapshot.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from idlewatch.core import FeedSnapshot, IdlingEvent, VehicleRecord
from idlewatch.detect.buffer import BufferState

# (iata_id, vehicle_id, route_id, trip_id, latitude, longitude)
StationaryTuple = tuple[str, str, str | None, str | None, float, float]
CandidateSet = Mapping[StationaryTuple, "CandidateEntry"]


@dataclass(frozen=True, slots=True)
class CandidateEntry:
    key: StationaryTuple
    first_stationary_at: int
    miss_count: int = 0
    consecutive_hits: int = 0
    armed: bool = True

    @property
    def iata_id(self) -> str:
        return self.key[0]

    @property
    def vehicle_id(self) -> str:
        return self.key[1]


def stationary_tuple(rec: VehicleRecord) -> StationaryTuple:
    return rec.iata_id, rec.vehicle_id, rec.route_id, rec.trip_id, rec.latitude, rec.longitude


def _matches(snap: FeedSnapshot, key: StationaryTuple, epsilon: float) -> bool:
    rec = snap.records.get((key[0], key[1]))
    if rec is None or rec.route_id != key[2] or rec.trip_id != key[3]:
        return False
    if epsilon == 0.0:
        return rec.latitude == key[4] and rec.longitude == key[5]
    return abs(rec.latitude - key[4]) <= epsilon and abs(rec.longitude - key[5]) <= epsilon


def intersect_stationary(a: FeedSnapshot, b: FeedSnapshot, epsilon: float = 0.0) -> set[StationaryTuple]:
    """Tuples of ``a`` found again in ``b``; coordinates are compared exactly unless ``epsilon`` is set."""
    return {key for key in map(stationary_tuple, a.records.values()) if _matches(b, key, epsilon)}


def stationary_window(state: BufferState) -> set[StationaryTuple]:
    """Tuples present in every slot from A through B."""
    eps = state.params.epsilon
    window = state.slots[: state.params.h + 1]
    found = intersect_stationary(window[0], window[1], eps)
    for snap in window[2:]:
        found = {key for key in found if _matches(snap, key, eps)}
    return found


def step(state: BufferState, candidates: CandidateSet) -> tuple[list[IdlingEvent], dict[StationaryTuple, CandidateEntry]]:
    """Advance the candidate set by one tick of a ready buffer.

    Pure: ``candidates`` is not modified, the updated set is returned.
    """
    if not state.ready:
        raise ValueError("buffer is not ready")

    params = state.params
    start = state.a.poll_time
    updated = dict(candidates)

    for key in stationary_window(state):
        entry = updated.get(key)
        if entry is None or not entry.armed:
            updated[key] = CandidateEntry(key, first_stationary_at=start, miss_count=0, consecutive_hits=0, armed=True)

    events: list[IdlingEvent] = []
    for key, entry in list(updated.items()):
        if _matches(state.c, key, params.epsilon):
            if entry.armed:
                events.append(
                    IdlingEvent(
                        iata_id=key[0],
                        vehicle_id=key[1],
                        route_id=key[2],
                        trip_id=key[3],
                        latitude=key[4],
                        longitude=key[5],
                        datetime=entry.first_stationary_at,
                        duration=params.min_duration + entry.consecutive_hits * params.r,
                    )
                )
                updated[key] = replace(entry, miss_count=0, consecutive_hits=entry.consecutive_hits + 1)
            else:
                updated[key] = replace(entry, miss_count=0)
            continue

        misses = entry.miss_count + 1
        if misses >= params.m:
            del updated[key]
        else:
            updated[key] = replace(entry, miss_count=misses, consecutive_hits=0, armed=False)

    events.sort(key=lambda e: e.sort_key)
    return events, updated
