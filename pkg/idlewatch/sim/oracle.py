"""Expected detector output computed straight from a script's timeline.

Works per vehicle on the sequence of observed attribute tuples and looks for
runs of identical values; it shares no code with the detector.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from idlewatch.core import DetectorParams, EventBatch, IdlingEvent
from idlewatch.sim.script import FleetScript

Observation = tuple[str | None, str | None, float, float] | None


def oracle_events(
    script: FleetScript,
    params: DetectorParams,
    poll_times: Sequence[int],
    region_id: str = "",
) -> list[EventBatch]:
    """One batch per poll from the (h+2)-th on, matching what the detector emits."""
    if list(poll_times) != sorted(poll_times):
        raise ValueError("poll_times must be sorted")

    n = len(poll_times)
    history: dict[tuple[str, str], list[Observation]] = defaultdict(lambda: [None] * n)
    for i, t in enumerate(poll_times):
        for rec in script.state_at(t):
            history[(rec.iata_id, rec.vehicle_id)][i] = (rec.route_id, rec.trip_id, rec.latitude, rec.longitude)

    emitted: list[list[IdlingEvent]] = [[] for _ in range(n)]
    for (iata_id, vehicle_id), seen in history.items():
        i = 0
        while i < n:
            if seen[i] is None:
                i += 1
                continue
            j = i
            while j + 1 < n and seen[j + 1] == seen[i]:
                j += 1

            route_id, trip_id, lat, lon = seen[i]
            for k in range(i + params.h + 1, j + 1):
                emitted[k].append(
                    IdlingEvent(
                        iata_id=iata_id,
                        vehicle_id=vehicle_id,
                        route_id=route_id,
                        trip_id=trip_id,
                        latitude=lat,
                        longitude=lon,
                        datetime=poll_times[i],
                        duration=(k - i) * params.r,
                    )
                )
            i = j + 1

    first = params.h + 1
    return [
        EventBatch(region_id, poll_times[k], tuple(sorted(emitted[k], key=lambda e: (e.datetime, e.iata_id, e.vehicle_id))))
        for k in range(first, n)
    ]
