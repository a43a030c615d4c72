from __future__ import annotations

import logging
from typing import AsyncIterable, AsyncIterator

from idlewatch.core import DetectorParams, EventBatch, FeedSnapshot
from idlewatch.detect.buffer import BufferState, push_snapshot
from idlewatch.detect.subset import CandidateEntry, StationaryTuple, step
from idlewatch.exceptions import OutOfOrderSnapshot

logger = logging.getLogger(__name__)


class Detector:
    """Per-region detector state: the rolling buffer plus the candidate set."""

    def __init__(self, params: DetectorParams, region_id: str = "") -> None:
        self.params = params
        self.region_id = region_id
        self.state = BufferState(params)
        self.candidates: dict[StationaryTuple, CandidateEntry] = {}

    def feed(self, snap: FeedSnapshot) -> EventBatch | None:
        """Push one snapshot; returns the tick's batch, or None while the buffer is warming up.

        Raises ``OutOfOrderSnapshot`` and leaves the state untouched for snapshots older than the newest one.
        """
        self.state, ready = push_snapshot(self.state, snap)
        if not ready:
            return None

        events, self.candidates = step(self.state, self.candidates)
        return EventBatch(self.region_id or snap.region_id, snap.poll_time, tuple(events))


async def run_detector(snapshots: AsyncIterable[FeedSnapshot], params: DetectorParams) -> AsyncIterator[EventBatch]:
    detector: Detector | None = None
    async for snap in snapshots:
        if detector is None:
            detector = Detector(params, snap.region_id)
        try:
            batch = detector.feed(snap)
        except OutOfOrderSnapshot as e:
            logger.warning("Region %s: skipped tick, %s", snap.region_id, e)
            continue
        if batch is not None:
            yield batch
