from __future__ import annotations

from dataclasses import dataclass

from idlewatch.core import DetectorParams, FeedSnapshot
from idlewatch.exceptions import OutOfOrderSnapshot


@dataclass(frozen=True, slots=True)
class BufferState:
    """Rolling window of the last h+2 snapshots, oldest first."""

    params: DetectorParams
    slots: tuple[FeedSnapshot, ...] = ()

    @property
    def ready(self) -> bool:
        return len(self.slots) == self.params.window

    @property
    def newest(self) -> FeedSnapshot | None:
        return self.slots[-1] if self.slots else None

    @property
    def a(self) -> FeedSnapshot:
        return self.slots[0]

    @property
    def b(self) -> FeedSnapshot:
        return self.slots[self.params.h]

    @property
    def c(self) -> FeedSnapshot:
        return self.slots[self.params.h + 1]


def push_snapshot(state: BufferState, snap: FeedSnapshot) -> tuple[BufferState, bool]:
    newest = state.newest
    if newest is not None and snap.poll_time < newest.poll_time:
        raise OutOfOrderSnapshot(newest.poll_time, snap.poll_time)

    slots = (*state.slots, snap)[-state.params.window :]
    updated = BufferState(state.params, slots)
    return updated, updated.ready
