from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Iterable, Sequence

import pytz

from idlewatch.core import IdlingEvent

logger = logging.getLogger(__name__)

WIRE_KEYS = ("iata_id", "vehicle_id", "route_id", "trip_id", "latitude", "longitude", "datetime", "duration")

POLICY_VIOLATION = 1008
GOING_AWAY = 1001


def serialize_batch(batch: Sequence[IdlingEvent]) -> str:
    """Compact JSON array, one object per event, keys in wire order."""
    return json.dumps(
        [{key: getattr(event, key) for key in WIRE_KEYS} for event in batch],
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )


@dataclass(frozen=True, slots=True)
class Close:
    code: int
    reason: str = ""


@dataclass(eq=False)
class Subscription:
    region_id: str
    connection: Any
    connected_at: datetime = field(default_factory=lambda: datetime.now(pytz.utc))
    queue_depth: int = 64
    queue: asyncio.Queue[str | Close] = field(init=False)
    closed: bool = field(default=False, init=False)

    def __post_init__(self) -> None:
        self.queue = asyncio.Queue(maxsize=self.queue_depth)

    def offer(self, message: str) -> bool:
        """Queue a message; on overflow drop the backlog and queue a close instead."""
        if self.closed:
            return False
        try:
            self.queue.put_nowait(message)
        except asyncio.QueueFull:
            self.close(POLICY_VIOLATION, "subscriber too slow")
            return False
        return True

    def close(self, code: int, reason: str = "", *, keep_backlog: bool = False) -> None:
        """Queue the close after the backlog, or instead of it; a full queue loses its oldest message."""
        if self.closed:
            return
        self.closed = True
        while not self.queue.empty() and (not keep_backlog or self.queue.full()):
            self.queue.get_nowait()
        self.queue.put_nowait(Close(code, reason))


class SubscriptionRegistry:
    def __init__(self, regions: Iterable[str], queue_depth: int = 64) -> None:
        self.queue_depth = queue_depth
        self._subscriptions: dict[str, set[Subscription]] = {region: set() for region in regions}

    @property
    def regions(self) -> list[str]:
        return list(self._subscriptions)

    def __contains__(self, region_id: object) -> bool:
        return region_id in self._subscriptions

    def subscribe(self, region_id: str, connection: Any) -> Subscription:
        if region_id not in self._subscriptions:
            raise KeyError(region_id)
        sub = Subscription(region_id, connection, queue_depth=self.queue_depth)
        self._subscriptions[region_id].add(sub)
        logger.info("Subscriber joined %s (%s live)", region_id, len(self._subscriptions[region_id]))
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        subs = self._subscriptions.get(sub.region_id)
        if subs is not None and sub in subs:
            subs.discard(sub)
            logger.info("Subscriber left %s (%s live)", sub.region_id, len(subs))

    def subscriber_count(self, region_id: str) -> int:
        return len(self._subscriptions.get(region_id, ()))

    def broadcast(self, region_id: str, batch: Sequence[IdlingEvent]) -> int:
        """Queue one JSON message per live subscriber of ``region_id``; returns how many accepted it."""
        subs = self._subscriptions.get(region_id)
        if not subs:
            return 0

        message = serialize_batch(batch)
        delivered = 0
        for sub in list(subs):
            if sub.offer(message):
                delivered += 1
            else:
                logger.warning("Dropping slow subscriber of %s", region_id)
                self.unsubscribe(sub)
        return delivered

    def close_all(self, code: int = GOING_AWAY, reason: str = "server shutting down") -> None:
        for subs in self._subscriptions.values():
            for sub in list(subs):
                sub.close(code, reason, keep_backlog=True)
            subs.clear()
