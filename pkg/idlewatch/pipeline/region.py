from __future__ import annotations

import asyncio
import contextlib
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import httpx

from idlewatch.config import SourceConfig
from idlewatch.core import DetectorParams, EventBatch, FeedSnapshot, IdlingEvent
from idlewatch.database import Database
from idlewatch.detect import Detector
from idlewatch.exceptions import OutOfOrderSnapshot, StoreError
from idlewatch.extract import poll_region
from idlewatch.utils.clock import Clock, SystemClock

logger = logging.getLogger(__name__)

Publish = Callable[[str, Sequence[IdlingEvent]], int]

CHANNEL_DEPTH = 16


@dataclass
class RegionStats:
    ticks: int = 0
    failed_sources: int = 0
    batches: int = 0
    emitted: int = 0
    delivered: int = 0
    written: int = 0
    write_errors: int = 0


class RegionPipeline:
    """Extract, detect, broadcast and write for one region, each stage its own task.

    Stages talk through bounded queues, so a slow store holds back detection
    and, behind it, polling, instead of growing memory. ``stop()`` ends polling
    and lets the snapshots and batches already in flight reach the store.
    """

    def __init__(
        self,
        region_id: str,
        sources: Sequence[SourceConfig],
        params: DetectorParams,
        db: Database | None,
        publish: Publish | None = None,
        *,
        client: httpx.AsyncClient | None = None,
        clock: Clock | None = None,
        ticks: int | None = None,
    ) -> None:
        self.region_id = region_id
        self.sources = list(sources)
        self.params = params
        self.db = db
        self.publish = publish
        self.client = client
        self.clock = clock or SystemClock()
        self.ticks = ticks

        self.detector = Detector(params, region_id)
        self.stats = RegionStats()
        self._snapshots: asyncio.Queue[FeedSnapshot | None] = asyncio.Queue(CHANNEL_DEPTH)
        self._batches: asyncio.Queue[EventBatch | None] = asyncio.Queue(CHANNEL_DEPTH)
        self._tasks: list[asyncio.Task[None]] = []

    def start(self) -> None:
        if self._tasks:
            raise RuntimeError(f"region {self.region_id} already started")
        self._tasks = [
            asyncio.create_task(self._extract(), name=f"{self.region_id}-extract"),
            asyncio.create_task(self._detect(), name=f"{self.region_id}-detect"),
            asyncio.create_task(self._write(), name=f"{self.region_id}-write"),
        ]
        logger.info(
            "Region %s started: %s sources, r=%s h=%s m=%s",
            self.region_id,
            len(self.sources),
            self.params.r,
            self.params.h,
            self.params.m,
        )

    @property
    def done(self) -> bool:
        return bool(self._tasks) and all(task.done() for task in self._tasks)

    async def wait(self) -> None:
        """Wait until every stage has finished, e.g. after a bounded number of ticks."""
        await asyncio.gather(*self._tasks, return_exceptions=True)

    async def stop(self) -> None:
        if not self._tasks:
            return
        extract = self._tasks[0]
        if not extract.done():
            extract.cancel()
        await self.wait()
        logger.info("Region %s stopped: %s", self.region_id, self.stats)

    async def _extract(self) -> None:
        stream = poll_region(
            self.sources,
            self.params.r,
            region_id=self.region_id,
            client=self.client,
            clock=self.clock,
            ticks=self.ticks,
        )
        try:
            async with contextlib.aclosing(stream):
                async for snapshot in stream:
                    self.stats.ticks += 1
                    self.stats.failed_sources += len(snapshot.failures)
                    await self._snapshots.put(snapshot)
        except asyncio.CancelledError:
            logger.debug("Region %s polling cancelled", self.region_id)
        except Exception:
            logger.exception("Region %s polling crashed", self.region_id)
        finally:
            await self._snapshots.put(None)

    async def _detect(self) -> None:
        try:
            while (snapshot := await self._snapshots.get()) is not None:
                try:
                    batch = self.detector.feed(snapshot)
                except OutOfOrderSnapshot as e:
                    logger.warning("Region %s: skipped tick, %s", self.region_id, e)
                    continue
                if batch is None:
                    continue

                self.stats.batches += 1
                self.stats.emitted += len(batch)
                if self.publish is not None:
                    self.stats.delivered += self.publish(self.region_id, batch.events)
                await self._batches.put(batch)
        except Exception:
            logger.exception("Region %s detector crashed", self.region_id)
        finally:
            await self._batches.put(None)

    async def _write(self) -> None:
        while (batch := await self._batches.get()) is not None:
            if not batch.events or self.db is None:
                continue
            try:
                self.stats.written += await self.db.insert_events(batch.events)
            except StoreError as e:
                self.stats.write_errors += 1
                logger.error("Region %s: batch at %s not stored: %s", self.region_id, batch.poll_time, e)
            except Exception:
                self.stats.write_errors += 1
                logger.exception("Region %s: batch at %s not stored", self.region_id, batch.poll_time)
