from __future__ import annotations

import asyncio
import contextlib
import logging
import signal
from typing import Callable

import httpx

from idlewatch.api import StreamService, serve
from idlewatch.config import PipelineConfig, RegionConfig
from idlewatch.database import Database
from idlewatch.pipeline.region import RegionPipeline
from idlewatch.utils import connect_to_services
from idlewatch.utils.clock import Clock

logger = logging.getLogger(__name__)

ClientFactory = Callable[[RegionConfig], httpx.AsyncClient]


class Supervisor:
    """Owns the store, the stream API and one ``RegionPipeline`` per configured region."""

    def __init__(
        self,
        config: PipelineConfig,
        *,
        db: Database | None = None,
        client_factory: ClientFactory | None = None,
        clocks: dict[str, Clock] | None = None,
        ticks: int | None = None,
    ) -> None:
        self.config = config
        self.db = db
        self._owns_db = db is None
        self.client_factory = client_factory
        self.clocks = clocks or {}
        self.ticks = ticks

        self.stream: StreamService | None = None
        self.pipelines: dict[str, RegionPipeline] = {}
        self._stopping = asyncio.Event()

    async def start(self) -> None:
        """Prepare the store, register agencies, bind the API and launch every region.

        Raises ``StoreUnavailable``, ``StoreError`` or ``BindFailure``; nothing is left running on failure.
        """
        if self.db is None:
            self.db = Database(self.config.store.resolve_url())
        try:
            await self.db.create_tables()
            await connect_to_services.test_database_pool(self.db)
            written = await self.db.upsert_agencies(self.config.agencies())
            logger.info("Registered %s agencies", written)

            api = self.config.api
            self.stream = await serve(self.config.region_ids(), api.host, api.port, api.queue_depth)
        except BaseException:
            await self._close_db()
            raise

        for region in self.config.regions:
            pipeline = RegionPipeline(
                region.region_id,
                region.sources,
                self.config.params_for(region.region_id),
                self.db,
                self.stream.broadcast,
                client=self.client_factory(region) if self.client_factory else None,
                clock=self.clocks.get(region.region_id),
                ticks=self.ticks,
            )
            pipeline.start()
            self.pipelines[region.region_id] = pipeline

    def request_stop(self) -> None:
        if not self._stopping.is_set():
            logger.info("Shutdown requested")
            self._stopping.set()

    def install_signal_handlers(self) -> None:
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            with contextlib.suppress(NotImplementedError):
                loop.add_signal_handler(sig, self.request_stop)

    async def run(self) -> None:
        """Run until a stop is requested or every region has finished, then drain and shut down."""
        stop = asyncio.create_task(self._stopping.wait())
        regions = asyncio.create_task(self._all_regions_done())
        try:
            await asyncio.wait({stop, regions}, return_when=asyncio.FIRST_COMPLETED)
        finally:
            for task in (stop, regions):
                task.cancel()
            await self.shutdown()

    async def _all_regions_done(self) -> None:
        await asyncio.gather(*(p.wait() for p in self.pipelines.values()))

    async def shutdown(self) -> None:
        for pipeline in self.pipelines.values():
            await pipeline.stop()
        if self.stream is not None:
            await self.stream.stop()
            self.stream = None
        for region_id, pipeline in self.pipelines.items():
            if pipeline.client is not None:
                await pipeline.client.aclose()
            logger.debug("Region %s closed", region_id)
        await self._close_db()
        logger.info("Pipeline stopped")

    async def _close_db(self) -> None:
        if self._owns_db and self.db is not None:
            await self.db.dispose()
