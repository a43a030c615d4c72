from __future__ import annotations

import asyncio
import contextlib
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from idlewatch.api.registry import Close, Subscription, SubscriptionRegistry
from idlewatch.core import IdlingEvent
from idlewatch.utils.serving import ServiceHandle, start_server

logger = logging.getLogger(__name__)

NOT_FOUND_CLOSE_CODE = 4404


async def _pump(websocket: WebSocket, sub: Subscription) -> None:
    while True:
        item = await sub.queue.get()
        if isinstance(item, Close):
            await websocket.close(code=item.code, reason=item.reason)
            return
        await websocket.send_text(item)


async def _wait_disconnect(websocket: WebSocket) -> None:
    # the stream is one-way; anything the client sends is ignored
    while True:
        message = await websocket.receive()
        if message["type"] == "websocket.disconnect":
            return


async def _reject(websocket: WebSocket, region_id: str) -> None:
    if "websocket.http.response" in websocket.scope.get("extensions", {}):
        await websocket.send_denial_response(JSONResponse({"detail": f"unknown region {region_id}"}, status_code=404))
    else:
        await websocket.close(code=NOT_FOUND_CLOSE_CODE, reason=f"unknown region {region_id}")


def create_app(registry: SubscriptionRegistry) -> FastAPI:
    app = FastAPI(title="idlewatch stream", docs_url=None, redoc_url=None)
    app.state.registry = registry

    @app.get("/health")
    async def health() -> dict[str, object]:
        return {"regions": {region: registry.subscriber_count(region) for region in registry.regions}}

    @app.websocket("/events/{region_id}")
    async def events(websocket: WebSocket, region_id: str) -> None:
        if region_id not in registry:
            logger.info("Rejected subscription to unknown region %s", region_id)
            await _reject(websocket, region_id)
            return

        await websocket.accept()
        sub = registry.subscribe(region_id, websocket)
        pump = asyncio.create_task(_pump(websocket, sub))
        receiver = asyncio.create_task(_wait_disconnect(websocket))
        try:
            await asyncio.wait({pump, receiver}, return_when=asyncio.FIRST_COMPLETED)
        finally:
            for task in (pump, receiver):
                task.cancel()
                with contextlib.suppress(asyncio.CancelledError, WebSocketDisconnect, RuntimeError):
                    await task
            registry.unsubscribe(sub)

    return app


@dataclass
class StreamService:
    registry: SubscriptionRegistry
    handle: ServiceHandle

    @property
    def port(self) -> int:
        return self.handle.port

    def url_for(self, region_id: str) -> str:
        return f"ws://{self.handle.host}:{self.handle.port}/events/{region_id}"

    def broadcast(self, region_id: str, batch: Sequence[IdlingEvent]) -> int:
        return self.registry.broadcast(region_id, batch)

    async def stop(self, grace: float = 0.1) -> None:
        self.registry.close_all()
        # let pumps flush the close frames before the server goes away
        await asyncio.sleep(grace)
        await self.handle.stop()


async def serve(regions: Iterable[str], host: str, port: int, queue_depth: int = 64) -> StreamService:
    """Start the event stream for ``regions`` on ``host:port``; raises ``BindFailure``."""
    registry = SubscriptionRegistry(regions, queue_depth=queue_depth)
    handle = await start_server(create_app(registry), host, port, name="stream-api")
    return StreamService(registry, handle)
