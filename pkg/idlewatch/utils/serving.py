from __future__ import annotations

import asyncio
import contextlib
import logging
import socket
from dataclasses import dataclass
from typing import Any, Iterator

import uvicorn

from idlewatch.exceptions import BindFailure

logger = logging.getLogger(__name__)


class EmbeddedServer(uvicorn.Server):
    """uvicorn server that leaves signal handling to the host process."""

    def install_signal_handlers(self) -> None:
        return

    @contextlib.contextmanager
    def capture_signals(self) -> Iterator[None]:
        yield


@dataclass
class ServiceHandle:
    name: str
    host: str
    port: int
    server: EmbeddedServer
    task: asyncio.Task[None]

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    async def stop(self) -> None:
        self.server.should_exit = True
        with contextlib.suppress(asyncio.CancelledError):
            await self.task
        logger.info("%s on %s:%s stopped", self.name, self.host, self.port)


def bind_socket(host: str, port: int) -> socket.socket:
    family = socket.AF_INET6 if ":" in host else socket.AF_INET
    sock = socket.socket(family, socket.SOCK_STREAM)
    try:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((host, port))
    except OSError as e:
        sock.close()
        raise BindFailure(host, port, e.strerror or str(e)) from e
    sock.set_inheritable(True)
    return sock


async def start_server(app: Any, host: str, port: int, *, name: str = "server") -> ServiceHandle:
    """Run an ASGI app on ``host:port`` inside the current event loop; port 0 picks a free port."""
    sock = bind_socket(host, port)
    config = uvicorn.Config(app, log_config=None, lifespan="off", ws="websockets")
    server = EmbeddedServer(config)

    async def serve() -> None:
        try:
            await server.serve(sockets=[sock])
        except SystemExit as e:
            raise BindFailure(host, port, "server failed to start") from e
        finally:
            sock.close()

    task = asyncio.create_task(serve(), name=f"{name}-{host}:{port}")
    while not server.started:
        if task.done():
            task.result()
            raise BindFailure(host, port, "server exited during startup")
        await asyncio.sleep(0.01)

    bound_port = sock.getsockname()[1]
    logger.info("%s listening on %s:%s", name, host, bound_port)
    return ServiceHandle(name, host, bound_port, server, task)
