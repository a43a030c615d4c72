from __future__ import annotations

import asyncio
import logging
from contextlib import asynccontextmanager
from typing import AsyncGenerator, Sequence

from sqlalchemy import NullPool, StaticPool, event
from sqlalchemy.engine import make_url
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.ext.asyncio import AsyncEngine, async_sessionmaker, create_async_engine

from idlewatch.core import AgencyInfo, IdlingEvent
from idlewatch.database.models import Base
from idlewatch.database.repos import Repositories
from idlewatch.exceptions import StoreUnavailable
from idlewatch.settings import settings

logger = logging.getLogger("Database")


def _is_memory_sqlite(url: str) -> bool:
    parsed = make_url(url)
    return parsed.get_backend_name() == "sqlite" and parsed.database in (None, "", ":memory:")


class Database:
    """Engine, session factory and a write lock for one store URL."""

    def __init__(self, url: str, *, echo: bool = False) -> None:
        self.url = url
        self.backend = make_url(url).get_backend_name()

        if _is_memory_sqlite(url):
            self.engine: AsyncEngine = create_async_engine(
                url, poolclass=StaticPool, connect_args={"check_same_thread": False}, echo=echo
            )
        else:
            self.engine = create_async_engine(url, poolclass=NullPool, echo=echo)

        if self.backend == "sqlite":
            event.listen(self.engine.sync_engine, "connect", _enable_sqlite_foreign_keys)

        self.sessionmaker = async_sessionmaker(bind=self.engine, expire_on_commit=False, autoflush=False)
        self.write_lock = asyncio.Lock()

    @classmethod
    def from_settings(cls) -> Database:
        return cls(settings.db.build_url(), echo=settings.debug_mode)

    @asynccontextmanager
    async def get_repo(self) -> AsyncGenerator[Repositories, None]:
        async with self.sessionmaker() as s:
            logger.debug("session was create")
            yield Repositories.get_repo(s)

    async def create_tables(self) -> None:
        try:
            async with self.engine.begin() as conn:
                await conn.run_sync(Base.metadata.create_all)
        except (OSError, SQLAlchemyError) as e:
            raise StoreUnavailable(f"cannot prepare store {self.engine.url!r}: {e}") from e

    async def drop_tables(self) -> None:
        async with self.engine.begin() as conn:
            await conn.run_sync(Base.metadata.drop_all)

    async def dispose(self) -> None:
        await self.engine.dispose()

    async def upsert_agencies(self, rows: Sequence[AgencyInfo]) -> int:
        async with self.write_lock, self.get_repo() as repo:
            return await repo.agencies.upsert_agencies(rows)

    async def insert_events(self, batch: Sequence[IdlingEvent]) -> int:
        async with self.write_lock, self.get_repo() as repo:
            return await repo.events.insert_events(batch)

    async def events_count(self, start: int | None = None, end: int | None = None) -> int:
        async with self.get_repo() as repo:
            if start is None or end is None:
                return await repo.events.count()
            return await repo.events.count_between(start, end)

    async def fetch_events(self, start: int, end: int) -> list[IdlingEvent]:
        async with self.get_repo() as repo:
            return await repo.events.fetch_events(start, end)


def _enable_sqlite_foreign_keys(dbapi_connection, connection_record) -> None:  # type: ignore[no-untyped-def]
    cursor = dbapi_connection.cursor()
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()
