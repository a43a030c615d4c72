"""Configuration for integrational tests."""
from typing import AsyncGenerator

import pytest_asyncio

from idlewatch.database import Database, Repositories
from tests.utils.builders import AGENCIES

MEMORY_URL = "sqlite+aiosqlite://"


@pytest_asyncio.fixture(scope="function")
async def db() -> AsyncGenerator[Database, None]:
    """Fresh in-memory store with the test agencies registered."""
    database = Database(MEMORY_URL)
    await database.create_tables()
    await database.upsert_agencies(list(AGENCIES.values()))

    yield database

    await database.drop_tables()
    await database.dispose()


@pytest_asyncio.fixture(scope="function")
async def repo(db: Database) -> AsyncGenerator[Repositories, None]:
    """Repositories bound to one session of the test store."""
    async with db.get_repo() as repo:
        yield repo
