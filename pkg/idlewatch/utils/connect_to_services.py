import logging
import time

from sqlalchemy import text

from idlewatch.database import Database

logger = logging.getLogger(__name__)

VERSION_QUERIES = {
    "sqlite": "SELECT sqlite_version();",
    "postgresql": "SELECT version();",
}


async def test_database_pool(db: Database) -> float:
    """Round-trip the store once; returns the ping in milliseconds."""
    async with db.get_repo() as repo:
        start = time.perf_counter()
        info = (await repo.session.execute(text(VERSION_QUERIES.get(db.backend, "SELECT 1;")))).scalar()
        ping = round((time.perf_counter() - start) * 1000, 3)

    if isinstance(info, str):
        version = info.split()[1] if db.backend == "postgresql" else info
    else:
        version = "unknown"

    logger.debug("Successful connected to %s(%s). Ping: %s ms", db.backend, version, ping)
    return ping
