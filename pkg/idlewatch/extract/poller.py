from __future__ import annotations

import asyncio
import logging
from collections import Counter
from typing import AsyncIterator, Sequence

import httpx

from idlewatch import __version__
from idlewatch.config import SourceConfig
from idlewatch.core import FeedSnapshot, SourceFailure, VehicleRecord
from idlewatch.enums import RejectReason
from idlewatch.exceptions import MalformedPayload, SourceFetchError
from idlewatch.extract.decode import DecodedFeed, decode_feed
from idlewatch.utils.clock import Clock, SystemClock
from idlewatch.utils.log import RateLimitedLog

logger = logging.getLogger(__name__)
failure_log = RateLimitedLog(logger)

USER_AGENT = f"idlewatch/{__version__}"


async def fetch_source(client: httpx.AsyncClient, source: SourceConfig, timeout: float, poll_time: int) -> DecodedFeed:
    headers = source.auth.as_headers() if source.auth else {}
    try:
        response = await asyncio.wait_for(
            client.get(source.endpoint_url, headers=headers, timeout=timeout),
            timeout=timeout,
        )
    except (asyncio.TimeoutError, httpx.TimeoutException) as e:
        raise SourceFetchError(source.endpoint_url, "timeout") from e
    except httpx.HTTPError as e:
        raise SourceFetchError(source.endpoint_url, f"{type(e).__name__}: {e}") from e

    if response.status_code != httpx.codes.OK:
        raise SourceFetchError(source.endpoint_url, f"HTTP {response.status_code}")

    try:
        return decode_feed(response.content, source.iata_id, poll_time)
    except MalformedPayload as e:
        raise SourceFetchError(source.endpoint_url, str(e)) from e


async def poll_once(
    client: httpx.AsyncClient,
    region_id: str,
    sources: Sequence[SourceConfig],
    poll_time: int,
    timeout: float,
) -> FeedSnapshot:
    """Fetch every source of a region concurrently and merge the results into one snapshot."""
    results = await asyncio.gather(
        *(fetch_source(client, source, timeout, poll_time) for source in sources),
        return_exceptions=True,
    )

    records: list[VehicleRecord] = []
    failures: list[SourceFailure] = []
    rejected: Counter[RejectReason] = Counter()

    for source, result in zip(sources, results, strict=True):
        if isinstance(result, BaseException):
            if not isinstance(result, SourceFetchError):
                if not isinstance(result, Exception):
                    raise result
                result = SourceFetchError(source.endpoint_url, f"{type(result).__name__}: {result}")
            failures.append(SourceFailure(source.endpoint_url, source.iata_id, result.reason))
            failure_log.warning(
                (region_id, source.endpoint_url),
                "Source %s (%s) failed in region %s: %s",
                source.endpoint_url,
                source.iata_id,
                region_id,
                result.reason,
            )
            continue

        records.extend(result.records)
        rejected.update(result.rejected)

    return FeedSnapshot.from_records(region_id, poll_time, records, tuple(failures), rejected)


async def poll_region(
    sources: Sequence[SourceConfig],
    r: int,
    *,
    region_id: str | None = None,
    client: httpx.AsyncClient | None = None,
    clock: Clock | None = None,
    ticks: int | None = None,
) -> AsyncIterator[FeedSnapshot]:
    """Yield one merged ``FeedSnapshot`` per tick, ticks spaced ``r`` seconds start-to-start.

    A tick that overruns its slot is followed immediately by the next one.
    ``ticks`` bounds the stream, mainly for tests and replays.
    """
    if r < 1:
        raise ValueError("r must be at least 1 second")
    if not sources and region_id is None:
        raise ValueError("region_id is required when there are no sources")

    region_id = region_id or sources[0].region_id
    clock = clock or SystemClock()
    timeout = r / 2

    owns_client = client is None
    if client is None:
        client = httpx.AsyncClient(headers={"User-Agent": USER_AGENT}, follow_redirects=True)

    try:
        next_tick = clock.now()
        emitted = 0
        while ticks is None or emitted < ticks:
            started = clock.now()
            snapshot = await poll_once(client, region_id, sources, round(started), timeout)
            logger.debug(
                "Region %s tick %s: %s records, %s failures",
                region_id,
                snapshot.poll_time,
                len(snapshot),
                len(snapshot.failures),
            )
            yield snapshot
            emitted += 1
            if ticks is not None and emitted >= ticks:
                break

            next_tick += r
            delay = next_tick - clock.now()
            if delay < 0:
                logger.warning("Region %s is %.1f s behind schedule", region_id, -delay)
                next_tick = clock.now()
                delay = 0
            await clock.sleep(delay)
    finally:
        if owns_client:
            await client.aclose()
