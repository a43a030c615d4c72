from __future__ import annotations

import logging
from typing import Any, Sequence

from sqlalchemy import func, insert, select

from idlewatch.core import IdlingEvent
from idlewatch.database.models import Agency, Event
from idlewatch.exceptions import UnknownIata

from .base import BaseRepo

logger = logging.getLogger(__name__)

EXPORT_COLUMNS = [
    "iata_id",
    "agency",
    "city",
    "country",
    "region",
    "continent",
    "vehicle_id",
    "trip_id",
    "route_id",
    "latitude",
    "longitude",
    "datetime",
    "duration",
]


class EventsRepo(BaseRepo[Event]):
    model = Event

    async def insert_events(self, batch: Sequence[IdlingEvent]) -> int:
        if not batch:
            return 0

        wanted = {event.iata_id for event in batch}
        known = set((await self.session.execute(select(Agency.iata_id).where(Agency.iata_id.in_(wanted)))).scalars())
        unknown = sorted(wanted - known)
        if unknown:
            raise UnknownIata(unknown)

        await self.session.execute(insert(Event), [event.as_row() for event in batch])
        await self.session.commit()
        return len(batch)

    async def count_between(self, start: int, end: int) -> int:
        stmt = select(func.count()).select_from(Event).where(Event.datetime.between(start, end))
        return (await self.session.execute(stmt)).scalar_one()

    async def fetch_events(self, start: int, end: int) -> list[IdlingEvent]:
        q = (
            select(Event)
            .where(Event.datetime.between(start, end))
            .order_by(Event.datetime, Event.iata_id, Event.vehicle_id, Event.id)
        )
        return [row.to_event() for row in (await self.session.execute(q)).scalars()]

    async def export_rows(self, start: int, end: int) -> list[dict[str, Any]]:
        """Agency columns joined to every event with ``start <= datetime <= end``."""
        q = (
            select(
                Agency.iata_id,
                Agency.agency,
                Agency.city,
                Agency.country,
                Agency.region,
                Agency.continent,
                Event.vehicle_id,
                Event.trip_id,
                Event.route_id,
                Event.latitude,
                Event.longitude,
                Event.datetime,
                Event.duration,
            )
            .join(Event, Agency.iata_id == Event.iata_id)
            .where(Event.datetime.between(start, end))
            .order_by(Event.datetime, Event.iata_id, Event.vehicle_id, Event.id)
        )
        return [dict(row._mapping) for row in await self.session.execute(q)]
