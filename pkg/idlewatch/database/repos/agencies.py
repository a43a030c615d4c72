from __future__ import annotations

import logging
from collections import Counter
from typing import Iterable, Sequence

from sqlalchemy import select

from idlewatch.core import AgencyInfo
from idlewatch.database.models import Agency
from idlewatch.exceptions import DuplicateIata

from .base import BaseRepo

logger = logging.getLogger(__name__)


class AgenciesRepo(BaseRepo[Agency]):
    model = Agency

    async def upsert_agencies(self, rows: Sequence[AgencyInfo]) -> int:
        """Insert or update one row per iata_id; returns the number of rows written."""
        counts = Counter(row.iata_id for row in rows)
        duplicates = sorted(iata for iata, n in counts.items() if n > 1)
        if duplicates:
            raise DuplicateIata(duplicates)

        for row in rows:
            await self.session.merge(Agency.from_info(row))
        await self.session.commit()

        logger.debug("Upserted %s agencies", len(rows))
        return len(rows)

    async def known_iata_ids(self, iata_ids: Iterable[str] | None = None) -> set[str]:
        q = select(Agency.iata_id)
        if iata_ids is not None:
            q = q.where(Agency.iata_id.in_(set(iata_ids)))
        return set((await self.session.execute(q)).scalars().all())

    async def get_infos(self) -> list[AgencyInfo]:
        rows = (await self.session.execute(select(Agency).order_by(Agency.iata_id))).scalars().all()
        return [row.to_info() for row in rows]
