from __future__ import annotations

from dataclasses import dataclass

from sqlalchemy.ext.asyncio import AsyncSession

from .agencies import AgenciesRepo
from .events import EXPORT_COLUMNS, EventsRepo


@dataclass
class Repositories:
    session: AsyncSession
    agencies: AgenciesRepo
    events: EventsRepo

    @staticmethod
    def get_repo(session: AsyncSession) -> Repositories:
        return Repositories(session=session, agencies=AgenciesRepo(session), events=EventsRepo(session))


__all__ = [
    "EXPORT_COLUMNS",
    "Repositories",
]
