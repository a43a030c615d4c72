from __future__ import annotations

from typing import TYPE_CHECKING, Generic, TypeVar

from sqlalchemy import func, select

from idlewatch.database.models.base_models import Base

if TYPE_CHECKING:
    from sqlalchemy.ext.asyncio import AsyncSession


Model = TypeVar("Model", bound=Base)


class BaseRepo(Generic[Model]):
    model: type[Model]

    def __init__(self, session: AsyncSession) -> None:
        self.session = session

        if getattr(self, "model", None) is None:
            msg = "It is necessary to define the 'model' attribute in the descendant class."
            raise NotImplementedError(msg)

    async def count(self) -> int:
        stmt = select(func.count()).select_from(self.model)
        return (await self.session.execute(stmt)).scalar_one()
