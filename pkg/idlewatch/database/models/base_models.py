from __future__ import annotations

from sqlalchemy.orm import DeclarativeBase

from idlewatch.database.models.mixins import ReprMixin


class Base(DeclarativeBase, ReprMixin):
    __abstract__ = True
