from __future__ import annotations

from typing import TYPE_CHECKING, Any, ClassVar

from sqlalchemy import ForeignKey, String
from sqlalchemy.orm import Mapped, declared_attr, mapped_column, relationship

if TYPE_CHECKING:
    from .agency_models import Agency


class ReprMixin:
    _repr_max_length: ClassVar[int] = 25
    _repr_attrs: ClassVar[list[str]] = []

    def _repr_attrs_str(self) -> str:
        values = []
        for key in self._repr_attrs:
            if not hasattr(self, key):
                raise KeyError(f"{self.__class__} has incorrect attribute '{key}' in _repr_attrs")

            value = str(getattr(self, key))
            if len(value) > self._repr_max_length:
                value = value[: self._repr_max_length] + "..."
            values.append(f"{key}={value}")

        return " ".join(values)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self._repr_attrs_str()}>"


class AgencyRelationshipMixin:
    _agency_back_populates: ClassVar[str | None] = None
    _agency_relationship_kwargs: ClassVar[dict[str, Any]] = {}

    @declared_attr
    def iata_id(cls) -> Mapped[str]:
        return mapped_column(String(3), ForeignKey("agency.iata_id"), nullable=False, index=True)

    @declared_attr
    def agency(cls) -> Mapped[Agency]:
        return relationship("Agency", back_populates=cls._agency_back_populates, **cls._agency_relationship_kwargs)
