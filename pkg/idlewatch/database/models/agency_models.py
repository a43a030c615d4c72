from __future__ import annotations

from typing import TYPE_CHECKING

from sqlalchemy import String
from sqlalchemy.orm import Mapped, mapped_column, relationship

from idlewatch.core import AgencyInfo

from .base_models import Base
from .types import str_128, str_255

if TYPE_CHECKING:
    from .event_models import Event


class Agency(Base):
    __tablename__ = "agency"
    _repr_attrs = ["iata_id", "agency", "city"]

    iata_id: Mapped[str] = mapped_column(String(3), primary_key=True)
    agency: Mapped[str_255]
    city: Mapped[str_128]
    country: Mapped[str_128]
    region: Mapped[str_128]
    continent: Mapped[str_128]

    events: Mapped[list[Event]] = relationship(back_populates="agency", lazy="noload")

    @classmethod
    def from_info(cls, info: AgencyInfo) -> Agency:
        return cls(
            iata_id=info.iata_id,
            agency=info.agency,
            city=info.city,
            country=info.country,
            region=info.region,
            continent=info.continent,
        )

    def to_info(self) -> AgencyInfo:
        return AgencyInfo(self.iata_id, self.agency, self.city, self.country, self.region, self.continent)
