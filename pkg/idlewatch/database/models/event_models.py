from __future__ import annotations

from sqlalchemy import Index
from sqlalchemy.orm import Mapped

from idlewatch.core import IdlingEvent

from .base_models import Base
from .mixins import AgencyRelationshipMixin
from .types import degrees, epoch, intpk, seconds, str_128_optional, str_128


class Event(AgencyRelationshipMixin, Base):
    """Fact table: one row per emitted idling event, re-emissions included."""

    __tablename__ = "events"
    __table_args__ = (Index("ix_events_datetime_iata", "datetime", "iata_id"),)
    _agency_back_populates = "events"
    _repr_attrs = ["iata_id", "vehicle_id", "datetime", "duration"]

    id: Mapped[intpk]
    vehicle_id: Mapped[str_128]
    route_id: Mapped[str_128_optional]
    trip_id: Mapped[str_128_optional]
    latitude: Mapped[degrees]
    longitude: Mapped[degrees]
    datetime: Mapped[epoch]
    duration: Mapped[seconds]

    @classmethod
    def from_event(cls, event: IdlingEvent) -> Event:
        return cls(**event.as_row())

    def to_event(self) -> IdlingEvent:
        return IdlingEvent(
            iata_id=self.iata_id,
            vehicle_id=self.vehicle_id,
            route_id=self.route_id,
            trip_id=self.trip_id,
            latitude=self.latitude,
            longitude=self.longitude,
            datetime=self.datetime,
            duration=self.duration,
        )
