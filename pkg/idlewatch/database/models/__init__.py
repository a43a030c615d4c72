from .agency_models import Agency
from .base_models import Base
from .event_models import Event

__all__ = ["Base", "Agency", "Event"]
