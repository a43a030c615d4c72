from .region import RegionPipeline, RegionStats
from .supervisor import Supervisor

__all__ = [
    "RegionPipeline",
    "RegionStats",
    "Supervisor",
]
