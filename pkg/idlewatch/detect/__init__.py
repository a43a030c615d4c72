from .buffer import BufferState, push_snapshot
from .runner import Detector, run_detector
from .subset import CandidateEntry, StationaryTuple, intersect_stationary, stationary_window, step

__all__ = [
    "BufferState",
    "push_snapshot",
    "Detector",
    "run_detector",
    "CandidateEntry",
    "StationaryTuple",
    "intersect_stationary",
    "stationary_window",
    "step",
]
