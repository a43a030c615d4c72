"""Utils for tests."""
from . import builders

__all__ = ["builders"]
