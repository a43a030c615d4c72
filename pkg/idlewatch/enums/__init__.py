from .db import Databases, PostgreSQLDrivers, SQLiteDrivers
from .records import RejectReason

__all__ = ["Databases", "PostgreSQLDrivers", "SQLiteDrivers", "RejectReason"]
