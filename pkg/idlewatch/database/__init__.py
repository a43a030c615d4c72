from .engine import Database
from .export import ExportRange, export_csv
from .repos import EXPORT_COLUMNS, Repositories

__all__ = ["Database", "ExportRange", "export_csv", "EXPORT_COLUMNS", "Repositories"]
