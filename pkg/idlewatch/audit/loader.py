from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd
from pandas.errors import EmptyDataError

from idlewatch.database.repos import EXPORT_COLUMNS
from idlewatch.exceptions import SchemaMismatch

logger = logging.getLogger(__name__)

STRING_FIELDS = ["iata_id", "agency", "city", "country", "region", "continent", "vehicle_id", "route_id", "trip_id"]
FLOAT_FIELDS = ["latitude", "longitude"]
INTEGER_FIELDS = ["datetime", "duration"]

# field order used for the numbered type and missingness tests
AUDIT_FIELDS = STRING_FIELDS + FLOAT_FIELDS + INTEGER_FIELDS


@dataclass
class ExportFile:
    """An export read back as text: every cell a string, empty cells as ''."""

    path: Path | None
    header: list[str]
    frame: pd.DataFrame

    @property
    def rows(self) -> int:
        return len(self.frame)

    @property
    def schema_ok(self) -> bool:
        return self.header == EXPORT_COLUMNS

    def require_schema(self) -> None:
        if not self.schema_ok:
            raise SchemaMismatch(EXPORT_COLUMNS, self.header)

    def numeric(self, column: str) -> pd.Series:
        return pd.to_numeric(self.frame[column].where(self.frame[column] != ""), errors="coerce")


def read_export(path: str | Path) -> ExportFile:
    path = Path(path)
    try:
        raw_header = pd.read_csv(path, header=None, nrows=1, dtype=str, keep_default_na=False)
        header = [str(name) for name in raw_header.iloc[0].tolist()]
    except EmptyDataError:
        logger.warning("%s is empty", path)
        return ExportFile(path, [], pd.DataFrame())

    frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False)
    return ExportFile(path, header, frame)


def from_frame(frame: pd.DataFrame) -> ExportFile:
    """Wrap an in-memory frame the way ``read_export`` would load it."""
    text = frame.astype(object).where(frame.notna(), "").astype(str)
    return ExportFile(None, [str(c) for c in frame.columns], text.reset_index(drop=True))
