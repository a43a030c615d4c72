from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import pandas as pd

from idlewatch.config import DEFAULT_TZ
from idlewatch.database.engine import Database
from idlewatch.database.repos import EXPORT_COLUMNS

logger = logging.getLogger(__name__)

_EPOCH = re.compile(r"^-?\d+$")


def _parse_bound(value: str) -> int:
    value = value.strip()
    if _EPOCH.match(value):
        return int(value)
    parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if parsed.tzinfo is None:
        parsed = DEFAULT_TZ.localize(parsed)
    return int(parsed.timestamp())


@dataclass(frozen=True, slots=True)
class ExportRange:
    """Inclusive range of event start times, epoch seconds."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"export range start {self.start} must be before end {self.end}")

    @classmethod
    def parse(cls, text: str) -> ExportRange:
        """Parse ``start..end``; each bound is epoch seconds or an ISO-8601 timestamp (UTC unless stated)."""
        start, sep, end = text.partition("..")
        if not sep or not start or not end:
            raise ValueError(f"expected 'start..end', got {text!r}")
        return cls(_parse_bound(start), _parse_bound(end))

    def __contains__(self, epoch: int) -> bool:
        return self.start <= epoch <= self.end


def export_frame(rows: list[dict[str, object]]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=EXPORT_COLUMNS)
    for column in ("datetime", "duration"):
        frame[column] = frame[column].astype("int64")
    for column in ("latitude", "longitude"):
        frame[column] = frame[column].astype("float64")
    return frame


async def export_csv(db: Database, export_range: ExportRange, destination: str | Path) -> int:
    """Write the joined agency/events export for ``export_range`` to ``destination``; returns the data row count."""
    async with db.get_repo() as repo:
        rows = await repo.events.export_rows(export_range.start, export_range.end)

    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    tmp = destination.with_suffix(destination.suffix + ".part")

    export_frame(rows).to_csv(
        tmp,
        index=False,
        encoding="utf-8",
        lineterminator="\n",
        quoting=csv.QUOTE_MINIMAL,
    )
    tmp.replace(destination)

    logger.info("Exported %s events in [%s, %s] to %s", len(rows), export_range.start, export_range.end, destination)
    return len(rows)
