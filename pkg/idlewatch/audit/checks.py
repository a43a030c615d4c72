"""Row-level checks over an export: types, duplication, missingness, bounds, timing and duration."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import pandas as pd

from idlewatch.audit.loader import AUDIT_FIELDS, FLOAT_FIELDS, INTEGER_FIELDS, ExportFile

_INTEGER = re.compile(r"^[+-]?\d+$")
_FLOAT = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

DOWNTIME_GAP = 60
ADJUSTED_IDLE_MIN = 300


def _pct(part: float, whole: float) -> float:
    return 100.0 * part / whole if whole else 0.0


@dataclass(frozen=True)
class TypeVerdict:
    field: str
    expected: str
    found: str

    @property
    def passed(self) -> bool:
        return self.found in (self.expected, "empty")


def _infer(values: pd.Series) -> str:
    present = values[values != ""]
    if present.empty:
        return "empty"
    if present.str.fullmatch(_INTEGER).all():
        return "integer"
    if present.str.fullmatch(_FLOAT).all():
        return "float"
    return "string"


def audit_types(export: ExportFile) -> list[TypeVerdict]:
    """One verdict per field in audit order. Raises ``SchemaMismatch`` on a foreign header."""
    export.require_schema()
    verdicts = []
    for name in AUDIT_FIELDS:
        found = _infer(export.frame[name]) if export.rows else "empty"
        if name in FLOAT_FIELDS:
            expected = "float"
            # whole-degree coordinates are still floats
            found = "float" if found == "integer" else found
        elif name in INTEGER_FIELDS:
            expected = "integer"
        else:
            expected = "string"
            found = "string" if found in ("integer", "float") else found
        verdicts.append(TypeVerdict(name, expected, found))
    return verdicts


def audit_duplication(export: ExportFile) -> tuple[float, float]:
    """(duplicated header names %, duplicated rows %); a row counts once per repeat after its first occurrence."""
    header = export.header
    duplicate_fields = len(header) - len(set(header))
    duplicate_rows = int(export.frame.duplicated().sum()) if export.rows else 0
    return _pct(duplicate_fields, len(header)), _pct(duplicate_rows, export.rows)


def audit_missingness(export: ExportFile) -> tuple[dict[str, float], float]:
    """Missing % per field and % of rows lacking both route_id and trip_id."""
    frame = export.frame
    per_field = {name: _pct(int((frame[name] == "").sum()), export.rows) for name in AUDIT_FIELDS}
    both = int(((frame["route_id"] == "") & (frame["trip_id"] == "")).sum()) if export.rows else 0
    return per_field, _pct(both, export.rows)


@dataclass(frozen=True)
class GeoBounds:
    lat_zero: float
    lat_over: float
    lat_under: float
    lon_zero: float
    lon_over: float
    lon_under: float


def audit_geobounds(export: ExportFile) -> GeoBounds:
    lat = export.numeric("latitude")
    lon = export.numeric("longitude")
    n = export.rows
    return GeoBounds(
        lat_zero=_pct(int((lat == 0).sum()), n),
        lat_over=_pct(int((lat > 90).sum()), n),
        lat_under=_pct(int((lat < -90).sum()), n),
        lon_zero=_pct(int((lon == 0).sum()), n),
        lon_over=_pct(int((lon > 180).sum()), n),
        lon_under=_pct(int((lon < -180).sum()), n),
    )


@dataclass(frozen=True)
class CityContiguity:
    downtime_pct: float
    max_gap: int
    elapsed: int
    rows: int


@dataclass(frozen=True)
class TemporalResult:
    zero_pct: float
    negative_pct: float
    downtime_pct: float
    max_gap: float
    elapsed: float
    zero_rows: bool
    per_city: dict[str, CityContiguity] = field(default_factory=dict)


def contiguity(datetimes: pd.Series) -> CityContiguity:
    """Gaps between consecutive observation times; downtime is the share of elapsed time in gaps over a minute."""
    times = datetimes.dropna().astype("int64").sort_values().to_numpy()
    if len(times) < 2:
        return CityContiguity(0.0, 0, 0, len(times))

    gaps = times[1:] - times[:-1]
    elapsed = int(times[-1] - times[0])
    downtime = int(gaps[gaps > DOWNTIME_GAP].sum())
    return CityContiguity(_pct(downtime, elapsed), int(gaps.max()), elapsed, len(times))


def _by_city(export: ExportFile) -> dict[str, pd.DataFrame]:
    frame = export.frame
    return {str(city): group for city, group in frame.groupby("city", sort=True)}


def audit_temporal(export: ExportFile) -> TemporalResult:
    """Validity of ``datetime`` over all rows; contiguity per city, averaged across cities."""
    dt = export.numeric("datetime")
    n = export.rows
    zero_pct = _pct(int((dt == 0).sum()), n)
    negative_pct = _pct(int((dt < 0).sum()), n)

    per_city = {}
    for city, group in _by_city(export).items():
        valid = dt.loc[group.index]
        per_city[city] = contiguity(valid[valid > 0])

    if not per_city:
        return TemporalResult(zero_pct, negative_pct, 0.0, 0.0, 0.0, True, {})

    values = list(per_city.values())
    return TemporalResult(
        zero_pct=zero_pct,
        negative_pct=negative_pct,
        downtime_pct=sum(c.downtime_pct for c in values) / len(values),
        max_gap=sum(c.max_gap for c in values) / len(values),
        elapsed=sum(c.elapsed for c in values) / len(values),
        zero_rows=all(c.elapsed == 0 for c in values),
        per_city=per_city,
    )


@dataclass(frozen=True)
class CityIdleShare:
    adjusted_pct: float
    unadjusted_pct: float
    idle_adjusted: int
    idle_unadjusted: int
    operational: int
    vehicles: int


@dataclass(frozen=True)
class DurationResult:
    zero_pct: float
    negative_pct: float
    adjusted_pct: float
    unadjusted_pct: float
    per_city: dict[str, CityIdleShare] = field(default_factory=dict)


def episodes(frame: pd.DataFrame) -> pd.DataFrame:
    """Collapse re-emissions: one row per (iata_id, vehicle_id, datetime) with its longest duration."""
    typed = frame.assign(
        datetime=pd.to_numeric(frame["datetime"], errors="coerce"),
        duration=pd.to_numeric(frame["duration"], errors="coerce"),
    ).dropna(subset=["datetime", "duration"])
    typed = typed[(typed["datetime"] > 0) & (typed["duration"] > 0)]
    grouped = typed.groupby(["iata_id", "vehicle_id", "datetime"], as_index=False, sort=True)["duration"].max()
    return grouped.astype({"datetime": "int64", "duration": "int64"})


def idle_share(
    frame: pd.DataFrame,
    min_duration: int,
    operations: Mapping[tuple[str, str], int] | None = None,
) -> CityIdleShare:
    """Idle time over operational time for the vehicles of one city.

    Operational seconds come from ``operations`` when given (vehicles listed
    there for the city's agencies count even without events), otherwise from
    each vehicle's span in the file, first event start to last event end.
    """
    eps = episodes(frame)

    operational: dict[tuple[str, str], int] = {}
    if operations is not None:
        agencies = set(frame["iata_id"])
        operational = {key: int(sec) for key, sec in operations.items() if key[0] in agencies}
    else:
        ends = eps.assign(end=eps["datetime"] + eps["duration"])
        spans = ends.groupby(["iata_id", "vehicle_id"]).agg(first=("datetime", "min"), last=("end", "max"))
        operational = {key: int(row["last"] - row["first"]) for key, row in spans.iterrows()}

    idle_adj = int(eps.loc[eps["duration"] > ADJUSTED_IDLE_MIN, "duration"].sum())
    idle_all = int(eps.loc[eps["duration"] >= min_duration, "duration"].sum())
    total = sum(operational.values())
    return CityIdleShare(
        adjusted_pct=min(100.0, _pct(idle_adj, total)),
        unadjusted_pct=min(100.0, _pct(idle_all, total)),
        idle_adjusted=idle_adj,
        idle_unadjusted=idle_all,
        operational=total,
        vehicles=len(operational),
    )


def audit_duration(
    export: ExportFile,
    min_duration: int = 60,
    operations: Mapping[tuple[str, str], int] | None = None,
) -> DurationResult:
    """Validity of ``duration`` over all rows; idle shares per city, averaged across cities.

    ``min_duration`` is the detector's shortest event, (h+1)*r.
    """
    du = export.numeric("duration")
    n = export.rows
    zero_pct = _pct(int((du == 0).sum()), n)
    negative_pct = _pct(int((du < 0).sum()), n)

    per_city = {city: idle_share(group, min_duration, operations) for city, group in _by_city(export).items()}
    if not per_city:
        return DurationResult(zero_pct, negative_pct, 0.0, 0.0, {})

    values = list(per_city.values())
    return DurationResult(
        zero_pct=zero_pct,
        negative_pct=negative_pct,
        adjusted_pct=sum(c.adjusted_pct for c in values) / len(values),
        unadjusted_pct=sum(c.unadjusted_pct for c in values) / len(values),
        per_city=per_city,
    )
