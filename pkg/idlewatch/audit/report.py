from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Iterator, Literal, Mapping

import pandas as pd
from pydantic import BaseModel, Field

from idlewatch.audit.checks import (
    audit_duplication,
    audit_duration,
    audit_geobounds,
    audit_missingness,
    audit_temporal,
    audit_types,
)
from idlewatch.audit.gtfs_static import ShapeIndex
from idlewatch.audit.loader import AUDIT_FIELDS, ExportFile, read_export
from idlewatch.audit.spatial import DEFAULT_THRESHOLD_M, SpatialAudit, audit_spatial, threshold_sweep
from idlewatch.exceptions import AuditError

logger = logging.getLogger(__name__)

Scope = Literal["global", "region", "city"]

# spatial entries fill 39..104, then continue after the last fixed test
SPATIAL_FIRST = 39
SPATIAL_LAST = 104
OVERFLOW_FIRST = 114

# route_id and trip_id may each be absent as long as the other is present
INFORMATIONAL_MISSING = {"route_id", "trip_id"}


class AuditEntry(BaseModel):
    number: int
    name: str
    scope: Scope = "global"
    subject: str = ""
    value: float | str | None = None
    unit: str = "%"
    passed: bool | None = None


class SweepPoint(BaseModel):
    d_m: float
    unweighted: float | None
    weighted: float | None


class AuditReport(BaseModel):
    source: str | None = None
    rows: int = 0
    zero_rows: bool = False
    d_m: float = DEFAULT_THRESHOLD_M
    entries: list[AuditEntry] = Field(default_factory=list)
    excluded: dict[str, str] = Field(default_factory=dict)
    sweep: list[SweepPoint] = Field(default_factory=list)
    errors: dict[str, str] = Field(default_factory=dict)

    def entry(self, number: int) -> AuditEntry:
        for entry in self.entries:
            if entry.number == number:
                return entry
        raise KeyError(number)

    def value(self, number: int) -> float | str | None:
        return self.entry(number).value

    @property
    def failed(self) -> list[AuditEntry]:
        return [e for e in self.entries if e.passed is False]


def _zero(name: str, number: int, value: float) -> AuditEntry:
    return AuditEntry(number=number, name=name, value=value, passed=value == 0.0)


def _type_entries(export: ExportFile) -> list[AuditEntry]:
    entries = [
        AuditEntry(
            number=1,
            name="file type",
            value=type(export.frame).__name__,
            unit="type",
            passed=isinstance(export.frame, pd.DataFrame),
        )
    ]
    for number, verdict in enumerate(audit_types(export), start=2):
        entries.append(
            AuditEntry(
                number=number,
                name=f"{verdict.field} type",
                value=verdict.found,
                unit=verdict.expected,
                passed=verdict.passed,
            )
        )
    return entries


def _duplication_entries(export: ExportFile) -> list[AuditEntry]:
    fields, observations = audit_duplication(export)
    return [_zero("duplicate fields", 15, fields), _zero("duplicate observations", 16, observations)]


def _missing_names() -> list[str]:
    names = list(AUDIT_FIELDS)
    names.insert(names.index("trip_id") + 1, "route_id | trip_id")
    return names


def _missingness_entries(export: ExportFile) -> list[AuditEntry]:
    per_field, joint = audit_missingness(export)
    entries = []
    for number, name in enumerate(_missing_names(), start=17):
        value = joint if name == "route_id | trip_id" else per_field[name]
        entry = _zero(f"{name} missing", number, value)
        if name in INFORMATIONAL_MISSING:
            entry.passed = None
        entries.append(entry)
    return entries


def _geobounds_entries(export: ExportFile) -> list[AuditEntry]:
    bounds = audit_geobounds(export)
    return [
        _zero("latitude zero", 31, bounds.lat_zero),
        _zero("latitude > 90", 32, bounds.lat_over),
        _zero("latitude < -90", 33, bounds.lat_under),
        _zero("longitude zero", 34, bounds.lon_zero),
        _zero("longitude > 180", 35, bounds.lon_over),
        _zero("longitude < -180", 36, bounds.lon_under),
    ]


def spatial_numbers() -> Iterator[int]:
    yield from range(SPATIAL_FIRST, SPATIAL_LAST + 1)
    n = OVERFLOW_FIRST
    while True:
        yield n
        n += 1


def _spatial_entries(spatial: SpatialAudit) -> list[AuditEntry]:
    entries = [
        AuditEntry(number=37, name="spatial point error, unweighted", value=spatial.unweighted),
        AuditEntry(number=38, name="spatial point error, weighted", value=spatial.weighted),
    ]
    numbers = spatial_numbers()
    for region in spatial.regions:
        for city in (c for c in spatial.cities if c.region == region.region):
            entries.append(
                AuditEntry(
                    number=next(numbers),
                    name="spatial point error",
                    scope="city",
                    subject=city.city,
                    value=city.error_pct,
                )
            )
        entries.append(
            AuditEntry(
                number=next(numbers),
                name="spatial point error, unweighted",
                scope="region",
                subject=region.region,
                value=region.unweighted,
            )
        )
        entries.append(
            AuditEntry(
                number=next(numbers),
                name="spatial point error, weighted",
                scope="region",
                subject=region.region,
                value=region.weighted,
            )
        )
    return entries


def _temporal_entries(export: ExportFile) -> list[AuditEntry]:
    temporal = audit_temporal(export)
    return [
        _zero("datetime zero", 105, temporal.zero_pct),
        _zero("datetime negative", 106, temporal.negative_pct),
        AuditEntry(number=107, name="downtime (> 1 min)", value=temporal.downtime_pct),
        AuditEntry(number=108, name="downtime max interval", value=temporal.max_gap, unit="s"),
        AuditEntry(number=109, name="elapsed time", value=temporal.elapsed, unit="s"),
    ]


def _duration_entries(
    export: ExportFile,
    min_duration: int,
    operations: Mapping[tuple[str, str], int] | None,
) -> list[AuditEntry]:
    duration = audit_duration(export, min_duration, operations)
    return [
        _zero("duration zero", 110, duration.zero_pct),
        _zero("duration negative", 111, duration.negative_pct),
        AuditEntry(number=112, name="idle share (> 5 min)", value=duration.adjusted_pct),
        AuditEntry(number=113, name=f"idle share (>= {min_duration} s)", value=duration.unadjusted_pct),
    ]


_PLACEHOLDERS: dict[str, list[tuple[int, str]]] = {
    "types": [(1, "file type")] + [(n, f"{f} type") for n, f in enumerate(AUDIT_FIELDS, start=2)],
    "duplication": [(15, "duplicate fields"), (16, "duplicate observations")],
    "missingness": [(n, f"{f} missing") for n, f in enumerate(_missing_names(), start=17)],
    "geobounds": [(n, "geolocation bounds") for n in range(31, 37)],
    "spatial": [(37, "spatial point error, unweighted"), (38, "spatial point error, weighted")],
    "temporal": [(n, "temporal") for n in range(105, 110)],
    "duration": [(n, "duration") for n in range(110, 114)],
}


def read_operations(path: str | Path) -> dict[tuple[str, str], int]:
    """Operational seconds per vehicle from a ``iata_id,vehicle_id,seconds`` CSV."""
    frame = pd.read_csv(path, dtype={"iata_id": str, "vehicle_id": str}, keep_default_na=False)
    missing = {"iata_id", "vehicle_id", "seconds"} - set(frame.columns)
    if missing:
        raise AuditError(f"{path} is missing columns {sorted(missing)}")
    totals = frame.groupby(["iata_id", "vehicle_id"])["seconds"].sum()
    return {(str(i), str(v)): int(s) for (i, v), s in totals.items()}


def run_battery(
    export: ExportFile | str | Path,
    indexes: Mapping[str, ShapeIndex] | None = None,
    *,
    d_m: float = DEFAULT_THRESHOLD_M,
    min_duration: int = 60,
    operations: Mapping[tuple[str, str], int] | None = None,
) -> AuditReport:
    """Run every audit over an export and assemble the numbered report.

    A failing audit is recorded under ``errors`` and its tests reported without a value;
    the remaining audits still run.
    """
    if not isinstance(export, ExportFile):
        export = read_export(export)
    indexes = indexes or {}

    report = AuditReport(
        source=str(export.path) if export.path else None,
        rows=export.rows,
        zero_rows=export.rows == 0,
        d_m=d_m,
    )

    spatial: SpatialAudit | None = None

    def spatial_entries(export: ExportFile) -> list[AuditEntry]:
        nonlocal spatial
        spatial = audit_spatial(export.frame, indexes, d_m)
        return _spatial_entries(spatial)

    sections: list[tuple[str, Callable[[ExportFile], list[AuditEntry]]]] = [
        ("types", _type_entries),
        ("duplication", _duplication_entries),
        ("missingness", _missingness_entries),
        ("geobounds", _geobounds_entries),
        ("spatial", spatial_entries),
        ("temporal", _temporal_entries),
        ("duration", lambda e: _duration_entries(e, min_duration, operations)),
    ]

    for name, section in sections:
        try:
            report.entries.extend(section(export))
        except (AuditError, KeyError, ValueError, TypeError) as e:
            logger.error("Audit %s failed: %s", name, e)
            report.errors[name] = f"{type(e).__name__}: {e}"
            report.entries.extend(
                AuditEntry(number=number, name=label, passed=False) for number, label in _PLACEHOLDERS[name]
            )

    if spatial is not None:
        report.excluded = dict(spatial.excluded)
        sweep = threshold_sweep(spatial.distances.values())
        report.sweep = [
            SweepPoint(
                d_m=float(row.d_m),
                unweighted=None if pd.isna(row.unweighted) else float(row.unweighted),
                weighted=None if pd.isna(row.weighted) else float(row.weighted),
            )
            for row in sweep.itertuples(index=False)
        ]

    report.entries.sort(key=lambda e: e.number)
    return report


def _format_value(entry: AuditEntry) -> str:
    if entry.value is None:
        return "n/a"
    if isinstance(entry.value, str):
        return entry.value
    if entry.unit == "%":
        return f"{entry.value:.2f} %"
    return f"{entry.value:.0f} {entry.unit}"


def render_text(report: AuditReport) -> str:
    status = {True: "ok", False: "FAIL", None: ""}
    lines = [
        f"Audit of {report.source or '<in-memory>'}: {report.rows} rows, D_m = {report.d_m:g} m",
        "",
        f"{'#':>4}  {'test':<40} {'scope':<8} {'subject':<24} {'value':>16}  status",
    ]
    for e in report.entries:
        lines.append(
            f"{e.number:>4}  {e.name:<40} {e.scope:<8} {e.subject:<24} {_format_value(e):>16}  {status[e.passed]}"
        )
    if report.excluded:
        lines += ["", "Excluded from spatial tests:"]
        lines += [f"  {city}: {reason}" for city, reason in sorted(report.excluded.items())]
    if report.errors:
        lines += ["", "Errors:"]
        lines += [f"  {name}: {message}" for name, message in report.errors.items()]
    if report.zero_rows:
        lines += ["", "Export has no data rows."]
    return "\n".join(lines) + "\n"


def write_report(report: AuditReport, out_dir: str | Path) -> dict[str, Path]:
    """Write ``report.json``, ``report.txt`` and ``sweep.csv`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out_dir / "report.json",
        "text": out_dir / "report.txt",
        "sweep": out_dir / "sweep.csv",
    }
    paths["json"].write_text(report.model_dump_json(indent=2), encoding="utf-8")
    paths["text"].write_text(render_text(report), encoding="utf-8")
    pd.DataFrame(
        [p.model_dump() for p in report.sweep],
        columns=["d_m", "unweighted", "weighted"],
    ).to_csv(paths["sweep"], index=False, lineterminator="\n")
    logger.info("Audit report written to %s", out_dir)
    return paths
