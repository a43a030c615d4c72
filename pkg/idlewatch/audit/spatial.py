"""Spatial point error: how far idling events sit from the route shapes of their city."""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import pandas as pd

from idlewatch.audit.gtfs_static import ShapeIndex
from idlewatch.exceptions import DegenerateLatitude, NoMapping

logger = logging.getLogger(__name__)

METERS_PER_DEGREE = 111_320.0
DEFAULT_THRESHOLD_M = 25.0
SWEEP_RANGE = range(0, 101)


def meters_to_degrees(d_m: float, phi: float) -> float:
    """Distance threshold in degrees at mean latitude ``phi``.

    Uses the east-west scale, so north-south displacements are judged up to 1/cos(phi) more leniently.
    """
    if not math.isfinite(phi) or abs(phi) >= 90:
        raise DegenerateLatitude(f"cannot convert meters to degrees at latitude {phi}")
    return d_m / (METERS_PER_DEGREE * math.cos(math.radians(phi)))


@dataclass(frozen=True)
class EventDistances:
    """Nearest shape-vertex distance (degrees) of every event that maps to at least one shape."""

    distances: np.ndarray
    latitudes: np.ndarray
    unmapped: int

    @property
    def n(self) -> int:
        return len(self.distances)

    @property
    def phi(self) -> float:
        return float(self.latitudes.mean())

    def error_pct(self, d_m: float) -> float:
        if self.n == 0:
            raise NoMapping("no event could be matched to a route shape")
        d_d = meters_to_degrees(d_m, self.phi)
        return 100.0 * float((self.distances > d_d).sum()) / self.n


def _text(value: object) -> str | None:
    return str(value) if value not in ("", None) and not pd.isna(value) else None


def event_distances(events: pd.DataFrame, index: ShapeIndex) -> EventDistances:
    """Query each event against its candidate shapes' K-D trees and keep the minimum distance.

    Events with no candidate shape, or without usable coordinates, are left out of ``n``.
    """
    lat = pd.to_numeric(events["latitude"], errors="coerce").to_numpy(dtype=float)
    lon = pd.to_numeric(events["longitude"], errors="coerce").to_numpy(dtype=float)

    groups: dict[tuple[str, ...], list[int]] = defaultdict(list)
    unmapped = 0
    for pos, (iata_id, route_id, trip_id) in enumerate(
        zip(events["iata_id"], events["route_id"], events["trip_id"], strict=True)
    ):
        keys = index.candidates(str(iata_id), _text(route_id), _text(trip_id))
        if not keys or not (np.isfinite(lat[pos]) and np.isfinite(lon[pos])):
            unmapped += 1
            continue
        groups[tuple(keys)].append(pos)

    if not groups:
        return EventDistances(np.empty(0), np.empty(0), unmapped)

    positions: list[int] = []
    distances: list[np.ndarray] = []
    for keys, members in groups.items():
        points = np.column_stack([lat[members], lon[members]])
        best = np.full(len(members), np.inf)
        for key in keys:
            d, _ = index.trees[key].query(points, k=1)
            np.minimum(best, d, out=best)
        positions.extend(members)
        distances.append(best)

    order = np.argsort(np.asarray(positions), kind="stable")
    mapped = np.asarray(positions)[order]
    return EventDistances(np.concatenate(distances)[order], lat[mapped], unmapped)


def spatial_point_error(events: pd.DataFrame, index: ShapeIndex, d_m: float = DEFAULT_THRESHOLD_M) -> float:
    """Percentage of mappable events farther than ``d_m`` meters from every candidate shape vertex."""
    return event_distances(events, index).error_pct(d_m)


@dataclass(frozen=True)
class CitySpatial:
    region: str
    city: str
    n: int
    unmapped: int
    phi: float
    error_pct: float


@dataclass(frozen=True)
class RegionSpatial:
    region: str
    unweighted: float
    weighted: float


@dataclass
class SpatialAudit:
    d_m: float
    cities: list[CitySpatial] = field(default_factory=list)
    regions: list[RegionSpatial] = field(default_factory=list)
    excluded: dict[str, str] = field(default_factory=dict)
    distances: dict[tuple[str, str], EventDistances] = field(default_factory=dict)

    @property
    def unweighted(self) -> float | None:
        return _unweighted(self.cities)

    @property
    def weighted(self) -> float | None:
        return _weighted(self.cities)


def _unweighted(cities: list[CitySpatial]) -> float | None:
    if not cities:
        return None
    return sum(c.error_pct for c in cities) / len(cities)


def _weighted(cities: list[CitySpatial]) -> float | None:
    total = sum(c.n for c in cities)
    if not total:
        return None
    return sum(c.error_pct * c.n for c in cities) / total


def city_groups(frame: pd.DataFrame) -> dict[tuple[str, str], pd.DataFrame]:
    """Events keyed by (region, city), both sorted."""
    if frame.empty:
        return {}
    return {(str(region), str(city)): group for (region, city), group in frame.groupby(["region", "city"], sort=True)}


def audit_spatial(
    frame: pd.DataFrame,
    indexes: Mapping[str, ShapeIndex],
    d_m: float = DEFAULT_THRESHOLD_M,
) -> SpatialAudit:
    """Per-city spatial error, with region and global averages.

    ``indexes`` maps IATA ids to their GTFS static shapes; a city served by several
    agencies is checked against the union of their shapes. Cities that cannot be
    mapped are listed in ``excluded`` with the reason.
    """
    audit = SpatialAudit(d_m)
    by_region: dict[str, list[CitySpatial]] = defaultdict(list)

    for (region, city), group in city_groups(frame).items():
        iata_ids = sorted(set(group["iata_id"]))
        available = [indexes[i] for i in iata_ids if i in indexes]
        if not available:
            audit.excluded[city] = f"no GTFS static bundle for {', '.join(iata_ids)}"
            continue

        index = available[0] if len(available) == 1 else ShapeIndex.combine(available)
        distances = event_distances(group, index)
        try:
            error = distances.error_pct(d_m)
        except (NoMapping, DegenerateLatitude) as e:
            audit.excluded[city] = str(e)
            logger.info("Excluding %s from spatial tests: %s", city, e)
            continue

        result = CitySpatial(region, city, distances.n, distances.unmapped, distances.phi, error)
        audit.cities.append(result)
        audit.distances[(region, city)] = distances
        by_region[region].append(result)

    for region in sorted(by_region):
        cities = by_region[region]
        audit.regions.append(RegionSpatial(region, _unweighted(cities) or 0.0, _weighted(cities) or 0.0))
    return audit


def threshold_sweep(
    distances: Iterable[EventDistances],
    thresholds: Iterable[float] = SWEEP_RANGE,
) -> pd.DataFrame:
    """Average error per threshold across cities; weights are the cities' event counts.

    Columns: ``d_m``, ``unweighted``, ``weighted``.
    """
    cities = [d for d in distances if d.n]
    rows = []
    for d_m in thresholds:
        errors = np.array([c.error_pct(d_m) for c in cities])
        weights = np.array([c.n for c in cities], dtype=float)
        rows.append({
            "d_m": d_m,
            "unweighted": float(errors.mean()) if len(errors) else float("nan"),
            "weighted": float(np.average(errors, weights=weights)) if len(errors) else float("nan"),
        })
    return pd.DataFrame(rows, columns=["d_m", "unweighted", "weighted"])
