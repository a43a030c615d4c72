from __future__ import annotations

import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

logger = logging.getLogger(__name__)

REQUIRED_TABLES = ("routes.txt", "trips.txt", "shapes.txt")


@dataclass(frozen=True)
class RouteShape:
    shape_id: str
    points: np.ndarray  # (n, 2) latitude, longitude in sequence order

    def __post_init__(self) -> None:
        if self.points.ndim != 2 or self.points.shape[1] != 2 or len(self.points) < 2:
            raise ValueError(f"shape {self.shape_id} needs at least two (lat, lon) points")
        lat, lon = self.points[:, 0], self.points[:, 1]
        if (np.abs(lat) > 90).any() or (np.abs(lon) > 180).any():
            raise ValueError(f"shape {self.shape_id} has points outside WGS84 bounds")


@dataclass
class GtfsStatic:
    routes: pd.DataFrame
    trips: pd.DataFrame
    shapes: pd.DataFrame


def _read_table(source: IO[bytes] | Path, columns: list[str]) -> pd.DataFrame:
    frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8-sig")
    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ValueError(f"GTFS table is missing columns {missing}")
    return frame[columns].copy()


def load_gtfs_static(path: str | Path) -> GtfsStatic:
    """Load routes, trips and shapes from a GTFS zip or an unpacked directory."""
    path = Path(path)
    columns = {
        "routes.txt": ["route_id"],
        "trips.txt": ["route_id", "trip_id", "shape_id"],
        "shapes.txt": ["shape_id", "shape_pt_lat", "shape_pt_lon", "shape_pt_sequence"],
    }

    tables: dict[str, pd.DataFrame] = {}
    if path.is_dir():
        for name in REQUIRED_TABLES:
            tables[name] = _read_table(path / name, columns[name])
    else:
        with zipfile.ZipFile(path) as z:
            names = {Path(n).name: n for n in z.namelist()}
            for name in REQUIRED_TABLES:
                if name not in names:
                    raise ValueError(f"{path} has no {name}")
                with z.open(names[name]) as f:
                    tables[name] = _read_table(f, columns[name])

    shapes = tables["shapes.txt"]
    shapes["shape_pt_lat"] = shapes["shape_pt_lat"].astype(float)
    shapes["shape_pt_lon"] = shapes["shape_pt_lon"].astype(float)
    shapes["shape_pt_sequence"] = shapes["shape_pt_sequence"].astype(int)

    logger.debug("Loaded %s: %s routes, %s trips, %s shape points", path, *(len(t) for t in tables.values()))
    return GtfsStatic(tables["routes.txt"], tables["trips.txt"], shapes)


def route_shapes(static: GtfsStatic) -> list[RouteShape]:
    shapes = []
    ordered = static.shapes.sort_values(["shape_id", "shape_pt_sequence"], kind="stable")
    for shape_id, group in ordered.groupby("shape_id", sort=True):
        points = group[["shape_pt_lat", "shape_pt_lon"]].to_numpy(dtype=float)
        try:
            shapes.append(RouteShape(str(shape_id), points))
        except ValueError as e:
            logger.warning("Skipping shape: %s", e)
    return shapes


@dataclass
class ShapeIndex:
    """Per-shape K-D trees plus route/trip lookups, keyed by agency so several feeds can share a city."""

    trees: dict[str, cKDTree] = field(default_factory=dict)
    points: dict[str, np.ndarray] = field(default_factory=dict)
    route_shapes: dict[tuple[str, str], list[str]] = field(default_factory=dict)
    trip_shape: dict[tuple[str, str], str] = field(default_factory=dict)

    @classmethod
    def build(cls, iata_id: str, static: GtfsStatic) -> ShapeIndex:
        index = cls()
        for shape in route_shapes(static):
            key = f"{iata_id}:{shape.shape_id}"
            index.trees[key] = cKDTree(shape.points)
            index.points[key] = shape.points

        trips = static.trips[static.trips["shape_id"] != ""]
        for route_id, group in trips.groupby("route_id", sort=True):
            keys = sorted({f"{iata_id}:{s}" for s in group["shape_id"]} & index.trees.keys())
            if keys:
                index.route_shapes[(iata_id, str(route_id))] = keys
        for trip_id, shape_id in zip(trips["trip_id"], trips["shape_id"]):
            key = f"{iata_id}:{shape_id}"
            if key in index.trees:
                index.trip_shape[(iata_id, str(trip_id))] = key
        return index

    @classmethod
    def combine(cls, indexes: Iterable[ShapeIndex]) -> ShapeIndex:
        merged = cls()
        for index in indexes:
            merged.trees.update(index.trees)
            merged.points.update(index.points)
            merged.route_shapes.update(index.route_shapes)
            merged.trip_shape.update(index.trip_shape)
        return merged

    def candidates(self, iata_id: str, route_id: str | None, trip_id: str | None) -> list[str]:
        """Shapes an event is checked against: its route's shapes, else its trip's shape."""
        if route_id:
            keys = self.route_shapes.get((iata_id, route_id))
            if keys:
                return keys
        if trip_id:
            key = self.trip_shape.get((iata_id, trip_id))
            if key is not None:
                return [key]
        return []

    def __len__(self) -> int:
        return len(self.trees)
