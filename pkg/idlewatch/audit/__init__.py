from .checks import (
    audit_duplication,
    audit_duration,
    audit_geobounds,
    audit_missingness,
    audit_temporal,
    audit_types,
    episodes,
)
from .gtfs_static import GtfsStatic, RouteShape, ShapeIndex, load_gtfs_static
from .loader import AUDIT_FIELDS, ExportFile, from_frame, read_export
from .report import AuditEntry, AuditReport, read_operations, render_text, run_battery, write_report
from .spatial import (
    DEFAULT_THRESHOLD_M,
    audit_spatial,
    event_distances,
    meters_to_degrees,
    spatial_point_error,
    threshold_sweep,
)

__all__ = [
    "audit_duplication",
    "audit_duration",
    "audit_geobounds",
    "audit_missingness",
    "audit_temporal",
    "audit_types",
    "episodes",
    "GtfsStatic",
    "RouteShape",
    "ShapeIndex",
    "load_gtfs_static",
    "AUDIT_FIELDS",
    "ExportFile",
    "from_frame",
    "read_export",
    "AuditEntry",
    "AuditReport",
    "read_operations",
    "render_text",
    "run_battery",
    "write_report",
    "DEFAULT_THRESHOLD_M",
    "audit_spatial",
    "event_distances",
    "meters_to_degrees",
    "spatial_point_error",
    "threshold_sweep",
]
