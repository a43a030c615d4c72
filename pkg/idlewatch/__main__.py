from __future__ import annotations

import argparse
import asyncio
import contextlib
import logging
import signal
import sys
from pathlib import Path
from typing import Sequence

from idlewatch import __version__
from idlewatch.audit import DEFAULT_THRESHOLD_M, ShapeIndex, load_gtfs_static, read_operations, render_text, run_battery
from idlewatch.audit.report import write_report
from idlewatch.config import PipelineConfig, load_config
from idlewatch.core import DetectorParams
from idlewatch.database import Database, ExportRange, export_csv
from idlewatch.exceptions import ApiError, AuditError, ConfigError, IdlewatchError, StoreError
from idlewatch.pipeline import Supervisor
from idlewatch.settings import settings
from idlewatch.sim import load_script, random_script, serve_script
from idlewatch.utils.clock import ShiftedClock, SystemClock
from idlewatch.utils.log import get_telegram_handler, init_logger

logger = logging.getLogger(__name__)


def _gtfs_arg(value: str) -> tuple[str, Path]:
    iata_id, sep, path = value.partition("=")
    if not sep or len(iata_id) != 3 or not path:
        raise argparse.ArgumentTypeError(f"expected IATA=PATH, got {value!r}")
    return iata_id.upper(), Path(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idlewatch", description="Realtime transit idling detection")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--no-log-file", action="store_true", help="log to the console only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="poll, detect, stream and store events")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--r", type=int, help="polling interval in seconds")
    run.add_argument("--h", type=int, help="ticks a vehicle must hold still before it counts as idling")
    run.add_argument("--m", type=int, help="missed ticks before a candidate is forgotten")

    export = sub.add_parser("export", help="write stored events to CSV")
    export.add_argument("--config", type=Path, help="pipeline config naming the store; defaults to DB_* settings")
    export.add_argument("--range", required=True, type=ExportRange.parse, dest="export_range", metavar="START..END")
    export.add_argument("--out", required=True, type=Path)

    audit = sub.add_parser("audit", help="run the data quality battery over an export")
    audit.add_argument("file", type=Path)
    audit.add_argument("--gtfs", action="append", default=[], type=_gtfs_arg, metavar="IATA=PATH")
    audit.add_argument("--operations", type=Path, help="CSV of iata_id,vehicle_id,seconds in service")
    audit.add_argument("--dm", type=float, default=DEFAULT_THRESHOLD_M, help="distance threshold in meters")
    audit.add_argument("--r", type=int, default=30)
    audit.add_argument("--h", type=int, default=1)
    audit.add_argument("--out", type=Path, default=Path("audit"))

    simulate = sub.add_parser("simulate", help="serve a fleet script as a GTFS Realtime feed")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("script", nargs="?", type=Path)
    source.add_argument("--random", type=int, metavar="SEED", help="serve a generated script")
    simulate.add_argument("--host", default="127.0.0.1")
    simulate.add_argument("--port", type=int, default=8080)
    simulate.add_argument("--speed", type=float, default=1.0, help="replay speed relative to wall time")
    simulate.add_argument("--script-time", action="store_true", help="start at the script's start_time, not now")

    return parser


async def _wait_for_signal() -> None:
    stop = asyncio.Event()
    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        with contextlib.suppress(NotImplementedError):
            loop.add_signal_handler(sig, stop.set)
    await stop.wait()


async def run_pipeline(config: PipelineConfig) -> None:
    supervisor = Supervisor(config)
    try:
        await supervisor.start()
    except (StoreError, ApiError) as e:
        logger.error("Failed to start: %s", e)
        sys.exit(1)

    supervisor.install_signal_handlers()
    await supervisor.run()


async def run_export(args: argparse.Namespace) -> None:
    url = load_config(args.config).store.resolve_url() if args.config else settings.db.build_url()
    db = Database(url)
    try:
        rows = await export_csv(db, args.export_range, args.out)
    finally:
        await db.dispose()
    logger.info("%s rows written to %s", rows, args.out)


def run_audit(args: argparse.Namespace) -> None:
    indexes = {iata_id: ShapeIndex.build(iata_id, load_gtfs_static(path)) for iata_id, path in args.gtfs}
    operations = read_operations(args.operations) if args.operations else None
    min_duration = DetectorParams(r=args.r, h=args.h).min_duration

    report = run_battery(args.file, indexes, d_m=args.dm, min_duration=min_duration, operations=operations)
    write_report(report, args.out)
    sys.stdout.write(render_text(report))


async def run_simulator(args: argparse.Namespace) -> None:
    script = load_script(args.script) if args.script else random_script(args.random)
    if args.script_time or args.speed != 1.0:
        clock = ShiftedClock(script.start_time if args.script_time else SystemClock().now(), args.speed)
    else:
        clock = SystemClock()

    handle = await serve_script(script, args.host, args.port, clock)
    try:
        await _wait_for_signal()
    finally:
        await handle.stop()


async def _main(args: argparse.Namespace) -> None:
    alerts = get_telegram_handler()
    if alerts is not None:
        alerts.install()
        logging.getLogger().addHandler(alerts)

    try:
        if args.command == "run":
            config = load_config(args.config).with_overrides(args.r, args.h, args.m)
            await run_pipeline(config)
        elif args.command == "export":
            await run_export(args)
        elif args.command == "audit":
            run_audit(args)
        elif args.command == "simulate":
            await run_simulator(args)
    finally:
        if alerts is not None:
            await alerts.send_logs()
            alerts.close()
            await alerts.bot.session.close()


def main(argv: Sequence[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    init_logger(to_file=not args.no_log_file)

    try:
        asyncio.run(_main(args))
    except KeyboardInterrupt:
        logger.info("Interrupted")
    except (ConfigError, AuditError, StoreError, ApiError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        sys.exit(1)
    except (IdlewatchError, OSError, ValueError) as e:
        logger.error("idlewatch %s failed: %s", args.command, e)
        sys.exit(1)


if __name__ == "__main__":
    main()
