from __future__ import annotations

import asyncio
import html
import logging
import traceback
from datetime import date, datetime
from logging import LogRecord, StreamHandler
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Hashable

from aiogram import Bot
from cachetools import TTLCache

from idlewatch.config import DEFAULT_TZ
from idlewatch.settings import settings

TIME_FORMAT = "%Y-%m-%d"


class DailyRotatingFileHandler(RotatingFileHandler):
    def __init__(
        self,
        log_dir: Path,
        mode: str = "a",
        maxBytes: int = 0,  # noqa: N803
        backupCount: int = 0,  # noqa: N803
        encoding: str | None = "utf-8",
        delay: bool = False,
    ) -> None:
        self.log_dir = log_dir
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.today = self._today()
        RotatingFileHandler.__init__(self, self.get_filename(), mode, maxBytes, backupCount, encoding, delay)

    @staticmethod
    def _today() -> date:
        return datetime.now(DEFAULT_TZ).date()

    def get_filename(self) -> str:
        """Log file for the current day, ``<log_dir>/YYYY-MM-DD.log``."""
        return str(self.log_dir / (self._today().strftime(TIME_FORMAT) + ".log"))

    def shouldRollover(self, record: LogRecord) -> int:  # noqa: N802
        """Roll over when the file exceeds maxBytes or the date changes."""
        if self.stream is None:
            self.stream = self._open()

        if int(self.maxBytes) > 0:
            msg = f"{self.format(record)}\n"
            self.stream.seek(0, 2)
            if self.stream.tell() + len(msg) >= int(self.maxBytes):
                return 1

        today = self._today()
        if self.today != today:
            self.today = today
            self.baseFilename = self.get_filename()
            return 1

        return 0


class TelegramHandler(logging.Handler):
    """Operator alerts: ERROR records go out at once, INFO/WARNING are batched every ``timeout`` seconds."""

    ERROR_MESSAGE = (
        "<b>{name}</b> at {module}:{line} in {func}\n"
        "<b>{error}</b>\n"
        '<pre><code class="language-py">{traceback}</code></pre> \n'
    )
    ERROR_MESSAGE_WITHOUT_EXC_INFO = "ERROR {name}: {message}"
    INFO_MESSAGE = "{date} {level} {name}: {message}"

    def __init__(self, bot: Bot, log_chat_id: int, max_message_length: int = 4096, timeout: float = 60) -> None:
        super().__init__()

        self.bot = bot
        self.log_chat_id = log_chat_id
        self.max_message_length = max_message_length
        self.timeout = timeout
        self.buffer: list[str] = []
        self._poller: asyncio.Task[None] | None = None

    def install(self) -> None:
        """Start the batching task; needs a running event loop."""
        self.loop = asyncio.get_running_loop()
        self._poller = self.loop.create_task(self.queue_poller())

    async def queue_poller(self) -> None:
        while True:
            await asyncio.sleep(self.timeout)
            if self.buffer:
                await self.send_logs()

    def emit(self, record: LogRecord) -> None:
        if record.levelno in (logging.ERROR, logging.CRITICAL):
            self.send_extra_logs(record)
            return

        if record.levelno == logging.DEBUG:
            return

        self.add_log(record)

    async def send(self, message: str) -> None:
        try:
            await self.bot.send_message(self.log_chat_id, message, parse_mode="HTML")
        except Exception:  # noqa: BLE001
            logging.getLogger("Alerts").debug("alert delivery failed", exc_info=True)

    def send_extra_logs(self, record: LogRecord) -> None:
        if not record.exc_info or record.exc_info[0] is None:
            message = self.ERROR_MESSAGE_WITHOUT_EXC_INFO.format(
                name=html.escape(record.name),
                message=html.escape(record.getMessage()),
            )
        else:
            exc = "\n".join(traceback.format_exception(*record.exc_info)[-13:])
            error = f"{record.exc_info[0].__name__}: {record.exc_info[1]}"
            message = self.ERROR_MESSAGE.format(
                name=html.escape(record.name),
                module=html.escape(record.filename),
                line=record.lineno,
                func=html.escape(record.funcName),
                error=html.escape(error),
                traceback=html.escape(exc),
            )
        if self._poller is not None:
            self.loop.create_task(self.send(message))

    async def send_logs(self) -> None:
        for chunk in self.split_logs():
            if not chunk:
                break
            await self.send("\n".join(chunk))

        self.clear_logs()

    def clear_logs(self) -> None:
        self.buffer = []

    def add_log(self, record: LogRecord) -> None:
        text = self.INFO_MESSAGE.format(
            date=datetime.now(DEFAULT_TZ).strftime("%H:%M:%S"),
            level=record.levelname,
            name=html.escape(record.name),
            message=html.escape(record.getMessage()),
        )
        self.buffer.append(text)

    def split_logs(self) -> list[list[str]]:
        chunks: list[list[str]] = [[]]
        length = 0

        for line in self.buffer:
            if length + len(line) > self.max_message_length and chunks[-1]:
                chunks.append([])
                length = 0

            chunks[-1].append(line)
            length += len(line)

        return chunks

    def close(self) -> None:
        if self._poller is not None:
            self._poller.cancel()
        super().close()


class RateLimitedLog:
    """Logs a message at most once per key every ``ttl`` seconds.

    Used for per-source fetch failures, which otherwise repeat every poll.
    """

    def __init__(self, logger: logging.Logger, ttl: float = 300, maxsize: int = 10_000) -> None:
        self.logger = logger
        self.cache: TTLCache[Hashable, int] = TTLCache(maxsize=maxsize, ttl=ttl)

    def warning(self, key: Hashable, msg: str, *args: object) -> bool:
        suppressed = self.cache.get(key)
        if suppressed is not None:
            self.cache[key] = suppressed + 1
            return False

        self.cache[key] = 0
        self.logger.warning(msg, *args)
        return True


# Formatters
MAIN_FORMATTER = logging.Formatter(
    fmt="%(asctime)s [%(levelname)s]: %(name)s: %(message)s",
    datefmt="%H:%M:%S",
    style="%",
)


def _get_daily_handler() -> DailyRotatingFileHandler:
    daily_handler = DailyRotatingFileHandler(log_dir=settings.log_dir)
    daily_handler.setFormatter(MAIN_FORMATTER)
    daily_handler.setLevel(logging.DEBUG)

    return daily_handler


def get_telegram_handler() -> TelegramHandler | None:
    if not settings.alert.enabled or settings.alert.chat_id is None or settings.alert.bot_token is None:
        return None

    telegram_handler = TelegramHandler(bot=Bot(token=settings.alert.bot_token), log_chat_id=settings.alert.chat_id)
    telegram_handler.setFormatter(MAIN_FORMATTER)
    telegram_handler.setLevel(logging.INFO)

    return telegram_handler


def _get_console_handler() -> StreamHandler:  # type: ignore[type-arg]
    console_level = logging.DEBUG if settings.debug_mode else logging.INFO

    console_handler = StreamHandler()
    console_handler.setFormatter(MAIN_FORMATTER)
    console_handler.setLevel(console_level)
    return console_handler


def init_logger(*, to_file: bool = True) -> None:
    logging.getLogger().setLevel(logging.DEBUG)
    logging.getLogger().handlers = []
    if to_file:
        logging.getLogger().addHandler(_get_daily_handler())
    logging.getLogger().addHandler(_get_console_handler())

    logging.getLogger("aiogram").setLevel(logging.ERROR)
    logging.getLogger("asyncio").setLevel(logging.ERROR)
    logging.getLogger("aiosqlite").setLevel(logging.ERROR)
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("httpcore").setLevel(logging.WARNING)
    logging.getLogger("uvicorn.access").setLevel(logging.WARNING)
    logging.getLogger("websockets").setLevel(logging.WARNING)
