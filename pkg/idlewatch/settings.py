from __future__ import annotations

from pathlib import Path

from dotenv import find_dotenv, load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

from idlewatch.enums.db import Databases, PostgreSQLDrivers, SQLiteDrivers

load_dotenv(find_dotenv())

ProjectDir = Path(__file__).parent.parent
LogDir = Path(ProjectDir) / "logs"


class DatabaseSettings(BaseSettings):
    used: Databases = Databases.SQLite
    ip: str = "127.0.0.1"
    user: str = "idlewatch"
    port: int = 5432
    password: str = "idlewatch"
    name: str = "idlewatch"
    path: str = str(ProjectDir / "idlewatch.sqlite3")

    model_config = SettingsConfigDict(env_prefix="DB_")

    def build_postgres_url(self) -> str:
        return (
            f"postgresql+{PostgreSQLDrivers.ASYNC_DRIVER.value}://"
            f"{self.user}:{self.password}@{self.ip}:{self.port}/{self.name}"
        )

    def build_sqlite_url(self) -> str:
        if self.path == ":memory:":
            return f"sqlite+{SQLiteDrivers.ASYNC_DRIVER.value}://"
        return f"sqlite+{SQLiteDrivers.ASYNC_DRIVER.value}:///{self.path}"

    def build_url(self) -> str:
        if self.used == Databases.PostgreSQl:
            return self.build_postgres_url()
        return self.build_sqlite_url()


class ApiSettings(BaseSettings):
    host: str = "127.0.0.1"
    port: int = 8765
    queue_depth: int = 64

    model_config = SettingsConfigDict(env_prefix="API_")


class AlertSettings(BaseSettings):
    bot_token: str | None = None
    chat_id: int | None = None

    model_config = SettingsConfigDict(env_prefix="ALERT_")

    @property
    def enabled(self) -> bool:
        return bool(self.bot_token and self.chat_id)


class Settings(BaseSettings):
    debug_mode: bool = False
    log_dir: Path = LogDir

    db: DatabaseSettings = DatabaseSettings()
    api: ApiSettings = ApiSettings()
    alert: AlertSettings = AlertSettings()


settings = Settings()
