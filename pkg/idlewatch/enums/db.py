from enum import Enum


class Databases(str, Enum):
    SQLite = "SQLite"
    PostgreSQl = "PostgreSQL"


class SQLiteDrivers(str, Enum):
    ASYNC_DRIVER = "aiosqlite"


class PostgreSQLDrivers(str, Enum):
    ASYNC_DRIVER = "asyncpg"
