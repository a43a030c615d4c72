from __future__ import annotations


class IdlewatchError(Exception):
    """Base class for every error raised by idlewatch."""


class ConfigError(IdlewatchError, ValueError):
    pass


class ScriptError(ConfigError):
    """Invalid fleet simulator script."""


# extract


class MalformedPayload(IdlewatchError):
    """Protobuf envelope could not be parsed; the poll is skipped."""


class SourceFetchError(IdlewatchError):
    def __init__(self, endpoint_url: str, reason: str) -> None:
        super().__init__(f"{endpoint_url}: {reason}")
        self.endpoint_url = endpoint_url
        self.reason = reason


# detect


class OutOfOrderSnapshot(IdlewatchError):
    def __init__(self, newest: int, received: int) -> None:
        super().__init__(f"snapshot at {received} is older than buffered snapshot at {newest}")
        self.newest = newest
        self.received = received


# database


class StoreError(IdlewatchError):
    pass


class StoreUnavailable(StoreError):
    pass


class DuplicateIata(StoreError):
    def __init__(self, iata_ids: list[str]) -> None:
        super().__init__(f"duplicate iata_id in batch: {', '.join(iata_ids)}")
        self.iata_ids = iata_ids


class UnknownIata(StoreError):
    def __init__(self, iata_ids: list[str]) -> None:
        super().__init__(f"iata_id not in agency table: {', '.join(iata_ids)}")
        self.iata_ids = iata_ids


# api


class ApiError(IdlewatchError):
    pass


class BindFailure(ApiError):
    def __init__(self, host: str, port: int, reason: str = "address unavailable") -> None:
        super().__init__(f"cannot bind {host}:{port}: {reason}")
        self.host = host
        self.port = port


# audit


class AuditError(IdlewatchError):
    pass


class SchemaMismatch(AuditError):
    def __init__(self, expected: list[str], found: list[str]) -> None:
        super().__init__(f"export header mismatch: expected {expected}, found {found}")
        self.expected = expected
        self.found = found


class NoMapping(AuditError):
    """No event of a city could be matched to a route shape."""


class DegenerateLatitude(AuditError, ValueError):
    pass
