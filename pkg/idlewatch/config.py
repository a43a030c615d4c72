"""Pipeline configuration file: regions, their GTFS Realtime sources and detector parameters.

Example (YAML)::

    params: {r: 30, h: 1, m: 10}
    store: {url: "sqlite+aiosqlite:///idlewatch.sqlite3"}
    api: {host: 127.0.0.1, port: 8765}
    regions:
      - region_id: us-east
        sources:
          - endpoint_url: https://example.org/gtfs-rt/vehicle-positions
            iata_id: BOS
            agency: Massachusetts Bay Transportation Authority
            city: Boston
            country: United States
            region: United States East
            continent: North America
            auth: {header: x-api-key, secret_env: MBTA_KEY}
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Any

import pytz
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator, model_validator

from idlewatch.core import IATA_PATTERN, AgencyInfo, DetectorParams
from idlewatch.exceptions import ConfigError
from idlewatch.settings import settings

DEFAULT_TZ = pytz.utc


class ParamsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: PositiveInt = 30
    h: PositiveInt = 1
    m: PositiveInt = 10
    epsilon: float = Field(default=0.0, ge=0.0)

    def to_params(self) -> DetectorParams:
        return DetectorParams(r=self.r, h=self.h, m=self.m, epsilon=self.epsilon)


class AuthConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    header: str
    secret_env: str
    secret: str | None = Field(default=None, exclude=True, repr=False)

    @model_validator(mode="after")
    def resolve_secret(self) -> AuthConfig:
        if self.secret is None:
            value = os.environ.get(self.secret_env)
            if value is None:
                raise ValueError(f"environment variable {self.secret_env} is not set")
            self.secret = value
        return self

    def as_headers(self) -> dict[str, str]:
        return {self.header: self.secret or ""}


class SourceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    region_id: str = ""
    endpoint_url: str = Field(min_length=1)
    iata_id: str
    auth: AuthConfig | None = None

    agency: str = ""
    city: str = ""
    country: str = ""
    region: str = ""
    continent: str = ""

    @field_validator("iata_id")
    @classmethod
    def check_iata(cls, value: str) -> str:
        if not IATA_PATTERN.match(value):
            raise ValueError(f"iata_id must be three uppercase letters, got {value!r}")
        return value

    def agency_info(self) -> AgencyInfo:
        return AgencyInfo(
            iata_id=self.iata_id,
            agency=self.agency or self.iata_id,
            city=self.city,
            country=self.country,
            region=self.region,
            continent=self.continent,
        )


class RegionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    region_id: str = Field(min_length=1)
    sources: list[SourceConfig] = Field(min_length=1)
    params: ParamsConfig | None = None

    @model_validator(mode="after")
    def stamp_sources(self) -> RegionConfig:
        for source in self.sources:
            if source.region_id and source.region_id != self.region_id:
                raise ValueError(f"source {source.endpoint_url} declares region {source.region_id!r}")
            source.region_id = self.region_id
        return self


class StoreConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    url: str | None = None

    def resolve_url(self) -> str:
        return self.url or settings.db.build_url()


class ApiConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    host: str = settings.api.host
    port: int = Field(default=settings.api.port, ge=0, le=65535)
    queue_depth: PositiveInt = settings.api.queue_depth


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    regions: list[RegionConfig] = Field(min_length=1)
    params: ParamsConfig = ParamsConfig()
    store: StoreConfig = StoreConfig()
    api: ApiConfig = ApiConfig()

    @model_validator(mode="after")
    def check_unique(self) -> PipelineConfig:
        seen: set[str] = set()
        for region in self.regions:
            if region.region_id in seen:
                raise ValueError(f"duplicate region_id {region.region_id!r}")
            seen.add(region.region_id)

        agencies: dict[str, AgencyInfo] = {}
        for source in self.sources():
            info = source.agency_info()
            if agencies.setdefault(info.iata_id, info) != info:
                raise ValueError(f"iata_id {info.iata_id} is configured with conflicting agency details")
        return self

    def sources(self) -> list[SourceConfig]:
        return [source for region in self.regions for source in region.sources]

    def region_ids(self) -> list[str]:
        return [region.region_id for region in self.regions]

    def params_for(self, region_id: str) -> DetectorParams:
        for region in self.regions:
            if region.region_id == region_id:
                return (region.params or self.params).to_params()
        raise KeyError(region_id)

    def agencies(self) -> list[AgencyInfo]:
        unique: dict[str, AgencyInfo] = {}
        for source in self.sources():
            unique.setdefault(source.iata_id, source.agency_info())
        return list(unique.values())

    def with_overrides(self, r: int | None = None, h: int | None = None, m: int | None = None) -> PipelineConfig:
        """Apply command-line overrides to the default and every per-region parameter set."""
        overrides = {k: v for k, v in {"r": r, "h": h, "m": m}.items() if v is not None}
        if not overrides:
            return self
        try:
            data = self.model_dump(mode="python", exclude_none=False)
            data["params"] = {**data["params"], **overrides}
            for region in data["regions"]:
                if region["params"] is not None:
                    region["params"] = {**region["params"], **overrides}
                _restore_secrets(region, self)
            return PipelineConfig.model_validate(data)
        except ValidationError as e:
            raise ConfigError(str(e)) from e


def _restore_secrets(region: dict[str, Any], config: PipelineConfig) -> None:
    # secrets are excluded from dumps; carry the resolved values across
    original = next(r for r in config.regions if r.region_id == region["region_id"])
    for dumped, source in zip(region["sources"], original.sources, strict=True):
        if source.auth is not None:
            dumped["auth"]["secret"] = source.auth.secret


def parse_config(data: Any) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ConfigError("pipeline config must be a mapping")
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path} is not valid YAML: {e}") from e
    return parse_config(data)
