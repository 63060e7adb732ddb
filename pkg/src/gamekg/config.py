"""Server configuration, from JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import LoadError, ValidationError

ENV_DATA_DIR = "GAMEKG_DATA_DIR"
ENV_OPERATOR_TOKEN = "GAMEKG_OPERATOR_TOKEN"
ENV_LISTEN = "GAMEKG_LISTEN"

KG_FILENAME = "kg.jsonl"
LEDGER_FILENAME = "ledger.jsonl"


@dataclass(slots=True)
class ServerConfig:
    data_dir: Path = field(default_factory=lambda: Path("."))
    listen: str = "127.0.0.1:8000"
    tau_low: float = 0.2
    tau_high: float = 0.6
    max_findings: int = 50
    accept_threshold: float = 2.0
    reject_threshold: float = -2.0
    case_entity_cap: int = 12
    case_ttl_seconds: float = 86400.0
    case_strategy: str = "priority"
    seed: int | None = None
    fsync_ledger: bool = False
    operator_token: str | None = None

    @property
    def kg_path(self) -> Path:
        return self.data_dir / KG_FILENAME

    @property
    def ledger_path(self) -> Path:
        return self.data_dir / LEDGER_FILENAME

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise ValidationError(f"listen address must be host:port, got {self.listen!r}")
        return host, int(port)


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ServerConfig:
    """Build a config from an optional JSON file, then apply env overrides.

    ``GAMEKG_DATA_DIR``, ``GAMEKG_OPERATOR_TOKEN`` and ``GAMEKG_LISTEN``
    always win over the file.
    """
    env = os.environ if env is None else env
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fp:
                raw = json.load(fp)
        except json.JSONDecodeError as exc:
            raise LoadError(f"config file {path}: invalid JSON ({exc.msg})") from None
        if not isinstance(raw, dict):
            raise LoadError(f"config file {path}: expected a JSON object")
    known = {f.name for f in fields(ServerConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "data_dir" in raw:
        raw["data_dir"] = Path(raw["data_dir"])
    config = ServerConfig(**raw)
    if env.get(ENV_DATA_DIR):
        config.data_dir = Path(env[ENV_DATA_DIR])
    if env.get(ENV_OPERATOR_TOKEN):
        config.operator_token = env[ENV_OPERATOR_TOKEN]
    if env.get(ENV_LISTEN):
        config.listen = env[ENV_LISTEN]
    return config
