"""Application configuration: one TOML file plus environment overrides.

Environment variables beat the file; the file beats built-in defaults.
Only operational knobs live here -- ports, store paths, the checker
address and shared secret, gateway selection, slot count, TOTP
parameters, rate limits.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .otp import TotpParams

__all__ = ["AppConfig", "load_config"]


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    rate_limit_per_second: int = 5
    admin_token: str = "change-me-admin-token"


@dataclass(frozen=True)
class CheckerConfig:
    mode: str = "http"  # "http" (separate process) or "inprocess"
    url: str = "http://127.0.0.1:8100"
    shared_secret: str = "change-me-checker-secret"
    host: str = "127.0.0.1"
    port: int = 8100
    store: str = "data/honeychecker.json"


@dataclass(frozen=True)
class AuthConfig:
    slots: int = 3
    issuer: str = "HoneyAuth"
    session_ttl_seconds: float = 90.0
    max_password_failures: int = 3
    max_otp_failures: int = 3
    password_min_length: int = 10


@dataclass(frozen=True)
class SmsConfig:
    gateway: str = "mock"  # mock | console | null
    outbox: str = "data/sms_outbox.jsonl"


@dataclass(frozen=True)
class AppConfig:
    server: ServerConfig = field(default_factory=ServerConfig)
    checker: CheckerConfig = field(default_factory=CheckerConfig)
    auth: AuthConfig = field(default_factory=AuthConfig)
    totp: TotpParams = field(default_factory=TotpParams)
    sms: SmsConfig = field(default_factory=SmsConfig)
    accounts_store: str = "data/accounts.json"
    webui_dist: str | None = None


_ENV_OVERRIDES: dict[str, tuple[str, ...]] = {
    "HONEYAUTH_HOST": ("server", "host"),
    "HONEYAUTH_PORT": ("server", "port"),
    "HONEYAUTH_RATE_LIMIT": ("server", "rate_limit_per_second"),
    "HONEYAUTH_ADMIN_TOKEN": ("server", "admin_token"),
    "HONEYAUTH_CHECKER_MODE": ("checker", "mode"),
    "HONEYAUTH_CHECKER_URL": ("checker", "url"),
    "HONEYAUTH_CHECKER_SECRET": ("checker", "shared_secret"),
    "HONEYAUTH_CHECKER_HOST": ("checker", "host"),
    "HONEYAUTH_CHECKER_PORT": ("checker", "port"),
    "HONEYAUTH_CHECKER_STORE": ("checker", "store"),
    "HONEYAUTH_ACCOUNTS_STORE": ("accounts_store",),
    "HONEYAUTH_SMS_GATEWAY": ("sms", "gateway"),
    "HONEYAUTH_SMS_OUTBOX": ("sms", "outbox"),
    "HONEYAUTH_SLOTS": ("auth", "slots"),
    "HONEYAUTH_WEBUI_DIST": ("webui_dist",),
}


def _section(table: Mapping[str, Any], name: str) -> dict:
    value = table.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return dict(value)


def _coerce(value: str, like: Any) -> Any:
    if isinstance(like, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] = os.environ
) -> AppConfig:
    table: dict[str, Any] = {}
    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"config file not found: {file_path}")
        try:
            with file_path.open("rb") as fh:
                table = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{file_path}: {exc}") from exc

    merged: dict[str, Any] = {
        "server": _section(table, "server"),
        "checker": _section(table, "checker"),
        "auth": _section(table, "auth"),
        "totp": _section(table, "totp"),
        "sms": _section(table, "sms"),
        "accounts_store": table.get("accounts_store", AppConfig.accounts_store),
        "webui_dist": table.get("webui_dist"),
    }

    for name, target in _ENV_OVERRIDES.items():
        if name not in env:
            continue
        if len(target) == 1:
            merged[target[0]] = env[name]
        else:
            merged[target[0]][target[1]] = env[name]

    def build(cls, values: dict) -> Any:
        defaults = cls()
        kwargs = {}
        for key, raw in values.items():
            if not hasattr(defaults, key):
                raise ConfigError(f"unknown {cls.__name__} option {key!r}")
            kwargs[key] = _coerce(raw, getattr(defaults, key)) if isinstance(raw, str) else raw
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {cls.__name__}: {exc}") from exc

    try:
        totp = TotpParams(**{k: int(v) if k != "algorithm" else str(v) for k, v in merged["totp"].items()})
    except TypeError as exc:
        raise ConfigError(f"invalid [totp] section: {exc}") from exc

    config = AppConfig(
        server=build(ServerConfig, merged["server"]),
        checker=build(CheckerConfig, merged["checker"]),
        auth=build(AuthConfig, merged["auth"]),
        totp=totp,
        sms=build(SmsConfig, merged["sms"]),
        accounts_store=str(merged["accounts_store"]),
        webui_dist=str(merged["webui_dist"]) if merged["webui_dist"] else None,
    )
    if config.checker.mode not in ("http", "inprocess"):
        raise ConfigError(f"checker.mode must be http or inprocess, got {config.checker.mode!r}")
    if config.sms.gateway not in ("mock", "console", "null"):
        raise ConfigError(f"sms.gateway must be mock, console, or null, got {config.sms.gateway!r}")
    if config.auth.slots < 2:
        raise ConfigError("auth.slots must be at least 2")
    return config
