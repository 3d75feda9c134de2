"""TOML config for the CLI and service.

Two sections, both optional::

    [jump]
    t_high_g = 1.8
    t_low_g = 1.2
    debounce_ms = 250

    [serve]
    port = 9001
    realtime = false

Unknown sections or keys are errors so typos fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .jump import JumpConfig

__all__ = ["ConfigError", "ServeConfig", "ToolConfig", "load_config"]

DEFAULT_PORT = 9001


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServeConfig:
    port: int = DEFAULT_PORT
    realtime: bool = False


@dataclass(frozen=True)
class ToolConfig:
    jump: JumpConfig
    serve: ServeConfig


_JUMP_KEYS = {"t_high_g": (int, float), "t_low_g": (int, float), "debounce_ms": (int,)}
_SERVE_KEYS = {"port": (int,), "realtime": (bool,)}


def _check_section(name: str, table: dict, allowed: dict) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    out = {}
    for key, value in table.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
        if not isinstance(value, allowed[key]) or isinstance(value, bool) and bool not in allowed[key]:
            raise ConfigError(f"[{name}] {key} has wrong type {type(value).__name__}")
        out[key] = value
    return out


def load_config(path) -> ToolConfig:
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    for section in raw:
        if section not in ("jump", "serve"):
            raise ConfigError(f"unknown section [{section}]")
    jump_kwargs = _check_section("jump", raw.get("jump", {}), _JUMP_KEYS)
    serve_kwargs = _check_section("serve", raw.get("serve", {}), _SERVE_KEYS)
    try:
        jump = JumpConfig(**jump_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    serve = ServeConfig(**serve_kwargs)
    if not 1 <= serve.port <= 65535:
        raise ConfigError(f"port {serve.port} outside 1-65535")
    return ToolConfig(jump=jump, serve=serve)


def default_config() -> ToolConfig:
    return ToolConfig(jump=JumpConfig(), serve=ServeConfig())
