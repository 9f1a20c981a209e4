from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

try:
    import tomllib  # py3.11+
except ImportError:  # pragma: no cover
    tomllib = None  # type: ignore[assignment]

from .errors import ConfigError

DEFAULT_CONF_PATH = Path("local") / "medf.toml"


@dataclass
class Settings:
    horizon: int = 3
    scan_bound: int = 1_000_000
    enumeration_budget: int = 1_000_000
    # cap for values at coordinates where F(n) = ∞
    value_budget: int = 4
    sample_count: int = 1000
    seed: int = 0
    max_stem: int = 4
    log_dir: Path | None = None


DEFAULT_CONF = """\
# medf-toolkit local config (TOML)
horizon = 3
scan_bound = 1000000
enumeration_budget = 1000000
value_budget = 4       # values tried where F(n) = inf
sample_count = 1000    # contexts drawn by randomized suites
seed = 0
max_stem = 4           # longest Case 1 stem searched
# log_dir = "log"      # activity log directory; unset = no log
"""

_NON_NEGATIVE = ("horizon", "seed")
_POSITIVE = ("scan_bound", "enumeration_budget", "value_budget", "sample_count", "max_stem")


def validate(settings: Settings) -> Settings:
    for name in _NON_NEGATIVE:
        if getattr(settings, name) < 0:
            raise ConfigError(f"{name} must be ≥ 0, got {getattr(settings, name)}")
    for name in _POSITIVE:
        if getattr(settings, name) < 1:
            raise ConfigError(f"{name} must be ≥ 1, got {getattr(settings, name)}")
    return settings


def _coerce(name: str, raw: Any) -> Any:
    if name == "log_dir":
        if not isinstance(raw, str):
            raise ConfigError(f"log_dir must be a string, got {raw!r}")
        return Path(raw)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    return raw


def load_settings(path: Path | None = None) -> Settings:
    """Settings from a TOML file; a missing file gives the defaults."""
    conf = Path(path) if path is not None else DEFAULT_CONF_PATH
    settings = Settings()
    if not conf.exists():
        if path is not None:
            raise ConfigError(f"{conf}: no such config file")
        return settings
    if tomllib is None:  # pragma: no cover
        raise ConfigError("reading TOML config needs Python 3.11+")
    try:
        data = tomllib.loads(conf.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"{conf}: {e}") from e

    known = {f.name for f in fields(Settings)}
    for key, raw in data.items():
        if key not in known:
            raise ConfigError(f"{conf}: unknown key {key!r}")
        setattr(settings, key, _coerce(key, raw))
    return validate(settings)


def write_default_config(path: Path = DEFAULT_CONF_PATH) -> Path:
    """Create the config file with commented defaults unless it exists."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not path.exists():
        path.write_text(DEFAULT_CONF, encoding="utf-8")
    return path
