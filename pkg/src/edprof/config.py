"""Run configuration: dataclass plus the plain key=value config-file format.

A config file holds one ``key = value`` pair per line; ``#`` starts a
comment. Command-line flags always win over config-file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

ANALYSES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "domains", "neutral")

CONFIG_KEYS = {
    "manifest", "out", "seed", "jobs", "partition", "alpha", "analyses",
}


@dataclass
class RunConfig:
    manifest: Path | None = None
    out: Path = Path("edprof-out")
    seed: int = 0
    jobs: int = 1
    partition: str = "model_category"
    alpha: float = 0.05
    analyses: tuple[str, ...] = ANALYSES

    def __post_init__(self):
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must be in (0, 1)")
        if not self.analyses:
            raise ValidationError("selected analyses must be non-empty")
        unknown = [a for a in self.analyses if a not in ANALYSES]
        if unknown:
            raise ValidationError(f"unknown analyses: {unknown}")


def parse_config_file(path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def merge_option(cli_value, config_values: dict, key: str, default, convert=str):
    """Precedence: explicit flag > config file > default."""
    if cli_value is not None:
        return cli_value
    if key in config_values:
        return convert(config_values[key])
    return default
