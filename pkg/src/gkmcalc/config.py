"""Resource caps, optionally read from a key=value file."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import ConfigurationError

CONFIG_ENV = "GKMCALC_CONFIG"


@dataclass(frozen=True)
class Limits:
    max_group_order: int = 10**6
    max_word_length: int = 12


DEFAULT_LIMITS = Limits()
CLI_LIMITS = Limits(max_group_order=40320)


def load_limits(path: str | None = None, base: Limits = CLI_LIMITS) -> Limits:
    """Read caps from ``path`` or from the file named by $GKMCALC_CONFIG.

    Lines look like ``max_group_order = 5040``; ``#`` starts a comment.
    """
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return base
    known = {f.name for f in fields(Limits)}
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise ConfigurationError(f"{path}:{lineno}: {key} must be an integer") from None
        if values[key] < 1:
            raise ConfigurationError(f"{path}:{lineno}: {key} must be positive")
    return replace(base, **values)
