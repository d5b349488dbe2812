"""Run configuration: ``key = value`` files merged with command-line overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ConfigError

COMMANDS = ("chart", "trace", "solve-point", "verify")
VARIANTS = ("classical", "damped", "impulsive")


def parse_range(text, key="range"):
    """``"lo:hi"`` -> ``(lo, hi)``; the range must be nonempty."""
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'lo:hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{key}: non-numeric bound in {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
        raise ConfigError(f"{key}: empty or non-finite range {text!r}")
    return lo, hi


def parse_resolution(text, key="res"):
    """``"NXxNY"`` -> ``(nx, ny)``."""
    parts = str(text).lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'NXxNY', got {text!r}")
    try:
        nx, ny = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"{key}: non-integer resolution {text!r}") from None
    if nx < 1 or ny < 1:
        raise ConfigError(f"{key}: resolution must be >= 1, got {text!r}")
    return nx, ny


def parse_period(text, key="period"):
    """``2pi`` / ``4pi`` -> lambda(1) in {1, 2}."""
    value = str(text).strip().lower().replace("π", "pi")
    table = {"2pi": 1, "4pi": 2, "1": 1, "2": 2}
    if value not in table:
        raise ConfigError(f"{key}: expected 2pi or 4pi, got {text!r}")
    return table[value]


@dataclass
class RunConfig:
    command: str = "verify"
    variant: str = "classical"
    delta: tuple = (-0.5, 2.1)
    eps: tuple = (0.0, 4.5)
    res: tuple = (78, 135)
    order: int = 3
    branch: str | None = None
    period: int = 1
    at: float | None = None  # solve-point epsilon
    damping: float = 0.1
    step: float = 0.1
    tol: float = 1e-9
    max_iters: int = 50
    workers: int | None = None
    out: str | None = None
    overlay: list = field(default_factory=list)
    samples: int = 400
    fast: bool = False
    zeta0_root: str = "minus"
    jump_sign: float = 1.0

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant: unknown variant {self.variant!r}")
        for key in ("delta", "eps"):
            lo, hi = getattr(self, key)
            if lo == hi:
                raise ConfigError(f"{key}: empty range")
        if self.order < 1:
            raise ConfigError("order: must be >= 1")
        if min(self.res) < 1:
            raise ConfigError("res: must be >= 1")
        if self.step <= 0:
            raise ConfigError("step: must be > 0")
        if self.tol <= 0:
            raise ConfigError("tol: must be > 0")
        if self.damping < 0:
            raise ConfigError("damping: must be >= 0")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if self.command == "solve-point" and self.at is None:
            raise ConfigError("eps: solve-point needs an epsilon value")
        if self.zeta0_root not in ("minus", "plus"):
            raise ConfigError("zeta0_root: expected minus or plus")
        return self


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _bool(text, key):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


CONVERTERS = {
    "command": str,
    "variant": str,
    "delta": parse_range,
    "eps": parse_range,
    "res": parse_resolution,
    "order": _int,
    "branch": str,
    "period": parse_period,
    "at": _float,
    "damping": _float,
    "step": _float,
    "tol": _float,
    "max_iters": _int,
    "workers": _int,
    "out": str,
    "overlay": lambda text, key: [p.strip() for p in str(text).split(",") if p.strip()],
    "samples": _int,
    "fast": _bool,
    "zeta0_root": str,
    "jump_sign": _float,
}


def convert(key, text):
    if key not in CONVERTERS:
        raise ConfigError(f"unknown key {key!r}")
    conv = CONVERTERS[key]
    if conv is str:
        return str(text).strip()
    return conv(text, key)


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            values[key] = convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def build_config(file_values=None, overrides=None):
    """Defaults, then file values, then overrides (flags win)."""
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown key {key!r}")
            setattr(cfg, key, value)
    return cfg.validate()
