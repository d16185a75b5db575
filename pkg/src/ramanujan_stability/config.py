"""``key = value`` run configuration for the simulation subcommands."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

__all__ = ["RunConfig", "ConfigError", "parse_config", "apply_overrides"]


class ConfigError(ValueError):
    """One or more configuration lines are invalid."""

    def __init__(self, messages: list[str]):
        self.messages = list(messages)
        super().__init__("\n".join(self.messages))


@dataclass
class RunConfig:
    system: str = "example1"
    A: Optional[list[list[float]]] = None
    q: int = 5
    M: Optional[float] = None
    r: Optional[float] = None
    mode: str = "abs"
    # None means the simulator default (0.9 discrete, 0.995 hybrid)
    lam: Optional[float] = None
    window: Optional[int] = None
    K: int = 200
    T: float = 50.0
    h: float = 0.05
    x0: list[float] = field(default_factory=lambda: [1.0, 1.0])
    disturbance: str = "prime"
    dist_vector: list[float] = field(default_factory=lambda: [0.0, 0.5])
    m: Optional[int] = None
    r0: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None


def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    value = float(text)
    if value != value:  # NaN
        raise ValueError("NaN")
    return value


def _vector(text: str) -> list[float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise ValueError("empty vector")
    return [_float(p) for p in parts]


def _matrix(text: str) -> list[list[float]]:
    rows = [_vector(r) for r in text.split(";")]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square, rows separated by ';'")
    return rows


def _window(text: str) -> Optional[int]:
    if text.lower() in ("unbounded", "none", "inf"):
        return None
    return int(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


# key -> (dataclass field, parser, range check or None, range description)
_KEYS: dict[str, tuple[str, Callable, Optional[Callable], str]] = {
    "system": ("system", _choice("example1", "custom"), None, ""),
    "A": ("A", _matrix, None, ""),
    "q": ("q", _int, lambda v: v >= 1, ">= 1"),
    "M": ("M", _float, lambda v: v >= 0, ">= 0"),
    "r": ("r", _float, lambda v: 0 < v < 1, "(0,1)"),
    "mode": ("mode", _choice("signed", "abs", "absolute"), None, ""),
    "lambda": ("lam", _float, lambda v: 0 < v <= 1, "(0,1]"),
    "window": ("window", _window, lambda v: v is None or v >= 1, ">= 1"),
    "K": ("K", _int, lambda v: v >= 0, ">= 0"),
    "T": ("T", _float, lambda v: v > 0, "> 0"),
    "h": ("h", _float, lambda v: v > 0, "> 0"),
    "x0": ("x0", _vector, None, ""),
    "disturbance": ("disturbance", _choice("prime", "residue", "zero"), None, ""),
    "dist_vector": ("dist_vector", _vector, None, ""),
    "m": ("m", _int, lambda v: v >= 1, ">= 1"),
    "r0": ("r0", _int, lambda v: v >= 0, ">= 0"),
    "seed": ("seed", _int, None, ""),
    "out": ("out", str, None, ""),
}

KEYS = tuple(_KEYS)


def _set(cfg: RunConfig, key: str, raw: str, where: str, errors: list[str]) -> None:
    if key not in _KEYS:
        errors.append(f"unknown key '{key}'{where}")
        return
    attr, parse, check, desc = _KEYS[key]
    try:
        value = parse(raw)
    except ValueError as exc:
        errors.append(f"malformed value for {key} ({exc}){where}")
        return
    if check is not None and not check(value):
        errors.append(f"{key} out of range {desc}{where}")
        return
    setattr(cfg, attr, value)


def _cross_check(cfg: RunConfig, errors: list[str]) -> None:
    if cfg.disturbance == "residue":
        if cfg.m is None or cfg.r0 is None:
            errors.append("disturbance = residue needs both m and r0")
        elif cfg.r0 >= cfg.m:
            errors.append("r0 out of range [0,m)")
    if cfg.system == "custom" and cfg.A is None:
        errors.append("system = custom needs a matrix A")


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Every invalid line is reported (with its line number) in a single
    :class:`ConfigError`.
    """
    cfg = RunConfig()
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            errors.append(f"expected 'key = value' at line {lineno}")
            continue
        key, raw = (s.strip() for s in body.split("=", 1))
        _set(cfg, key, raw, f" at line {lineno}", errors)
    _cross_check(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def apply_overrides(cfg: RunConfig, overrides: dict[str, str]) -> RunConfig:
    """Return a copy with command-line ``key -> raw value`` pairs applied."""
    cfg = dataclasses.replace(cfg)
    errors: list[str] = []
    for key, raw in overrides.items():
        _set(cfg, key, raw, " (command line)", errors)
    _cross_check(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg
