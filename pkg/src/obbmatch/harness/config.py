"""Run settings: defaults, key=value config files, CLI flag overrides.

Config files mirror the CLI flags one key per line, `key = value`, with
`#` comments.  Unknown keys and unparseable values raise FormatError with
the 1-based line number.  A flag given on the command line always beats
the config file, which beats the built-in default.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import FormatError

STRATEGY_CHOICES = ("input-iou", "output-iou", "matching-degree")
FORMAT_CHOICES = ("json", "csv")


def _parse_bool(v: str) -> bool:
    low = v.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _parse_levels(v: str) -> tuple[tuple[float, float], ...]:
    """'8:16,16:32' -> ((8.0, 16.0), (16.0, 32.0)); stride:base_scale pairs."""
    out = []
    for part in v.split(","):
        stride, sep, scale = part.strip().partition(":")
        if not sep:
            raise ValueError(f"expected stride:scale, got {part.strip()!r}")
        out.append((float(stride), float(scale)))
    return tuple(out)


def _parse_ratios(v: str) -> tuple[float, ...]:
    return tuple(float(part) for part in v.split(","))


def _parse_choice(choices):
    def parse(v: str) -> str:
        if v not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}, got {v!r}")
        return v

    return parse


@dataclass
class Settings:
    """Everything the CLI subcommands consume, flattened."""

    seed: int = 0
    strategy: str = "matching-degree"
    alpha0: float = 0.3
    gamma: float = 5.0
    threshold: float = 0.6
    format: str = "json"
    progress: float = 1.0
    scenes: int = 100
    image_w: float = 32.0
    image_h: float = 32.0
    levels: tuple[tuple[float, float], ...] = ((8.0, 16.0),)
    ratios: tuple[float, ...] = (0.5, 1.0, 2.0)
    pull_low: float = 0.1
    pull_high: float = 1.0
    noise_scale: float = 0.12
    score_noise: float = 0.08
    pairs: int = 1000
    samples: int = 100_000
    iou_threshold: float = 0.5
    strict: bool = False


_PARSERS = {
    "seed": int,
    "strategy": _parse_choice(STRATEGY_CHOICES),
    "alpha0": float,
    "gamma": float,
    "threshold": float,
    "format": _parse_choice(FORMAT_CHOICES),
    "progress": float,
    "scenes": int,
    "image_w": float,
    "image_h": float,
    "levels": _parse_levels,
    "ratios": _parse_ratios,
    "pull_low": float,
    "pull_high": float,
    "noise_scale": float,
    "score_noise": float,
    "pairs": int,
    "samples": int,
    "iou_threshold": float,
    "strict": _parse_bool,
}

assert set(_PARSERS) == {f.name for f in fields(Settings)}


def read_config_file(path) -> dict[str, object]:
    """Parse a key=value config file into typed settings values."""
    text = Path(path).read_text(encoding="utf-8")
    out: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if not sep or not key or not value:
            raise FormatError(line_no, f"expected `key = value`, got {raw.strip()!r}")
        parser = _PARSERS.get(key)
        if parser is None:
            raise FormatError(line_no, f"unknown setting {key!r}")
        try:
            out[key] = parser(value)
        except ValueError as exc:
            raise FormatError(line_no, f"bad value for {key}: {exc}") from None
    return out


def resolve_settings(args) -> Settings:
    """Defaults, then config file, then explicit CLI flags."""
    settings = Settings()
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in read_config_file(config_path).items():
            setattr(settings, key, value)
    for f in fields(Settings):
        flag = getattr(args, f.name, None)
        if flag is not None:
            parser = _PARSERS[f.name]
            setattr(settings, f.name, parser(flag) if isinstance(flag, str) else flag)
    return settings
