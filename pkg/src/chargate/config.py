"""Flat ``key = value`` configuration files for training runs.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Every key is validated against the schema below before any work starts,
and command-line flags override file values. ``seeds`` accepts either a
comma list (``1,2,3``) or an inclusive range (``1..7``).
"""

from __future__ import annotations

from typing import Callable

from .training import TrainConfig

__all__ = ["CONFIG_KEYS", "parse_seeds", "parse_config_file", "build_train_config"]


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def parse_seeds(value: str) -> tuple[int, ...]:
    value = value.strip()
    if ".." in value:
        lo, hi = value.split("..", 1)
        seeds = tuple(range(int(lo), int(hi) + 1))
    else:
        seeds = tuple(int(part) for part in value.split(",") if part.strip())
    if not seeds:
        raise ValueError(f"no seeds in {value!r}")
    return seeds


def _optional_float(value: str) -> float | None:
    return None if value.strip().lower() == "none" else float(value)


def _optional_str(value: str) -> str | None:
    return None if value.strip().lower() == "none" else value.strip()


CONFIG_KEYS: dict[str, Callable[[str], object]] = {
    "method": str.strip,
    "batch_size": int,
    "initial_lr": float,
    "lr_divisor": float,
    "lr_schedule": _parse_bool,
    "clip_threshold": float,
    "clip_mode": str.strip,
    "max_epochs": int,
    "min_lr": float,
    "seeds": parse_seeds,
    "word_dim": int,
    "char_dim": int,
    "char_hidden": int,
    "sentence_dim": int,
    "classifier_hidden": int,
    "min_freq": int,
    "lowercase": _parse_bool,
    "stop_train_acc": _optional_float,
    "train_path": _optional_str,
    "dev_path": _optional_str,
    "embeddings_path": _optional_str,
    "out_dir": _optional_str,
}


def parse_config_file(path) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ValueError(
                    f"{path}:{line_no}: unknown key {key!r}; valid keys: "
                    + ", ".join(sorted(CONFIG_KEYS))
                )
            try:
                values[key] = CONFIG_KEYS[key](value)
            except ValueError as err:
                raise ValueError(f"{path}:{line_no}: bad value for {key!r}: {err}") from None
    return values


def build_train_config(file_values: dict | None = None, overrides: dict | None = None) -> TrainConfig:
    """Merge config-file values with CLI overrides into a TrainConfig."""
    merged: dict = {}
    merged.update(file_values or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return TrainConfig(**merged)
