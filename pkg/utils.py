# utils.py

import logging
import math
import os
from pathlib import Path

from dotenv import load_dotenv

from config import DEFAULT_CONFIGS
from errors import NotPowerOfTwo, UsageError

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def getenv_bool(name: str, default: bool = False) -> bool:
    # Call sites pass the DEFAULT_CONFIGS entry as the default.
    return os.getenv(name, str(default)).lower() in ("yes", "y", "true", "1", "t")


def getenv_int(name: str, default: int = 0) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}")


def getenv_str(name: str, default: str = "") -> str:
    raw = os.getenv(name)
    return raw if raw else default


def dataset_dir() -> Path:
    """Manifest root; QIC_DATASET_DIR wins over the configured default."""
    return Path(getenv_str("QIC_DATASET_DIR", DEFAULT_CONFIGS["DATASET_DIR"]))


def setup_logging(level: str | int | None = None) -> None:
    if level is None:
        level = getenv_str("QIC_LOG_LEVEL", DEFAULT_CONFIGS["LOG_LEVEL"])
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    root = logging.getLogger()
    for handler in list(root.handlers):
        if handler.get_name() == "qic":
            root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.set_name("qic")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


def load_config_file(path: str | Path) -> dict[str, str]:
    """
    Reads a flat key=value config file.

    Keys are lower-cased and dashes become underscores so they line up with
    the argparse destinations. Blank lines and '#' comments are ignored.
    """
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def parse_bool(value: str) -> bool:
    return str(value).strip().lower() in ("yes", "y", "true", "1", "t", "on")


def parse_int_list(value: str) -> list[int]:
    try:
        return [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {value!r}")


def parse_str_list(value: str) -> list[str]:
    return [part.strip() for part in str(value).split(",") if part.strip()]


def popcount(value: int) -> int:
    return bin(value).count("1")


def set_bits(value: int) -> list[int]:
    """Indices of the 1-bits of value, least significant first."""
    return [i for i in range(value.bit_length()) if value >> i & 1]


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def ilog2(value: int) -> int:
    if not is_power_of_two(value):
        raise NotPowerOfTwo(f"{value} is not a power of two")
    return value.bit_length() - 1


def address_bits(count: int) -> int:
    """Width of a binary address over count items, never less than one bit."""
    return math.ceil(math.log2(max(count, 2)))
