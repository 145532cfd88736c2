"""
Helpers for command line values and JSON documents.

Documents are written with every float rounded to 12 significant digits, so identical inputs give
byte-identical output. All file access goes through ``fsspec``, which accepts local paths as well as
URLs such as ``memory://`` or ``s3://``.
"""

from __future__ import annotations

import json
import math
import re
import sys
from collections.abc import Mapping
from fractions import Fraction
from typing import Any

import fsspec
import numpy as np

SIGNIFICANT_DIGITS = 12

_SIZE = re.compile(r"^(\d+)[xX](\d+)$")


def round_floats(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Recursively round floats to ``digits`` significant digits; non-finite floats become ``None``."""
    if isinstance(obj, bool | int | str) or obj is None:
        return obj
    if isinstance(obj, np.integer | np.bool_):
        return obj.item()
    if isinstance(obj, float | np.floating):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{digits}g}") + 0.0
    if isinstance(obj, complex | np.complexfloating):
        return [round_floats(obj.real, digits), round_floats(obj.imag, digits)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Mapping):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, list | tuple | np.ndarray):
        return [round_floats(v, digits) for v in obj]
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj: Any, pretty: bool = False) -> str:
    return json.dumps(round_floats(obj), indent=2 if pretty else None, ensure_ascii=False)


def write_json(obj: Any, path: str | None = None, pretty: bool = False) -> None:
    """Write a JSON document to ``path``, or to standard output if ``path`` is ``None`` or ``"-"``."""
    text = dumps(obj, pretty) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with fsspec.open(path, "w", encoding="utf-8") as f:
        f.write(text)


def read_json(path: str) -> Any:
    with fsspec.open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def parse_complex(text: str) -> complex:
    """
    Parse ``"re,im"`` (or a bare real number) into a complex number.

    Raises
    ------
    ValueError
        If the text is not one or two comma separated numbers.
    """
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ValueError(f"expected 're,im', got {text!r}")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise ValueError(f"expected 're,im', got {text!r}") from None
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def parse_size(text: str) -> tuple[int, int]:
    """Parse ``"WIDTHxHEIGHT"``."""
    match = _SIZE.match(text.strip())
    if match is None:
        raise ValueError(f"expected a size like '800x800', got {text!r}")
    width, height = int(match.group(1)), int(match.group(2))
    if width < 1 or height < 1:
        raise ValueError(f"image size must be positive, got {text!r}")
    return width, height


def parse_signs(text: str) -> tuple[int, ...]:
    """
    Parse a sign string such as ``"+-"`` into ``(1, -1)``.

    Raises
    ------
    ValueError
        If the text is empty or contains anything but ``+`` and ``-``.
    """
    text = text.strip()
    if not text or set(text) - {"+", "-"}:
        raise ValueError(f"expected a string of '+' and '-', got {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)
