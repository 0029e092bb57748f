"""CSV/JSON writers with locale-independent number formatting."""

import csv
import io
import json
import os
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, TextIO

import numpy as np

from .scalars import ZetaPoly, zp_to_json


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_default(value: Any) -> Any:
    if isinstance(value, (ZetaPoly, Fraction)):
        return zp_to_json(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2, default=_json_default)


def render_csv(rows: Iterable[Sequence[Any]], header: Optional[Sequence[str]] = None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def write_text(text: str, path: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Write to ``path`` when given, else to ``stream``."""
    if path is None:
        if stream is None:
            raise ValueError("write_text needs a path or a stream")
        stream.write(text)
        stream.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(text)
