"""
Output writers: tables (CSV/JSON), result records and the strip field dump
"""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from glstep.exceptions import InputError
from glstep.functionals.strip import StripDisc
from glstep.schemas.run import OutputFormat, ResultRecord
from glstep.services.strip2d import StripState, strip_energy

FLOAT_FORMAT = "%.17g"
HEADER_FLOATS = np.dtype("<f8")
HEADER_INTS = np.dtype("<i8")
FIELD_DTYPE = np.dtype("<c16")


def plain(value: Any) -> Any:
    """Recursively turn numpy scalars/arrays into JSON-ready Python values; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def table_text(rows: List[Dict[str, Any]], columns: Sequence[str], fmt: OutputFormat) -> str:
    """Render rows as CSV (17 significant digits) or as a sorted-key JSON array."""
    if fmt == OutputFormat.JSON:
        return json.dumps([plain({c: row.get(c) for c in columns}) for row in rows], sort_keys=True, indent=2) + "\n"
    frame = pd.DataFrame(rows, columns=list(columns))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    return buffer.getvalue()


def record_text(record: ResultRecord) -> str:
    return json.dumps(plain(record.model_dump(mode="python")), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_outputs(
    record: ResultRecord,
    rows: List[Dict[str, Any]],
    columns: Sequence[str],
    fmt: OutputFormat,
    out: Optional[str],
    stdout: bool,
    echo=None,
):
    """
    Primary table to `out` (and/or stdout), result record to `<out>.summary.json`.
    Without `out` the table goes to stdout and the record is not written.
    """
    text = table_text(rows, columns, fmt)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        summary = Path(f"{out}.summary.json")
        summary.write_text(record_text(record))
        logger.info(f"Wrote {path} and {summary}")
    if stdout or not out:
        (echo or print)(text, end="")


def dump_strip_state(state: StripState, path: str):
    """
    Binary layout: six little-endian float64 (a, b, R, m, hx, hy), two
    little-endian int64 (nx, ny), then the field row-major (x1 outer) as
    interleaved re/im float64.
    """
    d = state.disc
    with open(path, "wb") as handle:
        handle.write(np.array([d.a, d.b, d.R, d.m, d.hx, d.hy], dtype=HEADER_FLOATS).tobytes())
        handle.write(np.array([d.nx, d.ny], dtype=HEADER_INTS).tobytes())
        handle.write(np.ascontiguousarray(state.psi, dtype=FIELD_DTYPE).tobytes())
    logger.info(f"Dumped strip field {d.nx}x{d.ny} to {path}")


def load_strip_state(path: str) -> StripState:
    raw = Path(path).read_bytes()
    head = 6 * HEADER_FLOATS.itemsize + 2 * HEADER_INTS.itemsize
    if len(raw) < head:
        raise InputError(f"{path} is too short for a strip dump header")
    a, b, R, m, hx, hy = np.frombuffer(raw, dtype=HEADER_FLOATS, count=6)
    nx, ny = np.frombuffer(raw, dtype=HEADER_INTS, count=2, offset=6 * HEADER_FLOATS.itemsize)
    disc = StripDisc(float(a), float(b), float(R), float(m), float(hx), float(hy))
    if (disc.nx, disc.ny) != (int(nx), int(ny)):
        raise InputError(f"{path}: header sizes {nx}x{ny} do not match the grid {disc.nx}x{disc.ny}")
    body = raw[head:]
    if len(body) != int(nx) * int(ny) * FIELD_DTYPE.itemsize:
        raise InputError(f"{path}: field payload has {len(body)} bytes, expected {nx * ny * FIELD_DTYPE.itemsize}")
    psi = np.frombuffer(body, dtype=FIELD_DTYPE).reshape(int(nx), int(ny)).astype(complex)
    state = StripState(disc, psi, 0.0, float(np.max(np.abs(psi), initial=0.0)))
    state.energy = strip_energy(state)
    return state
