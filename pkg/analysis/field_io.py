"""Field serialization.

Binary layout: one ASCII header line ``"d n_x n_t T components"`` (plus
``"t_start t_stop"`` for fields whose valid window is not the full time
axis), a newline, then the values as little-endian 64-bit floats in C order
over ``(t, x1[, x2], component)``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .errors import FieldFormatError
from .grid import Field, make_grid


def write_field(field: Field, path: str | Path) -> Path:
    """Write ``field`` to ``path`` in the binary field format."""
    grid = field.grid
    header = f"{grid.d} {grid.n_x} {grid.n_t} {grid.T!r} {field.components}"
    if field.window != (0, grid.n_t):
        header += f" {field.t_start} {field.t_stop}"
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    target.write_bytes(header.encode("ascii") + b"\n" + payload)
    return target


def read_field(path: str | Path) -> Field:
    """Read a field written by ``write_field``.

    Raises:
        FieldFormatError: If the header is malformed or the payload size does
            not match it.
    """
    raw = Path(path).read_bytes()
    head, sep, payload = raw.partition(b"\n")
    if not sep:
        raise FieldFormatError(f"{path}: missing header line.")
    tokens = head.decode("ascii", errors="replace").split()
    if len(tokens) not in (5, 7):
        raise FieldFormatError(f"{path}: header must have 5 or 7 tokens, got {tokens}.")
    try:
        d, n_x, n_t = int(tokens[0]), int(tokens[1]), int(tokens[2])
        T, components = float(tokens[3]), int(tokens[4])
        t_start, t_stop = (int(tokens[5]), int(tokens[6])) if len(tokens) == 7 else (0, n_t)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: unparseable header {tokens}.") from exc
    grid = make_grid(d, n_x, n_t, T)
    shape = (t_stop - t_start, *grid.spatial_shape, components)
    expected = int(np.prod(shape)) * 8
    if len(payload) != expected:
        raise FieldFormatError(
            f"{path}: payload has {len(payload)} bytes, header implies {expected}."
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(shape)
    return Field(grid, values, t_start)


def field_to_frame(field: Field) -> pd.DataFrame:
    """Flatten a field into a long table with coordinate columns."""
    grid = field.grid
    index = np.indices(field.values.shape[:-1]).reshape(1 + grid.d, -1)
    columns: dict[str, np.ndarray] = {"t": grid.times[field.t_start + index[0]]}
    for axis in range(grid.d):
        columns[f"x{axis + 1}"] = grid.positions[index[1 + axis]]
    flat = field.values.reshape(-1, field.components)
    for c in range(field.components):
        columns[f"c{c}"] = flat[:, c]
    return pd.DataFrame(columns)


def export_field_csv(field: Field, path: str | Path) -> Path:
    """Write a small field as CSV with columns ``t, x1[, x2], c0..``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    field_to_frame(field).to_csv(target, index=False)
    return target
