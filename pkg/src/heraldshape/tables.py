"""Plain-text tables for sampled fields.

One-dimensional fields (modulators, separable factors)::

    # grid: t_start=-5 dt=0.01 n=1001
    re,im
    <re>,<im>          one row per sample

Two-dimensional fields (joint amplitudes, density matrices)::

    # grid_s: t_start=... dt=... n=...
    # grid_i: t_start=... dt=... n=...
    re,im
    <re>,<im>          n_s * n_i rows, signal-major (all idler samples of t_0 first)

Numbers are written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import io
import re
from pathlib import Path

import numpy as np

from .errors import FieldError
from .numerics import Field1D, Field2D, TimeGrid

FMT = "%.17g"
_GRID_RE = re.compile(r"#\s*(grid|grid_s|grid_i)\s*:\s*(.*)$")


def _grid_header(name: str, g: TimeGrid) -> str:
    return f"# {name}: t_start={float(g.t_start)!r} dt={float(g.dt)!r} n={g.n}"


def _parse_grid(text: str) -> TimeGrid:
    kv = dict(item.split("=", 1) for item in text.split())
    try:
        return TimeGrid(float(kv["t_start"]), float(kv["dt"]), int(kv["n"]))
    except KeyError as exc:
        raise FieldError(f"grid header is missing {exc.args[0]!r}") from None


def _read(path) -> tuple[dict, np.ndarray]:
    grids = {}
    lines = Path(path).read_text().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        m = _GRID_RE.match(line.strip())
        if m:
            grids[m.group(1)] = _parse_grid(m.group(2))
            continue
        if line.startswith("#") or not line.strip():
            continue
        body_start = i + 1 if line.strip().lower().replace(" ", "") == "re,im" else i
        break
    try:
        data = np.loadtxt(io.StringIO("\n".join(lines[body_start:])), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FieldError(f"{path}: {exc}") from None
    if data.shape[1] != 2:
        raise FieldError(f"{path}: expected two columns (re, im), got {data.shape[1]}")
    return grids, data[:, 0] + 1j * data[:, 1]


def _write(path, headers: list[str], values: np.ndarray) -> None:
    flat = np.asarray(values).ravel()
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([flat.real, flat.imag]), fmt=FMT, delimiter=",")
    Path(path).write_text("\n".join(headers + ["re,im"]) + "\n" + buf.getvalue())


def write_field1d(path, f: Field1D) -> None:
    _write(path, [_grid_header("grid", f.grid)], f.values)


def read_field1d(path) -> Field1D:
    grids, z = _read(path)
    if "grid" not in grids:
        raise FieldError(f"{path}: missing '# grid:' header")
    g = grids["grid"]
    if z.size != g.n:
        raise FieldError(f"{path}: header says n={g.n} but {z.size} rows follow")
    return Field1D(g, z)


def write_field2d(path, f: Field2D) -> None:
    _write(path, [_grid_header("grid_s", f.grid_s), _grid_header("grid_i", f.grid_i)], f.values)


def read_field2d(path) -> Field2D:
    grids, z = _read(path)
    if "grid_s" not in grids or "grid_i" not in grids:
        raise FieldError(f"{path}: missing '# grid_s:' / '# grid_i:' headers")
    gs, gi = grids["grid_s"], grids["grid_i"]
    if z.size != gs.n * gi.n:
        raise FieldError(f"{path}: expected {gs.n * gi.n} rows, got {z.size}")
    return Field2D(gs, gi, z.reshape(gs.n, gi.n))


def write_shape_csv(path, shape) -> None:
    """Heralded shape as ``t,re,im,abs2`` rows."""
    t = shape.grid.times
    v = shape.values
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([t, v.real, v.imag, np.abs(v) ** 2]), fmt=FMT, delimiter=",")
    Path(path).write_text("t,re,im,abs2\n" + buf.getvalue())
