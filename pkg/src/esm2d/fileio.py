"""Bit-exact text formats for far-field data, indicator grids, and heatmaps.

Far-field data (``esm-ff v1``) is line oriented::

    format=esm-ff v1
    k=<float>
    noise=<float>
    seed=<integer or "none">
    rng=<generator id>            (optional; present when data was noised)
    incident=<phi_1,...,phi_Q>
    obs=<phi_1,...,phi_M>
    l j re im                     (M*Q lines, 0-based indices)

Floats are written with 17 significant digits so a write/read round trip
is value identical, and all writes are byte deterministic given equal
inputs.  Indicator grids (``esm-grid v1``) carry the lattice bounds and
spacing followed by ``x y I`` rows in row-major order, plus a sidecar
binary PGM (P5) heatmap storing 255*(1 - I) per pixel with the top pixel
row at y_max, so indicator minima render bright.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .disc import DirectionGrid
from .forward import FarFieldData
from .sampling import IndicatorField, SamplingGrid

__all__ = [
    "FormatError",
    "read_farfield",
    "write_farfield",
    "write_indicator_grid",
    "read_indicator_grid",
    "write_pgm",
]

FF_FORMAT = "esm-ff v1"
GRID_FORMAT = "esm-grid v1"


class FormatError(ValueError):
    """Malformed data file; carries the offending 1-based line number."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_angles(angles) -> str:
    return ",".join(_fmt(a) for a in angles)


def write_farfield(path, data: FarFieldData) -> None:
    path = Path(path)
    lines = [
        f"format={FF_FORMAT}",
        f"k={_fmt(data.k)}",
        f"noise={_fmt(data.noise_level)}",
        f"seed={'none' if data.seed is None else int(data.seed)}",
    ]
    if data.rng is not None:
        lines.append(f"rng={data.rng}")
    lines.append(f"incident={_fmt_angles(data.incident.angles)}")
    lines.append(f"obs={_fmt_angles(data.obs.angles)}")
    for l in range(len(data.obs)):
        for j in range(len(data.incident)):
            v = data.values[l, j]
            lines.append(f"{l} {j} {_fmt(v.real)} {_fmt(v.imag)}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _parse_float(path, lineno: int, name: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(path, lineno, f"cannot parse {name} value {text!r}") from None
    if not math.isfinite(value):
        raise FormatError(path, lineno, f"{name} must be finite, got {text!r}")
    return value


def read_farfield(path) -> FarFieldData:
    path = Path(path)
    raw_lines = path.read_text(encoding="ascii").splitlines()
    header: dict[str, tuple[int, str]] = {}
    data_start = None
    for i, line in enumerate(raw_lines, start=1):
        text = line.strip()
        if not text:
            continue
        if "=" in text and data_start is None:
            key, _, value = text.partition("=")
            key = key.strip()
            if key in header:
                raise FormatError(path, i, f"duplicate header field {key!r}")
            header[key] = (i, value.strip())
        else:
            data_start = i if data_start is None else data_start
            break

    if "format" not in header:
        raise FormatError(path, 1, "missing header field: format")
    fline, fval = header["format"]
    if fval != FF_FORMAT:
        raise FormatError(
            path, fline, f"version mismatch: expected {FF_FORMAT!r}, got {fval!r}"
        )
    for required in ("k", "noise", "seed", "incident", "obs"):
        if required not in header:
            raise FormatError(path, 1, f"missing header field: {required}")

    lineno, text = header["k"]
    k = _parse_float(path, lineno, "k", text)
    lineno, text = header["noise"]
    noise = _parse_float(path, lineno, "noise", text)
    lineno, text = header["seed"]
    if text == "none":
        seed = None
    else:
        try:
            seed = int(text)
        except ValueError:
            raise FormatError(path, lineno, f"cannot parse seed value {text!r}") from None
    rng = header["rng"][1] if "rng" in header else None

    def parse_grid(name: str) -> DirectionGrid:
        lineno, text = header[name]
        parts = [p for p in text.split(",") if p.strip()]
        if not parts:
            raise FormatError(path, lineno, f"{name} grid is empty")
        angles = tuple(_parse_float(path, lineno, name, p) for p in parts)
        try:
            return DirectionGrid(angles)
        except ValueError as exc:
            raise FormatError(path, lineno, f"bad {name} grid: {exc}") from None

    incident = parse_grid("incident")
    obs = parse_grid("obs")

    n_obs, n_inc = len(obs), len(incident)
    values = np.full((n_obs, n_inc), np.nan + 0j, dtype=complex)
    seen = np.zeros((n_obs, n_inc), dtype=bool)
    header_linenos = {ln for ln, _ in header.values()}
    count = 0
    for i, line in enumerate(raw_lines, start=1):
        if i in header_linenos:
            continue
        text = line.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 4:
            raise FormatError(path, i, f"expected 'l j re im', got {text!r}")
        try:
            l, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(path, i, f"bad data indices in {text!r}") from None
        if not (0 <= l < n_obs and 0 <= j < n_inc):
            raise FormatError(
                path, i, f"index ({l}, {j}) outside ({n_obs}, {n_inc})"
            )
        if seen[l, j]:
            raise FormatError(path, i, f"duplicate entry for ({l}, {j})")
        re = _parse_float(path, i, "re", parts[2])
        im = _parse_float(path, i, "im", parts[3])
        values[l, j] = complex(re, im)
        seen[l, j] = True
        count += 1
    if count != n_obs * n_inc:
        raise FormatError(
            path,
            len(raw_lines),
            f"dimension mismatch: {count} data lines, expected {n_obs * n_inc}",
        )
    return FarFieldData(
        k=k, incident=incident, obs=obs, values=values,
        noise_level=noise, seed=seed, rng=rng,
    )


def write_pgm(path, field: IndicatorField) -> None:
    """8-bit P5 heatmap of 255*(1 - I); row 0 corresponds to y_max."""
    path = Path(path)
    img = field.as_matrix()  # (nx, ny), normalized
    pixels = np.rint(255.0 * (1.0 - img)).astype(np.uint8)
    # image rows run from y_max down; columns follow x
    pixels = pixels.T[::-1, :]
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def write_indicator_grid(path, field: IndicatorField) -> Path:
    """Write the text grid and a sidecar ``.pgm`` heatmap; returns the
    sidecar path."""
    path = Path(path)
    g = field.grid
    lines = [
        f"format={GRID_FORMAT}",
        f"xmin={_fmt(g.x_min)}",
        f"xmax={_fmt(g.x_max)}",
        f"ymin={_fmt(g.y_min)}",
        f"ymax={_fmt(g.y_max)}",
        f"h={_fmt(g.spacing)}",
    ]
    pts = g.points
    vals = field.normalized
    for i in range(pts.shape[0]):
        lines.append(f"{_fmt(pts[i, 0])} {_fmt(pts[i, 1])} {_fmt(vals[i])}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    pgm_path = path.with_suffix(".pgm")
    write_pgm(pgm_path, field)
    return pgm_path


def read_indicator_grid(path):
    """Read back a grid file; returns (SamplingGrid, normalized values)."""
    path = Path(path)
    lines = path.read_text(encoding="ascii").splitlines()
    header = {}
    data = []
    for i, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if "=" in text:
            key, _, value = text.partition("=")
            header[key.strip()] = (i, value.strip())
        else:
            parts = text.split()
            if len(parts) != 3:
                raise FormatError(path, i, f"expected 'x y I', got {text!r}")
            data.append(_parse_float(path, i, "I", parts[2]))
    if "format" not in header or header["format"][1] != GRID_FORMAT:
        raise FormatError(path, 1, f"not an {GRID_FORMAT!r} file")
    for required in ("xmin", "xmax", "ymin", "ymax", "h"):
        if required not in header:
            raise FormatError(path, 1, f"missing header field: {required}")

    def header_float(name: str) -> float:
        lineno, value = header[name]
        return _parse_float(path, lineno, name, value)

    grid = SamplingGrid(
        x_min=header_float("xmin"),
        x_max=header_float("xmax"),
        y_min=header_float("ymin"),
        y_max=header_float("ymax"),
        spacing=header_float("h"),
    )
    values = np.asarray(data, dtype=float)
    if values.size != len(grid):
        raise FormatError(
            path, len(lines), f"{values.size} rows, expected {len(grid)}"
        )
    return grid, values
