"""Grid files: plain A/B text, boxed text, and plain PGM (P2, A = 1)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import GridError
from .lattice import Grid, from_text, to_text


def to_pgm(grid: Grid) -> str:
    lines = ["P2", f"{grid.cols} {grid.rows}", "1"]
    lines += [" ".join(str(int(v)) for v in row) for row in grid.cells]
    return "\n".join(lines) + "\n"


def from_pgm(s: str) -> Grid:
    # strip comments, then read whitespace-separated tokens
    tokens = []
    for ln in s.splitlines():
        tokens += ln.split("#", 1)[0].split()
    if len(tokens) < 4 or tokens[0] != "P2":
        raise GridError("not a plain PGM (P2) image")
    try:
        cols, rows, maxval = (int(t) for t in tokens[1:4])
        pixels = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    except ValueError as exc:
        raise GridError(f"bad PGM token: {exc}") from None
    if maxval < 1:
        raise GridError(f"bad PGM maxval {maxval}")
    if pixels.size != rows * cols:
        raise GridError(f"PGM has {pixels.size} pixels, expected {rows * cols}")
    if np.any((pixels != 0) & (pixels != maxval)):
        raise GridError("PGM pixels must be 0 (B) or maxval (A)")
    return Grid((pixels == maxval).astype(np.uint8).reshape(rows, cols))


def to_boxed(grid: Grid) -> str:
    """Text picture with the row offsets drawn: odd rows shifted right by
    half a cell, cells separated by spaces, inside a ``+--+`` frame."""
    width = 2 * grid.cols
    out = ["+" + "-" * width + "+"]
    for r, row in enumerate(grid.cells):
        body = " ".join("A" if v else "B" for v in row)
        body = (" " + body) if r % 2 else (body + " ")
        out.append("|" + body + "|")
    out.append(out[0])
    return "\n".join(out) + "\n"


def from_boxed(s: str) -> Grid:
    lines = [ln for ln in s.splitlines() if ln.strip()]
    inner = [ln.strip()[1:-1] for ln in lines if ln.strip().startswith("|")]
    if not inner:
        raise GridError("boxed grid has no rows")
    return from_text("\n".join(ln.replace(" ", "") for ln in inner))


def parse_grid(s: str) -> Grid:
    """Parse any supported grid format, detected from its first line."""
    head = s.lstrip()
    if head.startswith("P2"):
        return from_pgm(s)
    if head.startswith("+"):
        return from_boxed(s)
    return from_text(s)


def read_grid(path) -> Grid:
    return parse_grid(Path(path).read_text())


def render(grid: Grid, fmt: str) -> str:
    if fmt == "pgm":
        return to_pgm(grid)
    if fmt == "txt":
        return to_boxed(grid)
    if fmt == "plain":
        return to_text(grid)
    raise ValueError(f"unknown render format {fmt!r}")
