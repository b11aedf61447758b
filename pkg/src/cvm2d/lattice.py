"""Bistate toroidal lattice with offset (zigzag) rows.

Rows alternate their horizontal offset: even rows sit half a cell to the
left, odd rows half a cell to the right.  Each cell then has four
diagonal nearest neighbors (two above, two below), two within-row
next-nearest neighbors, and is the vertex of two wing-vertex-wing
triplets whose wings are its upper (resp. lower) diagonal neighbors.

Cell states are stored as ``uint8`` with ``A = 1`` and ``B = 0``.
"""

from __future__ import annotations

from enum import IntEnum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import GridError


class UnitState(IntEnum):
    B = 0
    A = 1


A = UnitState.A
B = UnitState.B


class Coord(NamedTuple):
    row: int
    col: int


def _check_dims(rows, cols):
    if rows < 2 or cols < 2:
        raise GridError(f"grid must be at least 2x2, got {rows}x{cols}")
    if rows % 2:
        raise GridError(f"row count must be even for the torus to close, got {rows}")


class Grid:
    """An ``L x M`` bistate grid on a torus.

    The grid owns a private ``uint8`` array.  Public operations never mutate
    it; :func:`flip` and friends return new grids.
    """

    __slots__ = ("_cells",)

    def __init__(self, cells):
        arr = np.array(cells, dtype=np.uint8)
        if arr.ndim != 2:
            raise GridError("cells must be a 2-D array")
        _check_dims(*arr.shape)
        if arr.size and arr.max() > 1:
            raise GridError("cell values must be 0 (B) or 1 (A)")
        arr.setflags(write=False)
        self._cells = arr

    @property
    def cells(self) -> np.ndarray:
        """Read-only view of the cell array."""
        return self._cells

    @property
    def rows(self) -> int:
        return self._cells.shape[0]

    @property
    def cols(self) -> int:
        return self._cells.shape[1]

    @property
    def n(self) -> int:
        return self._cells.size

    @property
    def n_active(self) -> int:
        return int(self._cells.sum())

    @property
    def x1(self) -> float:
        return self.n_active / self.n

    def __getitem__(self, c) -> UnitState:
        r, k = c
        return UnitState(int(self._cells[r % self.rows, k % self.cols]))

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self._cells.shape == other._cells.shape and bool(
            np.array_equal(self._cells, other._cells)
        )

    def __hash__(self):
        return hash((self._cells.shape, self._cells.tobytes()))

    def __repr__(self):
        return f"Grid({self.rows}x{self.cols}, n_active={self.n_active})"

    def copy_cells(self) -> np.ndarray:
        """Writable copy of the cell array."""
        return self._cells.copy()


def new_uniform(rows, cols, state=B) -> Grid:
    _check_dims(rows, cols)
    return Grid(np.full((rows, cols), int(state), dtype=np.uint8))


def new_random(rows, cols, n_active, seed=None) -> Grid:
    """Grid with exactly ``n_active`` A-cells placed uniformly at random."""
    _check_dims(rows, cols)
    n = rows * cols
    if not 0 <= n_active <= n:
        raise GridError(f"n_active={n_active} outside [0, {n}]")
    rng = np.random.default_rng(seed)
    flat = np.zeros(n, dtype=np.uint8)
    flat[rng.choice(n, size=n_active, replace=False)] = 1
    return Grid(flat.reshape(rows, cols))


def _wrap(grid, c):
    return Coord(c[0] % grid.rows, c[1] % grid.cols)


def down_neighbors(grid, c) -> tuple[Coord, Coord]:
    """Lower diagonal neighbors ordered left, right."""
    r, k = _wrap(grid, c)
    lo = k - 1 if r % 2 == 0 else k
    return _wrap(grid, (r + 1, lo)), _wrap(grid, (r + 1, lo + 1))


def up_neighbors(grid, c) -> tuple[Coord, Coord]:
    """Upper diagonal neighbors ordered left, right."""
    r, k = _wrap(grid, c)
    lo = k - 1 if r % 2 == 0 else k
    return _wrap(grid, (r - 1, lo)), _wrap(grid, (r - 1, lo + 1))


def diagonal_neighbors(grid, c) -> tuple[Coord, Coord, Coord, Coord]:
    """The four nearest neighbors: upper-left, upper-right, lower-left, lower-right."""
    return up_neighbors(grid, c) + down_neighbors(grid, c)


def row_neighbors(grid, c) -> tuple[Coord, Coord]:
    r, k = _wrap(grid, c)
    return _wrap(grid, (r, k - 1)), _wrap(grid, (r, k + 1))


def triplets_at(grid, c) -> tuple[tuple[Coord, Coord, Coord], tuple[Coord, Coord, Coord]]:
    """The up-triplet and down-triplet having ``c`` as vertex.

    Each triplet is ``(left wing, vertex, right wing)``.
    """
    v = _wrap(grid, c)
    ul, ur = up_neighbors(grid, v)
    dl, dr = down_neighbors(grid, v)
    return (ul, v, ur), (dl, v, dr)


def flip(grid, c) -> Grid:
    r, k = _wrap(grid, c)
    cells = grid.copy_cells()
    cells[r, k] ^= 1
    return Grid(cells)


def swap(grid, a, b) -> Grid:
    """Toggle two cells at once."""
    cells = grid.copy_cells()
    for r, k in (_wrap(grid, a), _wrap(grid, b)):
        cells[r, k] ^= 1
    return Grid(cells)


@lru_cache(maxsize=64)
def neighbor_tables(rows, cols):
    """Flat-index neighbor tables for an ``rows x cols`` torus.

    Returns a dict of read-only ``int64`` arrays of length ``rows*cols``:
    ``up_left``, ``up_right``, ``down_left``, ``down_right``, ``left``,
    ``right``.  Entry ``i`` is the flat index of the named neighbor of cell
    ``i``.
    """
    _check_dims(rows, cols)
    r = np.repeat(np.arange(rows), cols)
    k = np.tile(np.arange(cols), rows)
    lo = np.where(r % 2 == 0, k - 1, k)

    def flat(rr, kk):
        return (rr % rows) * cols + (kk % cols)

    tables = {
        "up_left": flat(r - 1, lo),
        "up_right": flat(r - 1, lo + 1),
        "down_left": flat(r + 1, lo),
        "down_right": flat(r + 1, lo + 1),
        "left": flat(r, k - 1),
        "right": flat(r, k + 1),
    }
    for t in tables.values():
        t.setflags(write=False)
    return tables


_TEXT_ALPHABET = {"A": 1, "B": 0, "1": 1, "0": 0}


def from_text(s: str) -> Grid:
    """Parse rows of ``A``/``B`` (or ``1``/``0``) characters, one row per line.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [ln.strip() for ln in s.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GridError("empty grid text")
    width = len(lines[0])
    rows = []
    for i, ln in enumerate(lines):
        if len(ln) != width:
            raise GridError(f"ragged row {i}: expected {width} cells, got {len(ln)}")
        try:
            rows.append([_TEXT_ALPHABET[ch] for ch in ln])
        except KeyError as exc:
            raise GridError(f"illegal character {exc.args[0]!r} in row {i}") from None
    return Grid(rows)


def to_text(grid: Grid) -> str:
    return "".join("".join("A" if v else "B" for v in row) + "\n" for row in grid.cells)
