"""Archetype starting grids.

* ``scale-free``: A units split between the two halves of the grid, each half
  holding islands of geometrically decreasing size (one of 16, two of 8,
  four of 4, eight of 2, then singletons), separated by B gaps where space
  allows.
* ``rich-club``: one compact A rectangle straddling both torus seams.
* ``small-rich-club``: one compact block (5 x 6 for 30 units) in the
  middle of the grid.
* ``random``: uniform random placement.
* ``stripes``: A rows alternating with B rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .configvars import count_array
from .errors import GridError, InfeasiblePatternError
from .lattice import Grid, _check_dims, neighbor_tables, new_random


class PatternKind(str, Enum):
    SCALE_FREE = "scale-free"
    RICH_CLUB = "rich-club"
    SMALL_RICH_CLUB = "small-rich-club"
    RANDOM = "random"
    STRIPES = "stripes"


@dataclass(frozen=True)
class PatternSpec:
    kind: PatternKind
    rows: int = 16
    cols: int = 16
    n_active: int = 128
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", PatternKind(self.kind))
        _check_dims(self.rows, self.cols)
        if not 0 <= self.n_active <= self.rows * self.cols:
            raise GridError(f"n_active={self.n_active} outside [0, {self.rows * self.cols}]")


def island_sizes(n: int, largest: int = 16) -> list[int]:
    """Island sizes summing to ``n``: one of ``largest``, two of half that, ..."""
    sizes = []
    size, copies = largest, 1
    while n > 0 and size >= 1:
        for _ in range(copies):
            take = min(size, n)
            if take == 0:
                break
            sizes.append(take)
            n -= take
        size //= 2
        copies *= 2
    sizes.extend([1] * n)
    return sizes


def _neighborhood(rows, cols):
    t = neighbor_tables(rows, cols)
    keys = ("up_left", "up_right", "down_left", "down_right", "left", "right")
    return np.stack([t[k] for k in keys], axis=1)


def _scale_free(spec: PatternSpec, gap: int = 1) -> np.ndarray:
    rows, cols = spec.rows, spec.cols
    n = rows * cols
    nbr = _neighborhood(rows, cols)
    rng = np.random.default_rng(spec.seed)
    owner = np.full(n, -1, dtype=np.int64)  # island id per cell
    col_of = np.tile(np.arange(cols), rows)
    row_of = np.repeat(np.arange(rows), cols)

    half = cols // 2
    regions = [col_of < half, col_of >= half] if cols >= 4 else [np.ones(n, bool)]
    per_region = [spec.n_active // len(regions)] * len(regions)
    per_region[0] += spec.n_active - sum(per_region)

    def blocked(island):
        """Cells within ``gap`` steps of any other island."""
        mask = (owner >= 0) & (owner != island)
        for _ in range(gap):
            mask = mask | mask[nbr].any(axis=1)
        return mask

    placed = 0
    island = 0
    for region, quota in zip(regions, per_region):
        centers = np.flatnonzero(region)
        mid = centers[
            np.argmin(
                (row_of[centers] - rows / 2) ** 2
                + (col_of[centers] - col_of[centers].mean()) ** 2
            )
        ]
        for k, size in enumerate(island_sizes(quota)):
            free = (owner < 0) & ~blocked(island)
            if k == 0 and free[mid]:
                seed_cell = mid
            else:
                cand = np.flatnonzero(free & region)
                if cand.size == 0:
                    cand = np.flatnonzero(free)
                if cand.size == 0:
                    cand = np.flatnonzero((owner < 0) & region)
                if cand.size == 0:
                    cand = np.flatnonzero(owner < 0)
                if cand.size == 0:
                    raise InfeasiblePatternError(
                        f"no room for island {island} of size {size}", placed=placed
                    )
                seed_cell = rng.choice(cand)
            owner[seed_cell] = island
            members = [seed_cell]
            placed += 1
            while len(members) < size:
                ok = (owner < 0) & ~blocked(island)
                grown = _grow(members, nbr, ok, rng)
                if grown is None:
                    grown = _grow(members, nbr, owner < 0, rng)
                if grown is None:
                    # island is enclosed: start a detached fragment
                    rest = np.flatnonzero(owner < 0)
                    if rest.size == 0:
                        raise InfeasiblePatternError(
                            f"grid full while growing island {island}", placed=placed
                        )
                    grown = rng.choice(rest)
                owner[grown] = island
                members.append(grown)
                placed += 1
            island += 1
    return (owner >= 0).astype(np.uint8).reshape(rows, cols)


def _grow(members, nbr, allowed, rng):
    """Pick the allowed neighbor of the island with the most island contacts."""
    member_set = set(int(m) for m in members)
    best, best_score = [], -1
    for cell in {int(c) for m in members for c in nbr[m]}:
        if cell in member_set or not allowed[cell]:
            continue
        score = sum(1 for c in nbr[cell] if int(c) in member_set)
        if score > best_score:
            best, best_score = [cell], score
        elif score == best_score:
            best.append(cell)
    if not best:
        return None
    best.sort()
    return best[rng.integers(len(best))]


def _rectangle(rows, cols, n_active, top, left, a, b):
    cells = np.zeros((rows, cols), dtype=np.uint8)
    filled = 0
    for i in range(a):
        for j in range(b):
            if filled == n_active:
                return cells
            cells[(top + i) % rows, (left + j) % cols] = 1
            filled += 1
    return cells


def _compact_shapes(rows, cols, n_active):
    for a in range(1, rows + 1):
        b = math.ceil(n_active / a)
        if b <= cols and (a - 1) * b < n_active:
            yield a, b


def _rich_club(spec: PatternSpec) -> np.ndarray:
    rows, cols, n = spec.rows, spec.cols, spec.n_active
    if n == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    best, best_mixed = None, None
    for a, b in _compact_shapes(rows, cols, n):
        top = (rows - a // 2) % rows
        left = (cols - b // 2) % cols
        cells = _rectangle(rows, cols, n, top, left, a, b)
        mixed = count_array(cells).y[1]
        if best_mixed is None or mixed < best_mixed:
            best, best_mixed = cells, mixed
    return best


def _small_rich_club(spec: PatternSpec) -> np.ndarray:
    rows, cols, n = spec.rows, spec.cols, spec.n_active
    if n == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    shapes = list(_compact_shapes(rows, cols, n))
    if not shapes:
        raise InfeasiblePatternError(f"no block of {n} cells fits", placed=0)
    # most nearly square block, fewer rows than columns on ties
    a, b = min(shapes, key=lambda ab: (abs(ab[0] - ab[1]), ab[0] > ab[1]))
    return _rectangle(rows, cols, n, (rows - a) // 2, (cols - b) // 2, a, b)


def _stripes(spec: PatternSpec) -> np.ndarray:
    rows, cols = spec.rows, spec.cols
    order = [r for r in range(0, rows, 2)] + [r for r in range(1, rows, 2)]
    flat = np.zeros((rows, cols), dtype=np.uint8)
    left = spec.n_active
    for r in order:
        take = min(cols, left)
        flat[r, :take] = 1
        left -= take
    return flat


def generate(spec: PatternSpec) -> Grid:
    kind = spec.kind
    if kind is PatternKind.RANDOM:
        return new_random(spec.rows, spec.cols, spec.n_active, spec.seed)
    if kind is PatternKind.SCALE_FREE:
        cells = _scale_free(spec)
    elif kind is PatternKind.RICH_CLUB:
        cells = _rich_club(spec)
    elif kind is PatternKind.SMALL_RICH_CLUB:
        cells = _small_rich_club(spec)
    else:
        cells = _stripes(spec)
    grid = Grid(cells)
    assert grid.n_active == spec.n_active
    return grid


FIXTURES = (
    "scale_free_16x16",
    "rich_club_16x16",
    "small_rich_club_16x16",
    "row_stripes_4x4",
)


def load_fixture(name: str) -> Grid:
    """Load one of the shipped archetype grids (see :data:`FIXTURES`)."""
    from importlib.resources import files

    from .lattice import from_text

    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return from_text(files("cvm2d.fixtures").joinpath(f"{name}.txt").read_text())
