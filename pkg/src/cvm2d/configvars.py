"""Counting and normalizing the fourteen configuration variables.

Raw counts (upper-case in the literature) are tallies of units, diagonal
nearest-neighbor links, within-row next-nearest links, and
wing-vertex-wing triplets.  Fractions divide each tally by the number of
clusters of that kind and by its degeneracy, so that

    x1 + x2 = 1
    y1 + 2 y2 + y3 = 1
    w1 + 2 w2 + w3 = 1
    z1 + 2 z2 + z3 + z4 + 2 z5 + z6 = 1
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import ConsistencyError
from .lattice import Grid, neighbor_tables

BETA = (1, 2, 1)
GAMMA = (1, 2, 1, 1, 2, 1)

FRACTION_COLUMNS = (
    "x1", "x2", "y1", "y2", "y3", "w1", "w2", "w3",
    "z1", "z2", "z3", "z4", "z5", "z6",
)

# Triplet class from (vertex, number of A wings).
#   vertex A: AAA -> z1, AAB/BAA -> z2, BAB -> z4
#   vertex B: ABA -> z3, BBA/ABB -> z5, BBB -> z6
_Z_INDEX = np.array([[5, 4, 2], [3, 1, 0]], dtype=np.int64)


@dataclass(frozen=True)
class ConfigCounts:
    """Integer tallies.

    ``y`` and ``w`` are (AA, mixed, BB); ``z`` is
    (AAA, AAB+BAA, ABA, BAB, BBA+ABB, BBB).  ``n_triplets`` is 2N when both
    triplet orientations are counted and N in horizontal-only mode.
    """

    x: tuple[int, int]
    y: tuple[int, int, int]
    w: tuple[int, int, int]
    z: tuple[int, int, int, int, int, int]
    n_triplets: int

    @property
    def n(self) -> int:
        return self.x[0] + self.x[1]


@dataclass(frozen=True)
class ConfigFractions:
    x1: float
    x2: float
    y1: float
    y2: float
    y3: float
    w1: float
    w2: float
    w3: float
    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float

    @property
    def x(self):
        return (self.x1, self.x2)

    @property
    def y(self):
        return (self.y1, self.y2, self.y3)

    @property
    def w(self):
        return (self.w1, self.w2, self.w3)

    @property
    def z(self):
        return (self.z1, self.z2, self.z3, self.z4, self.z5, self.z6)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def relabeled(self) -> "ConfigFractions":
        """The same configuration with states A and B exchanged."""
        return ConfigFractions(
            self.x2, self.x1,
            self.y3, self.y2, self.y1,
            self.w3, self.w2, self.w1,
            self.z6, self.z5, self.z4, self.z3, self.z2, self.z1,
        )

    def replace(self, **changes) -> "ConfigFractions":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ConfigFractions(**values)

    def csv_row(self) -> str:
        return ",".join(f"{v:.6f}" for v in self.as_tuple())

    @staticmethod
    def csv_header() -> str:
        return ",".join(FRACTION_COLUMNS)


def count_array(cells: np.ndarray, horizontal_only: bool = False) -> ConfigCounts:
    """Count configuration variables directly from a ``uint8`` cell array."""
    rows, cols = cells.shape
    t = neighbor_tables(rows, cols)
    s = cells.reshape(-1).astype(np.int64)
    n = s.size

    n_a = int(s.sum())
    x = (n_a, n - n_a)

    # every diagonal link is the down-link of exactly one cell
    pair_sums = np.concatenate((s + s[t["down_left"]], s + s[t["down_right"]]))
    yb = np.bincount(pair_sums, minlength=3)
    y = (int(yb[2]), int(yb[1]), int(yb[0]))

    wb = np.bincount(s + s[t["right"]], minlength=3)
    w = (int(wb[2]), int(wb[1]), int(wb[0]))

    down = _Z_INDEX[s, s[t["down_left"]] + s[t["down_right"]]]
    if horizontal_only:
        classes = down
    else:
        up = _Z_INDEX[s, s[t["up_left"]] + s[t["up_right"]]]
        classes = np.concatenate((down, up))
    zb = np.bincount(classes, minlength=6)
    z = tuple(int(v) for v in zb)
    return ConfigCounts(x, y, w, z, n if horizontal_only else 2 * n)


def count(grid: Grid, horizontal_only: bool = False) -> ConfigCounts:
    """Exact tallies for ``grid``.

    With ``horizontal_only`` only the down-triplets (one per vertex) are
    tallied, reproducing the approximate single-orientation triplet count.
    """
    return count_array(grid.cells, horizontal_only)


def check_counts(counts: ConfigCounts, n: int | None = None) -> int:
    """Validate the sum invariants of ``counts`` and return N."""
    if n is None:
        n = counts.n
    if n <= 0:
        raise ConsistencyError("N must be positive")
    problems = []
    if sum(counts.x) != n:
        problems.append(f"X sums to {sum(counts.x)}, expected {n}")
    if sum(counts.y) != 2 * n:
        problems.append(f"Y sums to {sum(counts.y)}, expected {2 * n}")
    if sum(counts.w) != n:
        problems.append(f"W sums to {sum(counts.w)}, expected {n}")
    if counts.n_triplets not in (n, 2 * n) or sum(counts.z) != counts.n_triplets:
        problems.append(f"Z sums to {sum(counts.z)} with n_triplets={counts.n_triplets}")
    if problems:
        raise ConsistencyError("; ".join(problems))
    return n


def fractions(counts: ConfigCounts, n: int | None = None) -> ConfigFractions:
    """Degeneracy-normalized fractions from raw counts."""
    n = check_counts(counts, n)
    nt = counts.n_triplets
    X, Y, W, Z = counts.x, counts.y, counts.w, counts.z
    return ConfigFractions(
        X[0] / n, X[1] / n,
        Y[0] / (2 * n), Y[1] / (4 * n), Y[2] / (2 * n),
        W[0] / n, W[1] / (2 * n), W[2] / n,
        Z[0] / nt, Z[1] / (2 * nt), Z[2] / nt, Z[3] / nt, Z[4] / (2 * nt), Z[5] / nt,
    )


def grid_fractions(grid: Grid, horizontal_only: bool = False) -> ConfigFractions:
    return fractions(count(grid, horizontal_only))


EQUIVALENCE_NAMES = (
    "y1-(z1+z2)",
    "y2-(z2+z4)",
    "y2-(z3+z5)",
    "y3-(z5+z6)",
    "w1-(z1+z3)",
    "w2-(z2+z5)",
    "w3-(z4+z6)",
    "x1-(y1+y2)",
    "x1-(w1+w2)",
    "x1-(z1+z2+z3+z5)",
)


def equivalence_residuals(fr: ConfigFractions) -> tuple[float, ...]:
    """Signed residuals (left minus right) of the ten equivalence relations,
    in the order of :data:`EQUIVALENCE_NAMES`."""
    return (
        fr.y1 - (fr.z1 + fr.z2),
        fr.y2 - (fr.z2 + fr.z4),
        fr.y2 - (fr.z3 + fr.z5),
        fr.y3 - (fr.z5 + fr.z6),
        fr.w1 - (fr.z1 + fr.z3),
        fr.w2 - (fr.z2 + fr.z5),
        fr.w3 - (fr.z4 + fr.z6),
        fr.x1 - (fr.y1 + fr.y2),
        fr.x1 - (fr.w1 + fr.w2),
        fr.x1 - (fr.z1 + fr.z2 + fr.z3 + fr.z5),
    )


def normalization_sums(fr: ConfigFractions) -> tuple[float, float, float, float]:
    """(x, y, w, z) degeneracy-weighted sums; each is 1 for valid fractions."""
    return (
        fr.x1 + fr.x2,
        sum(b * v for b, v in zip(BETA, fr.y)),
        sum(b * v for b, v in zip(BETA, fr.w)),
        sum(g * v for g, v in zip(GAMMA, fr.z)),
    )


@dataclass(frozen=True)
class Topography:
    y2: float
    z1: float
    z3: float
    tags: tuple[str, ...]


def summarize_topography(fr: ConfigFractions, margin: float = 0.02) -> Topography:
    """Reduce fractions to (y2, z1, z3) and tag departures from randomness.

    A tag is attached when the value exceeds the random-placement baseline
    at the same x1 by more than ``margin``: ``clustered`` for z1,
    ``dispersed`` for y2, ``channeled`` for z3.  A single-state grid has no
    departure to measure; it is one solid mass and is tagged ``clustered``.
    """
    from .thermo import random_fractions

    base = random_fractions(fr.x1)
    tags = []
    if fr.z1 > base.z1 + margin or fr.x1 in (0.0, 1.0):
        tags.append("clustered")
    if fr.y2 > base.y2 + margin:
        tags.append("dispersed")
    if fr.z3 > base.z3 + margin:
        tags.append("channeled")
    return Topography(fr.y2, fr.z1, fr.z3, tuple(tags))
