"""Count-conserving find-and-flip free-energy descent.

Each proposal picks one random A cell and one random B cell and swaps
their states.  The swap is kept only if it lowers the reduced free energy
by at least ``ACCEPT_TOL``; ties are rejected so the walk cannot cycle.
The number of A cells never changes.

Free energies are always evaluated from exact integer configuration
counts, either recounted from scratch or updated locally around the two
swapped cells.  Both routes feed identical integers into the same
evaluator, so they produce bit-identical runs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .configvars import ConfigCounts, ConfigFractions, count_array, fractions
from .errors import DomainError, GridError, StateError
from .lattice import Grid, neighbor_tables
from .thermo import EnthalpyParams, ThermoReport, free_energy

ACCEPT_TOL = 1e-12

# position of each tally in the flat count vector
_X1, _X2, _Y1, _Y2, _Y3, _W1, _W2, _W3 = range(8)
_Z0 = 8
# triplet class from [vertex][number of A wings]; see configvars._Z_INDEX
_Z_CLASS = ((5, 4, 2), (3, 1, 0))


def round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def target_count(target_x1: float, n: int) -> int:
    if not 0.0 <= target_x1 <= 1.0:
        raise DomainError(f"target x1 must lie in [0, 1], got {target_x1}")
    return round_half_up(target_x1 * n)


def _counts_to_vector(c: ConfigCounts) -> list[int]:
    return [*c.x, *c.y, *c.w, *c.z]


def _vector_to_counts(v, n_triplets) -> ConfigCounts:
    return ConfigCounts(tuple(v[0:2]), tuple(v[2:5]), tuple(v[5:8]), tuple(v[8:14]), n_triplets)


class LocalCounter:
    """Tracks configuration counts of a mutable flat cell list.

    Links are identified as ``2*u + k`` (``k = 0`` for the lower-left and
    ``k = 1`` for the lower-right link of ``u``), row links by their left
    cell, and triplets as ``2*v`` (down-triplet of vertex ``v``) or
    ``2*v + 1`` (up-triplet).
    """

    def __init__(self, cells: np.ndarray, horizontal_only: bool = False):
        rows, cols = cells.shape
        self.shape = (rows, cols)
        self.n = rows * cols
        self.horizontal_only = horizontal_only
        self.n_triplets = self.n if horizontal_only else 2 * self.n
        t = neighbor_tables(rows, cols)
        self.dl = t["down_left"].tolist()
        self.dr = t["down_right"].tolist()
        self.ul = t["up_left"].tolist()
        self.ur = t["up_right"].tolist()
        self.right = t["right"].tolist()
        left = t["left"].tolist()
        self.s = cells.reshape(-1).astype(int).tolist()

        self.cell_links = []
        self.cell_rows = []
        self.cell_triplets = []
        for i in range(self.n):
            self.cell_links.append(
                frozenset((2 * i, 2 * i + 1, 2 * self.ul[i] + 1, 2 * self.ur[i]))
            )
            self.cell_rows.append(frozenset((i, left[i])))
            trip = {2 * i, 2 * self.ul[i], 2 * self.ur[i]}
            if not horizontal_only:
                trip.update((2 * i + 1, 2 * self.dl[i] + 1, 2 * self.dr[i] + 1))
            self.cell_triplets.append(frozenset(trip))

        self.counts = _counts_to_vector(count_array(cells, horizontal_only))

    def cells(self) -> np.ndarray:
        return np.array(self.s, dtype=np.uint8).reshape(self.shape)

    def _link_slot(self, lid):
        u = lid >> 1
        v = self.dr[u] if lid & 1 else self.dl[u]
        return _Y3 - (self.s[u] + self.s[v])

    def _row_slot(self, j):
        return _W3 - (self.s[j] + self.s[self.right[j]])

    def _triplet_slot(self, tid):
        v = tid >> 1
        s = self.s
        if tid & 1:
            wings = s[self.ul[v]] + s[self.ur[v]]
        else:
            wings = s[self.dl[v]] + s[self.dr[v]]
        return _Z0 + _Z_CLASS[s[v]][wings]

    def _tally(self, links, rows, trips, sign, out):
        for lid in links:
            out[self._link_slot(lid)] += sign
        for j in rows:
            out[self._row_slot(j)] += sign
        for tid in trips:
            out[self._triplet_slot(tid)] += sign

    def toggle_delta(self, cells_to_toggle) -> list[int]:
        """Count change caused by toggling the given cells (state left unchanged)."""
        links, rows, trips = set(), set(), set()
        for i in cells_to_toggle:
            links |= self.cell_links[i]
            rows |= self.cell_rows[i]
            trips |= self.cell_triplets[i]
        d = [0] * 14
        self._tally(links, rows, trips, -1, d)
        for i in cells_to_toggle:
            d[_X1 if self.s[i] else _X2] -= 1
            self.s[i] ^= 1
            d[_X1 if self.s[i] else _X2] += 1
        self._tally(links, rows, trips, +1, d)
        for i in cells_to_toggle:
            self.s[i] ^= 1
        return d

    def apply(self, cells_to_toggle, delta=None):
        if delta is None:
            delta = self.toggle_delta(cells_to_toggle)
        for i in cells_to_toggle:
            self.s[i] ^= 1
        self.counts = [c + d for c, d in zip(self.counts, delta)]

    def config_counts(self, vec=None) -> ConfigCounts:
        return _vector_to_counts(self.counts if vec is None else vec, self.n_triplets)


def _evaluate(counts: ConfigCounts, params: EnthalpyParams):
    fr = fractions(counts)
    return fr, free_energy(fr, params)


def delta_free_energy(grid: Grid, cell_a, cell_b, params: EnthalpyParams,
                      horizontal_only: bool = False) -> float:
    """Free-energy change of swapping two opposite-state cells, from local recounts."""
    ia = (cell_a[0] % grid.rows) * grid.cols + cell_a[1] % grid.cols
    ib = (cell_b[0] % grid.rows) * grid.cols + cell_b[1] % grid.cols
    flat = grid.cells.reshape(-1)
    if flat[ia] == flat[ib]:
        raise StateError(f"cells {tuple(cell_a)} and {tuple(cell_b)} share a state")
    lc = LocalCounter(grid.cells, horizontal_only)
    before = lc.config_counts()
    d = lc.toggle_delta((ia, ib))
    after = lc.config_counts([c + x for c, x in zip(lc.counts, d)])
    return _evaluate(after, params)[1].free_energy - _evaluate(before, params)[1].free_energy


@dataclass(frozen=True)
class MinimizeConfig:
    params: EnthalpyParams = field(default_factory=EnthalpyParams)
    target_x1: float | None = None
    max_sweeps: int = 200
    patience: int = 2000
    seed: int = 0
    record_every: int = 256
    incremental: bool = False
    polish: bool = False
    horizontal_only: bool = False

    def __post_init__(self):
        if self.patience < 1:
            raise DomainError("patience must be >= 1")
        if self.max_sweeps < 1:
            raise DomainError("max_sweeps must be >= 1")
        if self.record_every < 1:
            raise DomainError("record_every must be >= 1")
        if self.target_x1 is not None and not 0.0 < self.target_x1 < 1.0:
            raise DomainError(f"target_x1 must lie strictly in (0, 1), got {self.target_x1}")


@dataclass(frozen=True)
class TrajectoryStep:
    step: int
    accepted: bool
    free_energy: float
    y2: float
    z1: float
    z3: float


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[TrajectoryStep, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("step", "accepted", "free_energy", "y2", "z1", "z3"))
        for s in self.steps:
            w.writerow((s.step, int(s.accepted), f"{s.free_energy:.6f}",
                        f"{s.y2:.6f}", f"{s.z1:.6f}", f"{s.z3:.6f}"))
        return buf.getvalue()


@dataclass(frozen=True)
class MinimizeResult:
    final_grid: Grid
    final_fractions: ConfigFractions
    final_report: ThermoReport
    trajectory: Trajectory
    proposals: int
    accepted: int


def adjust_x1(grid: Grid, target_x1: float, seed=None) -> Grid:
    """Flip randomly chosen cells of the surplus state until the A count
    equals ``round(target_x1 * N)``."""
    want = target_count(target_x1, grid.n)
    have = grid.n_active
    if want == have:
        return grid
    rng = np.random.default_rng(seed)
    flat = grid.copy_cells().reshape(-1)
    surplus_state = 1 if have > want else 0
    pool = np.flatnonzero(flat == surplus_state)
    chosen = rng.choice(pool, size=abs(have - want), replace=False)
    flat[chosen] ^= 1
    return Grid(flat.reshape(grid.rows, grid.cols))


def perturb(grid: Grid, fraction: float, seed=None) -> Grid:
    """Swap ``round(fraction * N / 2)`` random A cells with as many random B cells."""
    if not 0.0 <= fraction <= 1.0:
        raise DomainError(f"fraction must lie in [0, 1], got {fraction}")
    k = round_half_up(fraction * grid.n / 2)
    if k == 0:
        return grid
    flat = grid.copy_cells().reshape(-1)
    a_cells = np.flatnonzero(flat == 1)
    b_cells = np.flatnonzero(flat == 0)
    if k > min(len(a_cells), len(b_cells)):
        raise GridError(
            f"cannot swap {k} pairs with {len(a_cells)} A and {len(b_cells)} B cells"
        )
    rng = np.random.default_rng(seed)
    flat[rng.choice(a_cells, size=k, replace=False)] = 0
    flat[rng.choice(b_cells, size=k, replace=False)] = 1
    return Grid(flat.reshape(grid.rows, grid.cols))


class _Run:
    """Mutable state of one descent."""

    def __init__(self, grid: Grid, cfg: MinimizeConfig):
        self.cfg = cfg
        self.params = cfg.params
        self.lc = LocalCounter(grid.cells, cfg.horizontal_only)
        self.shape = (grid.rows, grid.cols)
        flat = grid.cells.reshape(-1)
        self.a_cells = np.flatnonzero(flat == 1).tolist()
        self.b_cells = np.flatnonzero(flat == 0).tolist()
        self.fr, self.report = _evaluate(self.lc.config_counts(), self.params)
        self.f = self.report.free_energy
        self.steps = [TrajectoryStep(0, False, self.f, self.fr.y2, self.fr.z1, self.fr.z3)]
        self.proposals = 0
        self.accepted = 0

    def try_swap(self, ia: int, ib: int) -> bool:
        a, b = self.a_cells[ia], self.b_cells[ib]
        lc = self.lc
        if self.cfg.incremental:
            delta = lc.toggle_delta((a, b))
            counts = lc.config_counts([c + d for c, d in zip(lc.counts, delta)])
        else:
            lc.s[a] = 0
            lc.s[b] = 1
            cells = np.array(lc.s, dtype=np.uint8).reshape(self.shape)
            lc.s[a] = 1
            lc.s[b] = 0
            counts = count_array(cells, self.cfg.horizontal_only)
            delta = [n - o for n, o in zip(_counts_to_vector(counts), lc.counts)]
        fr, report = _evaluate(counts, self.params)
        self.proposals += 1
        ok = report.free_energy - self.f <= -ACCEPT_TOL
        if ok:
            lc.apply((a, b), delta)
            self.a_cells[ia], self.b_cells[ib] = b, a
            self.fr, self.report, self.f = fr, report, report.free_energy
            self.accepted += 1
        if ok or self.proposals % self.cfg.record_every == 0:
            self.steps.append(
                TrajectoryStep(self.proposals, ok, self.f, self.fr.y2, self.fr.z1, self.fr.z3)
            )
        return ok

    def exhaustive_pass(self) -> bool:
        """Try every A/B pair once; return True if any swap was accepted."""
        improved = False
        for ia in range(len(self.a_cells)):
            for ib in range(len(self.b_cells)):
                if self.try_swap(ia, ib):
                    improved = True
                    break
        return improved

    def result(self) -> MinimizeResult:
        grid = Grid(self.lc.cells())
        if self.steps[-1].step != self.proposals:
            self.steps.append(
                TrajectoryStep(self.proposals, False, self.f, self.fr.y2, self.fr.z1, self.fr.z3)
            )
        return MinimizeResult(
            grid, self.fr, self.report, Trajectory(tuple(self.steps)),
            self.proposals, self.accepted,
        )


def minimize(grid: Grid, cfg: MinimizeConfig) -> MinimizeResult:
    """Drive ``grid`` downhill in free energy by pairwise A/B swaps.

    If ``cfg.target_x1`` is set, the A count is first brought to
    ``round(target_x1 * N)`` with :func:`adjust_x1`.  The walk stops after
    ``cfg.patience`` consecutive rejections or ``cfg.max_sweeps * N``
    proposals.  With ``cfg.polish`` the stop is followed by exhaustive
    passes over all A/B pairs until none improves, so the returned grid is a
    strict local minimum under single swaps.
    """
    if cfg.target_x1 is not None:
        grid = adjust_x1(grid, cfg.target_x1, seed=np.random.SeedSequence([cfg.seed, 1]))
    run = _Run(grid, cfg)
    n_a, n_b = len(run.a_cells), len(run.b_cells)
    if n_a == 0 or n_b == 0:
        return run.result()

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    cap = cfg.max_sweeps * grid.n
    batch = 4096
    rejected = 0
    while run.proposals < cap and rejected < cfg.patience:
        n_draw = min(batch, cap - run.proposals)
        ias = rng.integers(0, n_a, size=n_draw).tolist()
        ibs = rng.integers(0, n_b, size=n_draw).tolist()
        for ia, ib in zip(ias, ibs):
            if run.try_swap(ia, ib):
                rejected = 0
            else:
                rejected += 1
                if rejected >= cfg.patience:
                    break
    if cfg.polish:
        while run.exhaustive_pass():
            pass
    return run.result()
