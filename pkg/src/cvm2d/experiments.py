"""Batch experiments behind the command-line tool.

Every table is returned as CSV text whose first line is a
``# schema: cvm2d.<kind>/<version>`` tag, followed by a header row and
rows of numbers with six decimals.  Runs fan out over a process pool whose
size is capped by the ``CVM2D_THREADS`` environment variable; results are
gathered in (h, trial) order so the text does not depend on the pool size.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import estimate_h, equilibrium, h_for_variable, ratio_h
from .configvars import FRACTION_COLUMNS, ConfigFractions, grid_fractions
from .errors import DomainError
from .lattice import Grid, new_random
from .minimizer import MinimizeConfig, minimize, perturb, round_half_up
from .thermo import EnthalpyParams, eps0_from_x1, random_fractions, x1_from_eps0

SCHEMA_VERSION = 1
DEFAULT_H_VALUES = tuple(round(0.8 + 0.1 * k, 10) for k in range(11))

EPS0_SOFT_LIMIT = 3.0
H_USEFUL_LIMIT = 1.5


def schema_line(kind: str) -> str:
    return f"# schema: cvm2d.{kind}/{SCHEMA_VERSION}\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6f}"


def format_csv(kind: str, header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return schema_line(kind) + "\n".join(lines) + "\n"


def worker_count(n_tasks: int) -> int:
    """Pool size: ``CVM2D_THREADS`` if set, else the CPU count, never more than the task count."""
    raw = os.environ.get("CVM2D_THREADS")
    if raw is None or raw.strip() == "":
        n = os.cpu_count() or 1
    else:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"CVM2D_THREADS must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"CVM2D_THREADS must be a positive integer, got {raw!r}")
    return max(1, min(n, n_tasks))


def _map(fn, tasks):
    workers = worker_count(len(tasks))
    if workers == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def phase_space_warnings(eps0: float | None = None, h: float | None = None) -> list[str]:
    out = []
    if eps0 is not None and eps0 > EPS0_SOFT_LIMIT:
        out.append(
            f"eps0={eps0:g} exceeds {EPS0_SOFT_LIMIT:g}; so few A units remain that "
            "triplet statistics become unreliable"
        )
    if h is not None and h > H_USEFUL_LIMIT:
        out.append(
            f"h={h:g} is beyond the useful range 1.0..{H_USEFUL_LIMIT:g}; minimized "
            "grids already stop changing much above h = 1.3"
        )
    return out


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    x1: float = 0.5
    h_values: tuple[float, ...] = DEFAULT_H_VALUES
    num_trials: int = 20
    base_seed: int = 0
    rows: int = 16
    cols: int = 16
    use_eps0: bool = False
    cfg: MinimizeConfig = field(default_factory=MinimizeConfig)

    def __post_init__(self):
        object.__setattr__(self, "h_values", tuple(float(h) for h in self.h_values))
        if self.num_trials < 1:
            raise DomainError("num_trials must be >= 1")
        if not self.h_values:
            raise DomainError("h_values is empty")
        if any(not h > 0 for h in self.h_values):
            raise DomainError("h values must be positive")
        if not 0.0 < self.x1 < 1.0:
            raise DomainError(f"x1 must lie strictly between 0 and 1, got {self.x1}")

    @property
    def n_active(self) -> int:
        return round_half_up(self.x1 * self.rows * self.cols)

    @property
    def eps0(self) -> float:
        return eps0_from_x1(self.x1) if self.use_eps0 else 0.0

    def trial_config(self, h: float, trial: int) -> MinimizeConfig:
        return replace(
            self.cfg,
            params=EnthalpyParams.from_h(h, self.eps0),
            seed=self.base_seed + trial,
            target_x1=None,
        )

    def trial_grid(self, trial: int) -> Grid:
        return new_random(self.rows, self.cols, self.n_active, self.base_seed + trial)


STAT_NAMES = ("y2", "z1", "z3", "delta", "enthalpy", "entropy", "free_energy")


@dataclass(frozen=True)
class SweepRow:
    h: float
    trials: int
    means: dict
    stds: dict

    def values(self):
        out = [self.h, self.trials]
        for name in STAT_NAMES:
            out += [self.means[name], self.stds[name]]
        return out


SWEEP_HEADER = ("h", "trials") + tuple(
    f"{name}_{stat}" for name in STAT_NAMES for stat in ("mean", "std")
)


def _sweep_trial(task):
    spec, h, trial = task
    res = minimize(spec.trial_grid(trial), spec.trial_config(h, trial))
    fr, rep = res.final_fractions, res.final_report
    return (fr.y2, fr.z1, fr.z3, rep.delta_term, rep.enthalpy, rep.entropy, rep.free_energy)


def _aggregate(h, samples) -> SweepRow:
    arr = np.array(samples, dtype=float)
    # population standard deviation over the trials
    means = dict(zip(STAT_NAMES, arr.mean(axis=0).tolist()))
    stds = dict(zip(STAT_NAMES, arr.std(axis=0).tolist()))
    return SweepRow(h, len(samples), means, stds)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    tasks = [(spec, h, t) for h in spec.h_values for t in range(spec.num_trials)]
    results = _map(_sweep_trial, tasks)
    k = spec.num_trials
    return [_aggregate(h, results[i * k:(i + 1) * k]) for i, h in enumerate(spec.h_values)]


def sweep_csv(rows) -> str:
    return format_csv("sweep", SWEEP_HEADER, [r.values() for r in rows])


# ---------------------------------------------------------------------------
# perturbation study


@dataclass(frozen=True)
class PerturbRow:
    h: float
    trials: int
    f1_mean: float
    f2_mean: float
    abs_diff_mean: float
    abs_diff_max: float
    y2_mean: float
    z1_mean: float
    x1_conserved: bool

    def values(self):
        return [
            self.h, self.trials, self.f1_mean, self.f2_mean, self.abs_diff_mean,
            self.abs_diff_max, self.y2_mean, self.z1_mean, self.x1_conserved,
        ]


PERTURB_HEADER = (
    "h", "trials", "f1_mean", "f2_mean", "abs_diff_mean", "abs_diff_max",
    "y2_mean", "z1_mean", "x1_conserved",
)


def _perturb_trial(task):
    spec, h, trial, fraction = task
    cfg = spec.trial_config(h, trial)
    start = spec.trial_grid(trial)
    first = minimize(start, cfg)
    shaken = perturb(first.final_grid, fraction, seed=np.random.SeedSequence([cfg.seed, 2]))
    second = minimize(shaken, cfg)
    conserved = (
        first.final_grid.n_active == start.n_active
        and shaken.n_active == start.n_active
        and second.final_grid.n_active == start.n_active
    )
    return (
        first.final_report.free_energy,
        second.final_report.free_energy,
        first.final_fractions.y2,
        first.final_fractions.z1,
        conserved,
    )


def run_perturb_study(spec: SweepSpec, fraction: float) -> list[PerturbRow]:
    if not 0.0 <= fraction <= 1.0:
        raise DomainError(f"perturbation fraction must lie in [0, 1], got {fraction}")
    tasks = [(spec, h, t, fraction) for h in spec.h_values for t in range(spec.num_trials)]
    results = _map(_perturb_trial, tasks)
    k = spec.num_trials
    rows = []
    for i, h in enumerate(spec.h_values):
        chunk = results[i * k:(i + 1) * k]
        f1 = np.array([r[0] for r in chunk])
        f2 = np.array([r[1] for r in chunk])
        diff = np.abs(f1 - f2)
        rows.append(PerturbRow(
            h, k, float(f1.mean()), float(f2.mean()), float(diff.mean()), float(diff.max()),
            float(np.mean([r[2] for r in chunk])), float(np.mean([r[3] for r in chunk])),
            all(r[4] for r in chunk),
        ))
    return rows


def perturb_csv(rows) -> str:
    return format_csv("perturb", PERTURB_HEADER, [r.values() for r in rows])


# ---------------------------------------------------------------------------
# closed-form curve, eps0 table, h estimate


def h_grid(h_min: float, h_max: float, step: float) -> list[float]:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if h_max < h_min:
        raise ValueError(f"h_max {h_max} is below h_min {h_min}")
    n = int(math.floor((h_max - h_min) / step + 1e-9)) + 1
    return [round(h_min + k * step, 10) for k in range(n)]


ANALYTIC_HEADER = ("h", "delta_denom") + FRACTION_COLUMNS + ("physical",)


def analytic_csv(h_values) -> str:
    rows = []
    for h in h_values:
        sol = equilibrium(h)
        rows.append([h, sol.delta_denom, *sol.fractions.as_tuple(), sol.physical])
    return format_csv("analytic", ANALYTIC_HEADER, rows)


EPS0_HEADER = ("eps0", "x1", "y1", "z1", "Z1_2N", "Z1_N")


def eps0_rows(*, x1_values=None, eps0_values=None, n: int = 256):
    """Random-placement baselines for each x1 (or eps0).

    ``Z1_2N`` is the AAA count under both triplet orientations (2N
    triplets); ``Z1_N`` is the count when only one orientation is tallied.
    """
    if (x1_values is None) == (eps0_values is None):
        raise ValueError("give exactly one of x1_values or eps0_values")
    pairs = []
    if x1_values is not None:
        pairs = [(eps0_from_x1(x), x) for x in x1_values]
    else:
        for e in eps0_values:
            if not math.isfinite(e):
                raise DomainError(f"eps0 must be finite, got {e}")
            pairs.append((e, x1_from_eps0(e)))
    rows = []
    for e, x in pairs:
        base = random_fractions(x)
        rows.append([e, x, base.y1, base.z1, base.z1 * 2 * n, base.z1 * n])
    return rows


def eps0_csv(rows) -> str:
    return format_csv("eps0", EPS0_HEADER, rows)


@dataclass(frozen=True)
class EstimateReport:
    fractions: ConfigFractions
    h: float | None
    h_error: str | None
    per_variable: dict
    ratio: float | None = None

    def spread(self) -> float | None:
        vals = [v for v in self.per_variable.values() if v is not None]
        return max(vals) - min(vals) if len(vals) > 1 else None

    def text(self) -> str:
        fr = self.fractions
        lines = [
            "counted fractions:",
            "  " + ConfigFractions.csv_header(),
            "  " + fr.csv_row(),
        ]
        if self.h is None:
            lines.append(f"h estimate sqrt(z1 y2 / z3 y1): undefined ({self.h_error})")
        else:
            lines.append(f"h estimate sqrt(z1 y2 / z3 y1): {self.h:.6f}")
            lines.append(f"ratio z1 y2 / z3 y1 (equals h on the closed form): {self.ratio:.6f}")
        lines.append("h reading per variable (closed-form curve):")
        for name, v in self.per_variable.items():
            value = getattr(fr, name)
            shown = "out of range" if v is None else f"{v:.6f}"
            lines.append(f"  {name} = {value:.6f} -> h = {shown}")
        sp = self.spread()
        if sp is not None:
            lines.append(f"per-variable spread: {sp:.6f}")
        return "\n".join(lines) + "\n"


def estimate_report(grid: Grid) -> EstimateReport:
    fr = grid_fractions(grid)
    try:
        h, ratio, err = estimate_h(fr), ratio_h(fr), None
    except DomainError as exc:
        h, ratio, err = None, None, str(exc)
    per = {}
    for name in ("y2", "z1", "z3"):
        try:
            per[name] = h_for_variable(name, getattr(fr, name))
        except DomainError:
            per[name] = None
    return EstimateReport(fr, h, err, per, ratio)
