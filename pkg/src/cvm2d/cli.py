"""``cvm2d`` command-line tool.

Exit codes: 0 success, 2 usage error, 3 domain or divergence error,
4 input/output error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .configvars import ConfigFractions, count, fractions, summarize_topography
from .errors import CVMError, DomainError, GridError, InfeasiblePatternError
from .gridio import parse_grid, render, to_pgm
from .lattice import to_text
from .minimizer import MinimizeConfig, minimize, round_half_up
from .patterns import FIXTURES, PatternKind, PatternSpec, generate, load_fixture
from .thermo import EnthalpyParams, eps1_from_h, h_from_eps1

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--rows", type=int, default=16, help="grid rows L (even)")
    g.add_argument("--cols", type=int, default=16, help="grid columns M")
    g.add_argument("--x1", type=float, default=None, help="fraction of A units")
    g.add_argument("--h", type=float, default=None, help="interaction parameter h = exp(2 eps1)")
    g.add_argument("--eps1", type=float, default=None, help="interaction enthalpy (alternative to --h)")
    g.add_argument("--eps0", type=float, default=0.0, help="activation enthalpy")
    g.add_argument("--seed", type=int, default=0, help="base random seed")
    g.add_argument("--trials", type=int, default=20, help="trials per parameter point")
    g.add_argument("--out", default=None, help="output file (directory for minimize)")
    return p


def _minimizer_options(p):
    g = p.add_argument_group("minimizer")
    g.add_argument("--patience", type=int, default=2000)
    g.add_argument("--max-sweeps", type=int, default=200)
    g.add_argument("--record-every", type=int, default=256)
    g.add_argument("--incremental", action="store_true",
                   help="local count updates instead of full recounts (same results, faster)")
    g.add_argument("--polish", action="store_true",
                   help="finish with exhaustive passes over all A/B pairs")
    g.add_argument("--horizontal-only", action="store_true",
                   help="tally one triplet orientation only")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="cvm2d", description="2-D cluster variation method toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="closed-form equilibrium curve")
    p.add_argument("--h-min", type=float, default=0.5)
    p.add_argument("--h-max", type=float, default=2.5)
    p.add_argument("--step", type=float, default=0.1)

    p = sub.add_parser("count", parents=[common], help="configuration fractions of a grid")
    p.add_argument("grid", help="grid file (text, boxed text or PGM) or fixture:NAME")
    p.add_argument("--horizontal-only", action="store_true")

    p = sub.add_parser("estimate-h", parents=[common], help="infer h from a grid")
    p.add_argument("grid")

    p = sub.add_parser("minimize", parents=[common], help="free-energy descent of one grid")
    p.add_argument("grid", nargs="?", default=None)
    p.add_argument("--pattern", choices=[k.value for k in PatternKind], default=None,
                   help="generate the starting grid instead of reading one")
    _minimizer_options(p)

    for name, helptext in (("sweep", "h sweep of minimized random grids"),
                           ("perturb-study", "minimize, perturb, re-minimize")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--h-values", type=_float_list, default=None,
                       help="comma-separated h values (default 0.8,0.9,...,1.8)")
        p.add_argument("--eps0-from-x1", action="store_true",
                       help="set eps0 to the value that yields x1 at eps1 = 0")
        if name == "perturb-study":
            p.add_argument("--fraction", type=float, default=0.1)
        _minimizer_options(p)

    p = sub.add_parser("eps0-table", parents=[common], help="random baselines versus eps0")
    p.add_argument("--x1-values", type=_float_list, default=None)
    p.add_argument("--eps0-values", type=_float_list, default=None)

    p = sub.add_parser("render", parents=[common], help="render a grid as PGM or boxed text")
    p.add_argument("grid")
    p.add_argument("--format", choices=("pgm", "txt"), default="pgm")
    return parser


# ---------------------------------------------------------------------------


def _load_grid(ref: str):
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        if name not in FIXTURES:
            raise UsageError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
        return load_fixture(name)
    try:
        text = Path(ref).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror or exc}") from None
    try:
        return parse_grid(text)
    except GridError as exc:
        raise InputError(f"cannot parse {ref}: {exc}") from None


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None


def _warn(messages):
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)


def _resolve_h(args, default=None):
    if args.h is not None and args.eps1 is not None:
        raise UsageError("give --h or --eps1, not both")
    if args.eps1 is not None:
        return h_from_eps1(args.eps1)
    if args.h is not None:
        if not args.h > 0:
            raise DomainError(f"h must be positive, got {args.h}")
        return args.h
    return default


def _minimize_config(args, params, seed) -> MinimizeConfig:
    try:
        return MinimizeConfig(
            params=params,
            max_sweeps=args.max_sweeps,
            patience=args.patience,
            seed=seed,
            record_every=args.record_every,
            incremental=args.incremental,
            polish=args.polish,
            horizontal_only=args.horizontal_only,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def cmd_analytic(args):
    try:
        hs = ex.h_grid(args.h_min, args.h_max, args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(ex.analytic_csv(hs), args.out)


def cmd_count(args):
    grid = _load_grid(args.grid)
    fr = fractions(count(grid, args.horizontal_only))
    topo = summarize_topography(fr)
    header = ("rows", "cols") + tuple(ConfigFractions.csv_header().split(",")) + ("tags",)
    row = f"{grid.rows},{grid.cols},{fr.csv_row()},{' '.join(topo.tags)}"
    _emit(ex.schema_line("count") + ",".join(header) + "\n" + row + "\n", args.out)


def cmd_estimate_h(args):
    rep = ex.estimate_report(_load_grid(args.grid))
    _emit(rep.text(), args.out)
    if rep.h is None:
        raise DomainError(rep.h_error)


def cmd_minimize(args):
    if args.out is None:
        raise UsageError("minimize needs --out DIRECTORY")
    if (args.grid is None) == (args.pattern is None):
        raise UsageError("give either a grid file or --pattern")
    h = _resolve_h(args, default=1.0)
    params = EnthalpyParams(eps0=args.eps0, eps1=eps1_from_h(h))
    _warn(ex.phase_space_warnings(args.eps0, h))

    target = None
    if args.grid is not None:
        grid = _load_grid(args.grid)
        target = args.x1
    else:
        n = args.rows * args.cols
        x1 = 0.5 if args.x1 is None else args.x1
        if not 0.0 <= x1 <= 1.0:
            raise DomainError(f"x1 must lie in [0, 1], got {x1}")
        try:
            spec = PatternSpec(PatternKind(args.pattern), args.rows, args.cols,
                               round_half_up(x1 * n), args.seed)
        except GridError as exc:
            raise UsageError(str(exc)) from None
        grid = generate(spec)
    cfg = _minimize_config(args, params, args.seed)
    if target is not None:
        try:
            cfg = replace(cfg, target_x1=target)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    res = minimize(grid, cfg)

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "initial_grid.txt").write_text(to_text(grid))
        (out / "final_grid.txt").write_text(to_text(res.final_grid))
        (out / "final_grid.pgm").write_text(to_pgm(res.final_grid))
        (out / "trajectory.csv").write_text(
            ex.schema_line("trajectory") + res.trajectory.to_csv()
        )
        rep = res.final_report
        header = ("h", "eps0", "proposals", "accepted") + rep.CSV_COLUMNS + tuple(
            ConfigFractions.csv_header().split(",")
        )
        row = (f"{h:.6f},{args.eps0:.6f},{res.proposals},{res.accepted},"
               f"{rep.csv_row()},{res.final_fractions.csv_row()}")
        (out / "report.csv").write_text(
            ex.schema_line("report") + ",".join(header) + "\n" + row + "\n"
        )
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc.strerror or exc}") from None
    fr = res.final_fractions
    print(f"proposals={res.proposals} accepted={res.accepted} "
          f"F={res.final_report.free_energy:.6f} y2={fr.y2:.6f} z1={fr.z1:.6f} z3={fr.z3:.6f}")


def _sweep_spec(args) -> ex.SweepSpec:
    if args.h_values is not None and (args.h is not None or args.eps1 is not None):
        raise UsageError("give --h-values or a single --h/--eps1, not both")
    single = _resolve_h(args)
    h_values = args.h_values or ([single] if single is not None else ex.DEFAULT_H_VALUES)
    cfg = _minimize_config(args, EnthalpyParams(), args.seed)
    x1 = 0.5 if args.x1 is None else args.x1
    try:
        spec = ex.SweepSpec(
            x1=x1, h_values=tuple(h_values), num_trials=args.trials, base_seed=args.seed,
            rows=args.rows, cols=args.cols, use_eps0=args.eps0_from_x1, cfg=cfg,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _warn(ex.phase_space_warnings(spec.eps0, max(spec.h_values)))
    return spec


def cmd_sweep(args):
    spec = _sweep_spec(args)
    _emit(ex.sweep_csv(ex.run_sweep(spec)), args.out)


def cmd_perturb_study(args):
    spec = _sweep_spec(args)
    if not 0.0 <= args.fraction <= 1.0:
        raise UsageError(f"--fraction must lie in [0, 1], got {args.fraction}")
    _emit(ex.perturb_csv(ex.run_perturb_study(spec, args.fraction)), args.out)


def cmd_eps0_table(args):
    n = args.rows * args.cols
    if args.x1_values is not None and args.eps0_values is not None:
        raise UsageError("give --x1-values or --eps0-values, not both")
    if args.x1_values is not None:
        rows = ex.eps0_rows(x1_values=args.x1_values, n=n)
    else:
        rows = ex.eps0_rows(eps0_values=args.eps0_values or [0.0, 1.0, 2.0, 3.0], n=n)
    _warn(m for r in rows for m in ex.phase_space_warnings(eps0=r[0]))
    _emit(ex.eps0_csv(rows), args.out)


def cmd_render(args):
    _emit(render(_load_grid(args.grid), args.format), args.out)


COMMANDS = {
    "analytic": cmd_analytic,
    "count": cmd_count,
    "estimate-h": cmd_estimate_h,
    "minimize": cmd_minimize,
    "sweep": cmd_sweep,
    "perturb-study": cmd_perturb_study,
    "eps0-table": cmd_eps0_table,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, InfeasiblePatternError) as exc:
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except GridError as exc:
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:  # bad CVM2D_THREADS and similar configuration
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CVMError as exc:
        print(f"cvm2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
