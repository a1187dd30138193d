"""Command-line entry point `cslfd` with its subcommands.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (blow-up or a
solver that did not converge).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from cslfd.fourier_scan import EVEN_ORDERS, ODD_ORDERS, TABLE_RULES, ScanConfig, exact_cfl, max_cfl
from cslfd.kinetic.diagnostics import write_diagnostics_csv
from cslfd.kinetic.run import run_scenario
from cslfd.kinetic.scenarios import scenario_library, scenario_names
from cslfd.quadrature import (
    PUBLISHED_MAX_CFL,
    NewtonFailure,
    abs_R2,
    builtin_rule,
    imag_axis_interval,
    optimize_symmetric_rule,
    region_contour,
    unstable_near_origin,
)
from cslfd.sl_solver import BlowUpError, run_transport
from cslfd.studies import EXACT_SCENARIOS, default_config, solve_error, spatial_study, temporal_study
from cslfd.weno import StencilSpec

logger = logging.getLogger("cslfd")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

TRANSPORT = ("advection", "rotation", "swirl")
RUN_SCENARIOS = ("advection1d",) + TRANSPORT + tuple(scenario_names())
ALIASES = {"advection2d": "advection"}
DEFAULT_CONVERGENCE = {
    "advection1d": "240,480,960,1920",
    "advection": "20,40,60,80,100",
    "euler_stationary": "20,40,60,80,100",
}

# per-scenario defaults: mesh, cfl, order, mode, final time
RUN_DEFAULTS = {
    "advection1d": ("240", 1.22, 3, "linear", 100.1),
    "advection": ("40", 1.15, 5, "weno", 1.2),
    "rotation": ("128", 1.15, 5, "weno", 2 * np.pi),
    "swirl": ("128", 1.15, 5, "weno", 1.5),
    "euler_stationary": ("40", 1.15, 5, "weno", 1.2),
}

RUN_KEYS = {
    "mesh", "cfl", "order", "mode", "rule", "T", "out", "convergence", "cfl_sweep",
    "trace_order", "dt_rule", "max_steps", "diag_every",
}  # fmt: skip
QUAD_KEYS = {"out"}
SCAN_KEYS = {"rules", "orders", "out", "n_xi", "lambda_step", "tol"}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _parse_mesh(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"mesh must look like 128 or 128x64, got {text!r}") from None
    if len(dims) == 1:
        dims *= 2
    if len(dims) != 2 or min(dims) < 4:
        raise UsageError(f"invalid mesh {text!r}")
    return dims[0], dims[1]


def _parse_list(text: str, kind=float) -> list:
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list, got {text!r}") from None


def _write_csv(path: Path | None, title: str, header, rows) -> None:
    """Print a table and optionally write it; the first line names the table."""
    lines = [list(header)] + [list(r) for r in rows]
    sys.stdout.write(f"# {title}\n")
    csv.writer(sys.stdout, lineterminator="\n").writerows(lines)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(f"# {title}\n")
            csv.writer(fh, lineterminator="\n").writerows(lines)


def _fmt(v, digits=15) -> str:
    if v is None:
        return ""
    return f"{v:.{digits}g}"


def _load_config(path: str | None, section: str, allowed: set[str]) -> dict[str, str]:
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if not parser.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    if not parser.has_section(section):
        return {}
    values = dict(parser.items(section))
    unknown = set(values) - allowed
    if unknown:
        raise UsageError(f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")
    return values


def _merge(args: argparse.Namespace, config: dict[str, str], converters: dict) -> None:
    """Fill options not given on the command line from the config file."""
    for key, raw in config.items():
        if getattr(args, key, None) is None:
            conv = converters.get(key, str)
            try:
                setattr(args, key, conv(raw))
            except ValueError:
                raise UsageError(f"invalid value for {key}: {raw!r}") from None


# ---------------------------------------------------------------------------
# quadrature


def cmd_quadrature(args) -> int:
    _merge(args, _load_config(args.config, "quadrature", QUAD_KEYS), {})
    out = Path(args.out) if args.out else None
    if args.action == "table":
        rows = []
        for name in ("midpoint", "trapezoid", "simpson", "gl2", "gl3", "gl4", "gl5", "s4", "s8", "s12"):
            rule = builtin_rule(name)
            rep = imag_axis_interval(rule)
            flag = unstable_near_origin(rule)
            for i, (c, b) in enumerate(zip(rule.c, rule.b)):
                rows.append([name, i + 1, _fmt(b), _fmt(c), _fmt(rep.y_star, 10), _fmt(rep.a_star, 10), int(flag)])
        _write_csv(
            out / "quadrature_table.csv" if out else None,
            "Weights, nodes and imaginary-axis stability intervals of the quadrature rules",
            ["rule", "node", "b", "c", "y_star", "a_star", "unstable_near_origin"],
            rows,
        )
        return EXIT_OK
    if args.action == "optimize":
        if args.arg is None:
            raise UsageError("optimize needs the number of nodes s")
        try:
            s = int(args.arg)
        except ValueError:
            raise UsageError(f"s must be an integer, got {args.arg!r}") from None
        if s < 2 or s % 2:
            raise UsageError(f"s must be an even integer >= 2, got {s}")
        t0 = time.perf_counter()
        rule = optimize_symmetric_rule(s)
        elapsed = time.perf_counter() - t0
        rep = imag_axis_interval(rule, y_max=max(100.0, 5.0 * s))
        ref = builtin_rule("optimized", s) if s in PUBLISHED_MAX_CFL else None
        rows = []
        for i, (c, b) in enumerate(zip(rule.c, rule.b)):
            db = dc = None
            if ref is not None:
                db, dc = b - ref.b[i], c - ref.c[i]
            rows.append([s, i + 1, _fmt(b), _fmt(c), _fmt(db, 3), _fmt(dc, 3)])
        _write_csv(
            out / f"optimized_s{s}.csv" if out else None,
            "Weights and nodes of the optimized symmetric rule (difference to the built-in table)",
            ["s", "node", "b", "c", "b_minus_builtin", "c_minus_builtin"],
            rows,
        )
        print(f"a_star,{rep.a_star:.13f}")
        print(f"seconds,{elapsed:.3f}")
        return EXIT_OK
    if args.action == "region":
        if args.arg is None:
            raise UsageError("region needs a rule name")
        rule = _rule(args.arg)
        y = np.linspace(0.0, 20.0, 2001)
        samples = [[_fmt(v, 6), _fmt(e, 10)] for v, e in zip(y, abs_R2(rule, y) - 1.0)]
        _write_csv(
            out / f"region_{args.arg}_axis.csv" if out else None,
            f"|R(iy)|^2 - 1 along the imaginary axis for {args.arg}",
            ["y", "excess"],
            samples,
        )
        if out is not None:
            lines = region_contour(rule)
            rows = [[k, _fmt(p[0], 8), _fmt(p[1], 8)] for k, line in enumerate(lines) for p in line]
            with open(out / f"region_{args.arg}_contour.csv", "w", newline="") as fh:
                fh.write(f"# |R(z)| = 1 contour lines for {args.arg}\n")
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["line", "re", "im"])
                w.writerows(rows)
        rep = imag_axis_interval(rule)
        print(f"y_star,{rep.y_star:.10f}")
        print(f"a_star,{rep.a_star:.10f}")
        return EXIT_OK
    raise UsageError(f"unknown quadrature action {args.action!r}")


def _rule(name: str):
    try:
        return builtin_rule(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# stability scan


def cmd_stability(args) -> int:
    _merge(
        args,
        _load_config(args.config, "stability", SCAN_KEYS),
        {"n_xi": int, "lambda_step": float, "tol": float},
    )
    rules = args.rules.split(",") if args.rules else list(TABLE_RULES)
    for r in rules:
        _rule(r)
    orders = _parse_list(args.orders, int) if args.orders else list(ODD_ORDERS + EVEN_ORDERS)
    for o in orders:
        if not 1 <= o <= 10:
            raise UsageError(f"orders must be in 1..10, got {o}")
    cfg = ScanConfig(
        n_xi=args.n_xi or 100,
        lambda_step=args.lambda_step or 0.01,
        tol=args.tol or 1e-11,
    )
    odd = [o for o in orders if o % 2]
    even = [o for o in orders if o % 2 == 0]
    header = ["rule"] + [f"order{o}" for o in odd + even] + ["exact"]
    rows = []
    for name in rules:
        rule = builtin_rule(name)
        vals = [f"{max_cfl(rule, StencilSpec(o), cfg):.2f}" for o in odd + even]
        rows.append([name] + vals + [f"{exact_cfl(rule):.2f}"])
    _write_csv(
        Path(args.out) / "cfl_table.csv" if args.out else None,
        "Upper bounds of CFL for the fully discrete scheme (odd then even orders; exact = semi-discrete a*)",
        header,
        rows,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# run


def _run_settings(args):
    name = args.scenario
    mesh_d, cfl_d, order_d, mode_d, t_d = RUN_DEFAULTS.get(name, ("128", 1.15, 5, "weno", None))
    if name in scenario_names() and name not in RUN_DEFAULTS:
        sc = scenario_library(name)
        t_d = sc.t_end
        mesh_d = "x".join(str(v) for v in sc.grid.shape)
    mesh = _parse_mesh(args.mesh or mesh_d)
    cfl = args.cfl if args.cfl is not None else cfl_d
    order = args.order if args.order is not None else order_d
    mode = args.mode or mode_d
    t_end = args.T if args.T is not None else t_d
    if cfl <= 0:
        raise UsageError("cfl must be positive")
    if t_end is None or t_end <= 0:
        raise UsageError("final time must be positive")
    try:
        StencilSpec(order, mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rule = _rule(args.rule or "gl2")
    trace_order = args.trace_order or 3
    if trace_order not in (1, 2, 3):
        raise UsageError("trace order must be 1, 2 or 3")
    dt_rule = args.dt_rule or "sum"
    if dt_rule not in ("sum", "max"):
        raise UsageError("dt rule must be 'sum' or 'max'")
    return mesh, cfl, order, mode, t_end, rule, trace_order, dt_rule


def cmd_run(args) -> int:
    _merge(
        args,
        _load_config(args.config, "run", RUN_KEYS),
        {"cfl": float, "order": int, "T": float, "trace_order": int, "max_steps": int, "diag_every": int},
    )
    args.scenario = ALIASES.get(args.scenario, args.scenario)
    if args.scenario not in RUN_SCENARIOS:
        raise UsageError(f"unknown scenario {args.scenario!r}; known: {', '.join(RUN_SCENARIOS)}")
    mesh, cfl, order, mode, t_end, rule, trace_order, dt_rule = _run_settings(args)
    out = Path(args.out) if args.out else None
    name = args.scenario

    def cfg_for(c):
        return default_config(name, order, mode, rule, c, dt_rule, trace_order)

    if args.convergence or args.cfl_sweep:
        if name not in EXACT_SCENARIOS:
            raise UsageError(f"convergence studies need an exact solution: {', '.join(EXACT_SCENARIOS)}")
        if args.convergence:
            spec = DEFAULT_CONVERGENCE[name] if args.convergence == "default" else args.convergence
            meshes = _parse_list(spec, int)
            rows = spatial_study(name, meshes, cfl, t_end, cfg_for(cfl))
            title = f"Errors and orders in space for {name} (T={t_end:g}, CFL={cfl:g})"
            param = "N"
        else:
            cfls = _parse_list(args.cfl_sweep, float)
            rows = temporal_study(name, mesh[0], cfls, t_end, cfg_for)
            title = f"Errors and orders in time for {name} (N={mesh[0]}, T={t_end:g})"
            param = "CFL"
        table = [[_fmt(r.param, 6), f"{r.l1:.3e}", _fmt(r.l1_order, 4), f"{r.linf:.3e}", _fmt(r.linf_order, 4)] for r in rows]
        _write_csv(out / "convergence.csv" if out else None, title, [param, "l1_error", "l1_order", "linf_error", "linf_order"], table)
        return EXIT_OK

    cfg = cfg_for(cfl)
    if name == "advection1d":
        l1, linf = solve_error(name, mesh[0], cfl, t_end, cfg)
        _write_csv(out / "errors.csv" if out else None, "Linear advection error at the final time", ["N", "l1_error", "linf_error"], [[mesh[0], f"{l1:.6e}", f"{linf:.6e}"]])
        return EXIT_OK
    if name in TRANSPORT:
        run = run_transport(name, cfg, mesh[0], t_end, max_steps=args.max_steps, ny=mesh[1])
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            for t, fld in sorted(run.snapshots.items()):
                fld.to_csv(out / f"snapshot_t{t:.6g}.csv")
            with open(out / "mass.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["t", "mass"])
                w.writerows([[f"{t:.17g}", f"{m:.17g}"] for t, m in zip(run.times, run.mass)])
        print(f"steps,{run.steps}")
        print(f"t,{run.times[-1]:.17g}")
        print(f"mass_deviation,{run.mass_deviation():.3e}")
        return EXIT_OK
    sc = scenario_library(name, mesh)
    run = run_scenario(sc, cfg, t_end=t_end, max_steps=args.max_steps, diag_every=args.diag_every or 1)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_diagnostics_csv(out / "diagnostics.csv", run.history)
        for t, fld in sorted(run.snapshots.items()):
            fld.to_csv(out / f"snapshot_t{t:.6g}.csv")
    print(f"steps,{run.steps}")
    print(f"t,{run.t:.17g}")
    print(f"mass_deviation,{run.mass_deviation():.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cslfd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quadrature", help="quadrature tables, optimization and stability regions")
    q.add_argument("action", choices=["table", "optimize", "region"])
    q.add_argument("arg", nargs="?", help="s for optimize, rule name for region")
    q.add_argument("--out", help="output directory")
    q.add_argument("--config", help="INI file with a [quadrature] section")
    q.set_defaults(func=cmd_quadrature)

    s = sub.add_parser("stability", help="fully discrete CFL scan")
    s.add_argument("action", choices=["scan"])
    s.add_argument("--rules", help="comma-separated rule names")
    s.add_argument("--orders", help="comma-separated spatial orders")
    s.add_argument("--n-xi", dest="n_xi", type=int)
    s.add_argument("--lambda-step", dest="lambda_step", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--out", help="output directory")
    s.add_argument("--config", help="INI file with a [stability] section")
    s.set_defaults(func=cmd_stability)

    r = sub.add_parser("run", help="run a transport, kinetic or fluid scenario")
    r.add_argument("scenario", help=", ".join(RUN_SCENARIOS + tuple(ALIASES)))
    r.add_argument("--mesh", help="N or NxM")
    r.add_argument("--cfl", type=float)
    r.add_argument("--order", type=int)
    r.add_argument("--mode", choices=["linear", "weno"])
    r.add_argument("--rule", help="quadrature rule, e.g. gl2, trapezoid, s8")
    r.add_argument("--T", type=float, help="final time")
    r.add_argument("--out", help="output directory")
    r.add_argument(
        "--convergence", nargs="?", const="default", help="spatial study; optional comma-separated meshes"
    )
    r.add_argument("--cfl-sweep", dest="cfl_sweep", help="comma-separated CFL numbers for a temporal study")
    r.add_argument("--trace-order", dest="trace_order", type=int)
    r.add_argument("--dt-rule", dest="dt_rule", choices=["sum", "max"])
    r.add_argument("--max-steps", dest="max_steps", type=int)
    r.add_argument("--diag-every", dest="diag_every", type=int)
    r.add_argument("--config", help="INI file with a [run] section")
    r.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BlowUpError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NewtonFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
