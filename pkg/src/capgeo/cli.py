"""The capgeo command line.

Subcommands:
  constants   the capacity-vs-sqrt-area constants record
  capacity    one p-capacity solve for one body
  verify      the full inequality harness on one body across p values
  sweep       the body corpus across a p grid, plus chain plot data
  flow        one inverse-mean-curvature-flow trace as CSV

Exit codes: 0 success, 1 an asserted inequality failed, 2 parse/config
error, 3 numerical failure. Exploratory scans never affect the exit code.
A JSON config file given with --config overrides flags of the same name.
"""

import argparse
import json
import os
import sys

import numpy as np

import capgeo
from capgeo.errors import CapgeoError, FlowError, GeometryError, ParseError, SolverError
from capgeo.capacity.solver import SolverConfig, solve_p_capacity
from capgeo.flow.imcf import evolve, stable_dt
from capgeo.geometry.bodies import parse_body
from capgeo.harness.constants import polya_szego_constants
from capgeo.harness.corpus import CORPUS_P_VALUES, corpus_bodies
from capgeo.harness.runner import evaluate_body, plot_curves, run_sweep
from capgeo import reporting

EXIT_OK = 0
EXIT_INEQUALITY = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3


def _add_solver_flags(sub):
    sub.add_argument("--p", type=str, default="2",
                     help="p value, or start:stop:step for a range")
    sub.add_argument("--q", type=float, default=None, help="second exponent (optional)")
    sub.add_argument("--grid", type=int, default=None, help="solver cells per axis")
    sub.add_argument("--box-radius", type=float, default=None, help="half-width R of the box")
    sub.add_argument("--tol", type=float, default=None, help="energy stall tolerance")
    sub.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    sub.add_argument("--mesh-resolution", type=int, default=None, help="surface mesh resolution")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="capgeo",
        description="p-capacities, geometric functionals, and inequality verification",
    )
    parser.add_argument("--version", action="version", version=capgeo.__version__)
    subs = parser.add_subparsers(dest="command")

    subs.add_parser("constants", help="capacity-vs-sqrt-area constants record")

    cap = subs.add_parser("capacity", help="solve one p-capacity")
    cap.add_argument("--body", required=True, help="body descriptor, e.g. ball:r=1")
    _add_solver_flags(cap)
    cap.add_argument("--export-field", default=None,
                     help="dump the converged grid potential to PATH.bin/.json")

    ver = subs.add_parser("verify", help="full harness on one body")
    ver.add_argument("--body", required=True)
    _add_solver_flags(ver)

    sw = subs.add_parser("sweep", help="corpus sweep over a p grid")
    _add_solver_flags(sw)
    sw.add_argument("--skip-plot", action="store_true",
                    help="skip the endpoint plot-data solves")

    fl = subs.add_parser("flow", help="integrate the flow and write a trace CSV")
    fl.add_argument("--body", required=True)
    fl.add_argument("--dt", type=float, default=None, help="explicit step (default: stable)")
    fl.add_argument("--T", type=float, default=2.0, help="final time")
    fl.add_argument("--p-list", type=str, default="2", help="comma-separated p values")
    fl.add_argument("--samples", type=int, default=256, help="angular samples")

    for sub in subs.choices.values():
        sub.add_argument("--out", default="capgeo_out", help="output directory")
        sub.add_argument("--format", choices=("json", "csv"), default="json")
        sub.add_argument("--config", default=None, help="JSON config file overriding flags")
        sub.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    return parser


def _parse_body_arg(text):
    """Bad body parameters at the CLI boundary count as parse errors."""
    try:
        return parse_body(text)
    except GeometryError as exc:
        raise ParseError(str(exc)) from exc


def _apply_config_file(args):
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad config file {args.config!r}: {exc}") from exc
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise ParseError(f"config key {key!r} is not a known option")
            setattr(args, attr, value)
    return args


def _parse_p_values(spec, n):
    try:
        if ":" in str(spec):
            start, stop, step = (float(tok) for tok in str(spec).split(":"))
            count = int(round((stop - start) / step)) + 1
            vals = [start + i * step for i in range(count) if start + i * step <= stop + 1e-12]
        else:
            vals = [float(spec)]
    except ValueError as exc:
        raise ParseError(f"bad p specification {spec!r}") from exc
    for p in vals:
        if not (1.05 <= p <= n - 0.05):
            raise ParseError(f"p={p:g} outside the supported range [1.05, {n - 0.05:g}]")
    return vals


def _solver_config(args, body):
    kwargs = {}
    if args.grid is not None:
        kwargs["grid"] = args.grid
    if args.box_radius is not None:
        kwargs["box_radius"] = args.box_radius
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    return SolverConfig(**kwargs)


def _run_config_dict(args):
    skip = {"config", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_constants(args):
    record = polya_szego_constants().to_dict()
    path = os.path.join(_outdir(args), "constants.json")
    reporting.write_json(path, {"constants": record}, _run_config_dict(args))
    print(json.dumps(record, indent=2, default=reporting.fmt))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_capacity(args):
    body = _parse_body_arg(args.body)
    p_values = _parse_p_values(args.p, body.n)
    config = _solver_config(args, body)
    results = []
    for p in p_values:
        est = solve_p_capacity(body, p, config)
        results.append({
            "body": body.descriptor(), "n": est.n, "p": est.p,
            "raw_energy": est.raw_energy, "corrected": est.corrected,
            "extrapolated": est.extrapolated, "value": est.value,
            "lower": est.lower, "upper": est.upper,
            "normalized": est.normalized(), "normalized_radius": est.normalized_radius,
            "grid_h": est.h, "box_radius": est.box_radius,
            "outer_level": est.outer_level, "iterations": est.iterations,
            "converged": est.converged, "margins": est.margins,
            "chain": est.chain,
        })
        print(f"cap_{p:g}({body.descriptor()}) = {reporting.fmt(est.value)} "
              f"in [{reporting.fmt(est.lower)}, {reporting.fmt(est.upper)}]")
        if args.export_field:
            est.field.save(args.export_field)
            print(f"field dumped to {args.export_field}.bin/.json")
    path = os.path.join(_outdir(args), "capacity.json")
    reporting.write_json(path, {"estimates": results}, _run_config_dict(args))
    print(f"wrote {path}")
    return EXIT_OK


def _emit_evaluations(args, evaluations, scans, stem):
    outdir = _outdir(args)
    cfg = _run_config_dict(args)
    rows, columns = reporting.reports_to_rows(evaluations)
    json_path = os.path.join(outdir, f"{stem}.json")
    reporting.write_json(
        json_path,
        {
            "reports": [r.to_dict() for ev in evaluations for r in ev.reports],
            "exploratory": [s.to_dict() for s in scans],
        },
        cfg,
    )
    csv_path = os.path.join(outdir, f"{stem}.csv")
    reporting.write_csv(csv_path, rows, columns, cfg)
    n_fail = sum(1 for ev in evaluations for r in ev.reports if r.asserted and not r.passed)
    n_total = sum(len(ev.reports) for ev in evaluations)
    print(f"{n_total} reports, {n_fail} asserted failures; wrote {json_path}, {csv_path}")
    return EXIT_OK if n_fail == 0 else EXIT_INEQUALITY


def cmd_verify(args):
    body = _parse_body_arg(args.body)
    p_values = _parse_p_values(args.p, body.n)
    config = _solver_config(args, body)
    mesh_res = args.mesh_resolution or 96
    evaluations, scans = [], []
    for p in p_values:
        ev = evaluate_body(body, p, q=args.q, solver_config=config,
                           mesh_resolution=mesh_res)
        evaluations.append(ev)
        scans.extend(ev.scans)
        for r in ev.reports:
            status = "pass" if r.passed else ("FAIL" if r.asserted else "note")
            print(f"  [{status}] {r.inequality:<14} left={reporting.fmt(r.left)} "
                  f"right={reporting.fmt(r.right)} slack={reporting.fmt(r.slack)}")
    return _emit_evaluations(args, evaluations, scans, "verify")


def cmd_sweep(args):
    bodies = corpus_bodies()
    n = bodies[0].n
    p_values = _parse_p_values(args.p, n) if args.p != "2" else list(CORPUS_P_VALUES)
    config = _solver_config(args, bodies[0])
    mesh_res = args.mesh_resolution or 96
    evaluations = run_sweep(bodies, p_values, solver_config=config,
                            mesh_resolution=mesh_res)
    scans = [s for ev in evaluations for s in ev.scans]
    status = _emit_evaluations(args, evaluations, scans, "sweep")

    if not args.skip_plot:
        ball = bodies[1]  # unit ball
        plot_p = sorted(set(p_values) | {1.05, n - 0.05})
        rows, columns = plot_curves(ball, plot_p, solver_config=config,
                                    mesh_resolution=mesh_res)
        path = os.path.join(_outdir(args), "plot_ball_r1.csv")
        reporting.write_csv(path, rows, columns, _run_config_dict(args))
        print(f"wrote {path}")
    return status


def cmd_flow(args):
    body = _parse_body_arg(args.body)
    p_list = [float(tok) for tok in str(args.p_list).split(",") if tok.strip()]
    dt = args.dt if args.dt is not None else 0.5 * stable_dt(body, args.samples)
    trace = evolve(body, dt, args.T, p_list, samples=args.samples)
    rows = trace.to_rows()
    path = os.path.join(_outdir(args), "trace.csv")
    reporting.write_csv(path, rows.tolist(), trace.column_names(), _run_config_dict(args))
    print(f"flow of {body.descriptor()}: {len(rows)} records to T={args.T:g}; wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_OK
    np.random.seed(args.seed if hasattr(args, "seed") else 0)
    try:
        args = _apply_config_file(args)
        handler = {
            "constants": cmd_constants,
            "capacity": cmd_capacity,
            "verify": cmd_verify,
            "sweep": cmd_sweep,
            "flow": cmd_flow,
        }[args.command]
        return handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolverError, FlowError, GeometryError, CapgeoError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
