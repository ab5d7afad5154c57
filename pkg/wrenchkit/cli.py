"""
Command-line front end::

    wrenchkit solve DESIGN --pressures P1 P2 ... [--load FX FY M]
    wrenchkit analyze DESIGN TASK [--per-node]
    wrenchkit compare EXPERIMENT [--svg]
    wrenchkit bench EXPERIMENT
    wrenchkit shape-plan PLAN_OR_DESIGN [--tip-pose X Y THETA] [--first-angles A ...]

DESIGN is a bundled design name (see ``wrenchkit.get_datasets()``) or a
design file. Exit codes: 0 success or attainable, 1 solver failure, 2
invalid input or configuration, 3 task not attainable.
"""
import argparse
import logging
import os
import sys
import numpy as np
import pandas as pd
from . import __version__
from .arm import todesign
from .datasets import dataref
from .estimators.attainability.wrenchhull import WrenchHullAttainability
from .estimators.statics import EquilibriumSolver, SolveSettings, continuation_solve
from .harness import ExperimentSpec, bench, compare, read_shape_plan, read_task, shape_plan
from .lie import Pose
from .shapes import tip_equivalent_candidates
from .utils import Config, ConfigError, write_csv

logger = logging.getLogger(__name__)


EXIT_OK, EXIT_SOLVER, EXIT_INPUT, EXIT_UNATTAINABLE = 0, 1, 2, 3



def load_design(ref):
    """
    Resolve a bundled design name or a design file path.
    """
    if ref.lower() in dataref and dataref[ref.lower()].endswith(".json"):
        return(todesign(dataref[ref.lower()]))
    return(todesign(ref))



def _solve_settings(args):
    defaults = SolveSettings()
    return(defaults._replace(
        tolerance=defaults.tolerance if args.tolerance is None else args.tolerance,
        max_iterations=getattr(args, "max_iterations", None) or defaults.max_iterations,
        ))



def _output_dir(args, default=None):
    path = args.output_dir if args.output_dir is not None else default
    if path is not None:
        os.makedirs(path, exist_ok=True)
    return(path)



def _read_initial_shape(path, design):
    df = pd.read_csv(path)
    missing = {"l", "gamma", "kappa"} - set(df.columns)
    if missing:
        raise ValueError("`{}` lacks twist columns {}.".format(path, sorted(missing)))
    twists = df[["l", "gamma", "kappa"]].dropna().values
    return(design.shape(twists))



def cmd_solve(args):
    design = load_design(args.design)
    pressures = design.check_pressures(args.pressures)
    settings = _solve_settings(args)
    initial = None if args.initial_shape is None else _read_initial_shape(args.initial_shape, design)
    if args.steps > 0:
        result = continuation_solve(design, pressures, args.load, steps=args.steps,
                                    initial_shape=initial, settings=settings)
    else:
        result = EquilibriumSolver(design)(pressures, args.load, initial_shape=initial,
                                           settings=settings)
    print(result)

    outdir = _output_dir(args)
    if outdir is not None:
        write_csv(result.summary.reset_index(), os.path.join(outdir, "shape.csv"))
        if args.svg:
            import matplotlib
            matplotlib.use("Agg")
            result.plot(exhibit_path=os.path.join(outdir, "shape.svg"))
    if not result.converged:
        logger.error("Equilibrium did not converge (residual %.3e).", result.residual_norm)
        return(EXIT_SOLVER)
    return(EXIT_OK)



def cmd_analyze(args):
    design = load_design(args.design)
    task = read_task(args.task, design)
    per_edge = 5 if args.per_edge is None else args.per_edge
    report = WrenchHullAttainability(design)(
        task, per_edge=per_edge, epsilon=args.epsilon, balance_shear=not args.no_balance_shear,
        )
    print(report.to_text(per_node=args.per_node), end="")

    outdir = _output_dir(args)
    if outdir is not None:
        with open(os.path.join(outdir, "report.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_text(per_node=True))
        write_csv(report.summary.reset_index(), os.path.join(outdir, "per_node.csv"))
        write_csv(report.sequences_frame(), os.path.join(outdir, "sequences.csv"))
        write_csv(report.hulls_frame(), os.path.join(outdir, "hulls.csv"))
        if args.svg:
            import matplotlib
            matplotlib.use("Agg")
            report.plot(exhibit_path=os.path.join(outdir, "hulls_absolute.svg"))
            report.plot(relative=True, exhibit_path=os.path.join(outdir, "hulls_relative.svg"))
    return(EXIT_OK if report.attainable else EXIT_UNATTAINABLE)



def _experiment(args):
    spec = ExperimentSpec.read(args.experiment, seed=args.seed)
    if args.per_edge is not None:
        spec.per_edge = args.per_edge
    if args.tolerance is not None:
        solve_settings = spec.search_settings.solve_settings or SolveSettings()
        spec.search_settings = spec.search_settings._replace(
            solve_settings=solve_settings._replace(tolerance=args.tolerance)
            )
    return(spec)



def cmd_compare(args):
    spec = _experiment(args)
    if args.analysis is not None:
        spec.analysis = args.analysis
    summary = compare(spec, threads=args.threads)
    print(summary.to_text(), end="")
    outdir = _output_dir(args, spec.output_dir or spec.name)
    summary.write(outdir, svg=args.svg)
    return(EXIT_OK)



def cmd_bench(args):
    spec = _experiment(args)
    report = bench(spec)
    print(report.to_text(), end="")
    report.write(_output_dir(args, spec.output_dir or spec.name))
    return(EXIT_OK)



def cmd_shape_plan(args):
    source = dataref.get(args.source.lower(), args.source)
    is_design = "actuators" in Config.read(source)
    tip_pose = None if args.tip_pose is None else Pose(*args.tip_pose)

    if is_design:
        design = load_design(source)
        if tip_pose is None or args.first_angles is None:
            raise ValueError("A design source needs --tip-pose and --first-angles.")
        candidates = []
        for first_angle, twists, message in tip_equivalent_candidates(
                design.segment_count, tip_pose, args.first_angles, base_pose=design.base_pose):
            if twists is None:
                logger.warning("No candidate for first-arc curvature %g: %s", first_angle, message)
                continue
            candidates.append(("two_arc_{:g}".format(first_angle), twists))
        load = np.asarray([7., 0., 0.]) if args.load is None else np.asarray(args.load)
        per_edge = 5
    else:
        plan = read_shape_plan(source, tip_pose=tip_pose, load=args.load)
        design, tip_pose, load, candidates, per_edge = plan
    per_edge = per_edge if args.per_edge is None else args.per_edge

    report = shape_plan(design, candidates, tip_pose, load=load, per_edge=per_edge,
                        search=args.search, seed=args.seed)
    print(report.to_text(), end="")
    outdir = _output_dir(args)
    if outdir is not None:
        report.write(outdir, svg=args.svg)
    return(EXIT_OK)



def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Experiment seed.")
    common.add_argument("--per-edge", type=int, default=None,
                        help="Pressure samples per box edge (default 5).")
    common.add_argument("--tolerance", type=float, default=None,
                        help="Equilibrium residual tolerance (default 1e-6).")
    common.add_argument("--threads", type=int, default=1, help="Worker threads for batteries.")
    common.add_argument("--output-dir", default=None, help="Directory for CSV, text and SVG output.")
    common.add_argument("--svg", action="store_true", help="Also write SVG exhibits.")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for iteration detail.")

    parser = argparse.ArgumentParser(
        prog="wrenchkit", description="Task attainability analysis for planar soft arms.",
        )
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))
    sub = parser.add_subparsers(dest="command", required=True)

    psolve = sub.add_parser("solve", parents=[common], help="Solve the loaded equilibrium shape.")
    psolve.add_argument("design")
    psolve.add_argument("--pressures", type=float, nargs="+", required=True)
    psolve.add_argument("--load", type=float, nargs=3, default=[0., 0., 0.],
                        metavar=("FX", "FY", "M"))
    psolve.add_argument("--initial-shape", default=None,
                        help="CSV with l, gamma, kappa columns, e.g. a previous shape.csv.")
    psolve.add_argument("--steps", type=int, default=0,
                        help="Continuation increments; 0 solves directly.")
    psolve.add_argument("--max-iterations", type=int, default=None)
    psolve.set_defaults(func=cmd_solve)

    panalyze = sub.add_parser("analyze", parents=[common], help="Wrench-hull attainability of a task.")
    panalyze.add_argument("design")
    panalyze.add_argument("task")
    panalyze.add_argument("--per-node", action="store_true", help="Print per-node distances.")
    panalyze.add_argument("--epsilon", type=float, default=None,
                          help="Attainability threshold (default 1e-6 * N).")
    panalyze.add_argument("--no-balance-shear", action="store_true",
                          help="Analyze the task twists' shear as given.")
    panalyze.set_defaults(func=cmd_analyze)

    pcompare = sub.add_parser("compare", parents=[common], help="Run a comparison battery.")
    pcompare.add_argument("experiment")
    pcompare.add_argument("--analysis", choices=["hull", "search", "both"], default=None)
    pcompare.set_defaults(func=cmd_compare)

    pbench = sub.add_parser("bench", parents=[common], help="Time hull analysis against search.")
    pbench.add_argument("experiment")
    pbench.set_defaults(func=cmd_bench)

    pplan = sub.add_parser("shape-plan", parents=[common], help="Rank tip-equivalent shapes.")
    pplan.add_argument("source", help="Shape-plan file, or a design with --tip-pose/--first-angles.")
    pplan.add_argument("--tip-pose", type=float, nargs=3, default=None,
                       metavar=("X", "Y", "THETA"))
    pplan.add_argument("--load", type=float, nargs=3, default=None, metavar=("FX", "FY", "M"))
    pplan.add_argument("--first-angles", type=float, nargs="+", default=None)
    pplan.add_argument("--search", action="store_true", help="Verify with the search baseline.")
    pplan.set_defaults(func=cmd_shape_plan)
    return(parser)



def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")

    try:
        return(args.func(args))
    except (ConfigError, ValueError, TypeError) as exc:
        print("error: {}".format(exc), file=sys.stderr)
        return(EXIT_INPUT)
    except (FloatingPointError, RuntimeError) as exc:
        print("solver failure: {}".format(exc), file=sys.stderr)
        return(EXIT_SOLVER)



if __name__ == "__main__":
    sys.exit(main())
