"""
Curve Proximity Command Line
============================
Entry point for scene queries, benchmarks, the replanning demo, oracle
reference values and SVG rendering.

Usage:
    python -m harness.main scene data/scenes/circle_point.json --output json
    python -m harness.main mindist data/scenes/circle_point.json --subject circle --target p --trace trace.csv
    python -m harness.main replan data/scenes/replan_corridor.json --svg replan.svg
    python -m harness.main bench arclength --repetitions 101

Exit codes: 0 success, 2 parse or validation error, 3 a query did not converge.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from curve_core import CurveSegment, Interval
from errors import ProximityError
from harness.bench import BENCH_COLUMNS, DEFAULT_SEED, SUITES, run_bench
from harness.render import render_replan, render_svg
from harness.replan import run_replan
from harness.runner import SceneFileError, SceneRunner, load_scene
from harness.schemas import QueryModel, ReplanSpec
from hull_bounds import hull
from oracle import sampled_arc_length, sampled_min_distance, sampled_min_distance_curves
from proximity_queries import QueryConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNCONVERGED = 3

TIME_COLUMNS = ("time_ns", "median_time_ns", "std_time_ns")


# ============================================================================
# Output
# ============================================================================

def _records(frame: pd.DataFrame) -> List[dict]:
    clean = frame.astype(object).where(frame.notna(), None)
    return clean.to_dict(orient="records")


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def emit(frame: pd.DataFrame, mode: str, no_timing: bool = False, stream=None) -> None:
    """Write a table to stdout as text, json or csv."""
    stream = stream or sys.stdout
    if no_timing:
        frame = frame.drop(columns=[c for c in TIME_COLUMNS if c in frame.columns])
    if mode == "json":
        stream.write(json.dumps(_records(frame), indent=2, default=_json_default) + "\n")
    elif mode == "csv":
        frame.to_csv(stream, index=False)
    else:
        stream.write(frame.to_string(index=False) + "\n")


def write_trace(trace, path: Path) -> None:
    frame = pd.DataFrame(trace, columns=["iteration", "lb", "ub"])
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)


# ============================================================================
# Subcommands
# ============================================================================

def _config(args: argparse.Namespace, record_trace: bool = False) -> QueryConfig:
    return QueryConfig(epsilon=args.epsilon, max_iterations=args.max_iterations,
                       record_trace=record_trace)


def cmd_scene(args: argparse.Namespace) -> int:
    runner = SceneRunner(_config(args), args.jobs)
    report = runner.run(load_scene(args.scene))
    emit(report, args.output, args.no_timing)
    return EXIT_OK if runner.all_converged else EXIT_UNCONVERGED


def _cmd_query(args: argparse.Namespace, kind: str) -> int:
    model = load_scene(args.scene)
    query = QueryModel(kind=kind, subject=args.subject, target=args.target,
                       delta=args.delta if kind == "tolerance" else None)
    model = model.model_validate({**model.model_dump(), "queries": [query.model_dump()]})
    runner = SceneRunner(_config(args, record_trace=args.trace is not None), jobs=1)
    report = runner.run(model)
    emit(report, args.output, args.no_timing)
    result = runner.outcomes[0].result
    if args.trace is not None and result is not None:
        write_trace(result.trace, args.trace)
    return EXIT_OK if runner.all_converged else EXIT_UNCONVERGED


def cmd_mindist(args: argparse.Namespace) -> int:
    return _cmd_query(args, "mindist")


def cmd_tolerance(args: argparse.Namespace) -> int:
    if args.delta is None:
        raise ValueError("tolerance needs --delta")
    return _cmd_query(args, "tolerance")


def cmd_collide(args: argparse.Namespace) -> int:
    return _cmd_query(args, "collide")


def cmd_replan(args: argparse.Namespace) -> int:
    data = json.loads(Path(args.spec).read_text())
    if args.seed is not None:
        data["seed"] = args.seed
    if args.samples is not None:
        data["sample_count"] = args.samples
    spec = ReplanSpec.model_validate(data)
    summary = run_replan(spec, _config(args), args.jobs)
    emit(pd.DataFrame([summary.to_dict()]), args.output)
    if args.svg is not None:
        render_replan(summary.curves, summary.labels, [o.build() for o in spec.obstacles], args.svg)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    table = run_bench(args.suite, args.repetitions, _config(args), seed,
                      instances=args.instance, algorithms=args.algorithm)
    emit(table[BENCH_COLUMNS], args.output, args.no_timing)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    scene = load_scene(args.scene).build()
    subject = scene.curves[args.subject]
    if args.target is None:
        row = {"subject": args.subject, "target": None,
               "value": sampled_arc_length(subject, n=args.samples), "slack": None}
    else:
        target = scene.target(args.target)
        if args.target in scene.curves:
            estimate = sampled_min_distance_curves(subject, target, args.samples)
        else:
            estimate = sampled_min_distance(subject, target, args.samples)
        row = {"subject": args.subject, "target": args.target,
               "value": estimate.value, "slack": estimate.slack}
    emit(pd.DataFrame([row]), args.output)
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    model = load_scene(args.scene)
    witnesses = []
    status = EXIT_OK
    if args.witness and model.queries:
        mindist = [q for q in model.queries if q.kind == "mindist"]
        model = model.model_validate({**model.model_dump(),
                                      "queries": [q.model_dump() for q in mindist]})
        runner = SceneRunner(_config(args), args.jobs)
        runner.run(model)
        witnesses = [o.result.witness_points for o in runner.outcomes if o.result is not None]
        status = EXIT_OK if runner.all_converged else EXIT_UNCONVERGED
    scene = model.build()
    hulls = []
    if args.hulls > 0:
        for curve in scene.curves.values():
            pieces = np.linspace(curve.domain.lo, curve.domain.hi, args.hulls + 1)
            hulls += [hull(CurveSegment(curve, Interval(lo, hi))) for lo, hi in zip(pieces, pieces[1:])]
    render_svg(scene.curves, scene.obstacles, args.svg, witnesses=witnesses, hulls=hulls)
    print(f"wrote {args.svg}")
    return status


# ============================================================================
# Argument parsing
# ============================================================================

def _default_jobs() -> int:
    return int(os.environ.get("CURVE_PROXIMITY_JOBS", "1"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=1e-10, help="Absolute distance tolerance")
    common.add_argument("--max-iterations", type=int, default=1_000_000,
                        help="Branch-and-bound iteration cap per query")
    common.add_argument("--output", choices=("text", "json", "csv"), default="text")
    common.add_argument("--no-timing", action="store_true", help="Drop wall-time columns")
    common.add_argument("--jobs", type=int, default=_default_jobs(),
                        help="Worker processes (env CURVE_PROXIMITY_JOBS)")
    common.add_argument("--seed", type=int, default=None, help="Override the random seed")
    common.add_argument("--log-level", default=os.environ.get("CURVE_PROXIMITY_LOG_LEVEL", "WARNING"),
                        help="Logging level (env CURVE_PROXIMITY_LOG_LEVEL)")

    parser = argparse.ArgumentParser(
        prog="curve-proximity",
        description="Certified distance, tolerance and collision queries for parametric curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scene", parents=[common], help="Run every query in a scene file")
    p.add_argument("scene", type=Path)
    p.set_defaults(func=cmd_scene)

    for name, func, help_text in (
        ("mindist", cmd_mindist, "Minimum separating distance"),
        ("tolerance", cmd_tolerance, "Is the distance greater than --delta?"),
        ("collide", cmd_collide, "Do the shapes intersect?"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("scene", type=Path)
        p.add_argument("--subject", required=True, help="Curve name")
        p.add_argument("--target", required=True, help="Curve or obstacle name")
        p.add_argument("--delta", type=float, default=None, help="Tolerance (tolerance only)")
        p.add_argument("--trace", type=Path, default=None, help="Write iteration,lb,ub CSV here")
        p.set_defaults(func=func)

    p = sub.add_parser("replan", parents=[common], help="Classify random trajectories")
    p.add_argument("spec", type=Path, help="Replan spec JSON")
    p.add_argument("--samples", type=int, default=None, help="Override sample_count")
    p.add_argument("--svg", type=Path, default=None, help="Render the classified trajectories")
    p.set_defaults(func=cmd_replan)

    p = sub.add_parser("bench", parents=[common], help="Benchmark a suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--repetitions", type=int, default=11)
    p.add_argument("--instance", action="append", default=None, help="Restrict to an instance")
    p.add_argument("--algorithm", action="append", default=None, help="Restrict to an algorithm")
    p.set_defaults(func=cmd_bench, output="csv")

    p = sub.add_parser("oracle", parents=[common], help="Brute-force reference values")
    p.add_argument("scene", type=Path)
    p.add_argument("--subject", required=True)
    p.add_argument("--target", default=None, help="Omit for the subject's arc length")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", parents=[common], help="Draw a scene as SVG")
    p.add_argument("scene", type=Path)
    p.add_argument("--svg", type=Path, required=True)
    p.add_argument("--witness", action="store_true", help="Run mindist queries and draw witnesses")
    p.add_argument("--hulls", type=int, default=0, help="Draw hulls of this many equal pieces per curve")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except SceneFileError as exc:
        for problem in exc.problems:
            print(f"error: {exc.path}: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"]) or "<root>"
            print(f"error: {loc}: {err['msg']}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"error: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, ProximityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
