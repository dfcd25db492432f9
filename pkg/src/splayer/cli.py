"""Command-line front end: run one experiment (or a two-variant comparison)
and write loss histories, solution grids, and a run summary.

Outputs, all under --out-dir:

* ``loss_history.csv``  epoch,total,residual,boundary,lr (primary model)
* ``solution.csv``      x[,y],component,predicted,exact,abs_error
* ``summary.json``      effective config echo + final metrics + version
* ``comparison.csv``    epoch plus one total-loss column per variant
                        (compare mode only)

Exit codes: 0 success, 1 usage/configuration error, 2 training
divergence, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigurationError, TrainingDivergenceError
from .loss import VARIANTS
from .optimizer import LrSchedule
from .trainer import TrainingConfig, TrainResult, evaluate, train
from .sampling import evaluation_grid_1d, evaluation_grid_2d

__all__ = ["parse_args", "write_outputs", "main"]

USAGE_EXIT, DIVERGENCE_EXIT, IO_EXIT = 1, 2, 3

PROBLEM_FLAGS = ("cd1d", "rd1d", "cd-coupled", "rd-coupled", "cd2d-ex2", "cd2d-ex3")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _positive(kind, name):
    def convert(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return convert


def parse_args(argv=None):
    """Parse CLI flags into (TrainingConfig, run options namespace)."""
    parser = _Parser(
        prog="splayer",
        description="Train composite PINNs on singularly perturbed benchmark problems.",
    )
    parser.add_argument("--problem", required=True, choices=PROBLEM_FLAGS)
    parser.add_argument("--model", default="cpinn", choices=VARIANTS)
    parser.add_argument("--epsilon", type=_positive(float, "epsilon"))
    parser.add_argument("--mu", type=_positive(float, "mu"))
    parser.add_argument("--epochs", type=_positive(int, "epochs"))
    parser.add_argument("--lr", type=_positive(float, "lr"))
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: $SPLAYER_SEED or 0)")
    parser.add_argument("--points", type=_positive(int, "points"), default=600)
    parser.add_argument("--boundary-points", type=_positive(int, "boundary-points"),
                        default=50, help="boundary samples per face (2D)")
    parser.add_argument("--log-every", type=_positive(int, "log-every"), default=500)
    parser.add_argument("--out-dir", default="splayer-out")
    parser.add_argument("--compare", choices=VARIANTS, default=None,
                        help="also train this variant and emit comparison.csv")
    parser.add_argument("--resample-every-epoch", action="store_true")
    parser.add_argument("--lr-decay", type=float, default=None,
                        help="step-decay factor in (0,1]; enables the scheduler")
    parser.add_argument("--lr-decay-every", type=_positive(int, "lr-decay-every"),
                        default=1000)
    parser.add_argument("--no-solution-grid", action="store_true",
                        help="skip writing solution.csv")
    args = parser.parse_args(argv)

    if args.lr_decay is not None and not 0.0 < args.lr_decay <= 1.0:
        parser.error(f"--lr-decay must lie in (0, 1], got {args.lr_decay}")
    if args.compare == args.model:
        parser.error("--compare must name a different variant than --model")

    seed = args.seed
    if seed is None:
        raw = os.environ.get("SPLAYER_SEED", "0")
        try:
            seed = int(raw)
        except ValueError:
            parser.error(f"SPLAYER_SEED must be an integer, got {raw!r}")

    schedule = None
    if args.lr_decay is not None:
        schedule = LrSchedule("step_decay", args.lr_decay, args.lr_decay_every)

    config = TrainingConfig(
        problem=args.problem.replace("-", "_"),
        variant=args.model,
        epochs=args.epochs,
        lr=args.lr,
        schedule=schedule,
        epsilon=args.epsilon,
        mu=args.mu,
        n_collocation=args.points,
        n_boundary_per_face=args.boundary_points,
        seed=seed,
        log_every=args.log_every,
        resample_every_epoch=args.resample_every_epoch,
    )
    return config, args


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_outputs(out_dir, result: TrainResult, solution_table=None,
                  comparison: list[TrainResult] | None = None) -> None:
    """Write loss_history.csv, solution.csv, summary.json, comparison.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["epoch,total,residual,boundary,lr"]
    for rec in result.records:
        lines.append(",".join([str(rec.epoch), _fmt(rec.total), _fmt(rec.residual_term),
                               _fmt(rec.boundary_term), _fmt(rec.lr_used)]))
    (out / "loss_history.csv").write_text("\n".join(lines) + "\n")

    if solution_table is not None:
        dim = solution_table["points"].shape[1]
        ncomp = solution_table["predicted"].shape[1]
        header = ("x,y" if dim == 2 else "x") + ",component,predicted,exact,abs_error"
        rows = [header]
        pts = solution_table["points"]
        for c in range(ncomp):
            for i in range(pts.shape[0]):
                coords = ",".join(_fmt(v) for v in pts[i])
                rows.append(f"{coords},{c + 1},{_fmt(solution_table['predicted'][i, c])},"
                            f"{_fmt(solution_table['exact'][i, c])},"
                            f"{_fmt(solution_table['abs_error'][i, c])}")
        (out / "solution.csv").write_text("\n".join(rows) + "\n")

    summary = {
        "version": f"splayer-{__version__}",
        "config": result.config,
        "final_loss": result.metrics.final_loss,
        "l2_rel_error": result.metrics.l2_rel_error,
        "max_abs_error": result.metrics.max_abs_error,
        "wall_time_seconds": result.metrics.wall_time_seconds,
    }
    if comparison:
        summary["compare"] = [
            {"variant": extra.config["variant"], "final_loss": extra.metrics.final_loss,
             "l2_rel_error": extra.metrics.l2_rel_error}
            for extra in comparison
        ]
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")

    if comparison:
        runs = [result, *comparison]
        names = [r.config["variant"] for r in runs]
        rows = ["epoch," + ",".join(f"{name}_loss" for name in names)]
        for i, rec in enumerate(result.records):
            cells = [str(rec.epoch)]
            for run in runs:
                cells.append(_fmt(run.records[i].total))
            rows.append(",".join(cells))
        (out / "comparison.csv").write_text("\n".join(rows) + "\n")


def main(argv=None) -> int:
    try:
        config, args = parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT

    try:
        result = train(config)
        comparison = None
        if args.compare:
            import dataclasses

            comparison = [train(dataclasses.replace(config, variant=args.compare))]
        grid = (evaluation_grid_1d(result.spec.layer_faces())
                if result.spec.dim == 1 else evaluation_grid_2d())
        _, table = evaluate(result.model, result.spec, grid)
        solution_table = None if args.no_solution_grid else table
    except ConfigurationError as exc:
        print(f"splayer: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except TrainingDivergenceError as exc:
        print(f"splayer: {exc}", file=sys.stderr)
        return DIVERGENCE_EXIT

    try:
        write_outputs(args.out_dir, result, solution_table, comparison)
    except OSError as exc:
        print(f"splayer: cannot write outputs: {exc}", file=sys.stderr)
        return IO_EXIT

    print(f"problem={result.config['problem']} model={result.config['variant']} "
          f"final_loss={result.metrics.final_loss:.6g} "
          f"l2_rel_error={['%.3g' % e for e in result.metrics.l2_rel_error]} "
          f"wall={result.metrics.wall_time_seconds:.1f}s -> {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
