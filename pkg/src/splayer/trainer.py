"""Training loop: build a model per problem recipe, iterate Adam epochs, log losses.

Full-batch by default: the collocation and boundary sets are fixed once
up front, which makes logged loss trajectories reproducible bit-for-bit
for a given seed.  The seed governs collocation sampling (2D only) and
Xavier initialization, in that order, and nothing else unless
mini-batching or per-epoch resampling is switched on.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, TrainingDivergenceError
from .loss import VARIANTS, LossWeights, total_loss, total_loss_and_gradient
from .network import CompositeModel, InnerNet, composite_forward, xavier_init
from .optimizer import LrSchedule, adam_init, adam_step, effective_lr
from .problems import ProblemSpec, analytic_solution, get_problem, manufactured_source
from .sampling import (PointSet, boundary_points, evaluation_grid_1d,
                       evaluation_grid_2d, lhs_2d, uniform_collocation_1d)

__all__ = [
    "TrainingConfig",
    "LossRecord",
    "RunMetrics",
    "TrainResult",
    "DEFAULT_LR",
    "build_model",
    "train",
    "evaluate",
    "effective_config",
]

# Per-variant base learning rates; the PI-PINN baseline additionally
# defaults to a step-decay schedule.
DEFAULT_LR = {"cpinn": 5e-4, "pinn": 5e-4, "pipinn": 1e-3}
BASELINE_WIDTH = 150


@dataclass
class TrainingConfig:
    problem: str
    variant: str = "cpinn"
    epochs: int | None = None        # None -> per-problem default
    lr: float | None = None          # None -> per-variant default
    schedule: LrSchedule | None = None  # None -> step decay for pipinn, constant otherwise
    epsilon: float | None = None
    mu: float | None = None
    n_collocation: int = 600
    n_boundary_per_face: int = 50
    seed: int = 0
    log_every: int = 500
    weights: LossWeights = field(default_factory=LossWeights)
    outer_width: int | None = None
    inner_width: int | None = None
    hidden_layers: int = 3
    baseline_width: int = BASELINE_WIDTH
    resample_every_epoch: bool = False
    batch_size: int | None = None


@dataclass
class LossRecord:
    epoch: int
    total: float
    residual_term: float
    boundary_term: float
    lr_used: float


@dataclass
class RunMetrics:
    final_loss: float
    l2_rel_error: list[float]
    max_abs_error: list[float]
    wall_time_seconds: float


@dataclass
class TrainResult:
    model: CompositeModel
    records: list[LossRecord]
    metrics: RunMetrics
    spec: ProblemSpec
    config: dict  # effective settings, sufficient to reproduce the run


@dataclass
class _Resolved:
    spec: ProblemSpec
    epochs: int
    lr: float
    schedule: LrSchedule
    outer_width: int
    inner_width: int


def _resolve(config: TrainingConfig) -> _Resolved:
    if config.variant not in VARIANTS:
        raise ConfigurationError(f"unknown variant {config.variant!r}")
    spec = get_problem(config.problem, config.epsilon, config.mu)
    epochs = spec.default_epochs if config.epochs is None else int(config.epochs)
    if epochs < 1:
        raise ConfigurationError(f"epochs must be >= 1, got {epochs}")
    if not 1 <= config.log_every <= epochs:
        raise ConfigurationError(
            f"log_every must lie in [1, epochs], got {config.log_every} for {epochs} epochs"
        )
    lr = DEFAULT_LR[config.variant] if config.lr is None else float(config.lr)
    if not lr > 0:
        raise ConfigurationError(f"learning rate must be positive, got {lr}")
    schedule = config.schedule
    if schedule is None:
        schedule = LrSchedule("step_decay") if config.variant == "pipinn" else LrSchedule()
    outer_w = spec.default_outer_width if config.outer_width is None else config.outer_width
    inner_w = spec.default_inner_width if config.inner_width is None else config.inner_width
    if config.hidden_layers < 1 or outer_w < 1 or inner_w < 1 or config.baseline_width < 1:
        raise ConfigurationError("network widths and depth must be positive")
    return _Resolved(spec, epochs, lr, schedule, outer_w, inner_w)


def build_model(spec: ProblemSpec, variant: str, rng,
                outer_width: int, inner_width: int, hidden_layers: int,
                baseline_width: int = BASELINE_WIDTH) -> CompositeModel:
    """Instantiate the composite (cpinn) or plain per-component (pinn/pipinn) nets."""
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    def sizes(width):
        return [spec.dim, *([width] * hidden_layers), 1]

    if variant == "cpinn":
        outer = [xavier_init(sizes(outer_width), gen) for _ in range(spec.n_components)]
        inner = [InnerNet(xavier_init(sizes(inner_width), gen), blend, comp)
                 for comp, blend in spec.recipe]
        return CompositeModel(spec.dim, outer, inner)
    outer = [xavier_init(sizes(baseline_width), gen) for _ in range(spec.n_components)]
    return CompositeModel(spec.dim, outer, [])


def _sample_collocation(spec: ProblemSpec, n: int, rng) -> PointSet:
    if spec.dim == 1:
        return uniform_collocation_1d(n)
    return lhs_2d(n, rng)


def train(config: TrainingConfig) -> TrainResult:
    """Run the full training loop and evaluate the result on the error grid.

    Raises :class:`TrainingDivergenceError` the moment the loss stops
    being finite, reporting the epoch and the last finite loss.
    """
    res = _resolve(config)
    spec = res.spec
    rng = np.random.default_rng(config.seed)
    collocation = _sample_collocation(spec, config.n_collocation, rng)
    boundary = boundary_points(spec.dim, config.n_boundary_per_face)
    model = build_model(spec, config.variant, rng, res.outer_width, res.inner_width,
                        config.hidden_layers, config.baseline_width)
    source = manufactured_source(spec, collocation.points)
    params = model.parameters()
    state = adam_init(params, res.lr)

    if config.batch_size is not None and not 1 <= config.batch_size <= len(collocation):
        raise ConfigurationError("batch_size must lie in [1, n_collocation]")

    records: list[LossRecord] = []
    last_finite: float | None = None
    started = time.perf_counter()
    for step in range(1, res.epochs + 1):
        epoch = step - 1  # parameters currently hold the state after `epoch` updates
        if config.resample_every_epoch:
            collocation = _sample_collocation(spec, config.n_collocation, rng)
            source = manufactured_source(spec, collocation.points)
        if config.batch_size is not None and config.batch_size < len(collocation):
            idx = rng.choice(len(collocation), size=config.batch_size, replace=False)
            batch_pts = PointSet(collocation.points[idx], "interior-collocation")
            batch_src = source[idx]
        else:
            batch_pts, batch_src = collocation, source
        breakdown, grads = total_loss_and_gradient(
            model, spec, batch_pts, boundary, config.weights, config.variant, batch_src
        )
        if not np.isfinite(breakdown.total):
            raise TrainingDivergenceError(epoch, last_finite)
        last_finite = breakdown.total
        if epoch % config.log_every == 0:
            records.append(LossRecord(epoch, breakdown.total, breakdown.residual_term,
                                      breakdown.boundary_term,
                                      effective_lr(res.schedule, res.lr, epoch)))
        state.lr = effective_lr(res.schedule, res.lr, epoch)
        adam_step(state, params, grads)

    final = total_loss(model, spec, collocation, boundary, config.weights,
                       config.variant, source)
    if not np.isfinite(final.total):
        raise TrainingDivergenceError(res.epochs, last_finite)
    if res.epochs % config.log_every == 0:
        records.append(LossRecord(res.epochs, final.total, final.residual_term,
                                  final.boundary_term,
                                  effective_lr(res.schedule, res.lr, res.epochs)))
    wall = time.perf_counter() - started

    grid = (evaluation_grid_1d(spec.layer_faces()) if spec.dim == 1
            else evaluation_grid_2d())
    metrics, _ = evaluate(model, spec, grid, final_loss=final.total,
                          wall_time_seconds=wall)
    return TrainResult(model, records, metrics, spec, effective_config(config))


def evaluate(model: CompositeModel, spec: ProblemSpec, grid: PointSet,
             final_loss: float = float("nan"),
             wall_time_seconds: float = float("nan")):
    """Predicted vs analytic values on a grid, plus aggregate error metrics.

    Returns (RunMetrics, table) where the table maps column names to
    arrays: points (N, d), predicted/exact/abs_error (N, n_components).
    """
    predicted = composite_forward(model, grid.points)
    exact = analytic_solution(spec, grid.points)
    abs_err = np.abs(predicted - exact)
    l2_rel = [
        float(np.linalg.norm(predicted[:, c] - exact[:, c]) / np.linalg.norm(exact[:, c]))
        for c in range(spec.n_components)
    ]
    max_abs = [float(abs_err[:, c].max()) for c in range(spec.n_components)]
    metrics = RunMetrics(final_loss, l2_rel, max_abs, wall_time_seconds)
    table = {"points": grid.points, "predicted": predicted, "exact": exact,
             "abs_error": abs_err}
    return metrics, table


def effective_config(config: TrainingConfig) -> dict:
    """Every setting actually used by :func:`train`, after defaulting."""
    res = _resolve(config)
    return {
        "problem": res.spec.id,
        "variant": config.variant,
        "epsilon": res.spec.epsilon,
        "mu": res.spec.mu,
        "epochs": res.epochs,
        "lr": res.lr,
        "lr_schedule": {
            "kind": res.schedule.kind,
            "decay_factor": res.schedule.decay_factor,
            "decay_every": res.schedule.decay_every,
        },
        "n_collocation": config.n_collocation,
        "n_boundary_per_face": config.n_boundary_per_face,
        "seed": config.seed,
        "log_every": config.log_every,
        "weights": {
            "lambda_d": config.weights.lambda_d,
            "lambda_b": config.weights.lambda_b,
            "lambda_i": config.weights.lambda_i,
            "lambda_bc_right": config.weights.lambda_bc_right,
            "lambda_soft": config.weights.lambda_soft,
        },
        "outer_width": res.outer_width,
        "inner_width": res.inner_width,
        "hidden_layers": config.hidden_layers,
        "baseline_width": config.baseline_width,
        "resample_every_epoch": config.resample_every_epoch,
        "batch_size": config.batch_size,
    }
