"""Composite physics-informed neural networks for singularly perturbed BVPs.

Small dense tanh subnetworks are blended by clamped exponential
boundary-layer factors and trained on residual + boundary MSE losses.
See :mod:`splayer.problems` for the benchmark registry and
:mod:`splayer.cli` for the command-line interface.
"""

__version__ = "0.1.0"

from .autodiff import JetBatch, composite_jets, composite_jets_vjp, eval_jet, mlp_jets
from .errors import ConfigurationError, TrainingDivergenceError
from .jets import Jet2
from .loss import (LossBreakdown, LossWeights, boundary_mse, residual_mse,
                   soft_weighted_residual_loss, total_loss, total_loss_and_gradient)
from .network import (MLP, BlendDescriptor, CompositeModel, InnerNet,
                      composite_forward, load_model, safe_exp, save_model, xavier_init)
from .optimizer import AdamState, LrSchedule, adam_init, adam_step, effective_lr
from .problems import (PROBLEM_IDS, ProblemSpec, analytic_solution, apply_operator,
                       get_problem, manufactured_source, residual)
from .sampling import (PointSet, boundary_points, evaluation_grid_1d,
                       evaluation_grid_2d, lhs_2d, uniform_collocation_1d)
from .trainer import (LossRecord, RunMetrics, TrainingConfig, TrainResult,
                      build_model, evaluate, train)

__all__ = [
    "__version__",
    "Jet2", "JetBatch", "eval_jet", "mlp_jets", "composite_jets", "composite_jets_vjp",
    "ConfigurationError", "TrainingDivergenceError",
    "MLP", "BlendDescriptor", "CompositeModel", "InnerNet", "xavier_init", "safe_exp",
    "composite_forward", "save_model", "load_model",
    "PointSet", "uniform_collocation_1d", "lhs_2d", "boundary_points",
    "evaluation_grid_1d", "evaluation_grid_2d",
    "PROBLEM_IDS", "ProblemSpec", "get_problem", "analytic_solution",
    "manufactured_source", "residual", "apply_operator",
    "LossWeights", "LossBreakdown", "residual_mse", "boundary_mse",
    "soft_weighted_residual_loss", "total_loss", "total_loss_and_gradient",
    "AdamState", "LrSchedule", "adam_init", "adam_step", "effective_lr",
    "TrainingConfig", "TrainResult", "LossRecord", "RunMetrics", "build_model",
    "train", "evaluate",
]
