"""Weighted residual + boundary losses and their parameter gradients.

``total_loss`` assembles, per variant:

* ``cpinn`` / ``pinn``: mean squared residual over collocation points
  plus mean squared boundary value (homogeneous Dirichlet data).
* ``pipinn``: the soft-weighted residual *sum* with weights
  exp(-lambda_soft * |R|) plus u(0)^2 + lambda_bc_right * u(1)^2.  The
  soft weight is treated as a constant under differentiation: it exists
  to damp the influence of large residuals, and letting gradients flow
  through it would reward growing residuals to shrink their own weight.

The initial-condition term exists for API parity (weight defaults to 0;
no stationary benchmark uses it).  Gradients come from seeding the jet
VJP with the loss's exact partial derivatives per point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import JetBatch, composite_jets, composite_jets_vjp
from .errors import ConfigurationError
from .network import CompositeModel, composite_forward
from .problems import ProblemSpec, apply_operator, manufactured_source, operator_adjoint
from .sampling import PointSet

__all__ = [
    "VARIANTS",
    "LossWeights",
    "LossBreakdown",
    "residual_mse",
    "boundary_mse",
    "soft_weighted_residual_loss",
    "validate_model_variant",
    "total_loss",
    "total_loss_and_gradient",
]

VARIANTS = ("pinn", "pipinn", "cpinn")


@dataclass
class LossWeights:
    lambda_d: float = 1.0
    lambda_b: float = 1.0
    lambda_i: float = 0.0
    lambda_bc_right: float = 3.0
    lambda_soft: float = 0.8

    def __post_init__(self):
        for name in ("lambda_d", "lambda_b", "lambda_i", "lambda_bc_right", "lambda_soft"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")


@dataclass
class LossBreakdown:
    total: float
    residual_term: float
    boundary_term: float
    initial_term: float = 0.0


def residual_mse(residuals: np.ndarray) -> float:
    """(1/N) sum over points of the squared residual, summed over components."""
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise ConfigurationError("residual MSE of an empty point set")
    return float((r * r).sum() / r.shape[0])


def boundary_mse(model: CompositeModel, boundary: PointSet) -> float:
    """(1/N_B) sum of squared boundary values (boundary data is zero)."""
    if len(boundary) == 0:
        raise ConfigurationError("boundary MSE of an empty point set")
    values = composite_forward(model, boundary.points)
    return float((values * values).sum() / values.shape[0])


def soft_weighted_residual_loss(residuals: np.ndarray, lambda_soft: float) -> float:
    """sum of exp(-lambda*|R|) * R^2 (a sum, not a mean, by construction)."""
    r = np.asarray(residuals, dtype=np.float64)
    return float((np.exp(-lambda_soft * np.abs(r)) * r * r).sum())


def validate_model_variant(model: CompositeModel, spec: ProblemSpec, variant: str) -> None:
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    if model.input_dim != spec.dim or model.n_components != spec.n_components:
        raise ConfigurationError(
            f"model ({model.input_dim}D, {model.n_components} comps) does not match "
            f"problem {spec.id} ({spec.dim}D, {spec.n_components} comps)"
        )
    if variant == "cpinn":
        got = [(it.component, it.blend.axis, it.blend.face, it.blend.delta) for it in model.inner]
        want = [(c, b.axis, b.face, b.delta) for c, b in spec.recipe]
        if got != want:
            raise ConfigurationError(
                f"cpinn model blends {got} do not match the {spec.id} recipe {want}"
            )
    else:
        if model.inner:
            raise ConfigurationError(f"{variant} uses plain networks, but model has inner nets")
        if variant == "pipinn" and (spec.dim != 1 or spec.n_components != 1):
            raise ConfigurationError("pipinn is defined for scalar 1D problems only")


def _sub_batch(batch: JetBatch, start: int, stop: int) -> JetBatch:
    return JetBatch(batch.value[start:stop], batch.grad[:, start:stop],
                    batch.hess[:, start:stop])


def _assemble(model, spec, collocation, boundary, weights, variant, source,
              initial, need_grad):
    validate_model_variant(model, spec, variant)
    if len(collocation) == 0:
        raise ConfigurationError("empty collocation set")
    if len(boundary) == 0:
        raise ConfigurationError("empty boundary set")
    xc, xb = collocation.points, boundary.points
    nc, nb = len(collocation), len(boundary)
    blocks = [xc, xb]
    if initial is not None and len(initial):
        blocks.append(initial.points)
    pts = np.vstack(blocks)
    batch, cache = composite_jets(model, pts, keep_cache=need_grad)

    if source is None:
        source = manufactured_source(spec, xc)
    res = apply_operator(spec, _sub_batch(batch, 0, nc), xc) - source
    ub = batch.value[nc : nc + nb]

    if variant == "pipinn":
        soft = np.exp(-weights.lambda_soft * np.abs(res))
        residual_term = float((soft * res * res).sum())
        # per-point boundary weights: lambda_bc_right on the x = 1 face
        wb = np.where(xb[:, 0] == 1.0, weights.lambda_bc_right, 1.0)[:, None]
        boundary_term = float((wb * ub * ub).sum())
    else:
        residual_term = float((res * res).sum() / nc)
        boundary_term = float((ub * ub).sum() / nb)

    initial_term = 0.0
    if initial is not None and len(initial):
        ui = batch.value[nc + nb :]
        initial_term = float((ui * ui).sum() / len(initial))

    total = (weights.lambda_d * residual_term + weights.lambda_b * boundary_term
             + weights.lambda_i * initial_term)
    breakdown = LossBreakdown(total, residual_term, boundary_term, initial_term)
    if not need_grad:
        return breakdown, None

    n_all = pts.shape[0]
    wv = np.zeros((n_all, spec.n_components))
    wg = np.zeros((spec.dim, n_all, spec.n_components))
    wh = np.zeros((spec.dim, n_all, spec.n_components))
    if variant == "pipinn":
        res_bar = weights.lambda_d * 2.0 * soft * res  # soft weight held constant
    else:
        res_bar = weights.lambda_d * (2.0 / nc) * res
    cv, cg, ch = operator_adjoint(spec, xc, res_bar)
    wv[:nc] = cv
    wg[:, :nc] = cg
    wh[:, :nc] = ch
    if variant == "pipinn":
        wv[nc : nc + nb] = weights.lambda_b * 2.0 * wb * ub
    else:
        wv[nc : nc + nb] = weights.lambda_b * (2.0 / nb) * ub
    if initial is not None and len(initial):
        wv[nc + nb :] = weights.lambda_i * (2.0 / len(initial)) * batch.value[nc + nb :]
    grads = composite_jets_vjp(model, cache, wv, wg, wh)
    return breakdown, grads


def total_loss(model: CompositeModel, spec: ProblemSpec, collocation: PointSet,
               boundary: PointSet, weights: LossWeights, variant: str,
               source: np.ndarray | None = None,
               initial: PointSet | None = None) -> LossBreakdown:
    """Weighted total loss; pass a precomputed ``source`` to skip re-manufacturing f."""
    breakdown, _ = _assemble(model, spec, collocation, boundary, weights, variant,
                             source, initial, need_grad=False)
    return breakdown


def total_loss_and_gradient(model: CompositeModel, spec: ProblemSpec,
                            collocation: PointSet, boundary: PointSet,
                            weights: LossWeights, variant: str,
                            source: np.ndarray | None = None,
                            initial: PointSet | None = None):
    """Loss breakdown plus d(total)/d(theta) aligned with ``model.parameters()``."""
    return _assemble(model, spec, collocation, boundary, weights, variant,
                     source, initial, need_grad=True)
