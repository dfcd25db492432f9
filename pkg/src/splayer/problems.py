"""Benchmark registry: operators, analytic solutions, and composite recipes.

Each problem couples a linear differential operator with a closed-form
solution whose source term is *manufactured*: f is obtained by pushing
the analytic solution through the same jet machinery that evaluates
network residuals, so the training target is exact by construction and
the analytic formulas are transcribed exactly once.

All six problems live on the unit interval/square with homogeneous
Dirichlet data, a perturbation parameter multiplying the highest
derivative, and boundary layers of width O(epsilon) described by the
composite recipe (which inner nets the C-PINN variant uses, and where).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .autodiff import JetBatch
from .errors import ConfigurationError
from .jets import Jet2
from .network import BlendDescriptor

__all__ = [
    "OperatorTerm",
    "ProblemSpec",
    "PROBLEM_IDS",
    "get_problem",
    "apply_operator",
    "operator_adjoint",
    "analytic_jets",
    "analytic_solution",
    "manufactured_source",
    "residual",
]


@dataclass(frozen=True)
class OperatorTerm:
    """One additive term of a linear operator: coeff * (derivative of a component).

    ``order`` 0/1/2 selects value, first, or second derivative along
    ``axis``; ``coeff`` is a constant or, for space-dependent convection,
    a callable of the point batch.
    """

    out_comp: int
    in_comp: int
    order: int
    axis: int
    coeff: float | Callable[[np.ndarray], np.ndarray]

    def coefficient(self, points: np.ndarray) -> float | np.ndarray:
        return self.coeff(points) if callable(self.coeff) else self.coeff


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    dim: int
    n_components: int
    epsilon: float
    mu: float | None
    operator_terms: tuple[OperatorTerm, ...]
    recipe: tuple[tuple[int, BlendDescriptor], ...]
    analytic_fn: Callable[[list[Jet2]], list[Jet2]]
    default_epochs: int
    default_outer_width: int
    default_inner_width: int

    def layer_faces(self) -> list[tuple[float, float]]:
        """(face, delta) pairs of every blend in the recipe (1D refinement hint)."""
        return [(blend.face, blend.delta) for _, blend in self.recipe]


def apply_operator(spec: ProblemSpec, batch: JetBatch, points: np.ndarray) -> np.ndarray:
    """L[u] at each point, per component: (N, n_components)."""
    out = np.zeros((batch.n_points, spec.n_components))
    for term in spec.operator_terms:
        if term.order == 0:
            entry = batch.value[:, term.in_comp]
        elif term.order == 1:
            entry = batch.grad[term.axis, :, term.in_comp]
        else:
            entry = batch.hess[term.axis, :, term.in_comp]
        out[:, term.out_comp] += term.coefficient(points) * entry
    return out


def operator_adjoint(spec: ProblemSpec, points: np.ndarray, out_bar: np.ndarray):
    """Transpose of :func:`apply_operator`: jet seeds from residual adjoints.

    Given dL/d(L[u]) per point and component, returns (wv, wg, wh) with
    JetBatch shapes, suitable for the parameter-gradient VJP.
    """
    n, d = points.shape
    wv = np.zeros((n, spec.n_components))
    wg = np.zeros((d, n, spec.n_components))
    wh = np.zeros((d, n, spec.n_components))
    for term in spec.operator_terms:
        contrib = term.coefficient(points) * out_bar[:, term.out_comp]
        if term.order == 0:
            wv[:, term.in_comp] += contrib
        elif term.order == 1:
            wg[term.axis, :, term.in_comp] += contrib
        else:
            wh[term.axis, :, term.in_comp] += contrib
    return wv, wg, wh


def analytic_jets(spec: ProblemSpec, points: np.ndarray) -> JetBatch:
    """Jets of the closed-form solution at each point."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != spec.dim:
        raise ConfigurationError(f"points have shape {pts.shape}, expected (N, {spec.dim})")
    comps = spec.analytic_fn(jets.coords(pts))
    n, d = pts.shape
    value = np.empty((n, spec.n_components))
    grad = np.empty((d, n, spec.n_components))
    hess = np.empty((d, n, spec.n_components))
    for c, jc in enumerate(comps):
        value[:, c] = jc.value
        grad[:, :, c] = jc.grad.T
        hess[:, :, c] = jc.hess_diag.T
    return JetBatch(value, grad, hess)


def analytic_solution(spec: ProblemSpec, points: np.ndarray) -> np.ndarray:
    """Closed-form solution values, (N, n_components)."""
    return analytic_jets(spec, points).value


def manufactured_source(spec: ProblemSpec, points: np.ndarray) -> np.ndarray:
    """f = L[analytic] at each point, via the operator applied to analytic jets."""
    return apply_operator(spec, analytic_jets(spec, points), points)


def residual(spec: ProblemSpec, batch: JetBatch, points: np.ndarray,
             source: np.ndarray | None = None) -> np.ndarray:
    """Pointwise defect L[u](x) - f(x), per component."""
    if source is None:
        source = manufactured_source(spec, points)
    return apply_operator(spec, batch, points) - source


# ---------------------------------------------------------------------------
# The six benchmarks.  Plain-float exponentials underflow to 0 for tiny
# epsilon, which is the correct limit: denominators 1 - exp(-1/eps)
# evaluate to exactly 1 there.
# ---------------------------------------------------------------------------


def _cd1d(eps: float, mu):
    # -eps y'' + y' + y = f,  layer at x = 1
    def analytic(xs):
        (x,) = xs
        return [(1.0 - jets.exp((x - 1.0) * (1.0 / eps))) * jets.sin(x)]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps),
        OperatorTerm(0, 0, 1, 0, 1.0),
        OperatorTerm(0, 0, 0, 0, 1.0),
    )
    recipe = ((0, BlendDescriptor(axis=0, face=1.0, delta=eps)),)
    return terms, recipe, analytic, 1, 10000, 50, 100


def _rd1d(eps: float, mu):
    # -eps^2 u'' + 8 u = f,  layers at both ends
    q = jets.exp(-1.0 / eps)

    def analytic(xs):
        (x,) = xs
        return [jets.exp(x * (-1.0 / eps)) + jets.exp((x - 1.0) * (1.0 / eps)) - (1.0 + q)]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps * eps),
        OperatorTerm(0, 0, 0, 0, 8.0),
    )
    recipe = (
        (0, BlendDescriptor(axis=0, face=0.0, delta=eps)),
        (0, BlendDescriptor(axis=0, face=1.0, delta=eps)),
    )
    return terms, recipe, analytic, 1, 10000, 50, 100


def _cd_coupled(eps: float, mu: float):
    # -eps u1'' - u1' + 2 u1 - u2 = f1
    # -mu  u2'' - 2 u2' + 4 u2 - u1 = f2,  layers at x = 0
    de = 1.0 - jets.exp(-1.0 / eps)
    dm = 1.0 - jets.exp(-1.0 / mu)

    def analytic(xs):
        (x,) = xs
        layer_e = (1.0 - jets.exp(x * (-1.0 / eps))) * (1.0 / de)
        layer_m = (1.0 - jets.exp(x * (-1.0 / mu))) * (1.0 / dm)
        u1 = layer_e + layer_m - 2.0 * jets.sin(x * (np.pi / 2.0))
        u2 = layer_m - x * jets.exp(x - 1.0)
        return [u1, u2]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps),
        OperatorTerm(0, 0, 1, 0, -1.0),
        OperatorTerm(0, 0, 0, 0, 2.0),
        OperatorTerm(0, 1, 0, 0, -1.0),
        OperatorTerm(1, 1, 2, 0, -mu),
        OperatorTerm(1, 1, 1, 0, -2.0),
        OperatorTerm(1, 1, 0, 0, 4.0),
        OperatorTerm(1, 0, 0, 0, -1.0),
    )
    recipe = (
        (0, BlendDescriptor(axis=0, face=0.0, delta=eps)),
        (1, BlendDescriptor(axis=0, face=0.0, delta=mu)),
    )
    return terms, recipe, analytic, 2, 7000, 100, 150


def _rd_coupled(eps: float, mu: float):
    # -eps^2 u1'' + 2 u1 - u2 = f1
    # -mu^2  u2'' - u1 + 4 u2 = f2,  layers at both ends
    de = 1.0 - jets.exp(-1.0 / eps)
    dm = 1.0 - jets.exp(-1.0 / mu)

    def analytic(xs):
        (x,) = xs
        pair_e = (jets.exp(x * (-1.0 / eps)) + jets.exp((x - 1.0) * (1.0 / eps))) * (1.0 / de)
        pair_m = (jets.exp(x * (-1.0 / mu)) + jets.exp((x - 1.0) * (1.0 / mu))) * (1.0 / dm)
        return [pair_e + pair_m - 2.0, pair_m - 1.0]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps * eps),
        OperatorTerm(0, 0, 0, 0, 2.0),
        OperatorTerm(0, 1, 0, 0, -1.0),
        OperatorTerm(1, 1, 2, 0, -mu * mu),
        OperatorTerm(1, 1, 0, 0, 4.0),
        OperatorTerm(1, 0, 0, 0, -1.0),
    )
    recipe = (
        (0, BlendDescriptor(axis=0, face=0.0, delta=eps)),
        (0, BlendDescriptor(axis=0, face=1.0, delta=eps)),
        (1, BlendDescriptor(axis=0, face=0.0, delta=mu)),
        (1, BlendDescriptor(axis=0, face=1.0, delta=mu)),
    )
    return terms, recipe, analytic, 2, 7000, 100, 150


def _cd2d_ex2(eps: float, mu):
    # -eps (u_xx + u_yy) - (2 - x) u_x - u_y + 1.5 u = f
    q = jets.exp(-1.0 / eps)
    den = 1.0 - q

    def analytic(xs):
        x, y = xs
        fx = jets.cos(x * (np.pi / 2.0)) - (jets.exp(x * (-1.0 / eps)) - q) * (1.0 / den)
        fy = (1.0 - jets.exp(y * (-1.0 / eps))) * (1.0 / den)
        return [fx * fy]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps),
        OperatorTerm(0, 0, 2, 1, -eps),
        OperatorTerm(0, 0, 1, 0, lambda pts: -(2.0 - pts[:, 0])),
        OperatorTerm(0, 0, 1, 1, -1.0),
        OperatorTerm(0, 0, 0, 0, 1.5),
    )
    # Physical layers sit at x=0 and y=0; the y=1 net is the empirical
    # auxiliary one that absorbs the zero boundary data on that face.
    recipe = (
        (0, BlendDescriptor(axis=0, face=0.0, delta=eps)),
        (0, BlendDescriptor(axis=1, face=0.0, delta=eps)),
        (0, BlendDescriptor(axis=1, face=1.0, delta=eps)),
    )
    return terms, recipe, analytic, 1, 7000, 100, 150


def _cd2d_ex3(eps: float, mu):
    # -eps (u_xx + u_yy) - u_x - u_y + u = f
    def analytic(xs):
        x, y = xs
        return [
            jets.sin(x * np.pi) * jets.sin(y * np.pi)
            * (1.0 - jets.exp(x * (-1.0 / eps)))
            * (1.0 - jets.exp(y * (-1.0 / eps)))
        ]

    terms = (
        OperatorTerm(0, 0, 2, 0, -eps),
        OperatorTerm(0, 0, 2, 1, -eps),
        OperatorTerm(0, 0, 1, 0, -1.0),
        OperatorTerm(0, 0, 1, 1, -1.0),
        OperatorTerm(0, 0, 0, 0, 1.0),
    )
    recipe = (
        (0, BlendDescriptor(axis=0, face=0.0, delta=eps)),
        (0, BlendDescriptor(axis=1, face=0.0, delta=eps)),
    )
    return terms, recipe, analytic, 1, 7000, 100, 150


_REGISTRY = {
    "cd1d": (_cd1d, 1, 1e-5, None),
    "rd1d": (_rd1d, 1, 1e-5, None),
    "cd_coupled": (_cd_coupled, 1, 1e-7, 1e-5),
    "rd_coupled": (_rd_coupled, 1, 1e-10, 1e-8),
    "cd2d_ex2": (_cd2d_ex2, 2, 1e-5, None),
    "cd2d_ex3": (_cd2d_ex3, 2, 1e-5, None),
}

PROBLEM_IDS = tuple(_REGISTRY)


def get_problem(problem_id: str, epsilon: float | None = None,
                mu: float | None = None) -> ProblemSpec:
    """Build a benchmark spec, with optional overrides of epsilon and mu."""
    key = problem_id.replace("-", "_")
    if key not in _REGISTRY:
        raise ConfigurationError(
            f"unknown problem {problem_id!r}; choose from {', '.join(PROBLEM_IDS)}"
        )
    builder, dim, default_eps, default_mu = _REGISTRY[key]
    eps = default_eps if epsilon is None else float(epsilon)
    if not 0.0 < eps <= 1.0:
        raise ConfigurationError(f"epsilon must lie in (0, 1], got {eps}")
    if default_mu is None:
        mu_val = None
        if mu is not None:
            raise ConfigurationError(f"problem {key} takes no mu parameter")
    else:
        mu_val = default_mu if mu is None else float(mu)
        if not mu_val > 0.0:
            raise ConfigurationError(f"mu must be positive, got {mu_val}")
    terms, recipe, analytic, ncomp, epochs, outer_w, inner_w = builder(eps, mu_val)
    return ProblemSpec(
        id=key,
        dim=dim,
        n_components=ncomp,
        epsilon=eps,
        mu=mu_val,
        operator_terms=terms,
        recipe=recipe,
        analytic_fn=analytic,
        default_epochs=epochs,
        default_outer_width=outer_w,
        default_inner_width=inner_w,
    )
