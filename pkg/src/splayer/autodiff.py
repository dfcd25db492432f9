"""Exact derivatives of composite networks: input jets and parameter gradients.

Forward pass: every layer's state is a single stacked matrix holding
1 + 2d channels per sample (value, d first derivatives, d diagonal second
derivatives), so a layer costs one GEMM plus elementwise tanh algebra.
Affine layers map all channels with the same weight matrix; the tanh
layer uses

    a   = tanh(z)
    a'  = p1 z'            p1 = 1 - a^2
    a'' = p2 (z')^2 + p1 z''   p2 = -2 a p1

which is exact for the diagonal entries (off-diagonal curvature never
feeds back into the diagonal through affine maps).

Backward pass (parameter gradients): the loss is a function of the
per-point jets, so callers provide adjoint seeds dL/d(value, grad, hess)
and this module transposes the forward recurrence.  For the tanh layer,
with p3 = -2 p1 (1 - 3 a^2) = dp2/dz:

    zbar    = abar p1 + sum_i agbar_i p2 zg_i
                       + sum_i ahbar_i (p3 zg_i^2 + p2 zh_i)
    zgbar_i = agbar_i p1 + 2 p2 ahbar_i zg_i
    zhbar_i = ahbar_i p1

All reductions run in a fixed order; identical inputs give bit-identical
outputs.  Everything is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigurationError
from .jets import Jet2
from .network import MLP, CompositeModel, blend_factors, _check_points

__all__ = ["JetBatch", "mlp_jets", "composite_jets", "composite_jets_vjp", "eval_jet"]


@dataclass
class JetBatch:
    """Batched jets of a multi-component model.

    value: (N, C); grad: (d, N, C); hess: (d, N, C) where C is the number
    of output components and d the input dimension.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @property
    def n_points(self) -> int:
        return self.value.shape[0]

    @property
    def dim(self) -> int:
        return self.grad.shape[0]


def _input_state(points: np.ndarray) -> np.ndarray:
    """Stacked jet state of the identity map x -> x."""
    n, d = points.shape
    state = np.zeros(((1 + 2 * d) * n, d))
    state[:n] = points
    for i in range(d):
        state[(1 + i) * n : (2 + i) * n, i] = 1.0
    return state


@njit(cache=True)
def _tanh_jet_act(z, act, t, n, d):
    """Fused tanh jet algebra for one hidden layer (see module docstring)."""
    width = z.shape[1]
    for r in range(n):
        for c in range(width):
            tv = math.tanh(z[r, c])
            t[r, c] = tv
            act[r, c] = tv
            p1 = 1.0 - tv * tv
            p2 = -2.0 * tv * p1
            for i in range(d):
                rg = (1 + i) * n + r
                rh = (1 + d + i) * n + r
                zg = z[rg, c]
                act[rg, c] = p1 * zg
                act[rh, c] = p2 * zg * zg + p1 * z[rh, c]


@njit(cache=True)
def _tanh_jet_adjoint(abar, z, t, zbar, n, d):
    """Transpose of :func:`_tanh_jet_act`: activation adjoints -> pre-activation adjoints."""
    width = z.shape[1]
    for r in range(n):
        for c in range(width):
            tv = t[r, c]
            p1 = 1.0 - tv * tv
            p2 = -2.0 * tv * p1
            p3 = -2.0 * p1 * (1.0 - 3.0 * tv * tv)
            acc = abar[r, c] * p1
            for i in range(d):
                rg = (1 + i) * n + r
                rh = (1 + d + i) * n + r
                zg = z[rg, c]
                ag = abar[rg, c]
                ah = abar[rh, c]
                acc += ag * p2 * zg + ah * (p3 * zg * zg + p2 * z[rh, c])
                zbar[rg, c] = ag * p1 + 2.0 * p2 * ah * zg
                zbar[rh, c] = ah * p1
            zbar[r, c] = acc


def _mlp_jet_forward(net: MLP, points: np.ndarray, keep_cache: bool):
    n, d = points.shape
    state = _input_state(points)
    cache = [] if keep_cache else None
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = state @ w.T
        z[:n] += b
        if k < last:
            act = np.empty_like(z)
            t = np.empty((n, z.shape[1]))
            _tanh_jet_act(z, act, t, n, d)
            if keep_cache:
                cache.append((state, z, t))
            state = act
        else:
            if keep_cache:
                cache.append((state, None, None))
            state = z
    return state, cache


def _mlp_jet_vjp(net: MLP, n: int, d: int, cache, out_bar: np.ndarray) -> list[np.ndarray]:
    """Gradients of sum(seeds * jets) w.r.t. the net's parameters.

    ``out_bar`` is the stacked adjoint of the net's output jet state.
    Returns [Wbar0, bbar0, Wbar1, bbar1, ...].
    """
    grads: list[np.ndarray | None] = [None] * (2 * len(net.weights))
    abar = out_bar
    for k in range(len(net.weights) - 1, -1, -1):
        state_in, z, t = cache[k]
        if t is None:
            zbar = abar
        else:
            zbar = np.empty_like(abar)
            _tanh_jet_adjoint(np.ascontiguousarray(abar), z, t, zbar, n, d)
        grads[2 * k] = zbar.T @ state_in
        grads[2 * k + 1] = zbar[:n].sum(axis=0)
        if k > 0:
            abar = zbar @ net.weights[k]
    return grads


def mlp_jets(net: MLP, points: np.ndarray) -> JetBatch:
    """Jets of a bare MLP's outputs; components are the output units."""
    pts = _check_points(points, net.input_dim)
    n, d = pts.shape
    state, _ = _mlp_jet_forward(net, pts, keep_cache=False)
    return JetBatch(
        value=state[:n].copy(),
        grad=state[n : (1 + d) * n].reshape(d, n, -1).copy(),
        hess=state[(1 + d) * n :].reshape(d, n, -1).copy(),
    )


def composite_jets(model: CompositeModel, points: np.ndarray, keep_cache: bool = False):
    """Jets of every composite component at every point.

    Returns (JetBatch, cache); pass the cache to :func:`composite_jets_vjp`.
    The blend factor's derivatives are folded in exactly, including the
    zero derivative of the clamp in its saturated region.
    """
    pts = _check_points(points, model.input_dim)
    n, d = pts.shape
    ncomp = model.n_components
    value = np.zeros((n, ncomp))
    grad = np.zeros((d, n, ncomp))
    hess = np.zeros((d, n, ncomp))
    caches = []
    for c, net in enumerate(model.outer):
        state, cache = _mlp_jet_forward(net, pts, keep_cache)
        caches.append(cache)
        value[:, c] += state[:n, 0]
        grad[:, :, c] += state[n : (1 + d) * n, 0].reshape(d, n)
        hess[:, :, c] += state[(1 + d) * n :, 0].reshape(d, n)
    blends = []
    for item in model.inner:
        state, cache = _mlp_jet_forward(item.net, pts, keep_cache)
        beta, dbeta, ddbeta = blend_factors(item.blend, pts)
        caches.append(cache)
        blends.append((beta, dbeta, ddbeta))
        c, ax = item.component, item.blend.axis
        v = state[:n, 0]
        g = state[n : (1 + d) * n, 0].reshape(d, n)
        h = state[(1 + d) * n :, 0].reshape(d, n)
        value[:, c] += v * beta
        grad[:, :, c] += g * beta
        grad[ax, :, c] += v * dbeta
        hess[:, :, c] += h * beta
        hess[ax, :, c] += 2.0 * g[ax] * dbeta + v * ddbeta
    jets = JetBatch(value, grad, hess)
    return (jets, (pts, caches, blends)) if keep_cache else (jets, None)


def composite_jets_vjp(model: CompositeModel, cache, wv: np.ndarray,
                       wg: np.ndarray, wh: np.ndarray) -> list[np.ndarray]:
    """Gradient of sum(wv*value + wg*grad + wh*hess) w.r.t. all parameters.

    Seeds have the JetBatch shapes ((N, C), (d, N, C), (d, N, C)).  The
    result aligns with ``model.parameters()``.  Any loss that is a
    function of the jets reduces to this with wv/wg/wh equal to its
    partial derivatives per point.
    """
    pts, caches, blends = cache
    n, d = pts.shape
    grads: list[np.ndarray] = []
    for c, net in enumerate(model.outer):
        out_bar = np.concatenate(
            [wv[:, c : c + 1], wg[:, :, c].reshape(d * n, 1), wh[:, :, c].reshape(d * n, 1)]
        )
        grads.extend(_mlp_jet_vjp(net, n, d, caches[c], out_bar))
    for j, item in enumerate(model.inner):
        beta, dbeta, ddbeta = blends[j]
        c, ax = item.component, item.blend.axis
        sv = wv[:, c] * beta + wg[ax, :, c] * dbeta + wh[ax, :, c] * ddbeta
        sg = wg[:, :, c] * beta
        sg[ax] += 2.0 * wh[ax, :, c] * dbeta
        sh = wh[:, :, c] * beta
        out_bar = np.concatenate([sv[:, None], sg.reshape(d * n, 1), sh.reshape(d * n, 1)])
        grads.extend(_mlp_jet_vjp(item.net, n, d, caches[len(model.outer) + j], out_bar))
    return grads


def eval_jet(model, x, which_output: int = 0) -> Jet2:
    """Value, gradient, and diagonal second derivative of one output at one point."""
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if isinstance(model, MLP):
        batch = mlp_jets(model, pts)
    elif isinstance(model, CompositeModel):
        batch, _ = composite_jets(model, pts)
    else:
        raise ConfigurationError(f"cannot evaluate jets of {type(model).__name__}")
    if not 0 <= which_output < batch.value.shape[1]:
        raise ConfigurationError(f"output index {which_output} out of range")
    return Jet2(
        value=batch.value[0, which_output],
        grad=batch.grad[:, 0, which_output],
        hess_diag=batch.hess[:, 0, which_output],
    )
