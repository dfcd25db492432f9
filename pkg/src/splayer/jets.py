"""Second-order forward-mode jets.

A ``Jet2`` carries a scalar field's value together with its first
derivative and its *diagonal* second derivative with respect to each
input coordinate.  Diagonal propagation is exact here: affine maps never
mix off-diagonal curvature into the diagonal, and elementwise
nonlinearities only need the matching diagonal entry.  Mixed partials
are deliberately not tracked (no operator in this package uses them).

Arithmetic is vectorized: ``value`` has shape (N,), ``grad`` and
``hess_diag`` have shape (N, d).  Scalars (Python floats / 0-d arrays)
broadcast as constants with zero derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = ["Jet2", "coords", "exp", "sin", "cos"]

_Scalar = (int, float, np.floating)


@dataclass
class Jet2:
    value: np.ndarray
    grad: np.ndarray
    hess_diag: np.ndarray

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=np.float64)
        self.grad = np.asarray(self.grad, dtype=np.float64)
        self.hess_diag = np.asarray(self.hess_diag, dtype=np.float64)
        if self.grad.shape != self.hess_diag.shape:
            raise ConfigurationError(
                f"grad shape {self.grad.shape} != hess_diag shape {self.hess_diag.shape}"
            )

    # ---- arithmetic -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.grad + other.grad,
                        self.hess_diag + other.hess_diag)
        return Jet2(self.value + other, self.grad, self.hess_diag)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.grad - other.grad,
                        self.hess_diag - other.hess_diag)
        return Jet2(self.value - other, self.grad, self.hess_diag)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.grad, -self.hess_diag)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess_diag)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            av = a.value[:, None]
            bv = b.value[:, None]
            return Jet2(
                a.value * b.value,
                a.grad * bv + av * b.grad,
                a.hess_diag * bv + 2.0 * a.grad * b.grad + av * b.hess_diag,
            )
        return Jet2(self.value * other, self.grad * other, self.hess_diag * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / other)
        # q = f/g: f' = q' g + q g'  and  f'' = q'' g + 2 q' g' + q g''
        q = self.value / other.value
        gv = other.value[:, None]
        qg = (self.grad - q[:, None] * other.grad) / gv
        qh = (self.hess_diag - q[:, None] * other.hess_diag - 2.0 * qg * other.grad) / gv
        return Jet2(q, qg, qh)

    def __rtruediv__(self, other):
        return constant_like(self, other) / self


def constant_like(template: Jet2, c) -> Jet2:
    """A constant jet (zero derivatives) broadcast to ``template``'s sample count."""
    v = np.broadcast_to(np.float64(c), template.value.shape).copy()
    return Jet2(v, np.zeros_like(template.grad), np.zeros_like(template.hess_diag))


def coords(points: np.ndarray) -> list[Jet2]:
    """Seed jets for each coordinate of a batch of points with shape (N, d)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ConfigurationError(f"points must be 2-D (N, d), got shape {pts.shape}")
    n, d = pts.shape
    out = []
    for i in range(d):
        g = np.zeros((n, d))
        g[:, i] = 1.0
        out.append(Jet2(pts[:, i], g, np.zeros((n, d))))
    return out


def exp(x):
    if isinstance(x, Jet2):
        e = np.exp(x.value)
        ev = e[:, None]
        return Jet2(e, ev * x.grad, ev * (x.grad * x.grad + x.hess_diag))
    return math.exp(x)


def sin(x):
    if isinstance(x, Jet2):
        s, c = np.sin(x.value), np.cos(x.value)
        return Jet2(s, c[:, None] * x.grad,
                    -s[:, None] * x.grad * x.grad + c[:, None] * x.hess_diag)
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet2):
        s, c = np.sin(x.value), np.cos(x.value)
        return Jet2(c, -s[:, None] * x.grad,
                    -c[:, None] * x.grad * x.grad - s[:, None] * x.hess_diag)
    return math.cos(x)
