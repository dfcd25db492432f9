"""Collocation, boundary, and evaluation point generation on [0,1]^d."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "PointSet",
    "uniform_collocation_1d",
    "lhs_2d",
    "boundary_points",
    "evaluation_grid_1d",
    "evaluation_grid_2d",
]

ROLES = ("interior-collocation", "boundary", "evaluation-grid")


@dataclass
class PointSet:
    """A batch of d-dimensional points with a sampling role attached."""

    points: np.ndarray  # (N, d)
    role: str

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ConfigurationError(f"points must be (N, d), got {self.points.shape}")
        if self.role not in ROLES:
            raise ConfigurationError(f"unknown point role {self.role!r}")
        if self.points.size and (self.points.min() < 0.0 or self.points.max() > 1.0):
            raise ConfigurationError("points fall outside the closed unit domain")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def uniform_collocation_1d(n: int) -> PointSet:
    """n equally spaced interior points of (0,1); endpoints are boundary points."""
    if n < 2:
        raise ConfigurationError(f"need at least 2 collocation points, got {n}")
    x = np.arange(1, n + 1, dtype=np.float64) / (n + 1)
    return PointSet(x[:, None], "interior-collocation")


def lhs_2d(n: int, rng) -> PointSet:
    """Latin Hypercube sample of (0,1)^2: one point per stratum on each axis."""
    if n < 1:
        raise ConfigurationError(f"need at least 1 sample, got {n}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    cols = []
    for _ in range(2):
        cols.append((gen.permutation(n) + gen.random(n)) / n)
    return PointSet(np.column_stack(cols), "interior-collocation")


def boundary_points(problem_dim: int, n_per_face: int = 50) -> PointSet:
    """Boundary samples: both endpoints in 1D, n per face on the four 2D faces."""
    if n_per_face < 1:
        raise ConfigurationError(f"need at least 1 point per face, got {n_per_face}")
    if problem_dim == 1:
        pts = np.array([[0.0], [1.0]])
    elif problem_dim == 2:
        t = np.linspace(0.0, 1.0, n_per_face)
        zero = np.zeros_like(t)
        one = np.ones_like(t)
        pts = np.vstack([
            np.column_stack([zero, t]),   # x = 0
            np.column_stack([one, t]),    # x = 1
            np.column_stack([t, zero]),   # y = 0
            np.column_stack([t, one]),    # y = 1
        ])
    else:
        raise ConfigurationError(f"unsupported dimension {problem_dim}")
    return PointSet(pts, "boundary")


def evaluation_grid_1d(layer_faces: list[tuple[float, float]]) -> PointSet:
    """1001-point uniform grid plus 50 geometrically spaced points per layer.

    ``layer_faces`` holds (face, delta) pairs; refinement points sit at
    distances geomspace(0.01*delta, 10*delta) from each face, where a
    uniform grid cannot resolve the layer.
    """
    parts = [np.linspace(0.0, 1.0, 1001)]
    for face, delta in dict.fromkeys(layer_faces):
        dist = np.geomspace(1e-2 * delta, 10.0 * delta, 50)
        parts.append(dist if face == 0.0 else 1.0 - dist)
    x = np.unique(np.concatenate(parts))
    x = x[(x >= 0.0) & (x <= 1.0)]
    return PointSet(x[:, None], "evaluation-grid")


def evaluation_grid_2d(n_per_axis: int = 101) -> PointSet:
    """Tensor product grid on [0,1]^2 including the boundary."""
    axis = np.linspace(0.0, 1.0, n_per_axis)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    return PointSet(np.column_stack([gx.ravel(), gy.ravel()]), "evaluation-grid")
