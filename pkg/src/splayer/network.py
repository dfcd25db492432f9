"""Dense tanh subnetworks and their composite assembly.

A composite model is a sum of smooth "outer" networks (one per solution
component) and "inner" networks that are multiplied by a clamped
exponential blend factor ``safe_exp(-p(x)/delta)`` tying them to one
boundary face.  With ``delta`` of the order of the perturbation
parameter, each inner net only acts inside its boundary layer.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "MLP",
    "BlendDescriptor",
    "InnerNet",
    "CompositeModel",
    "xavier_init",
    "safe_exp",
    "blend_factors",
    "mlp_forward",
    "composite_forward",
    "save_model",
    "load_model",
]

# Clamp bound for the blend exponent; exp(-20) ~ 2.06e-9 is the floor of
# any blend factor, and the clamp's derivative is zero once saturated.
EXP_CLAMP = 20.0


@dataclass
class MLP:
    """Fully connected net, tanh hidden activations, identity output.

    ``weights[k]`` has shape (layer_sizes[k+1], layer_sizes[k]);
    ``biases[k]`` has shape (layer_sizes[k+1],).
    """

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ConfigurationError(f"degenerate layer sizes {sizes}")
        self.layer_sizes = sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ConfigurationError("wrong number of weight/bias tensors")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[k + 1], sizes[k]) or b.shape != (sizes[k + 1],):
                raise ConfigurationError(
                    f"layer {k}: weight {w.shape} / bias {b.shape} do not match sizes {sizes}"
                )

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


def xavier_init(layer_sizes, rng) -> MLP:
    """Xavier/Glorot-uniform weights, zero biases.

    ``rng`` is either an integer seed or a ``numpy.random.Generator``;
    the same seed always yields bit-identical parameters.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ConfigurationError(f"degenerate layer sizes {sizes}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(gen.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MLP(sizes, weights, biases)


def safe_exp(z):
    """exp with its argument clamped to [-20, 20] to dodge over/underflow."""
    return np.exp(np.clip(z, -EXP_CLAMP, EXP_CLAMP))


def mlp_forward(net: MLP, points: np.ndarray) -> np.ndarray:
    """Plain forward pass: (N, input_dim) -> (N, output_dim)."""
    a = _check_points(points, net.input_dim)
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w.T + b
        if k < last:
            a = np.tanh(a)
    return a


@dataclass(frozen=True)
class BlendDescriptor:
    """Location and thickness of one boundary layer.

    ``p(x)`` is the distance to the face: the coordinate ``x_axis`` itself
    for ``face == 0.0``, or ``1 - x_axis`` for ``face == 1.0``.  ``delta``
    is the layer-width scale (epsilon or mu for every benchmark here).
    """

    axis: int
    face: float
    delta: float

    def __post_init__(self):
        if self.face not in (0.0, 1.0):
            raise ConfigurationError(f"blend face must be 0.0 or 1.0, got {self.face}")
        if not self.delta > 0:
            raise ConfigurationError(f"blend delta must be positive, got {self.delta}")

    def distance(self, points: np.ndarray) -> np.ndarray:
        x = points[:, self.axis]
        return x if self.face == 0.0 else 1.0 - x

    @property
    def exponent_slope(self) -> float:
        """d/dx_axis of the blend exponent s(x) = -p(x)/delta."""
        return -1.0 / self.delta if self.face == 0.0 else 1.0 / self.delta


def blend_factors(blend: BlendDescriptor, points: np.ndarray):
    """Blend factor and its first/second derivative along the blend axis.

    Returns (beta, dbeta, ddbeta), each of shape (N,).  Outside the clamp
    window the factor is the constant exp(+/-20), so both derivatives are
    zero there.
    """
    s = -blend.distance(points) / blend.delta
    beta = np.exp(np.clip(s, -EXP_CLAMP, EXP_CLAMP))
    live = (s > -EXP_CLAMP) & (s < EXP_CLAMP)
    k = blend.exponent_slope
    dbeta = np.where(live, beta * k, 0.0)
    ddbeta = np.where(live, beta * k * k, 0.0)
    return beta, dbeta, ddbeta


@dataclass
class InnerNet:
    net: MLP
    blend: BlendDescriptor
    component: int


@dataclass
class CompositeModel:
    """Outer nets plus blended inner nets; one output component per outer net."""

    input_dim: int
    outer: list[MLP]
    inner: list[InnerNet] = field(default_factory=list)

    def __post_init__(self):
        if not self.outer:
            raise ConfigurationError("composite model needs at least one outer net")
        for net in self.outer:
            if net.input_dim != self.input_dim or net.output_dim != 1:
                raise ConfigurationError("outer nets must map input_dim -> 1")
        for item in self.inner:
            if not 0 <= item.component < len(self.outer):
                raise ConfigurationError(f"inner net references component {item.component}")
            if item.net.input_dim != self.input_dim or item.net.output_dim != 1:
                raise ConfigurationError("inner nets must map input_dim -> 1")
            if not 0 <= item.blend.axis < self.input_dim:
                raise ConfigurationError(f"blend axis {item.blend.axis} out of range")

    @property
    def n_components(self) -> int:
        return len(self.outer)

    def subnets(self) -> list[MLP]:
        """All member nets in canonical parameter order (outers, then inners)."""
        return [*self.outer, *(item.net for item in self.inner)]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for net in self.subnets():
            out.extend(net.parameters())
        return out


def composite_forward(model: CompositeModel, points: np.ndarray) -> np.ndarray:
    """Component values of the composite: (N, d) -> (N, n_components).

    Each component c is outer_c(x) plus the sum of its inner nets scaled
    by their blend factors.
    """
    pts = _check_points(points, model.input_dim)
    n = pts.shape[0]
    values = np.empty((n, model.n_components))
    for c, net in enumerate(model.outer):
        values[:, c] = mlp_forward(net, pts)[:, 0]
    for item in model.inner:
        beta, _, _ = blend_factors(item.blend, pts)
        values[:, item.component] += mlp_forward(item.net, pts)[:, 0] * beta
    return values


def _check_points(points: np.ndarray, input_dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != input_dim:
        raise ConfigurationError(
            f"points have shape {pts.shape}, expected (N, {input_dim})"
        )
    return pts


# ---------------------------------------------------------------------------
# Checkpoint format (version 1)
#
#   bytes 0..7    magic b"SPLAYER\x01"
#   bytes 8..11   little-endian uint32: length L of the JSON header
#   bytes 12..12+L  UTF-8 JSON: {"format_version": 1, "input_dim": d,
#                   "outer": [[layer sizes], ...],
#                   "inner": [{"layer_sizes": [...], "axis": a,
#                              "face": f, "delta": dl, "component": c}, ...]}
#   remainder     float64 little-endian parameter values, in canonical
#                 order (outers then inners; per net: W0, b0, W1, b1, ...),
#                 each tensor in row-major order.
#
# Round-trips are bit-exact: raw IEEE-754 bytes, no decimal formatting.
# ---------------------------------------------------------------------------

_MAGIC = b"SPLAYER\x01"


def save_model(model: CompositeModel, path) -> None:
    header = {
        "format_version": 1,
        "input_dim": model.input_dim,
        "outer": [list(net.layer_sizes) for net in model.outer],
        "inner": [
            {
                "layer_sizes": list(item.net.layer_sizes),
                "axis": item.blend.axis,
                "face": item.blend.face,
                "delta": item.blend.delta,
                "component": item.component,
            }
            for item in model.inner
        ],
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in model.parameters():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path) -> CompositeModel:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ConfigurationError(f"{path}: not a splayer checkpoint")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("format_version") != 1:
            raise ConfigurationError(f"{path}: unsupported checkpoint version")
        payload = fh.read()

    def read_net(sizes, offset):
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = np.frombuffer(payload, dtype="<f8", count=fan_out * fan_in, offset=offset)
            offset += w.nbytes
            b = np.frombuffer(payload, dtype="<f8", count=fan_out, offset=offset)
            offset += b.nbytes
            weights.append(w.reshape(fan_out, fan_in).copy())
            biases.append(b.copy())
        return MLP(tuple(sizes), weights, biases), offset

    offset = 0
    outer = []
    for sizes in header["outer"]:
        net, offset = read_net(sizes, offset)
        outer.append(net)
    inner = []
    for item in header["inner"]:
        net, offset = read_net(item["layer_sizes"], offset)
        blend = BlendDescriptor(axis=item["axis"], face=item["face"], delta=item["delta"])
        inner.append(InnerNet(net, blend, item["component"]))
    if offset != len(payload):
        raise ConfigurationError(f"{path}: trailing bytes in checkpoint")
    return CompositeModel(header["input_dim"], outer, inner)
