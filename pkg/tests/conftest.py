"""Shared test helpers: finite-difference oracles and small model builders."""

import mpmath
import numpy as np
import pytest

from splayer.network import CompositeModel, InnerNet, BlendDescriptor, xavier_init
from splayer.network import composite_forward


def fd_input_jet(f, x, h=1e-4):
    """Central-difference value/grad/hess of a scalar callable at a point.

    ``f`` maps a 1-D coordinate array to a float; returns (grad, hess),
    each of length len(x).
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    grad = np.empty(d)
    hess = np.empty(d)
    f0 = f(x)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        fp, fm = f(x + e), f(x - e)
        grad[i] = (fp - fm) / (2 * h)
        hess[i] = (fp - 2 * f0 + fm) / h**2
    return grad, hess


def fd_param_gradient(lossval, params, entries, h=1e-5):
    """Central differences of ``lossval()`` w.r.t. selected parameter entries.

    ``entries`` is a list of (tensor_index, multi_index); returns the FD
    derivative for each, restoring parameters afterwards.
    """
    out = []
    for ti, idx in entries:
        arr = params[ti]
        old = arr[idx]
        arr[idx] = old + h
        lp = lossval()
        arr[idx] = old - h
        lm = lossval()
        arr[idx] = old
        out.append((lp - lm) / (2 * h))
    return out


def close_at_floor(a, b, rel, floor):
    """Spec-style comparison: |a-b| <= max(rel*max(|a|,|b|), floor)."""
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)


def random_composite(rng, dim=1, widths=(6, 5), n_inner=1, delta=0.25):
    """A small random composite model for engine checks."""
    hidden = list(rng.integers(3, 7, size=rng.integers(1, 4)))
    outer = xavier_init([dim, *hidden, 1], rng)
    inner = []
    for j in range(n_inner):
        hidden_i = list(rng.integers(3, 7, size=rng.integers(1, 4)))
        blend = BlendDescriptor(
            axis=int(rng.integers(0, dim)),
            face=float(rng.integers(0, 2)),
            delta=delta * float(rng.uniform(0.5, 2.0)),
        )
        inner.append(InnerNet(xavier_init([dim, *hidden_i, 1], rng), blend, 0))
    return CompositeModel(dim, [outer], inner)


def scalar_value(model, x):
    """Component-0 value of a composite at a single point."""
    return float(composite_forward(model, np.atleast_2d(x))[0, 0])


def mp_scalar_value(model, coords):
    """Independent high-precision transcription of the composite forward pass.

    ``coords`` is a list of mpmath values (so shifted inputs stay exact).
    """

    def net_value(net):
        a = list(coords)
        last = len(net.weights) - 1
        for k, (w, b) in enumerate(zip(net.weights, net.biases)):
            z = [sum(mpmath.mpf(w[r, c]) * a[c] for c in range(w.shape[1]))
                 + mpmath.mpf(b[r]) for r in range(w.shape[0])]
            a = [mpmath.tanh(v) for v in z] if k < last else z
        return a[0]

    total = net_value(model.outer[0])
    for item in model.inner:
        p = coords[item.blend.axis] if item.blend.face == 0.0 else 1 - coords[item.blend.axis]
        s = max(mpmath.mpf(-20), min(mpmath.mpf(20), -p / mpmath.mpf(item.blend.delta)))
        total += net_value(item.net) * mpmath.exp(s)
    return total


def mp_fd_jet(model, x, h="1e-12"):
    """Central differences of the mpmath forward pass: noise ~ 1e-25 absolute.

    Returns (value, grad, hess) as float64; resolves second derivatives
    far below the 1e-8 comparison floor, which plain float64 differences
    cannot.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    with mpmath.workdps(40):
        hh = mpmath.mpf(h)
        base = [mpmath.mpf(v) for v in x]
        f0 = mp_scalar_value(model, base)
        grad = np.empty(d)
        hess = np.empty(d)
        for i in range(d):
            up = list(base)
            dn = list(base)
            up[i] = base[i] + hh
            dn[i] = base[i] - hh
            fp = mp_scalar_value(model, up)
            fm = mp_scalar_value(model, dn)
            grad[i] = float((fp - fm) / (2 * hh))
            hess[i] = float((fp - 2 * f0 + fm) / hh**2)
        return float(f0), grad, hess
