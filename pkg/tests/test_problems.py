"""Benchmark registry checks.

The manufactured-source identity is verified against an independent
symbolic route: the analytic solutions are transcribed a second time in
sympy, differentiated symbolically, and pushed through the operator
definition by hand.  Agreement pins down both the closed-form
transcription and the jet engine.
"""

import mpmath
import numpy as np
import pytest
import sympy as sy

from splayer.autodiff import JetBatch
from splayer.errors import ConfigurationError
from splayer.problems import (PROBLEM_IDS, analytic_jets, analytic_solution,
                              apply_operator, get_problem, manufactured_source,
                              operator_adjoint, residual)
from splayer.sampling import boundary_points

ALL_IDS = list(PROBLEM_IDS)


def sympy_source(spec):
    """Symbolic f = L[u_analytic] for each benchmark, lambdified to numpy."""
    x, y = sy.symbols("x y")
    eps = sy.Float(spec.epsilon)
    mu = sy.Float(spec.mu) if spec.mu is not None else None
    if spec.id == "cd1d":
        u = (1 - sy.exp((x - 1) / eps)) * sy.sin(x)
        fs = [-eps * u.diff(x, 2) + u.diff(x) + u]
    elif spec.id == "rd1d":
        u = sy.exp(-x / eps) + sy.exp(-(1 - x) / eps) - 1 - sy.exp(-1 / eps)
        fs = [-eps**2 * u.diff(x, 2) + 8 * u]
    elif spec.id == "cd_coupled":
        de, dm = 1 - sy.exp(-1 / eps), 1 - sy.exp(-1 / mu)
        u1 = (1 - sy.exp(-x / eps)) / de + (1 - sy.exp(-x / mu)) / dm \
            - 2 * sy.sin(sy.pi * x / 2)
        u2 = (1 - sy.exp(-x / mu)) / dm - x * sy.exp(x - 1)
        fs = [-eps * u1.diff(x, 2) - u1.diff(x) + 2 * u1 - u2,
              -mu * u2.diff(x, 2) - 2 * u2.diff(x) + 4 * u2 - u1]
    elif spec.id == "rd_coupled":
        de, dm = 1 - sy.exp(-1 / eps), 1 - sy.exp(-1 / mu)
        pe = (sy.exp(-x / eps) + sy.exp(-(1 - x) / eps)) / de
        pm = (sy.exp(-x / mu) + sy.exp(-(1 - x) / mu)) / dm
        u1, u2 = pe + pm - 2, pm - 1
        fs = [-eps**2 * u1.diff(x, 2) + 2 * u1 - u2,
              -mu**2 * u2.diff(x, 2) - u1 + 4 * u2]
    elif spec.id == "cd2d_ex2":
        den = 1 - sy.exp(-1 / eps)
        u = (sy.cos(sy.pi * x / 2) - (sy.exp(-x / eps) - sy.exp(-1 / eps)) / den) \
            * (1 - sy.exp(-y / eps)) / den
        fs = [-eps * (u.diff(x, 2) + u.diff(y, 2)) - (2 - x) * u.diff(x)
              - u.diff(y) + sy.Rational(3, 2) * u]
    elif spec.id == "cd2d_ex3":
        u = sy.sin(sy.pi * x) * sy.sin(sy.pi * y) \
            * (1 - sy.exp(-x / eps)) * (1 - sy.exp(-y / eps))
        fs = [-eps * (u.diff(x, 2) + u.diff(y, 2)) - u.diff(x) - u.diff(y) + u]
    else:
        raise AssertionError(spec.id)
    args = (x, y) if spec.dim == 2 else (x,)
    # mpmath backend: sympy factors exp((x-1)/eps) into exp(-1/eps)*exp(x/eps),
    # whose float64 evaluation overflows; mpf exponents are unbounded.
    funcs = [sy.lambdify(args, f, "mpmath") for f in fs]

    def vectorized(fn):
        def call(points):
            with mpmath.workdps(50):
                return np.array([float(fn(*[mpmath.mpf(v) for v in p])) for p in points])
        return call

    return [vectorized(fn) for fn in funcs]


def interior_points(spec, n, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n, spec.dim))
    near = []
    for _, blend in spec.recipe:
        for scale in (0.5, 1.0, 2.0, 5.0):
            p = np.full(spec.dim, 0.5)
            dist = scale * blend.delta
            p[blend.axis] = dist if blend.face == 0.0 else 1.0 - dist
            near.append(p)
    return pts, np.array(near)


@pytest.mark.parametrize("pid", ALL_IDS)
def test_manufactured_source_matches_symbolic_oracle(pid):
    spec = get_problem(pid)
    fs = sympy_source(spec)
    bulk, near = interior_points(spec, 1000)

    def check(points, tol):
        got = manufactured_source(spec, points)
        for c, f in enumerate(fs):
            want = f(points)
            scale = np.maximum(1.0, np.abs(want))
            err = np.abs(got[:, c] - want) / scale
            assert err.max() <= tol, f"{pid} comp {c}: worst rel err {err.max():.3g}"

    check(bulk, 1e-6)
    check(near, 1e-4)  # derivative magnitudes reach O(1/eps^2) inside layers


@pytest.mark.parametrize("pid", ALL_IDS)
def test_analytic_residual_vanishes(pid):
    spec = get_problem(pid)
    bulk, _ = interior_points(spec, 200, seed=3)
    res = residual(spec, analytic_jets(spec, bulk), bulk)
    f = manufactured_source(spec, bulk)
    assert np.abs(res).max() <= 1e-6 * max(1.0, np.abs(f).max())


@pytest.mark.parametrize("pid", [p for p in ALL_IDS if p != "cd2d_ex2"])
def test_boundary_values_vanish(pid):
    spec = get_problem(pid)
    pts = boundary_points(spec.dim, 50).points
    assert np.abs(analytic_solution(spec, pts)).max() <= 1e-12


def test_cd2d_ex2_boundary_anomaly():
    # The closed form vanishes on x=0, x=1, y=0 but NOT on y=1, where it
    # equals cos(pi x / 2) - exp(-x/eps); training still uses zero data
    # there, absorbed by the auxiliary y=1 inner net.
    spec = get_problem("cd2d_ex2")
    t = np.linspace(0.0, 1.0, 33)
    for face in [np.column_stack([np.zeros_like(t), t]),
                 np.column_stack([np.ones_like(t), t]),
                 np.column_stack([t, np.zeros_like(t)])]:
        assert np.abs(analytic_solution(spec, face)).max() <= 1e-12
    top = np.column_stack([t, np.ones_like(t)])
    vals = analytic_solution(spec, top)[:, 0]
    expect = np.cos(np.pi * t / 2) - np.exp(-t / spec.epsilon)
    assert np.allclose(vals, expect, rtol=1e-12, atol=1e-12)
    assert np.abs(vals).max() > 0.9  # genuinely non-zero trace


class TestAnalyticValues:
    def test_cd1d_right_boundary(self):
        spec = get_problem("cd1d")
        assert analytic_solution(spec, [[1.0]])[0, 0] == 0.0

    def test_rd_coupled_left_boundary_exact_zero(self):
        spec = get_problem("rd_coupled")
        assert analytic_solution(spec, [[0.0]])[0, 1] == 0.0

    def test_cd_coupled_midpoint(self):
        spec = get_problem("cd_coupled")
        u = analytic_solution(spec, [[0.5]])
        assert u[0, 0] == pytest.approx(2.0 - np.sqrt(2.0), rel=1e-12)

    def test_rd1d_symmetric_in_dyadic_pairs(self):
        # dyadic x makes both x-1 and 1-x exact, so the mirrored terms
        # evaluate identically; includes points inside the layers
        spec = get_problem("rd1d")
        xs = np.concatenate([np.arange(1, 64) / 64.0, [2.0**-20, 2.0**-24, 2.0**-30]])
        mirrored = 1.0 - xs
        u = analytic_solution(spec, xs[:, None])[:, 0]
        v = analytic_solution(spec, mirrored[:, None])[:, 0]
        assert np.abs(u - v).max() <= 1e-12


class TestManufacturedValues:
    def test_cd1d_source_at_left_boundary(self):
        # y' dominates at x=0: f(0) = cos(0) up to underflowed layer terms
        spec = get_problem("cd1d")
        assert abs(manufactured_source(spec, [[0.0]])[0, 0] - 1.0) <= 1e-4

    def test_rd1d_source_away_from_layers(self):
        # u(0.5) ~ -1 and u''(0.5) underflows, so f(0.5) = 8 * (-1)
        spec = get_problem("rd1d")
        assert manufactured_source(spec, [[0.5]])[0, 0] == pytest.approx(-8.0, abs=1e-8)

    def test_cd2d_ex3_source_nonzero_on_inflow_boundary(self):
        # u vanishes on x=0/y=0 faces but its convection image does not
        spec = get_problem("cd2d_ex3")
        pt = np.array([[0.5, 0.0]])
        assert analytic_solution(spec, pt)[0, 0] == 0.0
        assert abs(manufactured_source(spec, pt)[0, 0]) > 1e-3


class TestResidualTrivials:
    def zero_jets(self, spec, points):
        n, d = points.shape
        return JetBatch(np.zeros((n, spec.n_components)),
                        np.zeros((d, n, spec.n_components)),
                        np.zeros((d, n, spec.n_components)))

    def test_rd1d_zero_field(self):
        spec = get_problem("rd1d")
        pts = np.array([[0.5]])
        res = residual(spec, self.zero_jets(spec, pts), pts)
        assert res[0, 0] == pytest.approx(-manufactured_source(spec, pts)[0, 0], abs=0)

    def test_rd_coupled_zero_field(self):
        spec = get_problem("rd_coupled")
        pts = np.array([[0.3], [0.8]])
        res = residual(spec, self.zero_jets(spec, pts), pts)
        assert np.array_equal(res, -manufactured_source(spec, pts))


def test_operator_adjoint_is_transpose():
    rng = np.random.default_rng(17)
    for pid in ALL_IDS:
        spec = get_problem(pid)
        n = 9
        pts = rng.uniform(0.1, 0.9, size=(n, spec.dim))
        batch = JetBatch(rng.normal(size=(n, spec.n_components)),
                         rng.normal(size=(spec.dim, n, spec.n_components)),
                         rng.normal(size=(spec.dim, n, spec.n_components)))
        rbar = rng.normal(size=(n, spec.n_components))
        lhs = float((apply_operator(spec, batch, pts) * rbar).sum())
        wv, wg, wh = operator_adjoint(spec, pts, rbar)
        rhs = float((wv * batch.value).sum() + (wg * batch.grad).sum()
                    + (wh * batch.hess).sum())
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_registry_validation():
    with pytest.raises(ConfigurationError):
        get_problem("bogus")
    with pytest.raises(ConfigurationError):
        get_problem("cd1d", mu=1e-3)  # no mu parameter on scalar problems
    with pytest.raises(ConfigurationError):
        get_problem("cd1d", epsilon=2.0)
    with pytest.raises(ConfigurationError):
        get_problem("cd_coupled", mu=-1.0)
    assert get_problem("cd-coupled").id == "cd_coupled"  # CLI spelling accepted


def test_default_parameters():
    spec = get_problem("rd_coupled")
    assert spec.epsilon == 1e-10 and spec.mu == 1e-8
    assert len(spec.recipe) == 4 and spec.n_components == 2
    assert get_problem("cd1d").epsilon == 1e-5
    assert get_problem("cd_coupled").epsilon == 1e-7
    assert get_problem("cd2d_ex2").dim == 2
    assert len(get_problem("cd2d_ex2").recipe) == 3  # includes auxiliary y=1 net
    assert len(get_problem("cd2d_ex3").recipe) == 2
