"""Explicit time stepping and the implicit steady driver."""

import numpy as np
import pytest

from meshfree import (
    Ball,
    ConfigError,
    GaussianWeight,
    InstabilityError,
    WeightedLeastSquares,
    compute_weights,
    discretize_boundary,
    fill_interior,
    find_closest_stencils,
)
from meshfree.drivers import run_heat_explicit, solve_poisson_implicit


def disc(h=0.15, seed=1):
    shape = Ball([0.0, 0.0], 1.0)
    nodes = discretize_boundary(shape, h, seed=seed)
    nodes = fill_interior(nodes, shape, h, seed=seed)
    nodes = find_closest_stencils(nodes, 9)
    store = compute_weights(nodes, WeightedLeastSquares(2), ["laplacian", "gradient"])
    return nodes, store


def test_dirichlet_values_assigned_exactly():
    nodes, store = disc()
    dt = 1e-4
    steps = 7
    g = lambda pts, t: t * pts[:, 0]
    u = run_heat_explicit(nodes, store, dt=dt, steps=steps, dirichlet={-1: g}, initial=0.0)
    idx = nodes.boundary_indices()
    want = g(nodes.positions[idx], steps * dt)
    assert np.array_equal(u[idx], want)


def test_zero_steps_returns_initial_field():
    nodes, store = disc()
    init = lambda pts: pts[:, 0] ** 2
    u = run_heat_explicit(nodes, store, dt=0.1, steps=0, initial=init)
    assert np.array_equal(u, init(nodes.positions))


def test_decay_toward_steady_state():
    # constant-weight fits can put operator eigenvalues in the right half
    # plane on scattered nodes; the gaussian-weighted fit keeps the
    # spectrum dissipative, which time stepping needs
    nodes, _ = disc(h=0.12, seed=0)
    store = compute_weights(
        nodes, WeightedLeastSquares(2, GaussianWeight(1.0), solver="svd"),
        ["laplacian", "gradient"],
    )
    # Euler-stable step from the assembled operator itself: row sums bound
    # the spectrum (Gershgorin), and dt * |lambda| must stay below 2
    lap = store.matrix("laplacian")
    bound = float(np.max(np.abs(lap).sum(axis=1)))
    dt = 1.0 / bound
    steps = int(3.0 / dt)
    u = run_heat_explicit(
        nodes, store, dt=dt, steps=steps, source=lambda p, t: 5.0,
        dirichlet={-1: 0.0}, initial=0.0,
    )
    res = solve_poisson_implicit(nodes, store, terms=[(-1.0, "laplacian")],
                                 rhs=5.0, dirichlet={-1: 0.0})
    assert np.max(np.abs(u - res.u)) < 1e-4


def test_step_halving_richardson_ratio():
    nodes, store = disc(h=0.2, seed=2)
    T = 0.02
    init = lambda pts: np.cos(np.pi * pts[:, 0] / 2.0) * np.cos(np.pi * pts[:, 1] / 2.0)

    def final(n_steps):
        return run_heat_explicit(nodes, store, dt=T / n_steps, steps=n_steps,
                                 dirichlet={-1: 0.0}, initial=init)

    ref = final(3200)
    e1 = np.max(np.abs(final(100) - ref))
    e2 = np.max(np.abs(final(200) - ref))
    assert 1.5 <= e1 / e2 <= 2.5  # forward Euler is first order in dt


def test_instability_detected_with_guideline():
    nodes, store = disc()
    with pytest.raises(InstabilityError, match="dt <= h_min"):
        run_heat_explicit(nodes, store, dt=1.0, steps=200,
                          dirichlet={-1: 0.0}, initial=lambda p: p[:, 0])


def test_argument_validation():
    nodes, store = disc()
    with pytest.raises(ConfigError):
        run_heat_explicit(nodes, store, dt=0.0, steps=5)
    with pytest.raises(ConfigError, match="no node"):
        run_heat_explicit(nodes, store, dt=1e-4, steps=1, dirichlet={-9: 0.0})


def test_neumann_row_uses_previous_field():
    # a neumann node's update must be computable from known values only:
    # start from a field whose flux defect is nonzero and verify one step
    shape = Ball([0.0, 0.0], 1.0) - Ball([0.0, 0.0], 0.4, tag=-2)
    nodes = discretize_boundary(shape, 0.12, seed=0)
    nodes = fill_interior(nodes, shape, 0.12, seed=0)
    nodes = find_closest_stencils(nodes, 9)
    store = compute_weights(
        nodes,
        {
            "laplacian": WeightedLeastSquares(2, weight=GaussianWeight(1.0), solver="svd"),
            "gradient": WeightedLeastSquares(1, weight=GaussianWeight(1.0), solver="svd"),
        },
        ["laplacian", "gradient"],
    )
    u0 = nodes.positions[:, 0] ** 2
    u1 = run_heat_explicit(nodes, store, dt=1e-5, steps=1,
                           dirichlet={-1: 1.0}, neumann={-2: 0.0}, initial=u0)
    seen = u0.copy()
    seen[nodes.select(-1)] = 1.0  # dirichlet data is applied before stepping
    for i in nodes.select(-2):
        i = int(i)
        expect = store.neumann_value(seen, i, nodes.normal(i), 0.0)
        assert u1[i] == expect
