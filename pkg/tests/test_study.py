import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshfree import Ball, ConfigError, RbfFd, Polyharmonic
from meshfree.study import (
    TimingBreakdown,
    classic_setups,
    fit_order,
    grid_laplacian_error,
    order_vs_nodes,
    poisson_pipeline,
    shell_problem,
)


def test_fit_order_exact_on_synthetic_data():
    h = np.array([0.1, 0.05, 0.025, 0.0125])
    q = 2.37
    assert abs(fit_order(h, 3.1 * h**q) - q) < 1e-9


@given(st.floats(0.25, 4.0), st.floats(0.01, 10.0))
def test_fit_order_property(q, c):
    h = np.array([0.2, 0.1, 0.05])
    assert abs(fit_order(h, c * h**q) - q) < 1e-9


def test_fit_order_rejects_bad_input():
    with pytest.raises(ConfigError):
        fit_order([0.1], [1.0])
    with pytest.raises(ConfigError):
        fit_order([0.1, 0.05], [1.0, 0.0])


def test_order_vs_nodes_inverts_dimension():
    n = np.array([100, 400, 1600])
    for dim in (2, 3):
        e = 2.0 * n ** (-2.0 / dim)
        assert abs(order_vs_nodes(n, e, dim) - 2.0) < 1e-9


def test_shell_problem_manufactured_pair():
    shape, u0, f = shell_problem(2)
    assert shape.contains([[0.75, 0.0]]).all()
    assert not shape.interior_contains([[0.25, 0.0]]).any()
    # f is minus the laplacian of u0: check at one point by differences
    p = np.array([[0.6, 0.3]])
    eps = 1e-5
    lap = 0.0
    for a in range(2):
        dp = np.zeros(2)
        dp[a] = eps
        lap += (u0(p + dp) - 2 * u0(p) + u0(p - dp))[0] / eps**2
    assert f(p)[0] == pytest.approx(-lap, rel=1e-4)


def test_timing_breakdown_total():
    t = TimingBreakdown(domain_discretization=1.0, iterative_solve=0.5)
    assert t.total() == 1.5
    assert set(t.as_dict()) == {
        "domain_discretization", "stencil_selection", "weight_computation",
        "matrix_assembly", "preconditioner", "iterative_solve",
        "error_computation",
    }


def test_classic_setups_catalog():
    setups = classic_setups()
    assert list(setups) == [
        "gauss-wide-lu", "gauss-raw-lu", "gauss-raw-svd",
        "wls-quad-svd", "phs5-aug2-lu",
    ]
    for eng, n in setups.values():
        assert n in (9, 12)


def test_grid_laplacian_error_small_grid():
    setups = classic_setups()
    eng, n = setups["wls-quad-svd"]
    e = grid_laplacian_error(eng, n, 10)
    assert 1e-4 < e < 1.0


def test_poisson_pipeline_record():
    shape, u0, f = shell_problem(2)
    record, u, nodes = poisson_pipeline(
        shape, u0, f, 0.15, stencil_size=9,
        engine=RbfFd(Polyharmonic(3), degree=2, solver="lu"), seed=0,
    )
    assert record.n_nodes == len(nodes) > 100
    assert 0 < record.e_inf < 0.1
    assert all(v >= 0 for v in record.timings.as_dict().values())
    assert record.timings.total() > 0
    assert np.max(np.abs(u - u0(nodes.positions))) == record.e_inf
