"""RBF collocation weights with monomial augmentation."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meshfree import (
    ConfigError,
    Gaussian,
    Laplacian,
    FirstDerivative,
    NumericalError,
    Polyharmonic,
    RbfFd,
)
from meshfree.approx.basis import MonomialBasis


def random_stencil(seed, n=12, dim=2, spread=0.1):
    rng = np.random.default_rng(seed)
    pts = spread * rng.standard_normal((n, dim))
    pts[0] = 0.0
    return pts


def monomial_mismatch(eng, pts, center, op, degree):
    basis = MonomialBasis(pts.shape[1], degree)
    w = eng.weights(pts, center, op)
    return np.max(np.abs(w @ basis.eval(pts) - basis.apply(op, center[None, :])[0]))


@pytest.mark.parametrize("dim", [2, 3])
def test_augmentation_forces_monomial_exactness(dim):
    eng = RbfFd(Polyharmonic(5), degree=2, scale="support")
    for seed in range(10):
        pts = random_stencil(seed, n=14, dim=dim)
        err = monomial_mismatch(eng, pts, np.zeros(dim), Laplacian(), 2)
        assert err < 1e-8, f"seed {seed}: {err}"


def test_exactness_holds_for_first_derivatives():
    eng = RbfFd(Polyharmonic(3), degree=2)
    pts = random_stencil(3)
    err = monomial_mismatch(eng, pts, np.zeros(2), FirstDerivative(1), 2)
    assert err < 1e-9


def test_weights_scale_equivariant():
    # phs has no shape parameter, so the scaled and raw saddle systems
    # describe the same physical weights
    pts = random_stencil(7)
    a = RbfFd(Polyharmonic(5), degree=2, scale="nearest").weights(pts, np.zeros(2), Laplacian())
    b = RbfFd(Polyharmonic(5), degree=2, scale="none").weights(pts, np.zeros(2), Laplacian())
    assert np.allclose(a, b, rtol=1e-8)


def test_weights_translation_invariant():
    pts = random_stencil(9)
    shift = np.array([4.0, -1.0])
    a = RbfFd(Polyharmonic(3), degree=1).weights(pts, np.zeros(2), Laplacian())
    b = RbfFd(Polyharmonic(3), degree=1).weights(pts + shift, shift, Laplacian())
    assert np.allclose(a, b, rtol=1e-9)


def test_pure_rbf_collocates_the_basis_functions():
    # without augmentation the weights must reproduce L phi(. - x_j)
    # exactly for every stencil node x_j; the right side comes from the
    # closed-form gaussian laplacian written out here
    sigma = 1.4
    pts = random_stencil(2, n=9, spread=0.3)
    eng = RbfFd(Gaussian(sigma), degree=-1, scale="none", solver="lu")
    w = eng.weights(pts, np.zeros(2), Laplacian())

    def lap_phi(r, d=2):
        return (4.0 * r**2 / sigma**4 - 2.0 * d / sigma**2) * np.exp(-(r**2) / sigma**2)

    for j in range(len(pts)):
        lhs = w @ np.exp(-np.sum((pts - pts[j]) ** 2, axis=1) / sigma**2)
        assert lhs == pytest.approx(lap_phi(np.linalg.norm(pts[j])), rel=1e-8, abs=1e-10)


def test_even_exponent_polyharmonic_works():
    eng = RbfFd(Polyharmonic(4), degree=2)
    pts = random_stencil(5)
    err = monomial_mismatch(eng, pts, np.zeros(2), Laplacian(), 2)
    assert err < 1e-8


def test_too_few_nodes_for_augmentation():
    pts = random_stencil(0, n=5)
    with pytest.raises(NumericalError, match="at least 6"):
        RbfFd(Polyharmonic(3), degree=2).weights(pts, np.zeros(2), Laplacian())


def test_unknown_solver_rejected():
    eng = RbfFd(Polyharmonic(3), degree=2, solver="bogus")
    with pytest.raises(ConfigError):
        eng.weights(random_stencil(1), np.zeros(2), Laplacian())


def test_degenerate_geometry_raises():
    pts = np.zeros((6, 2))
    with pytest.raises(NumericalError):
        RbfFd(Polyharmonic(3), degree=1).weights(pts, np.zeros(2), Laplacian())


@given(st.integers(0, 10_000))
def test_property_quadratics_are_differentiated_exactly(seed):
    pts = random_stencil(seed, n=13)
    eng = RbfFd(Polyharmonic(5), degree=2, scale="support")
    err = monomial_mismatch(eng, pts, np.zeros(2), Laplacian(), 2)
    assert err < 1e-7
