"""Differential operators applied to monomials and radial profiles.

The radial profiles are checked against central finite differences of
their own ``value`` method, an oracle independent of the hand-derived
formulas in the implementation.
"""

import numpy as np
import pytest

from meshfree import (
    Directional,
    FirstDerivative,
    Gaussian,
    Identity,
    InverseMultiquadric,
    Laplacian,
    Multiquadric,
    Polyharmonic,
    SecondDerivative,
)
from meshfree.approx.basis import MonomialBasis, graded_lex_exponents, monomial_count


def test_monomial_counts():
    assert monomial_count(2, 2) == 6
    assert monomial_count(2, 3) == 10
    assert monomial_count(0, 3) == 1
    assert len(graded_lex_exponents(3, 2)) == 10


def test_graded_lex_starts_with_constant():
    expo = graded_lex_exponents(2, 2)
    assert tuple(expo[0]) == (0, 0)
    degrees = [sum(e) for e in expo]
    assert degrees == sorted(degrees)


def test_basis_eval_values():
    basis = MonomialBasis.from_exponents(2, [(0, 0), (1, 0), (0, 1), (2, 0)])
    vals = basis.eval(np.array([[2.0, 3.0]]))
    assert vals.tolist() == [[1.0, 2.0, 3.0, 4.0]]


def test_operator_on_monomials_closed_form():
    basis = MonomialBasis(2, 2)  # 1, x, y, x2, xy, y2
    p = np.array([[0.7, -0.4]])
    x, y = p[0]
    assert np.allclose(basis.apply(Identity(), p)[0], basis.eval(p)[0])
    assert np.allclose(basis.apply(FirstDerivative(0), p)[0], [0, 1, 0, 2 * x, y, 0])
    assert np.allclose(basis.apply(SecondDerivative(0, 0), p)[0], [0, 0, 0, 2, 0, 0])
    assert np.allclose(basis.apply(SecondDerivative(0, 1), p)[0], [0, 0, 0, 0, 1, 0])
    assert np.allclose(basis.apply(Laplacian(), p)[0], [0, 0, 0, 2, 0, 2])
    v = np.array([0.6, 0.8])
    want = v[0] * np.array([0, 1, 0, 2 * x, y, 0]) + v[1] * np.array([0, 0, 1, 0, x, 2 * y])
    assert np.allclose(basis.apply(Directional(v), p)[0], want)


def test_operator_algebra():
    basis = MonomialBasis(2, 2)
    p = np.array([[0.3, 0.2]])
    combo = 2.0 * Laplacian() + FirstDerivative(1)
    want = 2.0 * basis.apply(Laplacian(), p) + basis.apply(FirstDerivative(1), p)
    assert np.allclose(basis.apply(combo, p), want)
    assert combo.order == 2


PROFILES = [
    Gaussian(1.3),
    Multiquadric(0.9),
    InverseMultiquadric(1.1),
    Polyharmonic(3),
    Polyharmonic(5),
    Polyharmonic(4),  # even exponent carries the log factor
]


@pytest.mark.parametrize("rbf", PROFILES, ids=lambda r: repr(r))
def test_radial_profile_derivatives_match_finite_differences(rbf):
    r = np.array([0.4, 0.9, 1.7])
    eps = 1e-6
    d1 = (rbf.value(r + eps) - rbf.value(r - eps)) / (2 * eps)
    assert np.allclose(rbf.d1_over_r(r) * r, d1, rtol=1e-7, atol=1e-7)
    # wider step for the second difference: cancellation noise grows as 1/eps^2
    eps = 1e-4
    d2 = (rbf.value(r + eps) - 2 * rbf.value(r) + rbf.value(r - eps)) / eps**2
    assert np.allclose(rbf.d2(r), d2, rtol=1e-5, atol=1e-7)


def test_polyharmonic_values():
    assert Polyharmonic(3).value(2.0) == pytest.approx(8.0)
    assert Polyharmonic(4).value(2.0) == pytest.approx(16.0 * np.log(2.0))
    assert Polyharmonic(4).value(0.0) == 0.0


def test_laplacian_of_radial_profile():
    # lap phi(|x|) = phi'' + (d-1)/r phi', evaluated through apply_rbf
    rbf = Gaussian(1.0)
    diff = np.array([[0.3, -0.2, 0.1]])
    r = np.linalg.norm(diff[0])
    got = Laplacian().apply_rbf(rbf, diff)
    want = rbf.d2(r) + 2.0 / r * rbf.d1_over_r(r) * r
    assert np.allclose(got, want)


def test_first_derivative_of_radial_profile():
    rbf = Multiquadric(1.0)
    diff = np.array([[0.5, 0.1]])
    r = np.linalg.norm(diff[0])
    got = FirstDerivative(0).apply_rbf(rbf, diff)
    # d/dx0 phi(r) = x0 * phi'(r)/r
    assert np.allclose(got, diff[0, 0] * rbf.d1_over_r(r))
