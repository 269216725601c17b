import numpy as np
import pytest

from sturmkit import functions as fn

V = np.linspace(-1.3, 1.3, 41)


def fd_derivatives(f, v, h=1e-4):
    d1 = (f(v + h) - f(v - h)) / (2 * h)
    d2 = (f(v + h) - 2 * f(v) + f(v - h)) / h ** 2
    return d1, d2


@pytest.mark.parametrize("f", [
    fn.polynomial([1, 2j, -3, 0.5]),
    fn.sine(2.3, 0.4, 1 - 1j),
    fn.cosine(1.7, -0.2, 2.0),
    fn.exponential(0.3 + 2j),
    fn.product(fn.bump(0.8), fn.exponential(1j)),
    fn.add(fn.sine(1.0), fn.scale(2j, fn.polynomial([0, 1]))),
], ids=lambda f: f.label)
def test_analytic_derivatives_match_finite_differences(f):
    d1, d2 = fd_derivatives(f, V)
    np.testing.assert_allclose(f.d1(V), d1, atol=1e-6 * max(1, np.abs(d1).max()))
    np.testing.assert_allclose(f.d2(V), d2, atol=1e-4 * max(1, np.abs(d2).max()))


def test_bump_vanishes_exactly_at_ends():
    b = fn.bump(0.82564527117655628)
    assert b(0.82564527117655628) == 0 and b(-0.82564527117655628) == 0


def test_scalar_and_array_evaluation():
    f = fn.constant(2.0)
    assert f(0.5) == 2.0
    assert f(V).shape == V.shape
