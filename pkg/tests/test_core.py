import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sturmkit import functions as fn
from sturmkit.core import (IntervalDomain, OperatorSpec, PhysicalConstants,
                           SymmetricTridiagonal, apply_operator, build_grid,
                           critical_velocity, deformation_value, discretize)

UNIT = PhysicalConstants()


@pytest.fixture
def canonical():
    return OperatorSpec.from_constants()


def test_constants_reject_nonpositive():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            PhysicalConstants(hbar=bad)
        with pytest.raises(ValueError):
            PhysicalConstants(c=bad)


def test_critical_velocity_unit_speed():
    v = critical_velocity(UNIT)
    oracle = float(mpmath.sqrt(1 - 1 / mpmath.mpf(mpmath.pi)))
    assert v == pytest.approx(oracle, rel=1e-15)
    assert abs(v - 0.825645) <= 1e-6
    # printed value is rounded to four digits
    assert abs(v - 0.8257) < 6e-5


def test_critical_velocity_scales_linearly():
    assert critical_velocity(PhysicalConstants(c=2.0)) == 2.0 * critical_velocity(UNIT)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_deformation_is_one_at_critical_velocity(c):
    const = PhysicalConstants(c=c)
    assert deformation_value(critical_velocity(const), const) == pytest.approx(1.0, abs=1e-15)


def test_deformation_anchors():
    assert deformation_value(0.0, UNIT) == math.pi
    assert deformation_value(1.0, UNIT) == 0.0
    assert deformation_value(-1.0, UNIT) == 0.0


def test_deformation_even_exactly():
    rng = np.random.default_rng(5)
    v = rng.uniform(-20, 20, 1000)
    assert np.array_equal(deformation_value(v, UNIT), deformation_value(-v, UNIT))


@given(st.floats(0.1, 10.0), st.floats(-1.0, 1.0))
def test_deformation_range_on_admissible_interval(c, t):
    const = PhysicalConstants(c=c)
    v = t * critical_velocity(const)
    val = deformation_value(v, const)
    assert 1.0 - 1e-12 <= val <= math.pi


def test_canonical_spec_flag():
    spec = OperatorSpec.from_constants(hbar=0.5, c=2.0)
    assert spec.canonical
    assert spec.v_c == critical_velocity(spec.constants)
    other = OperatorSpec.from_constants(v_c=1.0)
    assert not other.canonical and other.v_c == 1.0
    with pytest.raises(ValueError):
        OperatorSpec(UNIT, IntervalDomain(1.0), canonical=True)


def test_apply_operator_constant(canonical):
    one = fn.constant(1.0)
    v = np.linspace(-canonical.v_c, canonical.v_c, 7)
    np.testing.assert_allclose(apply_operator(one, v, canonical), math.pi)


def test_apply_operator_sine_eigenrelation(canonical):
    k = 2.7
    f = fn.sine(k, canonical.v_c)
    v = np.linspace(-canonical.v_c, canonical.v_c, 11)
    expected = math.pi * (1 - canonical.ratio * k * k) * f(v)
    np.testing.assert_allclose(apply_operator(f, v, canonical), expected, atol=1e-14)


def test_apply_operator_quadratic():
    spec = OperatorSpec.from_constants()
    f = fn.polynomial([0, 0, 1])
    for v in (-0.5, 0.0, 0.3):
        assert apply_operator(f, v, spec) == pytest.approx(math.pi * (v * v + 2))


def test_apply_operator_needs_second_derivative(canonical):
    f = fn.TestFunction(lambda v: v, lambda v: 1.0, None, "no-f''")
    with pytest.raises(ValueError):
        apply_operator(f, 0.0, canonical)


@settings(max_examples=50)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.floats(-0.8, 0.8), st.floats(0.5, 6.0))
def test_apply_operator_linear(a, b, v, k):
    spec = OperatorSpec.from_constants()
    f = fn.polynomial([1, -2j, 0.5, 3])
    g = fn.cosine(k, 0.1, 1 + 1j)
    lhs = apply_operator(fn.add(fn.scale(a, f), fn.scale(b, g)), v, spec)
    rhs = a * apply_operator(f, v, spec) + b * apply_operator(g, v, spec)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_build_grid_examples():
    g = build_grid(IntervalDomain(1.0), 1)
    assert g.h == 1.0 and g.nodes.tolist() == [0.0]
    g = build_grid(IntervalDomain(1.0), 3)
    assert g.h == 0.5
    np.testing.assert_allclose(g.nodes, [-0.5, 0.0, 0.5], atol=1e-16)


@given(st.integers(1, 500), st.floats(0.1, 5.0))
def test_build_grid_invariants(n, v_c):
    g = build_grid(IntervalDomain(v_c), n)
    assert len(g.nodes) == n
    assert g.h == pytest.approx(2 * v_c / (n + 1))
    assert g.nodes.min() == pytest.approx(-v_c + g.h)
    assert g.nodes.max() == pytest.approx(v_c - g.h)
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(np.abs(g.nodes) < v_c)


def test_build_grid_rejects_zero():
    with pytest.raises(ValueError):
        build_grid(IntervalDomain(1.0), 0)


def test_discretize_stencil_values():
    spec = OperatorSpec.from_constants(v_c=1.0)
    m = discretize(spec, build_grid(spec.domain, 1))
    assert m.diag == pytest.approx(-math.pi) and m.off == pytest.approx(math.pi)
    m = discretize(spec, build_grid(spec.domain, 3))
    assert m.diag == pytest.approx(-7 * math.pi) and m.off == pytest.approx(4 * math.pi)
    assert m.top == math.pi


def test_discretize_rejects_foreign_grid(canonical):
    with pytest.raises(ValueError):
        discretize(canonical, build_grid(IntervalDomain(2.0), 5))


def test_matrix_is_symmetric_and_matvec_matches_dense(canonical):
    m = discretize(canonical, build_grid(canonical.domain, 9))
    a = m.dense()
    assert np.array_equal(a, a.T)
    x = np.random.default_rng(0).normal(size=9)
    np.testing.assert_allclose(m.matvec(x), a @ x, rtol=1e-12, atol=1e-12 * np.abs(a).max())


def test_negative_offdiagonal_matvec():
    m = SymmetricTridiagonal(diag=1.0, off=-2.0, n=6)
    x = np.arange(6.0)
    np.testing.assert_allclose(m.matvec(x), m.dense() @ x, atol=1e-13)


def test_matrix_on_sampled_sine(canonical):
    n = 200
    grid = build_grid(canonical.domain, n)
    m = discretize(canonical, grid)
    x = np.sin(math.pi * (grid.nodes + canonical.v_c) / (2 * canonical.v_c))
    # closed form for the Toeplitz matrix
    lam = math.pi * (1 - canonical.ratio * 4 / grid.h ** 2 * math.sin(math.pi / (2 * (n + 1))) ** 2)
    np.testing.assert_allclose(m.matvec(x), lam * x, atol=1e-9)
    # and against a dense LAPACK solve
    assert np.linalg.eigvalsh(m.dense()).max() == pytest.approx(lam, rel=1e-9)


def test_stencil_consistency_is_second_order(canonical):
    # v^3 alone is reproduced exactly by the central difference, so a
    # Dirichlet quintic with nonzero fourth derivative is used.
    f = fn.product(fn.polynomial([0, 0, 0, 1]), fn.bump(canonical.v_c))
    errs, hs = [], []
    for n in (49, 99, 199, 399):
        grid = build_grid(canonical.domain, n)
        m = discretize(canonical, grid)
        errs.append(np.max(np.abs(m.matvec(f(grid.nodes).real)
                                  - apply_operator(f, grid.nodes, canonical).real)))
        hs.append(grid.h)
    orders = np.diff(np.log(errs)) / np.diff(np.log(hs))
    assert np.all((orders >= 1.8) & (orders <= 2.2))
