import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from sturmkit.core import OperatorSpec, PhysicalConstants
from sturmkit.deficiency import (DeficiencyProblem, InconsistencyError, analyze_branch,
                                 boundary_determinant, convergence_order, deficiency_indices,
                                 exact_terminal, log_grid, mu_squared, principal_root, scan,
                                 shoot, shoot_deficiency)

SPEC = OperatorSpec.from_constants()
UNIT = PhysicalConstants()


def test_mu_squared_examples():
    assert mu_squared(DeficiencyProblem(math.pi, "plus"), UNIT) == -1 + 1j
    assert mu_squared(DeficiencyProblem(math.pi, "minus"), UNIT) == -1 - 1j


@given(st.floats(1e-6, 1e6), st.floats(0.1, 10), st.floats(0.1, 10))
def test_mu_squared_imaginary_part(lam, hbar, c):
    const = PhysicalConstants(hbar, c)
    z = mu_squared(DeficiencyProblem(lam, "plus"), const)
    assert z.imag == pytest.approx((c / hbar) ** 2 * lam / math.pi)
    assert z.imag != 0


@pytest.mark.parametrize("lam", [0.0, -1.0, float("nan")])
def test_problem_rejects_nonpositive_lambda(lam):
    with pytest.raises(ValueError):
        DeficiencyProblem(lam)


def test_problem_rejects_unknown_branch():
    with pytest.raises(ValueError):
        DeficiencyProblem(1.0, "up")


def test_principal_root_examples():
    assert principal_root(4) == 2
    assert principal_root(-1) == 1j
    assert principal_root(complex(-1, -0.0)) == 1j
    r = principal_root(-1 + 1j)
    # oracle: polar form
    polar = 2 ** 0.25 * cmath.exp(1j * math.atan2(1, -1) / 2)
    assert abs(r - polar) < 1e-15
    assert r.real > 0
    assert abs(r * r - (-1 + 1j)) <= 1e-14 * abs(-1 + 1j)
    with pytest.raises(ValueError):
        principal_root(0)


@given(st.complex_numbers(min_magnitude=1e-8, max_magnitude=1e8,
                          allow_nan=False, allow_infinity=False))
def test_principal_root_branch(z):
    r = principal_root(z)
    assert r.real >= 0
    if r.real == 0:
        assert r.imag > 0
    assert abs(r * r - z) <= 1e-14 * abs(z)


def test_boundary_determinant_examples():
    assert boundary_determinant(1.0, 1.0) == pytest.approx(-2 * math.sinh(2.0), abs=1e-14)
    assert boundary_determinant(1.0, 1.0).real == pytest.approx(-7.2537, abs=1e-4)
    assert abs(boundary_determinant(1j * math.pi / (2 * SPEC.v_c), SPEC.v_c)) < 1e-14
    mu = principal_root(-1 + 1j)
    assert abs(boundary_determinant(mu, SPEC.v_c)) > 1


def test_determinant_against_explicit_2x2():
    mu = principal_root(mu_squared(DeficiencyProblem(2.5, "minus"), UNIT))
    a = SPEC.v_c
    m = np.array([[np.exp(-mu * a), np.exp(mu * a)], [np.exp(mu * a), np.exp(-mu * a)]])
    assert abs(np.linalg.det(m) - boundary_determinant(mu, a)) < 1e-13


def test_shoot_forced_mu():
    assert shoot(1.0, 1.0, 10_000) == pytest.approx(math.sinh(2.0), abs=1e-8)
    assert math.sinh(2.0) == pytest.approx(3.62686, abs=1e-5)


def test_shoot_rejects_few_steps():
    with pytest.raises(ValueError):
        shoot(1.0, 1.0, 99)


def test_shoot_deficiency_no_dirichlet_solution():
    terminal = shoot_deficiency(DeficiencyProblem(math.pi, "plus"), SPEC)
    assert abs(terminal) > 0.1
    mu = principal_root(-1 + 1j)
    # the two formulations are tied by det = -2 mu psi(v_c)
    assert abs(-2 * mu * terminal - boundary_determinant(mu, SPEC.v_c)) < 1e-10


def test_exact_terminal_against_mpmath():
    mu = principal_root(-1 + 1j)
    ref = mpmath.sinh(2 * mpmath.mpc(mu) * SPEC.v_c) / mpmath.mpc(mu)
    assert abs(exact_terminal(mu, SPEC.v_c) - complex(ref)) < 1e-15


def test_deficiency_indices_zero():
    n_plus, n_minus, (rp, rm) = deficiency_indices(SPEC, 1.0)
    assert (n_plus, n_minus) == (0, 0)
    assert rp.sign == "plus" and rm.sign == "minus"
    assert abs(rp.mu ** 2 - rp.mu_squared) <= 1e-14 * abs(rp.mu_squared)


@pytest.mark.parametrize("lam", [0.1, 1, 10, 100])
def test_indices_independent_of_lambda(lam):
    assert deficiency_indices(SPEC, lam)[:2] == (0, 0)


def test_deficiency_rejects_negative_lambda():
    with pytest.raises(ValueError):
        deficiency_indices(SPEC, -1.0)


def test_branch_conjugacy_exact():
    for lam in log_grid(count=10):
        _, _, (p, m) = deficiency_indices(SPEC, lam)
        assert m.mu == p.mu.conjugate()
        assert m.determinant == p.determinant.conjugate()


def test_nondegeneracy_on_log_grid():
    reports = scan(SPEC, log_grid())
    assert len(reports) == 100
    assert all(r.index == 0 for r in reports)
    assert min(abs(r.determinant) / 2 for r in reports) > 1e-2


def test_scan_sorted_and_deduplicated():
    reports = scan(SPEC, [10.0, 0.5, 10.0])
    assert [(r.lam, r.sign) for r in reports] == [
        (0.5, "plus"), (0.5, "minus"), (10.0, "plus"), (10.0, "minus")]


def test_shooting_convergence_order():
    mu = principal_root(mu_squared(DeficiencyProblem(300.0, "plus"), UNIT))
    errors, orders, k_fit = convergence_order(mu, SPEC.v_c)
    assert all(3.8 <= o <= 4.2 for o in orders)
    for n, e in zip((100, 1000, 10_000), errors):
        assert e <= 2 * k_fit * n ** -4


def test_vanishing_determinant_gives_index_one():
    # Non-canonical interval v_c = pi/2 with tiny lambda: mu ~ i, so
    # 2 mu v_c sits next to i*pi where sinh vanishes.
    lam = 1e-9
    spec = OperatorSpec.from_constants(v_c=math.pi / 2)
    index, mu, _, det, terminal, scale = analyze_branch(spec, DeficiencyProblem(lam))
    assert abs(det) < 1e-8 * scale
    assert index == 1


def test_inconsistency_is_raised(monkeypatch):
    import sturmkit.deficiency as d
    monkeypatch.setattr(d, "shoot", lambda mu, v_c, steps=10_000: 0j)
    with pytest.raises(InconsistencyError):
        d.deficiency_indices(SPEC, 1.0)
