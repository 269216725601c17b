"""Check suites behind the CLI subcommands.

Each ``*_suite`` function returns a :class:`SuiteResult`: a JSON-ready
payload, one flat table for CSV output, and a list of :class:`Check`
verdicts carrying the numbers needed to re-derive them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from . import functions as fn
from .core import (OperatorSpec, PhysicalConstants, apply_operator, build_grid,
                   critical_velocity, deformation_value, discretize)
from .deficiency import (BRANCHES, DeficiencyProblem, boundary_determinant,
                         convergence_order, log_grid, mu_squared, principal_root, scan)
from .spectrum import (analytic_eigenfunction, analytic_eigenvalue, char_poly_roots,
                       compute_spectrum, convergence_study, node_count, quadratic_fit,
                       tridiagonal_eigenvalue, bisect_eigenvalues)
from .symmetry import (boundary_term, dirichlet_corpus, general_corpus,
                       gauss_legendre_rule, inner_product, run_corpus, symmetry_residual)

VC_RATIO_REFERENCE = 0.825645
SHOOTING_LAMBDA = 300.0
SHOOTING_STEPS = (100, 1000, 10_000)
CONVERGENCE_DIVISORS = (8, 4, 2, 1)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: Any
    relation: str
    bound: Any
    passed: bool

    def as_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "check": self.name, "value": self.value,
                "relation": self.relation, "bound": self.bound, "passed": self.passed}


@dataclass
class SuiteResult:
    payload: Dict[str, Any] = field(default_factory=dict)
    header: List[str] = field(default_factory=list)
    rows: List[List[Any]] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)


class _Checks(list):
    def __init__(self, suite: str):
        super().__init__()
        self.suite = suite

    def le(self, name, value, bound):
        self.append(Check(self.suite, name, float(value), "<=", bound, bool(value <= bound)))

    def gt(self, name, value, bound):
        self.append(Check(self.suite, name, float(value), ">", bound, bool(value > bound)))

    def lt(self, name, value, bound):
        self.append(Check(self.suite, name, float(value), "<", bound, bool(value < bound)))

    def within(self, name, value, lo, hi):
        self.append(Check(self.suite, name, float(value), "in", [lo, hi],
                          bool(lo <= value <= hi)))

    def eq(self, name, value, expected):
        self.append(Check(self.suite, name, value, "==", expected, value == expected))


# -- operator ------------------------------------------------------------------

def info_suite(spec: OperatorSpec) -> SuiteResult:
    const = spec.constants
    v_crit = critical_velocity(const)
    c0 = deformation_value(0.0, const)
    cvc = deformation_value(v_crit, const)
    checks = _Checks("operator")
    checks.within("critical_velocity_ratio", v_crit / const.c,
                  VC_RATIO_REFERENCE - 1e-6, VC_RATIO_REFERENCE + 1e-6)
    checks.le("deformation_at_critical_velocity_minus_one", abs(cvc - 1.0), 1e-12)
    checks.le("deformation_at_zero_minus_pi", abs(c0 - math.pi), 1e-12)
    checks.le("deformation_at_plus_minus_c",
              max(abs(deformation_value(const.c, const)),
                  abs(deformation_value(-const.c, const))), 1e-12)
    payload = {
        "v_c": spec.v_c,
        "critical_velocity": v_crit,
        "deformation_at_zero": c0,
        "deformation_at_v_c": deformation_value(spec.v_c, const),
        "deformation_at_c": deformation_value(const.c, const),
    }
    rows = [[k, v] for k, v in payload.items()]
    return SuiteResult(payload, ["quantity", "value"], rows, list(checks))


def operator_invariants(spec: OperatorSpec, seed: int = 0) -> List[Check]:
    const = spec.constants
    rng = np.random.default_rng(seed)
    checks = _Checks("operator")

    v = rng.uniform(-10 * const.c, 10 * const.c, 1000)
    checks.eq("deformation_even_mismatches",
              int(np.count_nonzero(deformation_value(v, const) != deformation_value(-v, const))), 0)

    v_crit = critical_velocity(const)
    inside = np.linspace(-v_crit, v_crit, 1001)
    vals = deformation_value(inside, const)
    checks.le("deformation_range_violation",
              float(max(np.max(vals) - math.pi, 1.0 - np.min(vals), 0.0)), 1e-12)

    a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    f = fn.polynomial(rng.normal(size=4) + 1j * rng.normal(size=4))
    g = fn.sine(float(rng.uniform(1, 5)), float(rng.normal()), complex(*rng.normal(size=2)))
    combo = fn.add(fn.scale(a, f), fn.scale(b, g))
    x = rng.uniform(-spec.v_c, spec.v_c, 64)
    lhs = apply_operator(combo, x, spec)
    rhs = a * apply_operator(f, x, spec) + b * apply_operator(g, x, spec)
    checks.le("linearity_relative_error",
              float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1.0)), 1e-13)

    order = stencil_order(spec)
    checks.within("stencil_observed_order_min", min(order), 1.8, 2.2)
    checks.within("stencil_observed_order_max", max(order), 1.8, 2.2)
    return list(checks)


def stencil_order(spec: OperatorSpec, sizes: Sequence[int] = (49, 99, 199, 399)) -> List[float]:
    """Observed order of the matrix action against the continuum operator.

    Uses the Dirichlet quintic ``v^3 (v_c^2 - v^2)``, whose fourth
    derivative does not vanish.
    """
    f = fn.product(fn.polynomial([0, 0, 0, 1]), fn.bump(spec.v_c))
    errs, hs = [], []
    for n in sizes:
        grid = build_grid(spec.domain, n)
        m = discretize(spec, grid)
        approx = m.matvec(f(grid.nodes).real)
        exact = apply_operator(f, grid.nodes, spec).real
        errs.append(float(np.max(np.abs(approx - exact))))
        hs.append(grid.h)
    return [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1])
            for i in range(len(sizes) - 1)]


# -- symmetry ------------------------------------------------------------------

def symmetry_suite(spec: OperatorSpec, seed: int = 0) -> SuiteResult:
    checks = _Checks("symmetry")
    dirichlet = run_corpus(dirichlet_corpus(spec.v_c, 20, seed), spec)
    general = run_corpus(general_corpus(spec.v_c, 10, seed + 1), spec)

    checks.eq("dirichlet_corpus_all_dirichlet", all(r.dirichlet for r in dirichlet), True)
    checks.le("dirichlet_max_relative_residual",
              max(abs(r.residual) / r.scale for r in dirichlet), 1e-10)
    checks.eq("non_dirichlet_corpus_none_dirichlet", any(r.dirichlet for r in general), False)
    checks.eq("green_identity_failures", sum(not r.passed for r in general), 0)

    psi, phi = fn.polynomial([0, 0, 1], label="v^2"), fn.constant(1.0)
    rule = gauss_legendre_rule(spec.v_c)
    anchor = symmetry_residual(psi, phi, spec, rule)
    expected = 4.0 * math.pi * spec.ratio * spec.v_c
    checks.le("anchor_v2_const_abs_error", abs(anchor - expected), 1e-6)

    # Only hbar^2/c^2 enters: scale both by 3 on the same interval.
    scaled = OperatorSpec.from_constants(3 * spec.hbar, 3 * spec.c, v_c=spec.v_c)
    psi, phi = dirichlet_corpus(spec.v_c, 1, seed)[0]
    r1 = symmetry_residual(psi, fn.polynomial([0, 0, 1]), spec, rule)
    r2 = symmetry_residual(psi, fn.polynomial([0, 0, 1]), scaled, rule)
    checks.le("scaling_indifference_relative", abs(r1 - r2) / max(abs(r1), 1e-300), 1e-12)

    f, g = dirichlet_corpus(spec.v_c, 2, seed + 7)[1]
    ip_fg, ip_gf = inner_product(f, g, rule), inner_product(g, f, rule)
    checks.le("inner_product_conjugate_symmetry", abs(ip_fg - ip_gf.conjugate()), 1e-13)
    self_res = symmetry_residual(f, f, spec, rule)
    checks.le("self_residual_real_part", abs(self_res.real), 1e-12 * max(1.0, abs(self_res)))

    header = ["pair", "corpus", "psi", "phi", "residual_re", "residual_im",
              "boundary_re", "boundary_im", "scale", "bound", "passed"]
    rows = []
    table = []
    for corpus, results in (("dirichlet", dirichlet), ("general", general)):
        for i, r in enumerate(results):
            rows.append([i, corpus, r.psi, r.phi, r.residual.real, r.residual.imag,
                         r.boundary.real, r.boundary.imag, r.scale, r.error_bound, r.passed])
            table.append({"corpus": corpus, "psi": r.psi, "phi": r.phi,
                          "residual": r.residual, "boundary_term": r.boundary,
                          "scale": r.scale, "bound": r.error_bound, "passed": r.passed})
    payload = {
        "quadrature": {"rule": "composite-gauss-legendre", "points": rule.points,
                       "panels": rule.panels, "exactness_degree": rule.order},
        "tolerances": {"dirichlet_relative": 1e-10, "rounding_floor_relative": 1e-12},
        "anchor": {"psi": "v^2", "phi": "1", "residual": anchor, "expected": expected},
        "pairs": table,
    }
    return SuiteResult(payload, header, rows, list(checks))


# -- deficiency ----------------------------------------------------------------

def deficiency_suite(spec: OperatorSpec, lambdas: Sequence[float],
                     full_grid: bool = False) -> SuiteResult:
    checks = _Checks("deficiency")
    reports = scan(spec, lambdas)
    checks.eq("indices_all_zero_on_config_grid", all(r.index == 0 for r in reports), True)
    checks.gt("min_abs_sinh_config_grid",
              min(abs(r.determinant) / 2.0 for r in reports), 1e-2)
    conj_ok = all(
        a.mu == b.mu.conjugate() and a.determinant == b.determinant.conjugate()
        for a, b in zip(reports[::2], reports[1::2]))
    checks.eq("branch_conjugacy_exact", conj_ok, True)

    payload: Dict[str, Any] = {
        "lambdas": sorted(set(float(x) for x in lambdas)),
        "threshold": {"delta": 1e-8, "scale": "max(1, exp(2|Re mu| v_c))"},
    }
    if full_grid:
        grid = log_grid()
        full = scan(spec, grid)
        min_sinh = min(abs(r.determinant) / 2.0 for r in full)
        checks.eq("indices_all_zero_log_grid", all(r.index == 0 for r in full), True)
        checks.gt("min_abs_sinh_log_grid", min_sinh, 1e-2)
        payload["log_grid"] = {"lo": 1e-3, "hi": 1e3, "count": len(grid),
                               "min_abs_sinh": min_sinh}

        m2 = mu_squared(DeficiencyProblem(math.pi, "plus"), spec.constants)
        det = boundary_determinant(principal_root(m2), spec.v_c)
        ref = -2.0 * np.sinh(2.0 * np.sqrt(np.complex128(m2)) * spec.v_c)
        checks.le("determinant_at_pi_vs_reference", abs(det - complex(ref)), 1e-12)

        mu = principal_root(mu_squared(DeficiencyProblem(SHOOTING_LAMBDA, "plus"),
                                       spec.constants))
        errors, orders, k_fit = convergence_order(mu, spec.v_c, SHOOTING_STEPS)
        for i, o in enumerate(orders):
            checks.within(f"shooting_order_{SHOOTING_STEPS[i]}_{SHOOTING_STEPS[i + 1]}",
                          o, 3.8, 4.2)
        payload["shooting_convergence"] = {
            "lambda": SHOOTING_LAMBDA, "mu": mu, "steps": list(SHOOTING_STEPS),
            "errors": errors, "orders": orders, "fitted_constant": k_fit}

    header = ["lambda", "branch", "mu_re", "mu_im", "determinant_re", "determinant_im",
              "shooting_re", "shooting_im", "index"]
    rows = [[r.lam, r.sign, r.mu.real, r.mu.imag, r.determinant.real, r.determinant.imag,
             r.shooting_terminal.real, r.shooting_terminal.imag, r.index] for r in reports]
    per_lambda = {}
    for r in reports:
        per_lambda.setdefault(r.lam, {})[r.sign] = r
    payload["reports"] = [
        {"lambda": lam, "n_plus": br["plus"].n_plus, "n_minus": br["minus"].n_minus,
         "branches": [{"sign": s, "mu": br[s].mu, "mu_squared": br[s].mu_squared,
                       "determinant": br[s].determinant,
                       "determinant_scale": br[s].determinant_scale,
                       "shooting_terminal": br[s].shooting_terminal,
                       "index": br[s].index} for s in BRANCHES]}
        for lam, br in per_lambda.items()]
    return SuiteResult(payload, header, rows, list(checks))


# -- spectrum ------------------------------------------------------------------

def spectrum_suite(spec: OperatorSpec, n_interior: int, k: int) -> SuiteResult:
    checks = _Checks("spectrum")
    dec = compute_spectrum(spec, n_interior, k)
    vals = dec.eigenvalues
    analytic = np.array([analytic_eigenvalue(n, spec) for n in range(1, k + 1)])
    discrete = np.array([tridiagonal_eigenvalue(n, spec, n_interior) for n in range(1, k + 1)])
    nodes = [node_count(dec.eigenvectors[:, j]) for j in range(k)]

    checks.le("max_relative_error_vs_analytic",
              float(np.max(np.abs(vals - analytic) / np.abs(analytic))), 1e-3)
    checks.le("max_abs_error_vs_closed_form_tridiagonal",
              float(np.max(np.abs(vals - discrete))), 1e-10)
    checks.lt("max_eigenvalue_minus_pi", float(vals.max()) - math.pi, 0.0)
    if k > 1:
        gaps = vals[:-1] - vals[1:]
        checks.gt("min_gap_over_threshold",
                  float(np.min(gaps / (1e-12 * np.abs(vals[:-1])))), 1.0)
    checks.eq("node_count_mismatches",
              sum(c != j for j, c in enumerate(nodes)), 0)
    gram = dec.eigenvectors.T @ dec.eigenvectors
    checks.le("gram_minus_identity_max", float(np.max(np.abs(gram - np.eye(k)))), 1e-10)
    checks.le("max_residual_over_bound",
              float(np.max(dec.residuals / (1e-9 * (np.abs(vals) + 1.0)))), 1.0)

    payload = {
        "n_interior": n_interior,
        "k": k,
        "h": dec.grid.h,
        "method": dec.method,
        "eigenvalues": vals.tolist(),
        "analytic": analytic.tolist(),
        "closed_form_tridiagonal": discrete.tolist(),
        "residuals": dec.residuals.tolist(),
        "node_counts": nodes,
        "tolerances": {"analytic_relative": 1e-3, "closed_form_abs": 1e-10,
                       "gram": 1e-10, "residual_relative": 1e-9, "gap_relative": 1e-12},
    }
    header = ["n", "eigenvalue_numeric", "eigenvalue_analytic", "abs_error", "node_count"]
    rows = [[j + 1, vals[j], analytic[j], abs(vals[j] - analytic[j]), nodes[j]]
            for j in range(k)]
    return SuiteResult(payload, header, rows, list(checks))


def spectral_invariants(spec: OperatorSpec) -> List[Check]:
    checks = _Checks("spectrum")
    slope, intercept, r2 = quadratic_fit(spec, 20)
    checks.gt("quadratic_fit_r_squared_minus_threshold", r2 - (1.0 - 1e-12), 0.0)
    checks.lt("quadratic_fit_slope", slope, 0.0)

    v = np.linspace(-spec.v_c, spec.v_c, 102)[1:-1]
    worst = 0.0
    for n in range(1, 11):
        u = analytic_eigenfunction(n, spec)
        ratio = (apply_operator(u, v, spec) / u(v)).real
        worst = max(worst, float(np.max(np.abs(ratio - analytic_eigenvalue(n, spec))
                                        / abs(analytic_eigenvalue(n, spec)))))
    checks.le("eigenrelation_relative", worst, 1e-10)

    worst = 0.0
    for size in (100, 1000):
        m = discretize(spec, build_grid(spec.domain, size))
        ns = np.arange(1, 21)
        got = bisect_eigenvalues(m, size - ns + 1)
        want = np.array([tridiagonal_eigenvalue(int(n), spec, size) for n in ns])
        worst = max(worst, float(np.max(np.abs(got - want))))
    checks.le("bisection_vs_closed_form_abs", worst, 1e-10)

    worst = 0.0
    for size in range(1, 9):
        m = discretize(spec, build_grid(spec.domain, size))
        got = bisect_eigenvalues(m, np.arange(1, size + 1))
        roots = char_poly_roots(m)
        worst = max(worst, float(np.max(np.abs(got - roots) / (np.abs(roots) + 1.0))))
    checks.le("bisection_vs_char_poly_relative", worst, 1e-9)
    return list(checks)


# -- convergence ---------------------------------------------------------------

def convergence_sizes(n_interior: int) -> List[int]:
    return [max(n_interior // d, 1) for d in CONVERGENCE_DIVISORS]


def convergence_suite(spec: OperatorSpec, n_interior: int, n: int = 1) -> SuiteResult:
    checks = _Checks("convergence")
    sizes = convergence_sizes(n_interior)
    table = convergence_study(spec, sizes, n)
    orders = [r.observed_order for r in table.rows if r.observed_order is not None]
    checks.within("observed_order_min", min(orders), 1.9, 2.1)
    checks.within("observed_order_max", max(orders), 1.9, 2.1)
    checks.le("richardson_relative_error",
              abs(table.richardson - table.analytic) / abs(table.analytic), 1e-6)
    checks.eq("discrete_above_continuum",
              all(r.eigenvalue >= table.analytic for r in table.rows), True)
    payload = {
        "index": n,
        "analytic": table.analytic,
        "richardson": table.richardson,
        "rows": [{"N": r.n_interior, "h": r.h, "eigenvalue": r.eigenvalue,
                  "error": r.error, "observed_order": r.observed_order} for r in table.rows],
    }
    header = ["N", "eigenvalue", "error", "observed_order"]
    rows = [[r.n_interior, r.eigenvalue, r.error, r.observed_order] for r in table.rows]
    return SuiteResult(payload, header, rows, list(checks))


# -- verify --------------------------------------------------------------------

def verify_suite(spec: OperatorSpec, lambdas: Sequence[float], n_interior: int, k: int,
                 seed: int = 0) -> SuiteResult:
    parts = {
        "info": info_suite(spec),
        "symmetry": symmetry_suite(spec, seed),
        "deficiency": deficiency_suite(spec, lambdas, full_grid=True),
        "spectrum": spectrum_suite(spec, n_interior, k),
        "convergence": convergence_suite(spec, n_interior),
    }
    checks: List[Check] = list(parts["info"].checks)
    checks += operator_invariants(spec, seed)
    for name in ("symmetry", "deficiency", "spectrum"):
        checks += parts[name].checks
    checks += spectral_invariants(spec)
    checks += parts["convergence"].checks

    suites: Dict[str, Dict[str, Any]] = {}
    for c in checks:
        s = suites.setdefault(c.suite, {"passed": 0, "failed": 0})
        s["passed" if c.passed else "failed"] += 1
    payload = {"suites": suites}
    header = ["suite", "check", "value", "relation", "bound", "passed"]
    rows = [[c.suite, c.name, c.value, c.relation, c.bound, c.passed] for c in checks]
    return SuiteResult(payload, header, rows, checks)
