"""Quadratic-form symmetry checks for the operator.

For smooth ``psi`` and ``phi`` on ``[-v_c, v_c]``::

    <C psi, phi> - <psi, C phi> = pi (hbar/c)^2 [psi' conj(phi) - psi conj(phi')]

evaluated between the endpoints. The bracket vanishes when both functions
satisfy Dirichlet conditions. Inner products are computed by composite
Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from . import functions as fn
from .core import OperatorSpec, apply_operator
from .functions import TestFunction

DEFAULT_POINTS = 5
DEFAULT_PANELS = 64
DIRICHLET_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10
# Rounding floor added to the doubling estimate, relative to the natural scale.
ROUNDING_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int
    lower: float
    upper: float
    panels: int
    points: int

    def spans(self, v_c: float) -> bool:
        return (math.isclose(self.lower, -v_c, rel_tol=1e-14)
                and math.isclose(self.upper, v_c, rel_tol=1e-14))


def gauss_legendre_rule(v_c: float, panels: int = DEFAULT_PANELS,
                        points: int = DEFAULT_POINTS) -> QuadratureRule:
    """Composite Gauss-Legendre rule on ``[-v_c, v_c]``.

    Exact for polynomials of degree ``2*points - 1`` on each panel.
    """
    if panels < 1 or points < 1:
        raise ValueError("panels and points must be positive")
    x, w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(-v_c, v_c, panels + 1)
    edges[0], edges[-1] = -v_c, v_c
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    for a in (nodes, weights):
        a.setflags(write=False)
    return QuadratureRule(nodes, weights, 2 * points - 1, -v_c, v_c, panels, points)


def inner_product(f: TestFunction, g: TestFunction, rule: QuadratureRule,
                  v_c: float | None = None) -> complex:
    """``sum_i w_i f(x_i) conj(g(x_i))``.

    ``v_c``, when given, must match the interval the rule was built on.
    """
    if v_c is not None and not rule.spans(v_c):
        raise ValueError(f"quadrature rule on [{rule.lower}, {rule.upper}] "
                         f"does not span [-{v_c}, {v_c}]")
    return _weighted_dot(f(rule.nodes), g(rule.nodes), rule.weights)


def _weighted_dot(fx: np.ndarray, gx: np.ndarray, w: np.ndarray) -> complex:
    return complex(np.sum(w * fx * np.conj(gx)))


def l2_norm(f: TestFunction, rule: QuadratureRule) -> float:
    return math.sqrt(max(inner_product(f, f, rule).real, 0.0))


def _operator_values(f: TestFunction, spec: OperatorSpec, rule: QuadratureRule):
    return apply_operator(f, rule.nodes, spec)


def symmetry_residual(psi: TestFunction, phi: TestFunction, spec: OperatorSpec,
                      rule: QuadratureRule) -> complex:
    """``<C psi, phi> - <psi, C phi>``."""
    if not rule.spans(spec.v_c):
        raise ValueError("quadrature rule does not span the operator's interval")
    w = rule.weights
    c_psi = _operator_values(psi, spec, rule)
    c_phi = _operator_values(phi, spec, rule)
    return (_weighted_dot(c_psi, phi(rule.nodes), w)
            - _weighted_dot(psi(rule.nodes), c_phi, w))


def natural_scale(psi: TestFunction, phi: TestFunction, spec: OperatorSpec,
                  rule: QuadratureRule) -> float:
    """``|C psi| |phi| + |psi| |C phi|`` in the quadrature L2 norm."""
    w = rule.weights
    x = rule.nodes

    def norm(vals):
        return math.sqrt(float(np.sum(w * np.abs(vals) ** 2)))

    return (norm(_operator_values(psi, spec, rule)) * norm(phi(x))
            + norm(psi(x)) * norm(_operator_values(phi, spec, rule)))


def boundary_term(psi: TestFunction, phi: TestFunction, spec: OperatorSpec) -> complex:
    """``pi (hbar/c)^2 [psi' conj(phi) - psi conj(phi')]`` from ``-v_c`` to ``v_c``."""
    a = spec.v_c

    def bracket(v):
        return (complex(psi.d1(v)) * complex(phi(v)).conjugate()
                - complex(psi(v)) * complex(phi.d1(v)).conjugate())

    return math.pi * spec.ratio * (bracket(a) - bracket(-a))


def is_dirichlet(f: TestFunction, v_c: float, samples: int = 257) -> bool:
    """``|f(+-v_c)| <= 1e-12 * max|f|`` with the max taken on a uniform sample."""
    v = np.linspace(-v_c, v_c, samples)
    peak = float(np.max(np.abs(f(v))))
    ends = max(abs(complex(f(-v_c))), abs(complex(f(v_c))))
    return ends <= DIRICHLET_RTOL * peak


@dataclass(frozen=True)
class PairResult:
    psi: str
    phi: str
    dirichlet: bool
    residual: complex
    boundary: complex
    scale: float
    error_bound: float
    passed: bool


def check_pair(psi: TestFunction, phi: TestFunction, spec: OperatorSpec,
               panels: int = DEFAULT_PANELS) -> PairResult:
    """Compare the residual against zero (Dirichlet) or the boundary term.

    The quadrature error is estimated by rerunning with twice the panels.
    """
    rule = gauss_legendre_rule(spec.v_c, panels)
    fine = gauss_legendre_rule(spec.v_c, 2 * panels)
    res = symmetry_residual(psi, phi, spec, rule)
    res_fine = symmetry_residual(psi, phi, spec, fine)
    scale = natural_scale(psi, phi, spec, rule)
    bt = boundary_term(psi, phi, spec)
    dirichlet = is_dirichlet(psi, spec.v_c) and is_dirichlet(phi, spec.v_c)
    if dirichlet:
        bound = SYMMETRY_RTOL * scale
        passed = abs(res) <= bound
    else:
        bound = 2.0 * abs(res - res_fine) + ROUNDING_RTOL * scale
        passed = abs(res - bt) <= bound
    return PairResult(psi.label, phi.label, dirichlet, res, bt, scale, bound, passed)


def _random_complex(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def dirichlet_corpus(v_c: float, pairs: int = 20, seed: int = 0
                     ) -> List[tuple[TestFunction, TestFunction]]:
    """Pairs of functions vanishing at both endpoints.

    Members are ``(v_c^2 - v^2)`` times random complex polynomials, random
    trigonometric factors, or half-range sines ``sin(n pi (v+v_c)/(2 v_c))``.
    """
    rng = np.random.default_rng(seed)
    b = fn.bump(v_c)

    def member(kind: int) -> TestFunction:
        if kind == 0:
            deg = int(rng.integers(0, 5))
            return b * fn.polynomial(_random_complex(rng, deg + 1), label=f"poly{deg}")
        if kind == 1:
            k = float(rng.uniform(0.5, 8.0))
            return b * fn.exponential(1j * k) if rng.random() < 0.5 else \
                b * fn.cosine(k, float(rng.uniform(-1, 1)), _random_complex(rng))
        n = int(rng.integers(1, 9))
        return fn.sine(n * math.pi / (2 * v_c), v_c, _random_complex(rng), label=f"sine{n}")

    return [(member(i % 3), member((i + 1 + i // 3) % 3)) for i in range(pairs)]


def general_corpus(v_c: float, pairs: int = 10, seed: int = 1
                   ) -> List[tuple[TestFunction, TestFunction]]:
    """Pairs where at least one function is nonzero at an endpoint."""
    rng = np.random.default_rng(seed)
    out = [(fn.polynomial([0, 0, 1], label="v^2"), fn.constant(1.0))]
    while len(out) < pairs:
        i = len(out)
        if i % 2:
            psi = fn.polynomial(_random_complex(rng, 4), label=f"poly3#{i}")
            phi = fn.exponential(complex(rng.normal(), rng.uniform(-4, 4)))
        else:
            psi = fn.cosine(float(rng.uniform(0.5, 5)), float(rng.normal()),
                            _random_complex(rng))
            phi = fn.polynomial(_random_complex(rng, 3), label=f"poly2#{i}")
        out.append((psi, phi))
    return out


def run_corpus(pairs: Sequence[tuple[TestFunction, TestFunction]],
               spec: OperatorSpec, panels: int = DEFAULT_PANELS) -> List[PairResult]:
    return [check_pair(psi, phi, spec, panels) for psi, phi in pairs]
