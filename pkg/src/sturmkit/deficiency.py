"""Deficiency indices of the Dirichlet operator.

For ``lambda > 0`` the equation ``C psi = +-i lambda psi`` reduces to
``psi'' = mu^2 psi`` with ``mu^2 = (c/hbar)^2 (+-i lambda/pi - 1)``. Imposing
``psi(-v_c) = psi(v_c) = 0`` on ``A e^{mu v} + B e^{-mu v}`` gives a 2x2
system with determinant ``-2 sinh(2 mu v_c)``. A nonzero determinant leaves
only the trivial solution, so the index for that branch is zero.

The same verdict is reached independently by shooting: integrate from
``-v_c`` with ``psi = 0, psi' = 1`` and look at ``psi(v_c)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from .core import OperatorSpec, PhysicalConstants

PLUS = "plus"
MINUS = "minus"
BRANCHES = (PLUS, MINUS)

DETERMINANT_DELTA = 1e-8
AGREEMENT_RTOL = 1e-6
DEFAULT_STEPS = 10_000
MIN_STEPS = 100
DEFAULT_LAMBDAS = (0.1, 1.0, math.pi, 10.0)


class InconsistencyError(RuntimeError):
    """Determinant and shooting paths disagree; a numerics bug, not mathematics."""


@dataclass(frozen=True)
class DeficiencyProblem:
    lam: float
    sign: str = PLUS

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if self.sign not in BRANCHES:
            raise ValueError(f"sign must be one of {BRANCHES}, got {self.sign!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def s(self) -> int:
        return 1 if self.sign == PLUS else -1


@dataclass(frozen=True)
class DeficiencyReport:
    lam: float
    sign: str
    mu: complex
    mu_squared: complex
    determinant: complex
    determinant_scale: float
    shooting_terminal: complex
    index: int
    n_plus: int
    n_minus: int


def mu_squared(problem: DeficiencyProblem, constants: PhysicalConstants) -> complex:
    k2 = (constants.c / constants.hbar) ** 2
    return complex(-k2, problem.s * k2 * problem.lam / math.pi)


def principal_root(z: complex) -> complex:
    """Square root with nonnegative real part; ``Im > 0`` when ``Re == 0``."""
    z = complex(z)
    if z == 0:
        raise ValueError("principal_root is undefined at zero")
    r = cmath.sqrt(z)
    if r.real == 0.0 and r.imag < 0.0:
        r = -r
    return r


def boundary_determinant(mu: complex, v_c: float) -> complex:
    return -2.0 * cmath.sinh(2.0 * mu * v_c)


def determinant_scale(mu: complex, v_c: float) -> float:
    """``max(1, exp(2|Re mu| v_c))``: natural size of ``sinh(2 mu v_c)``."""
    return max(1.0, math.exp(2.0 * abs(mu.real) * v_c))


def shoot(mu: complex, v_c: float, steps: int = DEFAULT_STEPS) -> complex:
    """RK4 for ``psi'' = mu^2 psi`` on ``[-v_c, v_c]``; returns ``psi(v_c)``.

    Starts from ``psi(-v_c) = 0, psi'(-v_c) = 1``. The exact answer is
    ``sinh(2 mu v_c)/mu``.
    """
    if steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps, got {steps}")
    m2 = complex(mu) ** 2
    h = 2.0 * v_c / steps
    half = 0.5 * h
    y, dy = 0j, 1 + 0j
    for _ in range(steps):
        k1y, k1d = dy, m2 * y
        k2y, k2d = dy + half * k1d, m2 * (y + half * k1y)
        k3y, k3d = dy + half * k2d, m2 * (y + half * k2y)
        k4y, k4d = dy + h * k3d, m2 * (y + h * k3y)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    return y


def exact_terminal(mu: complex, v_c: float) -> complex:
    return cmath.sinh(2.0 * mu * v_c) / mu


def shoot_deficiency(problem: DeficiencyProblem, spec: OperatorSpec,
                     steps: int = DEFAULT_STEPS) -> complex:
    mu = principal_root(mu_squared(problem, spec.constants))
    return shoot(mu, spec.v_c, steps)


def analyze_branch(spec: OperatorSpec, problem: DeficiencyProblem,
                   steps: int = DEFAULT_STEPS) -> Tuple[int, complex, complex, complex, complex, float]:
    """Return ``(index, mu, mu^2, determinant, shooting terminal, scale)``.

    Raises :class:`InconsistencyError` when the two paths disagree.
    """
    m2 = mu_squared(problem, spec.constants)
    mu = principal_root(m2)
    det = boundary_determinant(mu, spec.v_c)
    terminal = shoot(mu, spec.v_c, steps)
    scale = determinant_scale(mu, spec.v_c)
    # -2 mu psi(v_c) equals the determinant for the exact shooting solution.
    shot_det = -2.0 * mu * terminal
    det_nonzero = abs(det) > DETERMINANT_DELTA * scale
    shot_nonzero = abs(shot_det) > DETERMINANT_DELTA * scale
    if det_nonzero != shot_nonzero or abs(shot_det - det) > AGREEMENT_RTOL * scale:
        raise InconsistencyError(
            f"lambda={problem.lam!r} {problem.sign}: determinant {det!r} vs "
            f"shooting {shot_det!r} (scale {scale!r})")
    # A vanishing determinant leaves the one-dimensional span of sinh(mu(v+v_c)).
    index = 0 if det_nonzero else 1
    return index, mu, m2, det, terminal, scale


def deficiency_indices(spec: OperatorSpec, lam: float, steps: int = DEFAULT_STEPS
                       ) -> Tuple[int, int, Tuple[DeficiencyReport, DeficiencyReport]]:
    """``(n_plus, n_minus, (report_plus, report_minus))`` for one ``lambda``."""
    results = {sign: analyze_branch(spec, DeficiencyProblem(lam, sign), steps)
               for sign in BRANCHES}
    n_plus, n_minus = results[PLUS][0], results[MINUS][0]
    reports = tuple(
        DeficiencyReport(float(lam), sign, mu, m2, det, scale, terminal, index,
                         n_plus, n_minus)
        for sign, (index, mu, m2, det, terminal, scale) in results.items())
    return n_plus, n_minus, reports


def scan(spec: OperatorSpec, lambdas: Iterable[float], steps: int = DEFAULT_STEPS
         ) -> List[DeficiencyReport]:
    """Reports for every ``lambda``, sorted by ``lambda`` then branch."""
    out = []
    for lam in sorted(set(float(x) for x in lambdas)):
        out.extend(deficiency_indices(spec, lam, steps)[2])
    return out


def log_grid(lo: float = 1e-3, hi: float = 1e3, count: int = 50) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), count)


def convergence_order(mu: complex, v_c: float, steps: Iterable[int] = (100, 1000, 10_000)):
    """Errors of :func:`shoot` against the closed form and pairwise orders."""
    steps = list(steps)
    exact = exact_terminal(mu, v_c)
    errors = [abs(shoot(mu, v_c, n) - exact) for n in steps]
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(steps[i + 1] / steps[i])
              for i in range(len(steps) - 1)]
    # Fitted constant in err ~ K n^-4.
    k_fit = float(np.exp(np.mean(np.log(errors) + 4.0 * np.log(steps))))
    return errors, orders, k_fit
