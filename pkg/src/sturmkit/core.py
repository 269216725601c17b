"""Constants, the deformation profile, and the operator on [-v_c, v_c].

The operator acts on smooth functions as ``pi * (f + (hbar/c)**2 * f'')``.
Its Dirichlet discretization on a uniform interior grid is a constant
symmetric tridiagonal matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functions import TestFunction


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "hbar", _check_positive("hbar", self.hbar))
        object.__setattr__(self, "c", _check_positive("c", self.c))

    @property
    def ratio(self) -> float:
        """``hbar**2 / c**2``, the only combination the operator sees."""
        return (self.hbar / self.c) ** 2


@dataclass(frozen=True)
class IntervalDomain:
    v_c: float

    def __post_init__(self):
        object.__setattr__(self, "v_c", _check_positive("v_c", self.v_c))

    @property
    def length(self) -> float:
        return 2.0 * self.v_c


@dataclass(frozen=True)
class OperatorSpec:
    """One concrete operator: constants plus the interval half-width.

    ``canonical`` records whether ``v_c`` came from :func:`critical_velocity`.
    Use :meth:`from_constants` for the canonical construction.
    """

    constants: PhysicalConstants
    domain: IntervalDomain
    canonical: bool = False

    def __post_init__(self):
        if self.canonical:
            expected = critical_velocity(self.constants)
            if not math.isclose(self.domain.v_c, expected, rel_tol=1e-15, abs_tol=0.0):
                raise ValueError(
                    f"canonical spec needs v_c = {expected!r}, got {self.domain.v_c!r}")

    @classmethod
    def from_constants(cls, hbar: float = 1.0, c: float = 1.0,
                       v_c: Optional[float] = None) -> "OperatorSpec":
        constants = PhysicalConstants(hbar, c)
        if v_c is None:
            return cls(constants, IntervalDomain(critical_velocity(constants)), True)
        return cls(constants, IntervalDomain(v_c), False)

    @property
    def hbar(self) -> float:
        return self.constants.hbar

    @property
    def c(self) -> float:
        return self.constants.c

    @property
    def v_c(self) -> float:
        return self.domain.v_c

    @property
    def ratio(self) -> float:
        return self.constants.ratio


def critical_velocity(constants: PhysicalConstants) -> float:
    """Point where the deformation profile equals one: ``c*sqrt(1 - 1/pi)``."""
    return constants.c * math.sqrt(1.0 - 1.0 / math.pi)


def deformation_value(v, constants: PhysicalConstants):
    """``pi * (1 - v**2/c**2)``; accepts scalars or arrays."""
    v = np.asarray(v, dtype=float)
    out = math.pi * (1.0 - (v / constants.c) ** 2)
    return float(out) if out.ndim == 0 else out


def apply_operator(f: TestFunction, v, spec: OperatorSpec):
    """Evaluate ``(C f)(v) = pi*(f(v) + (hbar/c)**2 f''(v))``."""
    if f.second_derivative is None:
        raise ValueError(f"apply_operator needs a second derivative for {f.label!r}")
    out = math.pi * (f(v) + spec.ratio * f.d2(v))
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class Grid:
    n_interior: int
    h: float
    nodes: np.ndarray = field(repr=False)
    v_c: float = 0.0


def build_grid(domain: IntervalDomain, n_interior: int) -> Grid:
    if int(n_interior) != n_interior or n_interior < 1:
        raise ValueError(f"n_interior must be a positive integer, got {n_interior!r}")
    n_interior = int(n_interior)
    h = 2.0 * domain.v_c / (n_interior + 1)
    nodes = -domain.v_c + np.arange(1, n_interior + 1) * h
    nodes.setflags(write=False)
    return Grid(n_interior, h, nodes, domain.v_c)


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Constant symmetric tridiagonal matrix ``diag*I + off*(S + S^T)``.

    ``top`` is ``diag + 2|off|``, the upper Gershgorin bound. It is stored
    separately because for the discretized operator it is exactly ``pi``
    while ``diag`` and ``off`` are large and nearly cancel; solvers work
    relative to ``top`` to keep the upper spectrum accurate.
    """

    diag: float
    off: float
    n: int
    grid: Optional[Grid] = None
    top: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension must be positive")
        if self.top is None:
            object.__setattr__(self, "top", self.diag + 2.0 * abs(self.off))

    def dense(self) -> np.ndarray:
        a = np.diag(np.full(self.n, self.diag))
        if self.n > 1:
            idx = np.arange(self.n - 1)
            a[idx, idx + 1] = self.off
            a[idx + 1, idx] = self.off
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.shifted_matvec(x, 0.0)

    def _signs(self, x: np.ndarray) -> np.ndarray:
        # Negative off-diagonals are a diagonal similarity diag(+-1) away.
        if self.off >= 0:
            return x
        return x * np.where(np.arange(len(x)) % 2, -1.0, 1.0)

    def shifted_matvec(self, x: np.ndarray, shift: float) -> np.ndarray:
        """``(A - shift*I) @ x`` evaluated around ``top``.

        The second difference is formed from neighbour differences, which are
        exact for slowly varying ``x``.
        """
        x = self._signs(np.asarray(x, dtype=float))
        padded = np.concatenate(([0.0], x, [0.0]))
        lap = (padded[:-2] - x) + (padded[2:] - x)
        return self._signs((self.top - shift) * x + abs(self.off) * lap)

    def closed_form_eigenvalues(self) -> np.ndarray:
        """Exact spectrum ``top - 4|off| sin^2(j*pi/(2(n+1)))``, descending."""
        j = np.arange(1, self.n + 1)
        return self.top - 4.0 * abs(self.off) * np.sin(j * math.pi / (2 * (self.n + 1))) ** 2


def discretize(spec: OperatorSpec, grid: Grid) -> SymmetricTridiagonal:
    """Central second difference of the operator on ``grid``."""
    if not math.isclose(grid.v_c, spec.v_c, rel_tol=1e-14):
        raise ValueError("grid does not cover the operator's interval")
    off = math.pi * spec.ratio / grid.h ** 2
    diag = math.pi * (1.0 - 2.0 * spec.ratio / grid.h ** 2)
    return SymmetricTridiagonal(diag, off, grid.n_interior, grid, top=math.pi)
