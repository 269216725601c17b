"""Smooth complex-valued test functions carrying analytic derivatives.

Functions are vectorized: every map accepts a float or a numpy array of
abscissae and returns complex values of the same shape. Derivatives are
supplied in closed form so that operator and symmetry checks never go
through numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

Map = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """A function with its first two derivatives.

    ``second_derivative`` may be ``None`` for functions that are only used
    where a first derivative suffices; :func:`sturmkit.core.apply_operator`
    refuses such functions.
    """

    __test__ = False  # not a pytest class

    value: Map
    first_derivative: Map
    second_derivative: Optional[Map]
    label: str = ""

    def __call__(self, v):
        return self.value(v)

    def d1(self, v):
        return self.first_derivative(v)

    def d2(self, v):
        if self.second_derivative is None:
            raise ValueError(f"test function {self.label!r} has no second derivative")
        return self.second_derivative(v)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return add(self, other)

    def __mul__(self, other: "TestFunction") -> "TestFunction":
        return product(self, other)


def _as_complex(fn):
    def wrapped(v):
        return np.asarray(fn(np.asarray(v, dtype=float)), dtype=complex)

    return wrapped


def constant(a: complex = 1.0) -> TestFunction:
    a = complex(a)
    return TestFunction(
        value=lambda v: np.full(np.shape(v), a, dtype=complex),
        first_derivative=lambda v: np.zeros(np.shape(v), dtype=complex),
        second_derivative=lambda v: np.zeros(np.shape(v), dtype=complex),
        label=f"const({a:g})",
    )


def polynomial(coeffs: Sequence[complex], label: str | None = None) -> TestFunction:
    """Polynomial with coefficients in increasing degree order."""
    p = Polynomial(np.asarray(coeffs, dtype=complex))
    dp = p.deriv(1)
    ddp = p.deriv(2)
    return TestFunction(
        value=_as_complex(p),
        first_derivative=_as_complex(dp),
        second_derivative=_as_complex(ddp),
        label=label or f"poly(deg={p.degree()})",
    )


def sine(k: float, shift: float = 0.0, amplitude: complex = 1.0,
         label: str | None = None) -> TestFunction:
    """``amplitude * sin(k*(v + shift))``."""
    a = complex(amplitude)
    return TestFunction(
        value=_as_complex(lambda v: a * np.sin(k * (v + shift))),
        first_derivative=_as_complex(lambda v: a * k * np.cos(k * (v + shift))),
        second_derivative=_as_complex(lambda v: -a * k * k * np.sin(k * (v + shift))),
        label=label or f"sin({k:g}(v+{shift:g}))",
    )


def cosine(k: float, shift: float = 0.0, amplitude: complex = 1.0,
           label: str | None = None) -> TestFunction:
    a = complex(amplitude)
    return TestFunction(
        value=_as_complex(lambda v: a * np.cos(k * (v + shift))),
        first_derivative=_as_complex(lambda v: -a * k * np.sin(k * (v + shift))),
        second_derivative=_as_complex(lambda v: -a * k * k * np.cos(k * (v + shift))),
        label=label or f"cos({k:g}(v+{shift:g}))",
    )


def exponential(rate: complex, label: str | None = None) -> TestFunction:
    """``exp(rate * v)`` for complex ``rate``."""
    r = complex(rate)
    return TestFunction(
        value=_as_complex(lambda v: np.exp(r * v)),
        first_derivative=_as_complex(lambda v: r * np.exp(r * v)),
        second_derivative=_as_complex(lambda v: r * r * np.exp(r * v)),
        label=label or f"exp(({r:g})v)",
    )


def add(f: TestFunction, g: TestFunction) -> TestFunction:
    return TestFunction(
        value=lambda v: f(v) + g(v),
        first_derivative=lambda v: f.d1(v) + g.d1(v),
        second_derivative=lambda v: f.d2(v) + g.d2(v),
        label=f"({f.label} + {g.label})",
    )


def scale(alpha: complex, f: TestFunction) -> TestFunction:
    a = complex(alpha)
    return TestFunction(
        value=lambda v: a * f(v),
        first_derivative=lambda v: a * f.d1(v),
        second_derivative=lambda v: a * f.d2(v),
        label=f"{a:g}*{f.label}",
    )


def product(f: TestFunction, g: TestFunction) -> TestFunction:
    """Leibniz rule up to second order."""
    return TestFunction(
        value=lambda v: f(v) * g(v),
        first_derivative=lambda v: f.d1(v) * g(v) + f(v) * g.d1(v),
        second_derivative=lambda v: (f.d2(v) * g(v) + 2.0 * f.d1(v) * g.d1(v)
                                     + f(v) * g.d2(v)),
        label=f"{f.label}*{g.label}",
    )


def bump(v_c: float) -> TestFunction:
    """The Dirichlet factor ``v_c**2 - v**2``."""
    return polynomial([v_c * v_c, 0.0, -1.0], label="(vc^2-v^2)")
