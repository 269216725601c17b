"""Dirichlet spectrum: closed forms and a Sturm-bisection eigensolver.

Eigenvalues are indexed from the top of the spectrum: ``n = 1`` is the
largest. The continuum eigenpairs are

    C_n = pi (1 - (hbar/c)^2 (n pi / (2 v_c))^2),
    u_n(v) = sin(n pi (v + v_c) / (2 v_c)) / sqrt(v_c),

and the uniform-grid matrix has the exact eigenvalues

    pi (1 - (hbar/c)^2 (4/h^2) sin^2(n pi / (2(N+1)))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from . import functions as fn
from .core import Grid, OperatorSpec, SymmetricTridiagonal, build_grid, discretize
from .functions import TestFunction

BISECTION_TOL = 1e-11
MAX_INVERSE_ITERATIONS = 100
RESIDUAL_RTOL = 1e-9
NODE_RTOL = 1e-12
STEP_TOL = 1e-12
_TINY = 1e-300


class ConvergenceError(RuntimeError):
    pass


def _check_index(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"eigenvalue index must be a positive integer, got {n!r}")
    return int(n)


def analytic_eigenvalue(n: int, spec: OperatorSpec) -> float:
    n = _check_index(n)
    k = n * math.pi / (2.0 * spec.v_c)
    return math.pi * (1.0 - spec.ratio * k * k)


def analytic_eigenfunction(n: int, spec: OperatorSpec) -> TestFunction:
    n = _check_index(n)
    k = n * math.pi / (2.0 * spec.v_c)
    return fn.sine(k, spec.v_c, 1.0 / math.sqrt(spec.v_c), label=f"u{n}")


def tridiagonal_eigenvalue(n: int, spec: OperatorSpec, n_interior: int) -> float:
    """Exact ``n``-th largest eigenvalue of the ``n_interior`` grid matrix."""
    n = _check_index(n)
    if n > n_interior:
        raise ValueError(f"index {n} exceeds matrix size {n_interior}")
    h = 2.0 * spec.v_c / (n_interior + 1)
    s = math.sin(n * math.pi / (2.0 * (n_interior + 1)))
    return math.pi * (1.0 - spec.ratio * (4.0 / (h * h)) * s * s)


def _sturm_counts(matrix: SymmetricTridiagonal, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each entry of ``x``.

    The leading-minor recurrence ``q_i = (d - x) - e^2/q_{i-1}`` is run in the
    variable ``w_i = -q_i/e - 1`` with ``eps = (x - top)/e``:

        w_1 = 1 + eps,   w_i = eps + w_{i-1} / (1 + w_{i-1}),

    and ``q_i < 0`` iff ``w_i > -1``. Working relative to ``top`` avoids the
    cancellation between the large diagonal and off-diagonal entries.
    A zero pivot ``q = 0`` is replaced by a tiny positive ``q``.
    """
    x = np.asarray(x, dtype=float)
    e = abs(matrix.off)
    if e == 0.0:
        return np.where(matrix.diag < x, matrix.n, 0).astype(np.int64)
    eps = (x - matrix.top) / e
    w = 1.0 + eps
    count = (w > -1.0).astype(np.int64)
    for _ in range(matrix.n - 1):
        den = 1.0 + w
        den[den == 0.0] = -_TINY
        w = eps + w / den
        count += w > -1.0
    return count


def sturm_count(matrix: SymmetricTridiagonal, x: float) -> int:
    return int(_sturm_counts(matrix, np.atleast_1d(float(x)))[0])


def gershgorin(matrix: SymmetricTridiagonal) -> tuple[float, float]:
    e = abs(matrix.off)
    return matrix.top - 4.0 * e, matrix.top


def bisect_eigenvalues(matrix: SymmetricTridiagonal, ks: Sequence[int],
                       tol: float = BISECTION_TOL) -> np.ndarray:
    """The ``k``-th smallest eigenvalues (1-based), bisected together."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size and (ks.min() < 1 or ks.max() > matrix.n):
        raise ValueError(f"eigenvalue index out of range 1..{matrix.n}")
    if matrix.n == 1:
        return np.full(ks.shape, float(matrix.diag))
    lo_bound, hi_bound = gershgorin(matrix)
    lo = np.full(ks.shape, lo_bound, dtype=float)
    hi = np.full(ks.shape, hi_bound, dtype=float)
    while True:
        active = hi - lo > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = active & ((mid <= lo) | (mid >= hi))
        if stuck.all() or not (active & ~stuck).any():
            break
        below = _sturm_counts(matrix, mid) >= ks
        upd = active & ~stuck
        hi = np.where(upd & below, mid, hi)
        lo = np.where(upd & ~below, mid, lo)
    return 0.5 * (lo + hi)


def bisect_eigenvalue(matrix: SymmetricTridiagonal, k: int,
                      tol: float = BISECTION_TOL) -> float:
    if not 1 <= k <= matrix.n:
        raise ValueError(f"k={k} out of range 1..{matrix.n}")
    return float(bisect_eigenvalues(matrix, [k], tol)[0])


def _fix_sign(x: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(x)
    if nz.size and x[nz[0]] < 0:
        return -x
    return x


def eigen_residual(matrix: SymmetricTridiagonal, x: np.ndarray, lam: float) -> float:
    return float(np.linalg.norm(matrix.shifted_matvec(x, lam)))


def _shifted_solve(matrix: SymmetricTridiagonal, shift: float, b: np.ndarray) -> np.ndarray:
    """Solve ``(A - shift*I) y = b`` by unpivoted LU in top-relative variables.

    With ``e = |off|`` the pivots are ``u_i = -e (1 + w_i)`` where ``w_i``
    follows the same recurrence as :func:`_sturm_counts`.
    """
    e = abs(matrix.off)
    n = matrix.n
    eps = (shift - matrix.top) / e
    b = matrix._signs(b)
    piv = np.empty(n)  # 1 + w_i
    w = 1.0 + eps
    piv[0] = 1.0 + w if 1.0 + w != 0.0 else -_TINY
    for i in range(1, n):
        w = eps + w / piv[i - 1]
        piv[i] = 1.0 + w if 1.0 + w != 0.0 else -_TINY
    z = np.empty(n)
    z[0] = b[0]
    for i in range(1, n):
        z[i] = b[i] + z[i - 1] / piv[i - 1]
    y = np.empty(n)
    y[-1] = -z[-1] / e / piv[-1]
    for i in range(n - 2, -1, -1):
        y[i] = (y[i + 1] - z[i] / e) / piv[i]
    return matrix._signs(y)


def inverse_iteration(matrix: SymmetricTridiagonal, shift: float,
                      eigenvalue: float | None = None) -> np.ndarray:
    """Unit eigenvector for the eigenvalue nearest ``shift``.

    Starts from the normalized all-ones vector. Stops once the residual
    ``|A x - lam x|`` is below ``1e-9 (|lam| + 1)`` and two successive
    iterates agree, where ``lam`` is ``eigenvalue`` if given, else ``shift``.
    """
    lam = shift if eigenvalue is None else eigenvalue
    n = matrix.n
    x = np.full(n, 1.0 / math.sqrt(n))
    if n == 1 or matrix.off == 0.0:
        if n > 1:
            raise ValueError("diagonal matrix has no isolated eigenvalues")
        return x
    target = RESIDUAL_RTOL * (abs(lam) + 1.0)
    for _ in range(MAX_INVERSE_ITERATIONS):
        y = _shifted_solve(matrix, shift, x)
        x_new = _fix_sign(y / np.linalg.norm(y))
        settled = np.linalg.norm(x_new - x) <= STEP_TOL
        x = x_new
        if settled and eigen_residual(matrix, x, lam) <= target:
            return x
    raise ConvergenceError(
        f"inverse iteration did not converge after {MAX_INVERSE_ITERATIONS} iterations "
        f"(shift={shift!r})")


def node_count(vector) -> int:
    """Strict sign changes, ignoring entries below ``1e-12 * max|entry|``."""
    v = np.asarray(vector, dtype=float)
    if v.size == 0:
        return 0
    cutoff = NODE_RTOL * float(np.max(np.abs(v)))
    signs = np.sign(v[np.abs(v) > cutoff])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)  # columns, one per eigenvalue
    grid: Grid
    residuals: np.ndarray
    method: str
    matrix: SymmetricTridiagonal = field(repr=False)


def compute_spectrum(spec: OperatorSpec, n_interior: int, k: int,
                     tol: float = BISECTION_TOL) -> SpectralDecomposition:
    """Top ``k`` eigenpairs of the discretized operator, largest first."""
    if k < 1 or k > n_interior:
        raise ValueError(f"k={k} must lie in 1..n_interior={n_interior}")
    grid = build_grid(spec.domain, n_interior)
    matrix = discretize(spec, grid)
    ks = n_interior - np.arange(k)  # ascending index of the n-th largest
    values = bisect_eigenvalues(matrix, ks, tol)
    vectors = np.empty((n_interior, k))
    residuals = np.empty(k)
    for j, lam in enumerate(values):
        x = inverse_iteration(matrix, lam, lam)
        vectors[:, j] = x
        residuals[j] = eigen_residual(matrix, x, lam)
    return SpectralDecomposition(values, vectors, grid, residuals,
                                 "sturm-bisection+inverse-iteration", matrix)


@dataclass(frozen=True)
class ConvergenceRow:
    n_interior: int
    h: float
    eigenvalue: float
    error: float
    observed_order: float | None


@dataclass(frozen=True)
class ConvergenceTable:
    index: int
    analytic: float
    rows: List[ConvergenceRow]
    richardson: float


def richardson(coarse: float, fine: float, h_coarse: float, h_fine: float,
               order: int = 2) -> float:
    """Eliminate the leading ``h**order`` error term from two estimates."""
    rc, rf = h_coarse ** order, h_fine ** order
    return (rc * fine - rf * coarse) / (rc - rf)


def convergence_study(spec: OperatorSpec, grid_sizes: Sequence[int], n: int = 1,
                      tol: float = BISECTION_TOL) -> ConvergenceTable:
    sizes = [int(s) for s in grid_sizes]
    if len(sizes) < 3:
        raise ValueError("convergence_study needs at least three grid sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("grid sizes must be strictly increasing")
    n = _check_index(n)
    exact = analytic_eigenvalue(n, spec)
    rows: List[ConvergenceRow] = []
    for size in sizes:
        grid = build_grid(spec.domain, size)
        lam = bisect_eigenvalue(discretize(spec, grid), size - n + 1, tol)
        err = abs(lam - exact)
        order = None
        if rows:
            prev = rows[-1]
            order = math.log(prev.error / err) / math.log(prev.h / grid.h)
        rows.append(ConvergenceRow(size, grid.h, lam, err, order))
    extrap = richardson(rows[-2].eigenvalue, rows[-1].eigenvalue, rows[-2].h, rows[-1].h)
    return ConvergenceTable(n, exact, rows, extrap)


def char_poly_roots(matrix: SymmetricTridiagonal) -> np.ndarray:
    """Brute force for small matrices: roots of ``det(A - x I)``.

    The characteristic polynomial is built coefficient-wise from the
    three-term recurrence ``p_i = (d - x) p_{i-1} - e^2 p_{i-2}``.
    """
    P = np.polynomial.Polynomial
    lin = P([matrix.diag, -1.0])
    prev, cur = P([1.0]), lin
    for _ in range(matrix.n - 1):
        prev, cur = cur, lin * cur - matrix.off ** 2 * prev
    return np.sort(cur.roots().real)


def quadratic_fit(spec: OperatorSpec, n_max: int = 20) -> tuple[float, float, float]:
    """Least-squares fit of ``C_n`` against ``n**2``: ``(slope, intercept, R^2)``."""
    n = np.arange(1, n_max + 1)
    y = np.array([analytic_eigenvalue(int(i), spec) for i in n])
    x = n.astype(float) ** 2
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return float(slope), float(intercept), 1.0 - ss_res / ss_tot
