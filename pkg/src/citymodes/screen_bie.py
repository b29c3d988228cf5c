r"""First-kind integral equation on the segment :math:`\Gamma = [-1/2, 1/2]\times\{0\}`.

The density :math:`f_k` solves :math:`S_k f_k = 1/2` on :math:`\Gamma` with the
single-layer kernel :math:`\frac{i}{4} H_0(k|x-y|)`. It is expanded as

.. math:: f(x) = w(x) \sum_{m<M} a_m T_m(2x), \qquad w(x) = (1/4 - x^2)^{-1/2},

so the endpoint singularity sits in the weight and the coefficients decay
spectrally. In the variable ``t = 2y`` the kernel splits into
``-(1/2pi) ln|s-t| J0(k|s-t|/2)`` plus an entire function of ``|s-t|^2``.
The logarithmic part is integrated with product weights built from

.. math:: \int_{-1}^1 \ln|s-t|\, T_n(t) \frac{dt}{\sqrt{1-t^2}}
          = -\pi\ln 2 \;(n=0), \qquad -\frac{\pi}{n} T_n(s) \;(n\ge1),

the smooth part with Gauss-Chebyshev quadrature. The Galerkin matrix is the
same quadrature applied once more in ``x``; it is symmetric by construction.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import special as sc_special
from scipy.fft import dct

from . import specfun

HALF_LENGTH = 0.5
M_MIN, M_MAX = 4, 2048
ORACLE_N_MIN, ORACLE_N_MAX = 16, 8192
FIELD_MIN_DISTANCE = 1e-6
CHECK_NODES = 100

_INV_TWO_PI = 1.0 / (2.0 * math.pi)


class SingularSystemError(RuntimeError):
    """The discrete system could not be solved reliably."""


@dataclass(frozen=True)
class SegmentGeometry:
    half_length: float = HALF_LENGTH

    @property
    def length(self) -> float:
        return 2.0 * self.half_length


GEOMETRY = SegmentGeometry()


@dataclass(frozen=True)
class GalerkinSystem:
    k: float
    matrix: np.ndarray
    rhs: np.ndarray
    quadrature_nodes: int

    @property
    def M(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ChebDensity:
    """Chebyshev coefficients of the boundary density at wavenumber ``k``."""

    k: float
    coeffs: np.ndarray
    residual: float = float("nan")
    check_residual: float = float("nan")

    @property
    def M(self) -> int:
        return self.coeffs.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s = 2.0 * x
        return np.polynomial.chebyshev.chebval(s, self.coeffs) / np.sqrt(0.25 - x * x)

    def odd_fraction(self) -> float:
        """Energy in odd-index coefficients relative to the total."""
        c = np.abs(self.coeffs) ** 2
        return float(c[1::2].sum() / c.sum())

    def tail_fraction(self) -> float:
        """Energy in the last quarter of the spectrum relative to the total."""
        c = np.abs(self.coeffs) ** 2
        return float(c[-max(1, self.M // 4):].sum() / c.sum())


@dataclass(frozen=True)
class FluxValue:
    k: float
    flux: complex


@dataclass(frozen=True)
class FieldSample:
    point: tuple[float, float]
    value: complex


def default_truncation(k: float) -> int:
    """Scan policy ``M = max(32, ceil(4k))``."""
    return max(32, int(math.ceil(4.0 * k)))


def quadrature_count(k: float, M: int) -> int:
    return max(2 * M, int(math.ceil(8.0 * k)))


def _check(k: float, M: int) -> tuple[float, int]:
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    if int(M) != M or not (M_MIN <= M <= M_MAX):
        raise ValueError(f"truncation order must be an integer in [{M_MIN}, {M_MAX}], got {M!r}")
    return k, int(M)


def _cheb_nodes(N: int) -> tuple[np.ndarray, np.ndarray]:
    theta = (2.0 * np.arange(N) + 1.0) * math.pi / (2.0 * N)
    return np.cos(theta), theta


def _log_moments(N: int) -> np.ndarray:
    lam = np.empty(N)
    lam[0] = -math.pi * math.log(2.0)
    lam[1:] = -math.pi / np.arange(1, N)
    return lam


def _log_weights(s: np.ndarray, N: int) -> np.ndarray:
    """Product weights ``W[j, i]`` so that sum_i W[j,i] g(t_i) integrates
    ``ln|s_j - t| g(t) / sqrt(1-t^2)`` exactly for polynomials of degree < N."""
    n = np.arange(N)
    rows = _log_moments(N) * np.cos(np.outer(np.arccos(np.clip(s, -1.0, 1.0)), n))
    return dct(rows, type=3, axis=1) / N


def _smooth_kernel(d: np.ndarray, k: float):
    """J0(kd) and the entire remainder of the kernel in the ``t`` variable."""
    j0, reg = specfun.kernel_parts(k * d)
    smooth = 0.25j * j0 - 0.25 * reg - _INV_TWO_PI * math.log(0.25 * k) * j0
    return j0, smooth


def _kernel_rows(s: np.ndarray, t: np.ndarray, k: float) -> np.ndarray:
    """Discrete single-layer operator mapping density-factor values at the
    Chebyshev nodes ``t`` to potential values at the points ``s``."""
    N = t.size
    W = _log_weights(s, N)
    d = 0.5 * np.abs(s[:, None] - t[None, :])
    j0, smooth = _smooth_kernel(d, k)
    return W * (-_INV_TWO_PI * j0) + (math.pi / N) * smooth


def _basis(t: np.ndarray, M: int) -> np.ndarray:
    return np.cos(np.outer(np.arccos(t), np.arange(M)))


def assemble(k: float, M: int) -> GalerkinSystem:
    """Galerkin matrix ``A[p, m] = <S_k(w T_m), w T_p>`` and right-hand side."""
    k, M = _check(k, M)
    N = quadrature_count(k, M)
    t, _ = _cheb_nodes(N)
    K = _kernel_rows(t, t, k)
    K = 0.5 * (K + K.T)  # the two DCT passes differ by rounding only
    E = _basis(t, M)
    A = (math.pi / N) * (E.T @ K @ E)
    b = np.zeros(M, dtype=complex)
    b[0] = 0.5 * math.pi
    return GalerkinSystem(k, A, b, N)


def apply_single_layer(density: ChebDensity, x) -> np.ndarray:
    """Evaluate :math:`S_k f` at points ``x`` of the segment."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = density.k
    N = quadrature_count(k, density.M)
    t, _ = _cheb_nodes(N)
    phi = _basis(t, density.M) @ density.coeffs
    return _kernel_rows(2.0 * x, t, k) @ phi


def check_nodes(count: int = CHECK_NODES) -> np.ndarray:
    """Second-kind Chebyshev points on the segment; never first-kind nodes."""
    return 0.5 * np.cos(np.arange(1, count + 1) * math.pi / (count + 1))


def solve_density(k: float, M: int) -> ChebDensity:
    """Solve :math:`S_k f_k = 1/2` and report algebraic and off-node residuals."""
    system = assemble(k, M)
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            a = scipy.linalg.solve(system.matrix, system.rhs)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
            raise SingularSystemError(f"Galerkin system singular at k={k!r}, M={M}: {exc}") from exc
    if not np.all(np.isfinite(a)):
        raise SingularSystemError(f"non-finite coefficients at k={k!r}, M={M}")
    residual = float(np.max(np.abs(system.matrix @ a - system.rhs)))
    density = ChebDensity(system.k, a, residual)
    check = float(np.max(np.abs(apply_single_layer(density, check_nodes()) - 0.5)))
    return ChebDensity(system.k, a, residual, check)


def flux(density: ChebDensity) -> FluxValue:
    r"""Total flux :math:`\int_\Gamma f = \pi a_0`."""
    return FluxValue(density.k, complex(math.pi * density.coeffs[0]))


def distance_to_segment(x1: float, x2: float) -> float:
    dx = max(abs(x1) - HALF_LENGTH, 0.0)
    return math.hypot(dx, x2)


def _complex_log_moments(z: np.ndarray, N: int) -> np.ndarray:
    """``int ln|z-t| T_n(t) / sqrt(1-t^2) dt`` for complex ``z`` off [-1, 1]."""
    root = np.sqrt(z * z - 1.0)
    zeta = z - root
    flip = np.abs(zeta) > 1.0
    zeta = np.where(flip, z + root, zeta)
    out = np.empty((z.size, N))
    out[:, 0] = -math.pi * np.log(2.0 * np.abs(zeta))
    if N > 1:
        n = np.arange(1, N)
        with np.errstate(under="ignore"):
            powers = zeta[:, None] ** n[None, :]
        out[:, 1:] = -(math.pi / n) * powers.real
    return out


def evaluate_field_many(density: ChebDensity, points) -> np.ndarray:
    r"""Representation formula :math:`u(x) = 2\int_\Gamma G_k(x, y) f(y)\,dy`.

    ``points`` is an ``(P, 2)`` array. Points closer than ``1e-6`` to the
    segment are refused.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    for x1, x2 in pts:
        if distance_to_segment(x1, x2) <= FIELD_MIN_DISTANCE:
            raise ValueError(f"point ({x1}, {x2}) lies on or too close to the segment")
    k = density.k
    N = max(quadrature_count(k, density.M), 64)
    t, _ = _cheb_nodes(N)
    phi = _basis(t, density.M) @ density.coeffs
    x1 = pts[:, 0:1]
    x2 = np.abs(pts[:, 1:2])
    d = np.sqrt((x1 - 0.5 * t[None, :]) ** 2 + x2 * x2)
    j0, smooth = _smooth_kernel(d, k)
    g = j0 * phi[None, :]
    ghat = dct(g, type=2, axis=1) / N
    ghat[:, 0] *= 0.5
    z = 2.0 * (pts[:, 0] + 1j * np.abs(pts[:, 1]))
    log_part = np.sum(ghat * _complex_log_moments(z, N), axis=1)
    smooth_part = (math.pi / N) * (smooth @ phi)
    return 2.0 * (-_INV_TWO_PI * log_part + smooth_part)


def evaluate_field(density: ChebDensity, point) -> FieldSample:
    x1, x2 = (float(v) for v in point)
    value = evaluate_field_many(density, [[x1, x2]])[0]
    return FieldSample((x1, x2), complex(value))


# ---------------------------------------------------------------------------
# independent cross-check: piecewise-constant collocation on a graded mesh
# ---------------------------------------------------------------------------

def graded_mesh(N: int, exponent: float = 3.0) -> np.ndarray:
    """Panel endpoints on the segment, refined toward both tips."""
    s = np.linspace(-1.0, 1.0, N + 1)
    return HALF_LENGTH * np.sign(s) * (1.0 - (1.0 - np.abs(s)) ** exponent)


def _log_antiderivative(u: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u == 0.0, 0.0, u * np.log(np.abs(u)) - u)


def solve_density_oracle(k: float, N: int) -> FluxValue:
    """Flux from piecewise-constant collocation at panel midpoints.

    ``ln|x-y|`` is integrated exactly over every panel; the continuous
    remainder of the kernel by 4-point Gauss-Legendre. Bessel values come
    from :mod:`scipy.special`, so this path shares no code with the
    spectral solver.
    """
    k = float(k)
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    if int(N) != N or not (ORACLE_N_MIN <= N <= ORACLE_N_MAX):
        raise ValueError(f"panel count must be an integer in [{ORACLE_N_MIN}, {ORACLE_N_MAX}], got {N!r}")
    edges = graded_mesh(int(N))
    a, b = edges[:-1], edges[1:]
    mid, h = 0.5 * (a + b), b - a
    gx, gw = np.polynomial.legendre.leggauss(4)
    X = mid[:, None]
    A = -_INV_TWO_PI * (_log_antiderivative(b[None, :] - X) - _log_antiderivative(a[None, :] - X))
    A = A.astype(complex)
    for xq, wq in zip(gx, gw):
        y = mid + 0.5 * h * xq
        r = np.abs(X - y[None, :])
        kr = k * r
        remainder = 0.25j * (sc_special.j0(kr) + 1j * sc_special.y0(kr)) + _INV_TWO_PI * np.log(r)
        A += (0.5 * wq * h)[None, :] * remainder
    try:
        f = scipy.linalg.solve(A, np.full(A.shape[0], 0.5, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"collocation system singular at k={k!r}, N={N}") from exc
    return FluxValue(k, complex(np.sum(f * h)))
