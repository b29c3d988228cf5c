r"""Bessel, Hankel and Struve functions of integer order on the positive real axis.

Everything here is evaluated in double precision from three building blocks:

* the ascending power series (small arguments),
* Miller's downward recurrence normalised by :math:`J_0 + 2\sum J_{2k} = 1`,
  with :math:`Y_0, Y_1` recovered from the Neumann series (moderate arguments),
* the Hankel asymptotic expansion for orders 0 and 1 (large arguments).

Higher orders of :math:`Y_n` always come from upward recurrence, which is
stable because :math:`Y_n` is the dominant solution. The Hankel function is
:math:`H_n = J_n + i Y_n`, negative orders follow from
:math:`H_{-n} = (-1)^n H_n`.

All functions accept a scalar or an array for ``z`` and return the same shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

EULER_GAMMA = 0.57721566490153286061
ORDER_CAP = 512
Z_MIN = 1e-8
Z_MAX = 1e6

_TWO_OVER_PI = 2.0 / math.pi
_SQRT_HALF = math.sqrt(0.5)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Thresholds:
    """Regime switch points. Each one is straddled by an oracle test."""

    series_max: float = 8.0
    asymptotic_min: float = 25.0
    struve_series_max: float = 8.0
    struve_asymptotic_min: float = 40.0
    struve_quadrature_nodes: int = 160


THRESHOLDS = Thresholds()


class Regime(str, Enum):
    SERIES = "series"
    RECURRENCE = "recurrence"
    ASYMPTOTIC = "asymptotic"
    QUADRATURE = "quadrature"


class OrderError(ValueError):
    """Order outside the supported range."""


class ArgumentError(ValueError):
    """Argument outside the supported range."""


class SpecialOverflowError(OverflowError):
    """Result exceeds the double precision range."""


@dataclass(frozen=True)
class SpecialValue:
    re: float
    im: float
    regime: Regime

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


def _check_order(n, cap=ORDER_CAP) -> int:
    if isinstance(n, (bool, np.bool_)) or int(n) != n:
        raise OrderError(f"order must be an integer, got {n!r}")
    n = int(n)
    if abs(n) > cap:
        raise OrderError(f"|n| = {abs(n)} exceeds the order cap {cap}")
    return n


def _check_argument(z):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < Z_MIN) or np.any(arr > Z_MAX):
        raise ArgumentError(f"argument must lie in [{Z_MIN:g}, {Z_MAX:g}]")
    return arr


def _shape_like(z, out):
    if np.ndim(z) == 0:
        return out.reshape(()).item()
    return out


def _psi_int(m: int) -> float:
    # digamma at a positive integer, by the harmonic partial sum
    return -EULER_GAMMA + math.fsum(1.0 / j for j in range(1, m))


# ---------------------------------------------------------------------------
# power series
# ---------------------------------------------------------------------------

def _series_j(n: int, z: np.ndarray) -> np.ndarray:
    half = 0.5 * z
    q = -half * half
    if n == 0:
        term = np.ones_like(z)
    else:
        with np.errstate(under="ignore", divide="ignore"):
            term = np.exp(n * np.log(half) - math.lgamma(n + 1.0))
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (n + k))
        total += term
        if np.all(np.abs(term) <= _EPS * 0.25 * np.abs(total)):
            break
    return total


def _series_y01(z: np.ndarray):
    """Y0, Y1 from the ascending series, plus the log-free part of Y0."""
    half = 0.5 * z
    q = -half * half
    with np.errstate(divide="ignore"):
        log_half = np.log(half)
    j0 = _series_j(0, z)
    j1 = _series_j(1, z)

    # sum psi(k+1) q^k / (k!)^2  and  sum (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
    t0 = np.ones_like(z)
    t1 = np.ones_like(z)
    psi_k1 = -EULER_GAMMA
    s0 = psi_k1 * t0
    s1 = (psi_k1 + psi_k1 + 1.0) * t1
    for k in range(1, 200):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        psi_k1 += 1.0 / k
        d0 = psi_k1 * t0
        d1 = (2.0 * psi_k1 + 1.0 / (k + 1)) * t1
        s0 += d0
        s1 += d1
        if np.all(np.abs(t0) * (abs(psi_k1) + 1.0) <= _EPS * 0.25 * np.abs(s0)) and np.all(
            np.abs(t1) * (abs(psi_k1) + 1.0) <= _EPS * 0.25 * np.abs(s1)
        ):
            break
    y0_reg = -_TWO_OVER_PI * s0
    with np.errstate(divide="ignore", invalid="ignore"):
        y0 = _TWO_OVER_PI * log_half * j0 + y0_reg
        y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * log_half * j1 - half * s1 / math.pi
    return j0, j1, y0, y1, y0_reg


# ---------------------------------------------------------------------------
# Miller recurrence
# ---------------------------------------------------------------------------

def _miller_start(m: float) -> int:
    m = max(m, 1.0)
    start = int(m + 30 + math.sqrt(160.0 * m))
    return start + (start % 2)


def _miller(z: np.ndarray, nmax: int, want_y: bool = True):
    """J_0..J_nmax by downward recurrence; Y0, Y1 from Neumann series.

    Returns (J array of shape (nmax+1, len(z)), Y0, Y1).
    """
    nmax = max(nmax, 1)
    start = _miller_start(max(float(z.max()), float(nmax)))
    inv = 2.0 / z
    f_up = np.zeros_like(z)
    f = np.full_like(z, 1e-30)
    js = np.zeros((nmax + 1, z.size))
    norm = np.zeros_like(z)
    s_even = np.zeros_like(z)  # sum_{k>=1} (-1)^k J_{2k} / k
    s_odd = np.zeros_like(z)   # sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k, regrouped by odd index
    for j in range(start, -1, -1):
        if j <= nmax:
            js[j] = f
        if j == 0:
            norm += f
        elif j % 2 == 0:
            k = j // 2
            norm += 2.0 * f
            s_even += (-1.0 if k % 2 else 1.0) * f / k
        else:
            sign = -1.0 if ((j - 1) // 2) % 2 else 1.0
            c = 2.0 / (j + 1) + (2.0 / (j - 1) if j >= 3 else 0.0)
            s_odd -= sign * c * f
        if j > 0:
            f_up, f = f, j * inv * f - f_up
        big = np.abs(f) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            f, f_up = f * scale, f_up * scale
            js *= scale
            norm *= scale
            s_even *= scale
            s_odd *= scale
    js /= norm
    if not want_y:
        return js, None, None
    s_even /= norm
    s_odd /= norm
    j0, j1 = js[0], js[1]
    log_term = np.log(0.5 * z) + EULER_GAMMA
    y0 = _TWO_OVER_PI * log_term * j0 - 2.0 * _TWO_OVER_PI * s_even
    y1 = -_TWO_OVER_PI * j0 / z + _TWO_OVER_PI * log_term * j1 + _TWO_OVER_PI * s_odd
    return js, y0, y1


# ---------------------------------------------------------------------------
# Hankel asymptotic expansion, orders 0 and 1
# ---------------------------------------------------------------------------

def _asymptotic_pq(nu: int, z: np.ndarray):
    mu = 4.0 * nu * nu
    p = np.ones_like(z)
    q = np.zeros_like(z)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    prev = np.full_like(z, np.inf)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        mag = np.abs(term)
        active &= (mag < prev) & (prev > _EPS * 1e-2)
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        r = k % 4
        if r == 0:
            p += contrib
        elif r == 1:
            q += contrib
        elif r == 2:
            p -= contrib
        else:
            q -= contrib
        prev = np.where(active, mag, prev)
    return p, q


def _asymptotic_jy(nu: int, z: np.ndarray):
    p, q = _asymptotic_pq(nu, z)
    c, s = np.cos(z), np.sin(z)
    if nu == 0:
        cw, sw = (c + s) * _SQRT_HALF, (s - c) * _SQRT_HALF
    else:
        cw, sw = (s - c) * _SQRT_HALF, -(s + c) * _SQRT_HALF
    amp = np.sqrt(_TWO_OVER_PI / z)
    return amp * (p * cw - q * sw), amp * (p * sw + q * cw)


# ---------------------------------------------------------------------------
# orders 0 and 1, vectorised over regimes
# ---------------------------------------------------------------------------

def _jy01(z: np.ndarray):
    z = np.asarray(z, dtype=float).ravel()
    j0 = np.empty_like(z)
    j1 = np.empty_like(z)
    y0 = np.empty_like(z)
    y1 = np.empty_like(z)
    lo = z <= THRESHOLDS.series_max
    hi = z > THRESHOLDS.asymptotic_min
    mid = ~(lo | hi)
    if np.any(lo):
        a, b, c, d, _ = _series_y01(z[lo])
        j0[lo], j1[lo], y0[lo], y1[lo] = a, b, c, d
    if np.any(mid):
        js, c, d = _miller(z[mid], 1)
        j0[mid], j1[mid], y0[mid], y1[mid] = js[0], js[1], c, d
    if np.any(hi):
        a, c = _asymptotic_jy(0, z[hi])
        b, d = _asymptotic_jy(1, z[hi])
        j0[hi], j1[hi], y0[hi], y1[hi] = a, b, c, d
    return j0, j1, y0, y1


def kernel_parts(z):
    r"""Return ``(J0(z), Y0(z) - (2/pi) ln(z/2) J0(z))`` for ``z >= 0``.

    The second array is the log-free part of :math:`Y_0`; it is an entire
    function of :math:`z^2` and stays finite at ``z = 0`` where it equals
    :math:`(2/\pi)\gamma`. The single-layer kernel splits into a logarithm
    times ``J0`` plus a smooth remainder built from these two pieces.
    """
    zarr = np.asarray(z, dtype=float)
    flat = zarr.ravel()
    j0 = np.empty_like(flat)
    reg = np.empty_like(flat)
    lo = flat <= THRESHOLDS.series_max
    if np.any(lo):
        a, _, _, _, r = _series_y01(flat[lo])
        j0[lo], reg[lo] = a, r
    if np.any(~lo):
        zz = flat[~lo]
        a, _, c, _ = _jy01(zz)
        j0[~lo] = a
        reg[~lo] = c - _TWO_OVER_PI * np.log(0.5 * zz) * a
    return j0.reshape(zarr.shape), reg.reshape(zarr.shape)


# ---------------------------------------------------------------------------
# general integer order
# ---------------------------------------------------------------------------

def _series_limit(n: int) -> float:
    # beyond z^2/4 = n+1 the alternating terms grow before they shrink
    return max(THRESHOLDS.series_max, 2.0 * math.sqrt(n + 1.0))


def _j_regime(n: int, zmax: float) -> Regime:
    if zmax <= _series_limit(n):
        return Regime.SERIES
    if zmax <= THRESHOLDS.asymptotic_min or 2 * n >= zmax:
        return Regime.RECURRENCE
    return Regime.ASYMPTOTIC


def _y_regime(zval: float) -> Regime:
    if zval <= THRESHOLDS.series_max:
        return Regime.SERIES
    if zval <= THRESHOLDS.asymptotic_min:
        return Regime.RECURRENCE
    return Regime.ASYMPTOTIC


def _upward(n: int, z: np.ndarray, f0: np.ndarray, f1: np.ndarray) -> np.ndarray:
    if n == 0:
        return f0
    inv = 2.0 / z
    a, b = f0, f1
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, n):
            a, b = b, m * inv * b - a
    return b


def _jn_nonneg(n: int, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    series = z <= _series_limit(n)
    asym = (~series) & (z > THRESHOLDS.asymptotic_min) & (2 * n < z)
    miller = ~(series | asym)
    if np.any(series):
        out[series] = _series_j(n, z[series])
    if np.any(miller):
        js, _, _ = _miller(z[miller], max(n, 1), want_y=False)
        out[miller] = js[n]
    if np.any(asym):
        zz = z[asym]
        a, _ = _asymptotic_jy(0, zz)
        b, _ = _asymptotic_jy(1, zz)
        out[asym] = _upward(n, zz, a, b)
    return out


def _yn_nonneg(n: int, z: np.ndarray) -> np.ndarray:
    _, _, y0, y1 = _jy01(z)
    out = _upward(n, z, y0, y1)
    if not np.all(np.isfinite(out)):
        raise SpecialOverflowError(f"Y_{n}(z) overflows double precision for the smallest z given")
    return out


def _parity(n: int) -> float:
    return -1.0 if (n < 0 and n % 2) else 1.0


def bessel_j(n: int, z):
    """Bessel function of the first kind :math:`J_n(z)`."""
    n = _check_order(n)
    zarr = _check_argument(z)
    out = _jn_nonneg(abs(n), zarr.ravel()).reshape(zarr.shape) * _parity(n)
    return _shape_like(z, out)


def bessel_y(n: int, z):
    """Bessel function of the second kind :math:`Y_n(z)`."""
    n = _check_order(n)
    zarr = _check_argument(z)
    out = _yn_nonneg(abs(n), zarr.ravel()).reshape(zarr.shape) * _parity(n)
    return _shape_like(z, out)


def _hankel(n: int, zarr: np.ndarray) -> np.ndarray:
    flat = zarr.ravel()
    m = abs(n)
    out = (_jn_nonneg(m, flat) + 1j * _yn_nonneg(m, flat)) * _parity(n)
    return out.reshape(zarr.shape)


def hankel1(n: int, z):
    """Hankel function of the first kind :math:`H_n = J_n + i Y_n`."""
    n = _check_order(n)
    return _shape_like(z, _hankel(n, _check_argument(z)))


def hankel1_prime(n: int, z):
    """Derivative :math:`H_n'(z) = -H_{n+1}(z) + (n/z) H_n(z)`."""
    n = _check_order(n)
    zarr = _check_argument(z)
    out = -_hankel(n + 1, zarr) + (n / zarr) * _hankel(n, zarr)
    return _shape_like(z, out)


# ---------------------------------------------------------------------------
# Struve functions
# ---------------------------------------------------------------------------

def _struve_series(nu: int, z: np.ndarray) -> np.ndarray:
    half = 0.5 * z
    q = -half * half
    term = half ** (nu + 1) / (math.gamma(1.5) * math.gamma(nu + 1.5))
    total = term.copy()
    for k in range(0, 200):
        term = term * q / ((k + 1.5) * (k + nu + 1.5))
        total += term
        if np.all(np.abs(term) <= _EPS * 0.25 * np.abs(total)):
            break
    return total


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(m: int):
    if m not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(m)
        _GL_CACHE[m] = (0.25 * math.pi * (x + 1.0), 0.25 * math.pi * w)
    return _GL_CACHE[m]


def _struve_quadrature(nu: int, z: np.ndarray) -> np.ndarray:
    phi, w = _gauss_legendre(THRESHOLDS.struve_quadrature_nodes)
    s = np.sin(np.outer(z, np.sin(phi)))
    if nu == 0:
        return _TWO_OVER_PI * (s @ w)
    return _TWO_OVER_PI * z * (s @ (w * np.cos(phi) ** 2))


def _struve_minus_y(nu: int, z: np.ndarray) -> np.ndarray:
    # St_nu - Y_nu ~ (1/pi) sum_k Gamma(k+1/2) (z/2)^(nu-2k-1) / Gamma(nu+1/2-k)
    u = (2.0 / z) ** 2
    if nu == 0:
        term = (2.0 / math.pi) / z          # k = 0
        coef = lambda k: -((k - 0.5) ** 2)  # ratio Gamma(k+1/2)^2 / Gamma(k-1/2)^2 with sign
    else:
        term = np.full_like(z, 2.0 / math.pi)
        coef = lambda k: -((k - 0.5) * (k - 1.5)) if k > 1 else 0.25
    total = np.array(term, dtype=float, copy=True)
    term = np.array(term, dtype=float, copy=True)
    prev = np.abs(term)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 80):
        term = term * coef(k) * u
        mag = np.abs(term)
        active &= (mag < prev) | (k == 1)
        active &= prev > _EPS * 1e-2 * np.abs(total)
        if not np.any(active):
            break
        total += np.where(active, term, 0.0)
        prev = np.where(active, mag, prev)
    return total


def _struve_regime(zval: float) -> Regime:
    if zval <= THRESHOLDS.struve_series_max:
        return Regime.SERIES
    if zval <= THRESHOLDS.struve_asymptotic_min:
        return Regime.QUADRATURE
    return Regime.ASYMPTOTIC


def _struve_array(nu: int, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    lo = z <= THRESHOLDS.struve_series_max
    hi = z > THRESHOLDS.struve_asymptotic_min
    mid = ~(lo | hi)
    if np.any(lo):
        out[lo] = _struve_series(nu, z[lo])
    if np.any(mid):
        out[mid] = _struve_quadrature(nu, z[mid])
    if np.any(hi):
        zz = z[hi]
        _, _, y0, y1 = _jy01(zz)
        out[hi] = (y0 if nu == 0 else y1) + _struve_minus_y(nu, zz)
    return out


def struve(n: int, z):
    """Struve function :math:`\\mathrm{St}_n(z)` for ``n`` in {0, 1}."""
    if n not in (0, 1):
        raise OrderError(f"Struve functions are provided for orders 0 and 1, got {n!r}")
    zarr = _check_argument(z)
    return _shape_like(z, _struve_array(int(n), zarr.ravel()).reshape(zarr.shape))


def h0_partial_integral(t):
    r""":math:`\int_0^t H_0 = t H_0(t) + \frac{\pi}{2} t (\mathrm{St}_0(t) H_1(t) - \mathrm{St}_1(t) H_0(t))`."""
    tarr = np.asarray(t, dtype=float)
    if np.any(tarr <= 0):
        raise ArgumentError("upper limit must be positive")
    tarr = _check_argument(tarr)
    flat = tarr.ravel()
    j0, j1, y0, y1 = _jy01(flat)
    h0 = j0 + 1j * y0
    h1 = j1 + 1j * y1
    st0 = _struve_array(0, flat)
    st1 = _struve_array(1, flat)
    out = flat * h0 + 0.5 * math.pi * flat * (st0 * h1 - st1 * h0)
    return _shape_like(t, out.reshape(tarr.shape))


# ---------------------------------------------------------------------------
# scalar introspection
# ---------------------------------------------------------------------------

def regime(kind: str, n: int, z: float) -> Regime:
    """Name the evaluation regime used for a scalar ``(kind, n, z)``."""
    m = abs(_check_order(n))
    z = float(_check_argument(z))
    if kind == "j":
        return _j_regime(m, z)
    if kind in ("y", "hankel1"):
        return _y_regime(z) if m <= 1 else Regime.RECURRENCE
    if kind == "struve":
        return _struve_regime(z)
    raise ValueError(f"unknown function kind {kind!r}")


def evaluate(kind: str, n: int, z: float) -> SpecialValue:
    """Evaluate one of ``j``, ``y``, ``hankel1``, ``struve`` and tag the regime."""
    funcs = {"j": bessel_j, "y": bessel_y, "hankel1": hankel1, "struve": struve}
    if kind not in funcs:
        raise ValueError(f"unknown function kind {kind!r}")
    v = complex(funcs[kind](n, float(z)))
    return SpecialValue(v.real, v.imag, regime(kind, n, z))
