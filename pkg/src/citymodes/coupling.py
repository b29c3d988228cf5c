"""Coupling gap between the building oscillators and the ground flux.

A coupling frequency mode is a wavenumber ``k`` where

    F(k) = q(k^2) + p(k^2) * Re I(k) = 0,

with ``p(t) = c1*t - c2``, ``q(t) = t*(c3*t + c4)`` and ``I(k)`` the total
flux of the screen density. This module evaluates ``F`` on grids, brackets
its sign changes and refines each one to a root.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import screen_bie, specfun

K_TOL = 1e-12
RESIDUAL_TOL = 1e-8
MAX_ITER = 200


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class CityConstants:
    c1: float = 0.4
    c2: float = 2.0 / 3.0
    c3: float = 5.0 / 12.0
    c4: float = 5.0 / 48.0

    @property
    def regime(self) -> str:
        """``"positive"`` when all constants are positive, ``"negative_c3"``
        when ``c3 < 0``, otherwise ``"mixed"``."""
        if min(self.c1, self.c2, self.c3, self.c4) > 0:
            return "positive"
        if self.c3 < 0:
            return "negative_c3"
        return "mixed"


DEFAULT_CONSTANTS = CityConstants()


@dataclass(frozen=True)
class CouplingSample:
    k: float
    flux: complex
    gap: float


@dataclass(frozen=True)
class CouplingMode:
    k_root: float
    bracket: tuple[float, float]
    residual: float
    iterations: int
    close_neighbor: bool = False

    def as_record(self) -> dict:
        return {
            "k_root": self.k_root,
            "bracket": list(self.bracket),
            "residual": self.residual,
            "iterations": self.iterations,
            "close_neighbor": self.close_neighbor,
        }


def p_eval(t: float, c: CityConstants) -> float:
    return c.c1 * t - c.c2


def q_eval(t: float, c: CityConstants) -> float:
    return t * (c.c3 * t + c.c4)


def gap_from_flux(k: float, flux: complex, c: CityConstants) -> float:
    t = k * k
    return q_eval(t, c) + p_eval(t, c) * complex(flux).real


def gap_from_upper_trace(k: float, upper_flux: complex, c: CityConstants) -> float:
    """Same gap written against the upper trace ``dPhi/dx2 = -f`` of the field."""
    t = k * k
    return q_eval(t, c) - p_eval(t, c) * complex(upper_flux).real


def residual_scale(k: float, c: CityConstants) -> float:
    return max(1.0, abs(q_eval(k * k, c)))


def coupling_gap(k: float, c: CityConstants = DEFAULT_CONSTANTS, M: int | None = None) -> CouplingSample:
    k = float(k)
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    if M is None:
        M = screen_bie.default_truncation(k)
    density = screen_bie.solve_density(k, M)
    I = screen_bie.flux(density).flux
    return CouplingSample(k, I, gap_from_flux(k, I, c))


def low_freq_model(k: float) -> complex:
    """Small-``k`` flux model ``pi k H1(k)/H0(k)``."""
    return complex(math.pi * k * specfun.hankel1(1, k) / specfun.hankel1(0, k))


def high_freq_model(k: float) -> complex:
    """Large-``k`` flux model ``-ik``."""
    return complex(0.0, -float(k))


def low_gap_model(k: float, c: CityConstants) -> float:
    """Magnitude of the small-``k`` gap, ``c2 * pi / |ln k|``."""
    return c.c2 * math.pi / abs(math.log(k))


def high_gap_model(k: float, c: CityConstants) -> float:
    return c.c3 * k ** 4


def grid(k_lo: float, k_hi: float, points: int, spacing: Spacing | str = Spacing.LOG) -> np.ndarray:
    k_lo, k_hi = float(k_lo), float(k_hi)
    if not (0 < k_lo < k_hi) or not math.isfinite(k_hi):
        raise ValueError(f"need 0 < k_lo < k_hi, got [{k_lo!r}, {k_hi!r}]")
    if int(points) != points or points < 2:
        raise ValueError(f"need at least 2 grid points, got {points!r}")
    spacing = Spacing(spacing)
    if spacing is Spacing.LOG:
        ks = np.logspace(math.log10(k_lo), math.log10(k_hi), int(points))
    else:
        ks = np.linspace(k_lo, k_hi, int(points))
    ks[0], ks[-1] = k_lo, k_hi
    return ks


def scan(
    c: CityConstants,
    k_lo: float,
    k_hi: float,
    points: int,
    spacing: Spacing | str = Spacing.LOG,
    M: int | None = None,
    workers: int | None = None,
) -> list[CouplingSample]:
    """Gap on a grid. Output order follows the grid regardless of ``workers``."""
    ks = grid(k_lo, k_hi, points, spacing)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        return [coupling_gap(k, c, M) for k in ks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: coupling_gap(k, c, M), ks))


def _refine(c, lo: CouplingSample, hi: CouplingSample, M: int | None):
    """Brent's method on the bracket ``[lo.k, hi.k]``; never leaves it."""
    if lo.gap == 0.0:
        return lo.k, 0.0, 0
    if hi.gap == 0.0:
        return hi.k, 0.0, 0
    k_root, info = brentq(
        lambda k: coupling_gap(k, c, M).gap, lo.k, hi.k,
        xtol=1e-300, rtol=K_TOL, maxiter=MAX_ITER, full_output=True, disp=False,
    )
    residual = abs(coupling_gap(k_root, c, M).gap)
    return float(k_root), residual, int(info.function_calls)


def find_modes(
    samples: list[CouplingSample],
    c: CityConstants,
    M: int | None = None,
) -> list[CouplingMode]:
    """Refine every adjacent sign change of ``samples`` to a root of the gap.

    Roots closer together than the local grid spacing are both kept and
    flagged with ``close_neighbor``.
    """
    ordered = sorted(samples, key=lambda s: s.k)
    found: list[tuple[CouplingMode, float]] = []
    for lo, hi in zip(ordered, ordered[1:]):
        if lo.gap * hi.gap > 0:
            continue
        if lo.gap == 0.0 and found and found[-1][0].k_root == lo.k:
            continue
        k_root, res, its = _refine(c, lo, hi, M)
        mode = CouplingMode(k_root, (lo.k, hi.k), res, its)
        found.append((mode, hi.k - lo.k))
    modes = [m for m, _ in found]
    for i in range(len(modes) - 1):
        spacing = min(found[i][1], found[i + 1][1])
        if modes[i + 1].k_root - modes[i].k_root < spacing:
            modes[i] = _flag(modes[i])
            modes[i + 1] = _flag(modes[i + 1])
    return sorted(modes, key=lambda m: m.k_root)


def residual_ok(mode: CouplingMode, c: CityConstants) -> bool:
    """Residual invariant ``|F(k_root)| <= 1e-8 * max(1, |q(k_root^2)|)``."""
    return mode.residual <= RESIDUAL_TOL * residual_scale(mode.k_root, c)


def _flag(mode: CouplingMode) -> CouplingMode:
    return CouplingMode(mode.k_root, mode.bracket, mode.residual, mode.iterations, True)


def sign_changes(samples: list[CouplingSample]) -> int:
    gaps = [s.gap for s in sorted(samples, key=lambda s: s.k)]
    return sum(1 for g0, g1 in zip(gaps, gaps[1:]) if g0 * g1 < 0 or (g0 == 0.0 and g1 != 0.0))
