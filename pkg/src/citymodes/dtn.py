r"""Modal symbols of the exterior Dirichlet-to-Neumann map on the unit circle.

For boundary data :math:`f = \sum a_n e^{in\theta}` the outgoing exterior
solution has radial derivative :math:`\sum a_n \lambda_n(k) e^{in\theta}` at
``r = 1`` with

.. math:: \lambda_n(k) = k \frac{H_n'(k)}{H_n(k)}.

The symbol is computed from the ratio :math:`\sigma_n = k H_{n+1}(k)/H_n(k)`,
which obeys :math:`\sigma_n = 2n - k^2/\sigma_{n-1}` and never overflows even
when :math:`H_n(k)` itself does (large ``n``, small ``k``). Then
:math:`\lambda_n = n - \sigma_n`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from . import specfun

MODE_CAP = specfun.ORDER_CAP


@dataclass(frozen=True)
class DtnCoefficient:
    n: int
    k: float
    value: complex


def _check(n: int, k: float) -> tuple[int, float]:
    if int(n) != n or abs(int(n)) > MODE_CAP:
        raise ValueError(f"mode index must be an integer with |n| <= {MODE_CAP}, got {n!r}")
    k = float(k)
    if not (specfun.Z_MIN <= k <= specfun.Z_MAX):
        raise ValueError(f"wavenumber must lie in [{specfun.Z_MIN:g}, {specfun.Z_MAX:g}], got {k!r}")
    return abs(int(n)), k


def _symbol(m: int, k: float) -> complex:
    h0 = specfun.hankel1(0, k)
    h1 = specfun.hankel1(1, k)
    sigma = k * h1 / h0
    for j in range(1, m + 1):
        sigma = 2 * j - k * k / sigma
    return m - sigma


def dtn_coeff(n: int, k: float) -> DtnCoefficient:
    """Symbol :math:`kH_n'(k)/H_n(k)`; even in ``n``."""
    m, k = _check(n, k)
    return DtnCoefficient(int(n), k, complex(_symbol(m, k)))


def dtn_symbols(n_max: int, k: float) -> list[complex]:
    """All symbols for ``n = 0..n_max`` in one recurrence sweep."""
    m, k = _check(n_max, k)
    h0 = specfun.hankel1(0, k)
    h1 = specfun.hankel1(1, k)
    sigma = k * h1 / h0
    out = [complex(-sigma)]
    for j in range(1, m + 1):
        sigma = 2 * j - k * k / sigma
        out.append(complex(j - sigma))
    return out


def dtn_limit_gap(n: int, k: float) -> float:
    """Distance of the symbol from its ``k -> 0`` limit ``-|n|``."""
    c = dtn_coeff(n, k)
    return abs(c.value + abs(int(n)))


def quadratic_form_real(modes: Iterable[tuple[int, complex]], k: float) -> float:
    r""":math:`\mathrm{Re}\langle T_k f, f\rangle = 2\pi \sum |a_n|^2 \mathrm{Re}\,\lambda_n(k)`.

    ``modes`` lists ``(n, a_n)`` pairs of a trigonometric polynomial.
    Repeated indices are summed before the form is taken.
    """
    amplitudes: dict[int, complex] = {}
    for n, a in modes:
        _check(n, k)
        amplitudes[int(n)] = amplitudes.get(int(n), 0j) + complex(a)
    if not amplitudes:
        return 0.0
    symbols = dtn_symbols(max(abs(n) for n in amplitudes), k)
    return 2.0 * math.pi * math.fsum(abs(a) ** 2 * symbols[abs(n)].real for n, a in amplitudes.items())
