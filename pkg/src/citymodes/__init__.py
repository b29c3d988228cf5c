"""Coupling frequency modes of a vibrating building on a half-space.

Modules: :mod:`specfun` (Bessel, Hankel and Struve functions), :mod:`dtn`
(Dirichlet-to-Neumann symbols on the unit circle), :mod:`screen_bie` (integral
equation on the building foundation), :mod:`coupling` (gap function and root
search) and :mod:`cli`.
"""
from .coupling import CityConstants, CouplingMode, CouplingSample, coupling_gap, find_modes, scan
from .screen_bie import ChebDensity, FluxValue, flux, solve_density

__all__ = [
    "CityConstants", "CouplingMode", "CouplingSample", "coupling_gap", "find_modes", "scan",
    "ChebDensity", "FluxValue", "flux", "solve_density",
]
__version__ = "0.1.0"
