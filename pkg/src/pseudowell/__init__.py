"""Bound states and scattering for two P-pseudo-Hermitian complex potentials in 1D."""

from .bound import BoundState, find_complex_pair, find_real_bound_states
from .potentials import Family, PotentialSpec
from .scattering import ScatteringData, amplitudes

__all__ = ["BoundState", "Family", "PotentialSpec", "ScatteringData", "amplitudes",
           "find_complex_pair", "find_real_bound_states"]
__version__ = "0.1.0"
