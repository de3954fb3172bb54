"""Stimulated-emission cloning of photon polarization with Lambda atoms.

Exact finite-basis simulation of the atom-cavity Hamiltonian, its
bosonic (Schwinger) form, the analytic F_l ladder, pairwise-entangled V
atoms, and cloning-fidelity analysis.
"""
from .errors import BasisError, EmptySectorError, NotHermitianError, ResourceError, SectorError
from .fock import Basis, ModeLayout, SparseHermitian, StateVector, enumerate_basis, evolve, evolve_many
from .ladder import evolve_ladder, fidelity_formula, large_m_solution
from .oscillator import OscillatorModelSpec, build_hampd, build_hampd1

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BasisError",
    "EmptySectorError",
    "ModeLayout",
    "NotHermitianError",
    "OscillatorModelSpec",
    "ResourceError",
    "SectorError",
    "SparseHermitian",
    "StateVector",
    "build_hampd",
    "build_hampd1",
    "enumerate_basis",
    "evolve",
    "evolve_ladder",
    "evolve_many",
    "fidelity_formula",
    "large_m_solution",
]
