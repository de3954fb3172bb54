"""Pairwise-entangled V atoms and their mapping onto Lambda atoms.

Atoms ``2k-1`` and ``2k`` form pair ``k``.  Each pair starts in the
singlet of its two upper levels; the Hamiltonian keeps every pair inside
the antisymmetric triplet

    e~  = (|e1 e2> - |e2 e1>) / sqrt2
    g1~ = (|g  e2> - |e2 g >) / sqrt2
    g2~ = (|e1 g > - |g  e1>) / sqrt2

which behaves exactly like a single Lambda atom with levels (e, g1, g2).
"""
from __future__ import annotations

import itertools
import math
from enum import IntEnum

import numpy as np

from .errors import SectorError
from .fock import Basis, SparseHermitian, StateVector
from .lambda_atoms import TENSOR_DIM_LIMIT, AtomLevel, _dipole_operator, tensor_basis

SECTOR_TOL = 1e-10
_R2 = 1 / math.sqrt(2)


class VAtomLevel(IntEnum):
    G = 0
    E1 = 1
    E2 = 2


_V_EXCITED = (VAtomLevel.E1, VAtomLevel.E2)

# Lambda level -> two-atom components of the corresponding pair state.
PAIR_STATES: dict[int, tuple[tuple[tuple[int, int], float], ...]] = {
    AtomLevel.E: (((VAtomLevel.E1, VAtomLevel.E2), _R2), ((VAtomLevel.E2, VAtomLevel.E1), -_R2)),
    AtomLevel.G1: (((VAtomLevel.G, VAtomLevel.E2), _R2), ((VAtomLevel.E2, VAtomLevel.G), -_R2)),
    AtomLevel.G2: (((VAtomLevel.E1, VAtomLevel.G), _R2), ((VAtomLevel.G, VAtomLevel.E1), -_R2)),
}


def v_basis(n_atoms: int, photon_cap: int, excitations: int | None = None, max_dim: int = TENSOR_DIM_LIMIT) -> Basis:
    return tensor_basis(n_atoms, photon_cap, excitations, excited_levels=_V_EXCITED, max_dim=max_dim)


def build_v_hamiltonian(
    n_atoms: int,
    gamma: float,
    photon_cap: int,
    excitations: int | None = None,
    max_dim: int = TENSOR_DIM_LIMIT,
) -> SparseHermitian:
    """``gamma (a1^dagger sum |g><e1| + a2^dagger sum |g><e2|) + h.c.``"""
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    basis = v_basis(n_atoms, photon_cap, excitations, max_dim)
    couplings = ((VAtomLevel.G, VAtomLevel.E1, 0), (VAtomLevel.G, VAtomLevel.E2, 1))
    return _dipole_operator(basis, n_atoms, gamma, couplings)


def v_model(n_pairs: int, m: int, gamma: float = 1.0, max_dim: int = TENSOR_DIM_LIMIT):
    """Hamiltonian and singlet initial state for ``n_pairs`` pairs and ``m`` photons."""
    excitations = m + 2 * n_pairs
    H = build_v_hamiltonian(2 * n_pairs, gamma, excitations, excitations, max_dim)
    return H, singlet_initial_state(n_pairs, m, H.basis)


def _expand(levels: tuple[int, ...]):
    # Product of pair states -> {V-atom level tuple: amplitude}.
    parts = [PAIR_STATES[lv] for lv in levels]
    out = {}
    for combo in itertools.product(*parts):
        key = tuple(x for pair, _ in combo for x in pair)
        out[key] = math.prod(a for _, a in combo)
    return out


def singlet_initial_state(n_pairs: int, m: int, basis: Basis | None = None) -> StateVector:
    """Product of per-pair singlets with ``m`` photons in a1."""
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    if basis is None:
        basis = v_basis(2 * n_pairs, m + 2 * n_pairs, m + 2 * n_pairs)
    amps = {k + (m, 0): a for k, a in _expand((AtomLevel.E,) * n_pairs).items()}
    return StateVector.from_dict(basis, amps)


def _pair_overlaps(psi: StateVector, n_pairs: int) -> dict[tuple[int, ...], complex]:
    n_atoms = 2 * n_pairs
    photons = sorted({s[n_atoms:] for s in psi.basis.states})
    out = {}
    for levels in itertools.product((AtomLevel.G1, AtomLevel.G2, AtomLevel.E), repeat=n_pairs):
        expansion = _expand(levels)
        for ph in photons:
            total = sum(a * psi.amplitude(k + ph) for k, a in expansion.items())
            if total != 0:
                out[tuple(int(v) for v in levels) + ph] = total
    return out


def pair_sector_deficit(psi: StateVector, n_pairs: int) -> float:
    """Weight of ``psi`` outside the per-pair antisymmetric triplets."""
    return psi.norm() ** 2 - sum(abs(a) ** 2 for a in _pair_overlaps(psi, n_pairs).values())


def pair_substitution_map(psi: StateVector, n_pairs: int, target: Basis | None = None) -> StateVector:
    """Replace each pair's triplet state by the matching Lambda level.

    Raises :class:`SectorError` if more than ``1e-10`` of the weight lies
    outside the triplet sector.
    """
    overlaps = _pair_overlaps(psi, n_pairs)
    deficit = psi.norm() ** 2 - sum(abs(a) ** 2 for a in overlaps.values())
    if deficit > SECTOR_TOL:
        raise SectorError(f"state has weight {deficit:.3g} outside the pair triplet sector", deficit=deficit)
    if target is None:
        n_atoms = 2 * n_pairs
        exc = {
            s[n_atoms] + s[n_atoms + 1] + sum(1 for v in s[:n_atoms] if v in _V_EXCITED)
            for s, a in zip(psi.basis.states, psi.amplitudes)
            if a != 0
        }
        if len(exc) != 1:
            raise SectorError("state mixes excitation numbers; pass a target basis")
        # two excited V atoms per excited Lambda atom
        excitations = exc.pop() - n_pairs
        target = tensor_basis(n_pairs, excitations, excitations)
    return StateVector.from_dict(target, overlaps)


def rotate_pair_levels(psi: StateVector, n_atoms: int, U: np.ndarray) -> StateVector:
    """Apply the same 2x2 unitary to (e1, e2) of every atom."""
    basis = psi.basis
    U = np.asarray(U, dtype=complex)
    single = np.eye(3, dtype=complex)
    single[1:, 1:] = U
    out = np.zeros(len(basis), dtype=complex)
    for s, a in zip(basis.states, psi.amplitudes):
        if a == 0:
            continue
        choices = [[(lv, single[lv, s[k]]) for lv in range(3) if single[lv, s[k]] != 0] for k in range(n_atoms)]
        for combo in itertools.product(*choices):
            key = tuple(lv for lv, _ in combo) + s[n_atoms:]
            out[basis.index[key]] += a * math.prod(c for _, c in combo)
    return StateVector(basis, out)
