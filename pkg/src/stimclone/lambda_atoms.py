"""N three-level Lambda atoms coupled to two photon modes.

The tensor basis lists one level per atom (g1 < g2 < e, atoms in index
order) followed by the two photon occupations.  Symmetric atomic states
map onto the five-mode oscillator model through the Schwinger
representation; the public map already includes the mode-b relabeling
(b1 -> b2, b2 -> -b1) that turns the symmetric coupling into the
antisymmetric one used everywhere else.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ResourceError, SectorError
from .fock import (
    Basis,
    ModeLayout,
    SparseHermitian,
    StateVector,
    operator_from_entries,
)

TENSOR_DIM_LIMIT = 3**4 * 64
SECTOR_TOL = 1e-10


class AtomLevel(IntEnum):
    G1 = 0
    G2 = 1
    E = 2


def tensor_layout(n_atoms: int, photon_cap: int) -> ModeLayout:
    modes = tuple(f"atom{k + 1}" for k in range(n_atoms)) + ("a1", "a2")
    return ModeLayout(modes, (2,) * n_atoms + (photon_cap, photon_cap))


def tensor_basis(
    n_atoms: int,
    photon_cap: int,
    excitations: int | None = None,
    excited_levels: tuple[int, ...] = (AtomLevel.E,),
    max_dim: int = TENSOR_DIM_LIMIT,
) -> Basis:
    """Atomic-photonic product basis.

    With ``excitations`` set only kets with ``photons + excited atoms ==
    excitations`` are kept; this sector is invariant under the dipole
    Hamiltonians, so nothing is truncated.  Otherwise all photon pairs with
    ``n_a1 + n_a2 <= photon_cap`` are included.
    """
    if n_atoms < 0 or photon_cap < 0:
        raise ValueError("atom count and photon cap must be non-negative")
    if excitations is not None and photon_cap < excitations:
        raise ValueError(f"photon_cap {photon_cap} cannot hold {excitations} excitations")
    states = []
    for levels in itertools.product(range(3), repeat=n_atoms):
        n_exc = sum(1 for v in levels if v in excited_levels)
        for n1 in range(photon_cap + 1):
            for n2 in range(photon_cap + 1 - n1):
                if excitations is not None and n1 + n2 + n_exc != excitations:
                    continue
                states.append(levels + (n1, n2))
                if len(states) > max_dim:
                    raise ResourceError(
                        f"tensor basis for {n_atoms} atoms exceeds dimension limit {max_dim}"
                    )
    return Basis(tensor_layout(n_atoms, photon_cap), tuple(states))


def _dipole_operator(basis: Basis, n_atoms: int, gamma: float, couplings) -> SparseHermitian:
    # couplings: (lower level, upper level, photon index); the photon is
    # absorbed when the atom goes lower -> upper.  Emission is the adjoint.
    rows, cols, vals = [], [], []
    for j, state in enumerate(basis.states):
        for k in range(n_atoms):
            for lower, upper, photon in couplings:
                if state[k] != lower:
                    continue
                n = state[n_atoms + photon]
                if n == 0:
                    continue
                target = list(state)
                target[k] = upper
                target[n_atoms + photon] = n - 1
                i = basis.index.get(tuple(target))
                if i is None:
                    raise ResourceError(f"absorption from {state} leaves the basis")
                rows.append(i)
                cols.append(j)
                vals.append(gamma * math.sqrt(n))
    return operator_from_entries(basis, rows, cols, vals, hermitize=True)


def build_lambda_hamiltonian(
    n_atoms: int,
    gamma: float,
    photon_cap: int,
    excitations: int | None = None,
    max_dim: int = TENSOR_DIM_LIMIT,
) -> SparseHermitian:
    """``gamma (a1 sum_k |e><g1| + a2 sum_k |e><g2|) + h.c.`` on the tensor basis.

    Pass ``excitations = m + N`` to work in the sector reached from ``N``
    excited atoms and ``m`` photons.
    """
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    basis = tensor_basis(n_atoms, photon_cap, excitations, max_dim=max_dim)
    couplings = ((AtomLevel.G1, AtomLevel.E, 0), (AtomLevel.G2, AtomLevel.E, 1))
    return _dipole_operator(basis, n_atoms, gamma, couplings)


def initial_state(basis: Basis, n_atoms: int, m: int) -> StateVector:
    """All atoms excited, ``m`` photons in mode a1."""
    return StateVector.fock(basis, (AtomLevel.E,) * n_atoms + (m, 0))


def lambda_model(n_atoms: int, m: int, gamma: float = 1.0, max_dim: int = TENSOR_DIM_LIMIT):
    """Hamiltonian and initial state for ``n_atoms`` excited atoms and ``m`` photons."""
    H = build_lambda_hamiltonian(n_atoms, gamma, m + n_atoms, excitations=m + n_atoms, max_dim=max_dim)
    return H, initial_state(H.basis, n_atoms, m)


# -- symmetric sector ------------------------------------------------------


def atomic_basis(n_atoms: int) -> Basis:
    layout = ModeLayout(tuple(f"atom{k + 1}" for k in range(n_atoms)), (2,) * n_atoms)
    return Basis(layout, tuple(itertools.product(range(3), repeat=n_atoms)))


def _arrangements(i: int, j: int, k: int):
    n = i + j + k
    for g1 in itertools.combinations(range(n), i):
        rest = [p for p in range(n) if p not in g1]
        for g2 in itertools.combinations(rest, j):
            levels = [AtomLevel.E] * n
            for p in g1:
                levels[p] = AtomLevel.G1
            for p in g2:
                levels[p] = AtomLevel.G2
            yield tuple(int(v) for v in levels)


def multinomial(i: int, j: int, k: int) -> int:
    return math.factorial(i + j + k) // (math.factorial(i) * math.factorial(j) * math.factorial(k))


def symmetric_amplitudes(i: int, j: int, k: int) -> dict[tuple[int, ...], float]:
    """Level tuples and amplitudes of the symmetric state with counts (g1, g2, e)."""
    if min(i, j, k) < 0:
        raise ValueError(f"sector counts must be non-negative, got {(i, j, k)}")
    amp = 1.0 / math.sqrt(multinomial(i, j, k))
    return {levels: amp for levels in _arrangements(i, j, k)}


def symmetric_state(i: int, j: int, k: int, basis: Basis | None = None) -> StateVector:
    """Equal superposition of all arrangements of i g1, j g2 and k e atoms."""
    amps = symmetric_amplitudes(i, j, k)
    basis = basis if basis is not None else atomic_basis(i + j + k)
    return StateVector.from_dict(basis, amps)


def collective_operator(n_atoms: int, to_level: int, from_level: int) -> np.ndarray:
    """Dense ``sum_k |to><from|_k`` on the 3^N atomic space."""
    basis = atomic_basis(n_atoms)
    out = np.zeros((len(basis), len(basis)))
    for j, levels in enumerate(basis.states):
        for k in range(n_atoms):
            if levels[k] == from_level:
                target = list(levels)
                target[k] = to_level
                out[basis.index[tuple(target)], j] += 1.0
    return out


@dataclass(frozen=True)
class SchwingerReport:
    counts: tuple[int, int, int]
    deviations: dict[str, float]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12


def verify_schwinger_action(n_atoms: int, i: int, j: int, k: int) -> SchwingerReport:
    """Compare collective transitions on ``|i, j, k>`` with oscillator bilinears.

    ``sum |g1><e|`` must act as ``b1^dagger c``, ``sum |e><g1|`` as
    ``b1 c^dagger`` and likewise for g2 / b2.
    """
    if i + j + k != n_atoms:
        raise ValueError("sector counts must add up to the atom count")
    basis = atomic_basis(n_atoms)
    psi = symmetric_state(i, j, k, basis).amplitudes

    def expected(di, dj, dk, factor):
        ni, nj, nk = i + di, j + dj, k + dk
        if factor == 0 or min(ni, nj, nk) < 0:
            return np.zeros(len(basis))
        return factor * symmetric_state(ni, nj, nk, basis).amplitudes

    G1, G2, E = AtomLevel.G1, AtomLevel.G2, AtomLevel.E
    cases = {
        "g1<-e": (G1, E, expected(1, 0, -1, math.sqrt(i + 1) * math.sqrt(k))),
        "g2<-e": (G2, E, expected(0, 1, -1, math.sqrt(j + 1) * math.sqrt(k))),
        "e<-g1": (E, G1, expected(-1, 0, 1, math.sqrt(i) * math.sqrt(k + 1))),
        "e<-g2": (E, G2, expected(0, -1, 1, math.sqrt(j) * math.sqrt(k + 1))),
    }
    deviations = {}
    for name, (to, frm, want) in cases.items():
        got = collective_operator(n_atoms, to, frm) @ psi
        deviations[name] = float(np.max(np.abs(got - want), initial=0.0))
    return SchwingerReport((i, j, k), deviations)


# -- oscillator correspondence ----------------------------------------------


def _sector_states(n_atoms: int):
    for i in range(n_atoms + 1):
        for j in range(n_atoms + 1 - i):
            yield i, j, n_atoms - i - j


def symmetric_projection(psi: StateVector, n_atoms: int) -> dict[tuple[int, ...], complex]:
    """Overlaps ``<i,j,k| <n1,n2| psi>`` keyed by Hampd1 kets ``(n1, n2, i, j, k)``."""
    out = {}
    photons = sorted({s[n_atoms:] for s in psi.basis.states})
    for i, j, k in _sector_states(n_atoms):
        sym = symmetric_amplitudes(i, j, k)
        for n1, n2 in photons:
            total = 0j
            for levels, amp in sym.items():
                total += amp * psi.amplitude(levels + (n1, n2))
            if total != 0:
                out[(n1, n2, i, j, k)] = total
    return out


def relabel_b(ket: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Image of a symmetric-coupling ket under b1 -> b2, b2 -> -b1, with its sign."""
    n1, n2, b1, b2, c = ket
    return (n1, n2, b2, b1, c), (-1) ** b2


def unrelabel_b(ket: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Inverse of :func:`relabel_b`."""
    n1, n2, b1, b2, c = ket
    return (n1, n2, b2, b1, c), (-1) ** b1


def map_to_oscillator(psi: StateVector, n_atoms: int, target: Basis | None = None) -> StateVector:
    """Express a symmetric tensor-model state in the five-mode oscillator basis.

    The atomic counts ``(g1, g2, e)`` become occupations of ``(b2, b1, c)``
    with sign ``(-1)^(g2 count)``.  Raises :class:`SectorError` when more
    than ``1e-10`` of the weight lies outside the symmetric sector.
    """
    overlaps = symmetric_projection(psi, n_atoms)
    total = psi.norm() ** 2
    captured = sum(abs(a) ** 2 for a in overlaps.values())
    deficit = total - captured
    if deficit > SECTOR_TOL:
        raise SectorError(f"state has weight {deficit:.3g} outside the symmetric sector", deficit=deficit)
    mapped = {}
    for ket, amp in overlaps.items():
        new, sign = relabel_b(ket)
        mapped[new] = sign * amp
    if target is None:
        from .oscillator import universal_basis

        excitations = {s[n_atoms] + s[n_atoms + 1] + sum(1 for v in s[:n_atoms] if v == AtomLevel.E)
                       for s, a in zip(psi.basis.states, psi.amplitudes) if a != 0}
        if len(excitations) != 1:
            raise SectorError("state mixes different excitation numbers; pass a target basis")
        m = excitations.pop() - n_atoms
        target = universal_basis(n_atoms, m)
    return StateVector.from_dict(target, mapped)


def map_from_oscillator(psi: StateVector, n_atoms: int, target: Basis | None = None) -> StateVector:
    """Inverse of :func:`map_to_oscillator`."""
    out: dict[tuple[int, ...], complex] = {}
    for ket, amp in psi.nonzero().items():
        (n1, n2, i, j, k), sign = unrelabel_b(ket)
        if i + j + k != n_atoms:
            raise SectorError(f"ket {ket} does not describe {n_atoms} atoms")
        for levels, a in symmetric_amplitudes(i, j, k).items():
            key = levels + (n1, n2)
            out[key] = out.get(key, 0j) + sign * amp * a
    if target is None:
        cap = max((n1 + n2 for n1, n2, *_ in psi.basis.states), default=0)
        target = tensor_basis(n_atoms, cap)
    return StateVector.from_dict(target, out)


def symmetric_deficit(psi: StateVector, n_atoms: int) -> float:
    overlaps = symmetric_projection(psi, n_atoms)
    return psi.norm() ** 2 - sum(abs(a) ** 2 for a in overlaps.values())


def permute_atoms(H: SparseHermitian, n_atoms: int, perm) -> np.ndarray:
    """Dense matrix of ``H`` with the atom slots permuted by ``perm``."""
    basis = H.basis
    idx = []
    for s in basis.states:
        levels = tuple(s[perm[k]] for k in range(n_atoms))
        idx.append(basis.index[levels + s[n_atoms:]])
    idx = np.array(idx)
    dense = H.to_dense()
    return dense[np.ix_(idx, idx)]


__all__ = [
    "AtomLevel",
    "SchwingerReport",
    "build_lambda_hamiltonian",
    "initial_state",
    "lambda_model",
    "map_from_oscillator",
    "map_to_oscillator",
    "relabel_b",
    "symmetric_deficit",
    "symmetric_state",
    "tensor_basis",
    "unrelabel_b",
    "verify_schwinger_action",
]
