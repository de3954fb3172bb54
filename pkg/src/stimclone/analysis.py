"""Figures of merit for the stimulated-emission cloner.

Post-selecting on the number of atoms still excited fixes the number of
clones; the photon state in that sector is a density matrix over the
``M + 1`` two-mode Fock states ``|M-k, k>`` (index ``k`` = photons in a2).
Fidelity is the relative frequency of photons in the input polarization,
which for these permutation-symmetric outputs coincides with the usual
single-qubit fidelity of one clone.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptySectorError, ResourceError
from .fock import StateVector, evolve_many
from .ladder import construct_F_l
from .lambda_atoms import unrelabel_b
from .oscillator import (
    OscillatorModelSpec,
    build_hampd,
    haar_su2,
    initial_state,
    polarized_input,
    universal_basis,
)

EMPTY_SECTOR = 1e-14


@dataclass(frozen=True)
class Polarization:
    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-12:
            raise ValueError("polarization must satisfy |alpha|^2 + |beta|^2 = 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "Polarization":
        u = haar_su2(rng)
        return cls(u[0, 0], u[1, 0])


H_POL = Polarization(1, 0)


@dataclass(frozen=True)
class PhotonSectorDensity:
    """Density matrix of ``M`` photons in modes (a1, a2); row ``k`` = ``|M-k, k>``."""

    M: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (self.M + 1, self.M + 1):
            raise ValueError("density shape does not match photon number")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    def validate(self, tol: float = 1e-12):
        if np.max(np.abs(self.rho - self.rho.conj().T)) > tol:
            raise ValueError("density is not Hermitian")
        if abs(np.trace(self.rho) - 1) > tol:
            raise ValueError("density does not have unit trace")
        if self.min_eigenvalue() < -tol:
            raise ValueError("density is not positive semidefinite")
        return self

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2).min())

    @classmethod
    def pure(cls, M: int, amplitudes) -> "PhotonSectorDensity":
        v = np.asarray(amplitudes, dtype=complex)
        return cls(M, np.outer(v, v.conj()))


def _infer_atoms(psi: StateVector) -> int:
    b = psi.basis
    totals = set((b.occupations("b1") + b.occupations("b2") + b.occupations("c")).tolist())
    if len(totals) != 1:
        raise ValueError("basis does not fix the atom number")
    return totals.pop()


def post_select(psi: StateVector, l: int) -> tuple[float, PhotonSectorDensity]:
    """Condition a five-mode state on ``l`` emitted photons (``n_c = N - l``).

    Returns the sector probability and the normalized photon density with
    modes b1, b2 and c traced out.  Raises :class:`EmptySectorError` when
    the probability is below ``1e-14``.
    """
    N = _infer_atoms(psi)
    if not 0 <= l <= N:
        raise ValueError(f"l={l} outside 0..{N}")
    basis = psi.basis
    c = basis.occupations("c")
    na1, na2 = basis.occupations("a1"), basis.occupations("a2")
    sel = np.nonzero(c == N - l)[0]
    prob = float(np.sum(np.abs(psi.amplitudes[sel]) ** 2))
    if prob < EMPTY_SECTOR:
        raise EmptySectorError(f"sector l={l} has probability {prob:.3g}", probability=prob)
    photon_numbers = set((na1[sel] + na2[sel]).tolist())
    if len(photon_numbers) != 1:
        raise ValueError(f"sector l={l} mixes photon numbers {sorted(photon_numbers)}")
    M = photon_numbers.pop()
    # Group amplitudes by the traced-out (b1, b2, c) configuration.
    env: dict[tuple[int, ...], np.ndarray] = {}
    for i in sel:
        s = basis.states[i]
        vec = env.setdefault(s[2:], np.zeros(M + 1, dtype=complex))
        vec[s[1]] += psi.amplitudes[i]
    rho = sum(np.outer(v, v.conj()) for v in env.values()) / prob
    return prob, PhotonSectorDensity(M, rho)


def post_select_all(psi: StateVector) -> dict[int, tuple[float, PhotonSectorDensity]]:
    """All non-empty sectors, keyed by ``l``."""
    N = _infer_atoms(psi)
    out = {}
    for l in range(N + 1):
        try:
            out[l] = post_select(psi, l)
        except EmptySectorError:
            continue
    return out


def polarization_number_operator(M: int, pol: Polarization) -> np.ndarray:
    """``b^dagger b`` for ``b^dagger = alpha a1^dagger + beta a2^dagger`` on the M-photon sector."""
    a, b = pol.alpha, pol.beta
    op = np.zeros((M + 1, M + 1), dtype=complex)
    for k in range(M + 1):
        n1, n2 = M - k, k
        op[k, k] = abs(a) ** 2 * n1 + abs(b) ** 2 * n2
        if n2 > 0:
            # a1^dagger a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
            amp = math.sqrt((n1 + 1) * n2)
            op[k - 1, k] += a * np.conj(b) * amp
            op[k, k - 1] += np.conj(a) * b * amp
    return op


def relative_frequency_fidelity(rho: PhotonSectorDensity, pol: Polarization = H_POL) -> float:
    """Expected fraction of photons in the ``pol`` mode."""
    if rho.M == 0:
        raise ValueError("relative frequency undefined without photons")
    return float(np.real(np.trace(rho.rho @ polarization_number_operator(rho.M, pol)))) / rho.M


DICKE_MAX_PHOTONS = 22


def dicke_embedding(M: int) -> sp.csr_matrix:
    """Sparse isometry from ``|M-k, k>`` to symmetric M-qubit states.

    Qubit value 0 stands for a photon in a1, 1 for a photon in a2; qubit
    0 is the most significant bit.
    """
    if M > DICKE_MAX_PHOTONS:
        raise ResourceError(f"qubit embedding of {M} photons needs 2**{M} amplitudes")
    rows, cols, vals = [], [], []
    for k in range(M + 1):
        amp = 1 / math.sqrt(math.comb(M, k))
        for ones in itertools.combinations(range(M), k):
            rows.append(sum(1 << (M - 1 - q) for q in ones))
            cols.append(k)
            vals.append(amp)
    return sp.csr_matrix((vals, (rows, cols)), shape=(2**M, M + 1))


def reduced_first_qubit(rho: np.ndarray, M: int) -> np.ndarray:
    """First-qubit density of ``D rho D^T`` without forming the 2**M square matrix."""
    D = dicke_embedding(M)
    half = 2 ** (M - 1)
    blocks = (D[:half], D[half:])
    red = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            # Tr_rest(D rho D^T)[i, j] = Tr(rho D_j^T D_i)
            G = (blocks[j].T @ blocks[i]).toarray()
            red[i, j] = np.trace(rho @ G)
    return red


def single_particle_fidelity(rho: PhotonSectorDensity, pol: Polarization = H_POL) -> float:
    """``<pol| rho_red |pol>`` for the first qubit of the symmetric-qubit image of ``rho``.

    Raises :class:`ResourceError` above ``DICKE_MAX_PHOTONS`` photons.
    """
    if rho.M == 0:
        raise ValueError("single-particle fidelity undefined without photons")
    red = reduced_first_qubit(rho.rho, rho.M)
    v = pol.vector
    return float(np.real(np.conj(v) @ red @ v))


# -- sector summaries ----------------------------------------------------


@dataclass(frozen=True)
class SectorFidelities:
    probabilities: dict[int, float]
    fidelities: dict[int, float]

    @property
    def average(self) -> float:
        """p(l)-weighted relative frequency over the non-empty sectors with photons."""
        num = sum(self.probabilities[l] * f for l, f in self.fidelities.items())
        den = sum(self.probabilities[l] for l in self.fidelities)
        return num / den


def sector_fidelities(psi: StateVector, pol: Polarization = H_POL) -> SectorFidelities:
    probs, fids = {}, {}
    for l, (p, rho) in post_select_all(psi).items():
        probs[l] = p
        if rho.M > 0:
            fids[l] = relative_frequency_fidelity(rho, pol)
    return SectorFidelities(probs, fids)


# -- universality --------------------------------------------------------


@dataclass(frozen=True)
class UniversalityReport:
    polarizations: tuple[Polarization, ...]
    deviations: tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)


def universality_check(
    N: int,
    m: int,
    t: float,
    polarizations: Sequence[Polarization],
    gamma: float = 1.0,
) -> UniversalityReport:
    """Fidelity and ``p(l)`` of an input in ``pol``, measured against ``pol``,
    compared with the reference input in a1."""
    basis = universal_basis(N, m)
    _, H = build_hampd(OscillatorModelSpec(m=m, N=N, gamma=gamma), basis=basis)
    ref_state = evolve_many(H, initial_state(basis, N, m), [t])[0]
    ref = sector_fidelities(ref_state, H_POL)
    devs = []
    for pol in polarizations:
        psi = evolve_many(H, polarized_input(basis, N, m, pol.alpha, pol.beta), [t])[0]
        got = sector_fidelities(psi, pol)
        dev = 0.0
        for l in set(ref.probabilities) | set(got.probabilities):
            dev = max(dev, abs(ref.probabilities.get(l, 0.0) - got.probabilities.get(l, 0.0)))
        for l in ref.fidelities:
            if l in got.fidelities:
                dev = max(dev, abs(ref.fidelities[l] - got.fidelities[l]))
            else:
                dev = max(dev, ref.probabilities[l])
        devs.append(dev)
    return UniversalityReport(tuple(polarizations), tuple(devs))


def haar_polarizations(count: int, seed: int) -> list[Polarization]:
    rng = np.random.default_rng(seed)
    return [Polarization.haar_random(rng) for _ in range(count)]


# -- Buzek-Hillery -------------------------------------------------------


@dataclass(frozen=True)
class BuzekHilleryReport:
    overlap: float
    clone_fidelities: tuple[float, float]
    ancilla_state: np.ndarray
    mapped_state: np.ndarray

    @property
    def passed(self) -> bool:
        return (
            abs(self.overlap - 1) <= 1e-12
            and all(abs(f - 5 / 6) <= 1e-12 for f in self.clone_fidelities)
        )


def buzek_hillery_state() -> np.ndarray:
    """``sqrt(2/3)|11>|down> + sqrt(1/3)(|01>+|10>)/sqrt2 |up>`` on (clone, clone, ancilla).

    Qubit values: clones 1 = photon in a1; ancilla 0 = up, 1 = down.
    """
    v = np.zeros(8)
    v[0b111] = math.sqrt(2 / 3)
    v[0b010] = math.sqrt(1 / 3) / math.sqrt(2)
    v[0b100] = math.sqrt(1 / 3) / math.sqrt(2)
    return v


def map_to_qubits(psi: StateVector) -> np.ndarray:
    """Three-qubit image of a two-photon, one-anti-clone state.

    Photons ``|2,0> -> |11>``, ``|1,1> -> (|01>+|10>)/sqrt2``.  The
    b-mode relabeling is undone first, so the anti-clone sits in the
    atomic level it physically occupies: g1 -> down, g2 -> up.
    """
    photon_kets = {(2, 0): {0b11: 1.0}, (1, 1): {0b01: 1 / math.sqrt(2), 0b10: 1 / math.sqrt(2)}}
    out = np.zeros(8, dtype=complex)
    for ket, amp in psi.nonzero().items():
        (n1, n2, g1, g2, c), sign = unrelabel_b(ket)
        if c != 0 or g1 + g2 != 1 or (n1, n2) not in photon_kets:
            raise ValueError(f"ket {ket} has no three-qubit image")
        anc = 1 if g1 == 1 else 0
        for clones, a in photon_kets[(n1, n2)].items():
            out[(clones << 1) | anc] += sign * amp * a
    return out


def buzek_hillery_equivalence() -> BuzekHilleryReport:
    """Map ``|F_1>`` (N = m = 1) to qubits and compare with the Buzek-Hillery output."""
    F1 = construct_F_l(1, 1, 1)
    mapped = map_to_qubits(F1)
    overlap = abs(np.vdot(buzek_hillery_state(), mapped))
    rho = np.outer(mapped, mapped.conj()).reshape(2, 2, 2, 2, 2, 2)
    one = np.array([0, 1])
    clone1 = np.einsum("iabjab->ij", rho)
    clone2 = np.einsum("aibajb->ij", rho)
    ancilla = np.einsum("abiabj->ij", rho)
    fids = (float(np.real(one @ clone1 @ one)), float(np.real(one @ clone2 @ one)))
    return BuzekHilleryReport(float(overlap), fids, ancilla, mapped)
