"""The emitted-photon ladder ``|F_l>``.

Starting from ``|m, 0, 0, 0, N>`` the antisymmetric-coupling Hamiltonian
never leaves the span of the states ``|F_l>`` (``l`` extra photons
emitted), and it is tridiagonal there.  This module builds those states,
the tridiagonal matrix, the exact amplitudes ``f_l(t)``, the large-``m``
closed form and the clone statistics derived from them.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import curve_fit

from .fock import Basis, StateVector, enumerate_basis
from .oscillator import FIVE_MODES, hampd_constraints
from .serialize import write_csv


class RegimeWarning(UserWarning):
    """Large-m closed form used outside ``m >> N``."""


def hampd_basis(N: int, m: int) -> Basis:
    return enumerate_basis(FIVE_MODES, hampd_constraints(N, m))


def F_l_amplitudes(N: int, m: int, l: int) -> dict[tuple[int, ...], float]:
    """Kets and amplitudes of ``|F_l>``.

    ``(-1)^i sqrt(C(m+l-i, m) / C(m+l+1, l))`` on
    ``|m+l-i, i, i, l-i, N-l>`` for ``i = 0..l``.
    """
    if not 0 <= l <= N:
        raise ValueError(f"l={l} outside 0..{N}")
    if m < 0:
        raise ValueError("m must be non-negative")
    norm = math.comb(m + l + 1, l)
    return {
        (m + l - i, i, i, l - i, N - l): (-1) ** i * math.sqrt(math.comb(m + l - i, m) / norm)
        for i in range(l + 1)
    }


def construct_F_l(N: int, m: int, l: int, basis: Basis | None = None) -> StateVector:
    basis = basis if basis is not None else hampd_basis(N, m)
    return StateVector.from_dict(basis, F_l_amplitudes(N, m, l))


def ladder_matrix(N: int, m: int, basis: Basis | None = None) -> np.ndarray:
    """Columns are ``|F_0> .. |F_N>`` expressed in ``basis``."""
    basis = basis if basis is not None else hampd_basis(N, m)
    return np.column_stack([construct_F_l(N, m, l, basis).amplitudes for l in range(N + 1)])


def off_diagonal(N: int, m: int, gamma: float = 1.0) -> np.ndarray:
    """``<F_{l+1}|H|F_l> = gamma sqrt((l+1)(N-l)(m+l+2))`` for l = 0..N-1."""
    l = np.arange(N)
    return gamma * np.sqrt((l + 1) * (N - l) * (m + l + 2.0))


def effective_hamiltonian(N: int, m: int, gamma: float = 1.0) -> np.ndarray:
    """Real symmetric tridiagonal ``(N+1) x (N+1)`` matrix of H on the ladder."""
    e = off_diagonal(N, m, gamma)
    return np.diag(e, 1) + np.diag(e, -1)


@dataclass(frozen=True)
class LadderCoefficients:
    N: int
    m: int
    t: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_state(self, basis: Basis | None = None) -> StateVector:
        """``sum_l f_l |F_l>`` in the five-mode basis."""
        basis = basis if basis is not None else hampd_basis(self.N, self.m)
        return StateVector(basis, ladder_matrix(self.N, self.m, basis) @ self.amplitudes)


def evolve_ladder_many(N: int, m: int, gamma: float, times: Sequence[float]) -> list[LadderCoefficients]:
    if N == 0:
        return [LadderCoefficients(0, m, float(t), [1.0]) for t in times]
    w, v = eigh_tridiagonal(np.zeros(N + 1), off_diagonal(N, m, gamma))
    c0 = v[0].conj()
    start = np.eye(N + 1, 1).ravel()
    return [
        LadderCoefficients(N, m, float(t), start if t == 0 else v @ (np.exp(-1j * w * t) * c0))
        for t in times
    ]


def evolve_ladder(N: int, m: int, gamma: float, t: float) -> LadderCoefficients:
    """``f(t) = exp(-i H_eff t) (1, 0, ..., 0)``."""
    return evolve_ladder_many(N, m, gamma, [t])[0]


def fidelity_formula(m: int, l: int) -> Fraction:
    """Optimal universal m -> m+l cloning fidelity, ``(m(m+2) + l(m+1)) / ((m+l)(m+2))``."""
    if m < 1:
        raise ValueError("fidelity needs at least one input photon")
    if l < 0:
        raise ValueError("l must be non-negative")
    return Fraction(m * (m + 2) + l * (m + 1), (m + l) * (m + 2))


def large_m_solution(N: int, m: int, gamma: float, t: float) -> LadderCoefficients:
    """Closed-form ``f_l = (-i)^l sqrt(C(N,l)) cos^(N-l)(x) sin^l(x)``, ``x = gamma sqrt(m) t``.

    Exact only as ``m / N -> infinity``.
    """
    if m < 10 * N:
        warnings.warn(f"closed form assumes m >> N (m={m}, N={N})", RegimeWarning, stacklevel=2)
    x = gamma * math.sqrt(m) * t
    c, s = math.cos(x), math.sin(x)
    amps = [(-1j) ** l * math.sqrt(math.comb(N, l)) * c ** (N - l) * s**l for l in range(N + 1)]
    return LadderCoefficients(N, m, float(t), amps)


def binomial_distribution(N: int, m: int, gamma: float, t: float) -> np.ndarray:
    """Large-m clone-number distribution ``C(N,l) cos^2(N-l) sin^2l``."""
    s2 = math.sin(gamma * math.sqrt(m) * t) ** 2
    return np.array([math.comb(N, l) * (1 - s2) ** (N - l) * s2**l for l in range(N + 1)])


def mean_clones_closed_form(N: int, m: int, gamma: float, t: float) -> float:
    return N * math.sin(gamma * math.sqrt(m) * t) ** 2


@dataclass(frozen=True)
class CloneStatistics:
    """Per-sector probabilities ``p(l)``, fidelities ``F_l`` and mean clone count.

    Fidelities are NaN when ``m = 0`` (no input polarization).
    """

    p: tuple[float, ...]
    fidelities: tuple[float, ...]
    mean_clones: float

    def to_json(self) -> dict:
        return {"p": list(self.p), "F": list(self.fidelities), "mean_clones": self.mean_clones}

    def to_csv(self) -> str:
        return write_csv(["l", "p", "F"], [[l, p, f] for l, (p, f) in enumerate(zip(self.p, self.fidelities))])


def clone_number_distribution(f: LadderCoefficients) -> CloneStatistics:
    p = f.probabilities
    if f.m >= 1:
        fids = tuple(float(fidelity_formula(f.m, l)) for l in range(f.N + 1))
    else:
        fids = (math.nan,) * (f.N + 1)
    mean = float(np.dot(np.arange(f.N + 1), p))
    return CloneStatistics(tuple(float(x) for x in p), fids, mean)


def fit_oscillation_frequency(times: Sequence[float], values: Sequence[float], guess: float) -> float:
    """Angular frequency ``w`` of a least-squares fit ``A (1 - cos(w t)) / 2``."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)

    def model(t, amp, w):
        return amp * (1 - np.cos(w * t)) / 2

    (amp, w), _ = curve_fit(model, times, values, p0=[max(values.max(), 1e-12), guess])
    return float(abs(w))
