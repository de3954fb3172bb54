"""Coupled-oscillator form of the Lambda-atom cloner.

Five modes ``(a1, a2, b1, b2, c)``: photons in ``a``, atomic ground-state
excitations (anti-clones) in ``b``, excited atoms in ``c``.  The default
coupling is ``gamma (a1 b2 - a2 b1) c^dagger + h.c.``; the symmetric form
``gamma (a1 b1 + a2 b2) c^dagger + h.c.`` is related to it by the
relabeling b1 -> b2, b2 -> -b1.  Replacing ``c`` by a number gives the
classical-pump (down-conversion) limit.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm, logm

from .fock import (
    Basis,
    ConservedQuantity,
    ModeLayout,
    SparseHermitian,
    StateVector,
    build_operator,
    enumerate_basis,
    evolve_many,
    ladder,
)

FIVE_MODES = ModeLayout(("a1", "a2", "b1", "b2", "c"))
PUMP_MODES = ModeLayout(("a1", "a2", "b1", "b2"))
VARIANTS = ("antisymmetric", "symmetric", "generalized", "classical-pump")
OSC_DIM_LIMIT = 20_000


class TruncationWarning(UserWarning):
    """Population at the classical-pump pair cap is not negligible."""


@dataclass(frozen=True)
class OscillatorModelSpec:
    m: int
    N: int
    gamma: float = 1.0
    variant: str = "antisymmetric"
    r: int | None = None
    times: tuple[float, ...] = field(default=(0.0,))

    def __post_init__(self):
        if self.m < 0 or self.N < 0:
            raise ValueError("m and N must be non-negative")
        if not self.gamma > 0:
            raise ValueError("gamma must be real and positive")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.variant == "generalized" and (self.r is None or self.r < 2):
            raise ValueError("generalized variant needs r >= 2")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    @classmethod
    def from_json(cls, data: Mapping | str):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            m=int(data["m"]),
            N=int(data["N"]),
            gamma=float(data.get("gamma", 1.0)),
            variant=data.get("variant", "antisymmetric"),
            r=data.get("r"),
            times=tuple(data.get("t", (0.0,))),
        )


def _q(layout: ModeLayout, coeffs: Mapping[str, int], target: int) -> ConservedQuantity:
    return ConservedQuantity.from_modes(layout, coeffs, target)


def hampd_constraints(N: int, m: int) -> list[ConservedQuantity]:
    L = FIVE_MODES
    return [
        _q(L, {"a1": 1, "b2": -1}, m),
        _q(L, {"a2": 1, "b1": -1}, 0),
        _q(L, {"c": 1, "b1": 1, "b2": 1}, N),
    ]


def hampd1_constraints(N: int, m: int) -> list[ConservedQuantity]:
    L = FIVE_MODES
    return [
        _q(L, {"a1": 1, "b1": -1}, m),
        _q(L, {"a2": 1, "b2": -1}, 0),
        _q(L, {"c": 1, "b1": 1, "b2": 1}, N),
    ]


def universal_constraints(N: int, m: int) -> list[ConservedQuantity]:
    """Conservation laws that hold for any input polarization."""
    L = FIVE_MODES
    return [
        _q(L, {"c": 1, "b1": 1, "b2": 1}, N),
        _q(L, {"a1": 1, "a2": 1, "b1": -1, "b2": -1}, m),
    ]


def universal_basis(N: int, m: int) -> Basis:
    """Five-mode basis closed under both couplings and under polarization rotations."""
    return enumerate_basis(FIVE_MODES, universal_constraints(N, m))


def hampd_terms(gamma: float):
    return [ladder("a1 b2 c+", gamma), ladder("a2 b1 c+", -gamma)]


def hampd1_terms(gamma: float):
    return [ladder("a1 b1 c+", gamma), ladder("a2 b2 c+", gamma)]


def _check_dim(basis: Basis, limit: int):
    from .errors import ResourceError

    if len(basis) > limit:
        raise ResourceError(f"oscillator basis dimension {len(basis)} exceeds limit {limit}")


def build_hampd(spec: OscillatorModelSpec, basis: Basis | None = None, max_dim: int = OSC_DIM_LIMIT):
    """Basis and Hamiltonian for ``gamma (a1 b2 - a2 b1) c^dagger + h.c.``."""
    basis = basis if basis is not None else enumerate_basis(FIVE_MODES, hampd_constraints(spec.N, spec.m))
    _check_dim(basis, max_dim)
    return basis, build_operator(hampd_terms(spec.gamma), basis)


def build_hampd1(spec: OscillatorModelSpec, basis: Basis | None = None, max_dim: int = OSC_DIM_LIMIT):
    """Basis and Hamiltonian for ``gamma (a1 b1 + a2 b2) c^dagger + h.c.``."""
    basis = basis if basis is not None else enumerate_basis(FIVE_MODES, hampd1_constraints(spec.N, spec.m))
    _check_dim(basis, max_dim)
    return basis, build_operator(hampd1_terms(spec.gamma), basis)


def initial_state(basis: Basis, N: int, m: int) -> StateVector:
    """``m`` photons in a1 and ``N`` quanta in c."""
    return StateVector.fock(basis, (m, 0, 0, 0, N))


def polarized_input(basis: Basis, N: int, m: int, alpha: complex, beta: complex) -> StateVector:
    """``(alpha a1^dagger + beta a2^dagger)^m / sqrt(m!)`` with ``N`` excited atoms."""
    amps = {}
    for k in range(m + 1):
        amp = math.sqrt(math.comb(m, k)) * alpha ** (m - k) * beta**k
        if amp != 0:
            amps[(m - k, k, 0, 0, N)] = amp
    return StateVector.from_dict(basis, amps)


def relabel_matrix(source: Basis, target: Basis) -> np.ndarray:
    """Unitary taking symmetric-coupling kets to antisymmetric-coupling kets.

    Implements b1 -> b2, b2 -> -b1: ``|.., b1=i, b2=j, ..>`` goes to
    ``(-1)^j |.., b1=j, b2=i, ..>``.
    """
    P = np.zeros((len(target), len(source)))
    for col, (n1, n2, b1, b2, c) in enumerate(source.states):
        P[target.index[(n1, n2, b2, b1, c)], col] = (-1) ** b2
    return P


def relabel_state(psi: StateVector, target: Basis) -> StateVector:
    return StateVector(target, relabel_matrix(psi.basis, target) @ psi.amplitudes)


# -- r ground states ------------------------------------------------------


def generalized_layout(r: int) -> ModeLayout:
    return ModeLayout(tuple(f"a{n}" for n in range(1, r + 1)) + tuple(f"b{n}" for n in range(1, r + 1)) + ("c",))


def build_generalized(
    N: int,
    photons: Sequence[int],
    gamma: float = 1.0,
    max_dim: int = OSC_DIM_LIMIT,
):
    """Basis and Hamiltonian for ``gamma sum_n c b_n^dagger a_n^dagger + h.c.``.

    ``photons`` gives the initial photon number of each of the ``r``
    modes; ``r = len(photons)``.
    """
    r = len(photons)
    if r < 2:
        raise ValueError("need r >= 2 ground states")
    layout = generalized_layout(r)
    constraints = [_q(layout, {f"a{n}": 1, f"b{n}": -1}, photons[n - 1]) for n in range(1, r + 1)]
    constraints.append(_q(layout, {"c": 1, **{f"b{n}": 1 for n in range(1, r + 1)}}, N))
    basis = enumerate_basis(layout, constraints)
    _check_dim(basis, max_dim)
    terms = [ladder(f"a{n} b{n} c+", gamma) for n in range(1, r + 1)]
    return basis, build_operator(terms, basis)


def generalized_initial_state(basis: Basis, N: int, photons: Sequence[int]) -> StateVector:
    r = len(photons)
    return StateVector.fock(basis, tuple(photons) + (0,) * r + (N,))


# -- classical pump -------------------------------------------------------


def build_classical_pump(gamma_eff: float, m: int, max_pairs: int):
    """Basis and Hamiltonian with the pump mode replaced by a number.

    Keeps kets with at most ``max_pairs`` emitted pairs (``b1 + b2``).
    """
    if max_pairs < 0:
        raise ValueError("max_pairs must be non-negative")
    layout = ModeLayout(PUMP_MODES.modes, (m + max_pairs, max_pairs, max_pairs, max_pairs))
    constraints = [_q(layout, {"a1": 1, "b2": -1}, m), _q(layout, {"a2": 1, "b1": -1}, 0)]
    full = enumerate_basis(layout, constraints)
    basis = Basis(layout, tuple(s for s in full.states if s[2] + s[3] <= max_pairs))
    H = _truncated_pump_operator(basis, gamma_eff)
    return basis, H


def _truncated_pump_operator(basis: Basis, gamma_eff: float) -> SparseHermitian:
    # The pair-creation image of the top layer leaves the basis; assembling
    # only the absorbing half and adding its adjoint drops it consistently.
    from .fock import operator_from_entries

    rows, cols, vals = [], [], []
    for term in (ladder("a1 b2", gamma_eff), ladder("a2 b1", -gamma_eff)):
        for j, s in enumerate(basis.states):
            res = term.act(basis.layout, s)
            if res is None:
                continue
            factor, target = res
            rows.append(basis.index[target])
            cols.append(j)
            vals.append(factor)
    return operator_from_entries(basis, rows, cols, vals, hermitize=True)


def pair_populations(psi: StateVector, b_modes=("b1", "b2"), max_pairs: int | None = None) -> np.ndarray:
    """Probability of each emitted-pair count ``l = sum of b occupations``."""
    l = sum(psi.basis.occupations(b) for b in b_modes)
    size = (int(l.max()) if len(l) else 0) + 1 if max_pairs is None else max_pairs + 1
    return np.bincount(l, weights=np.abs(psi.amplitudes) ** 2, minlength=size)[:size]


@dataclass(frozen=True)
class ClassicalPumpResult:
    times: tuple[float, ...]
    probabilities: np.ndarray  # shape (len(times), max_pairs + 1)
    cap_population: float

    @property
    def truncated(self) -> bool:
        return self.cap_population > 1e-8


def classical_pump_distribution(gamma_eff: float, m: int, times: Sequence[float], max_pairs: int):
    """Pair-number distribution of the classical-pump model at each time.

    Warns with :class:`TruncationWarning` when the population at the pair
    cap exceeds ``1e-8``.
    """
    basis, H = build_classical_pump(gamma_eff, m, max_pairs)
    psi0 = StateVector.fock(basis, (m, 0, 0, 0))
    probs = np.array([pair_populations(s, max_pairs=max_pairs) for s in evolve_many(H, psi0, times)])
    cap = float(probs[:, -1].max()) if max_pairs > 0 else 0.0
    result = ClassicalPumpResult(tuple(float(t) for t in times), probs, cap)
    if result.truncated:
        warnings.warn(
            f"population {cap:.2e} at the pair cap {max_pairs}; raise max_pairs", TruncationWarning
        )
    return result


def converged_classical_pump(gamma_eff: float, m: int, times: Sequence[float], start: int = 8, limit: int = 400):
    """Classical-pump distribution with the pair cap doubled until it is negligible."""
    cap = start
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            res = classical_pump_distribution(gamma_eff, m, times, cap)
        if not res.truncated:
            return res
        if cap >= limit:
            warnings.warn(f"pair cap limit {limit} reached with population {res.cap_population:.2e}", TruncationWarning)
            return res
        cap = min(2 * cap, limit)


def quantized_pump_distribution(N: int, m: int, gamma: float, times: Sequence[float]) -> np.ndarray:
    """``p(l)`` for l = 0..N from the full five-mode model."""
    basis, H = build_hampd(OscillatorModelSpec(m=m, N=N, gamma=gamma))
    psi0 = initial_state(basis, N, m)
    return np.array([pair_populations(s, max_pairs=N) for s in evolve_many(H, psi0, times)])


@dataclass(frozen=True)
class PdcConvergenceReport:
    N_list: tuple[int, ...]
    deviations: tuple[float, ...]
    l_max: int
    gamma_eff: float
    t: float
    m: int
    rate: float | None  # fitted exponent of deviation ~ N**rate

    @property
    def monotone(self) -> bool:
        d = self.deviations
        return all(b < a - 1e-12 for a, b in zip(d, d[1:]))


def pdc_limit_convergence(
    N_list: Sequence[int], gamma_eff: float, m: int, t: float, l_max: int = 2
) -> PdcConvergenceReport:
    """Compare quantized-pump and classical-pump ``p(l)``, ``l <= l_max``.

    The atom coupling is set to ``gamma_eff / sqrt(N)`` so that the pump
    strength stays fixed as ``N`` grows.
    """
    if l_max >= min(N_list):
        raise ValueError("l_max must be below every N in N_list")
    classical = converged_classical_pump(gamma_eff, m, [t]).probabilities[0]
    devs = []
    for N in N_list:
        quantized = quantized_pump_distribution(N, m, gamma_eff / math.sqrt(N), [t])[0]
        devs.append(float(np.max(np.abs(quantized[: l_max + 1] - classical[: l_max + 1]))))
    rate = None
    positive = [(n, d) for n, d in zip(N_list, devs) if d > 0]
    if len(positive) >= 2:
        x = np.log([n for n, _ in positive])
        y = np.log([d for _, d in positive])
        rate = float(np.polyfit(x, y, 1)[0])
    return PdcConvergenceReport(tuple(N_list), tuple(devs), l_max, gamma_eff, t, m, rate)


# -- polarization rotations ------------------------------------------------


def _bilinear(basis: Basis, modes: Sequence[str], K: np.ndarray) -> np.ndarray:
    # Dense sum_ij K_ij x_i^dagger x_j over the basis.
    G = np.zeros((len(basis), len(basis)), dtype=complex)
    pos = [basis.layout.position(x) for x in modes]
    for col, s in enumerate(basis.states):
        for i, pi in enumerate(pos):
            for j, pj in enumerate(pos):
                if K[i, j] == 0 or s[pj] == 0:
                    continue
                t = list(s)
                amp = math.sqrt(t[pj])
                t[pj] -= 1
                t[pi] += 1
                amp *= math.sqrt(t[pi])
                G[basis.index[tuple(t)], col] += K[i, j] * amp
    return (G + G.conj().T) / 2


def passive_rotation(basis: Basis, modes: Sequence[str], U: np.ndarray) -> np.ndarray:
    """Fock-space representation of the mode transformation ``x_j^dagger -> sum_i U_ij x_i^dagger``.

    The basis must be closed under the bilinears ``x_i^dagger x_j``.
    """
    U = np.asarray(U, dtype=complex)
    K = -1j * logm(U)
    K = (K + K.conj().T) / 2
    return expm(1j * _bilinear(basis, modes, K))


def polarization_unitary(alpha: complex, beta: complex) -> np.ndarray:
    """SU(2) matrix whose first column is ``(alpha, beta)``."""
    return np.array([[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex)


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    return polarization_unitary(complex(z[0], z[1]), complex(z[2], z[3]))


def su2_covariance_deviation(N: int, m: int, U: np.ndarray, gamma: float = 1.0) -> float:
    """``max |R H R^dagger - H|`` for the same SU(2) rotation on (a1, a2) and (b1, b2)."""
    basis = universal_basis(N, m)
    _, H = build_hampd(OscillatorModelSpec(m=m, N=N, gamma=gamma), basis=basis)
    R = passive_rotation(basis, ("a1", "a2"), U) @ passive_rotation(basis, ("b1", "b2"), U)
    dense = H.to_dense()
    return float(np.max(np.abs(R @ dense @ R.conj().T - dense), initial=0.0))
