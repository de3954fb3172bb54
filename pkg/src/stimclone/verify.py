"""Cross-model verification suites.

Each suite returns a list of :class:`CheckReport`; a check passes when its
measured deviation is within its own tolerance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, ladder, lambda_atoms, oscillator, vsystem
from .fock import StateVector, evolve_many

LAMBDA_OSC_TIMES = (0.1, 0.5, 1.0, 2.0)
VPAIR_TIMES = (0.1, 0.4, 0.9, 1.7)
LADDER_TIMES = tuple(np.linspace(0.0, 2.0, 9))


@dataclass(frozen=True)
class CheckReport:
    check: str
    max_deviation: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "max_deviation": float(self.max_deviation),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.check}: max deviation {self.max_deviation:.3e} (tol {self.tolerance:.1e})"
        return f"{text} {self.detail}".rstrip()


def suite_schwinger(n_max: int = 4) -> list[CheckReport]:
    action, norms = 0.0, 0.0
    for n in range(1, n_max + 1):
        for i in range(n + 1):
            for j in range(n + 1 - i):
                k = n - i - j
                action = max(action, lambda_atoms.verify_schwinger_action(n, i, j, k).max_deviation)
                norms = max(norms, abs(lambda_atoms.symmetric_state(i, j, k).norm() - 1))
    return [
        CheckReport(f"schwinger action, N<={n_max}", action, 1e-12),
        CheckReport(f"symmetric state norms, N<={n_max}", norms, 1e-12),
    ]


def lambda_oscillator_deviation(n_atoms: int, m: int, times=LAMBDA_OSC_TIMES, gamma: float = 1.0):
    """Max componentwise gap between mapped tensor evolution and oscillator evolution,
    and the largest symmetric-sector leakage seen along the way."""
    H, psi0 = lambda_atoms.lambda_model(n_atoms, m, gamma)
    basis = oscillator.universal_basis(n_atoms, m)
    _, H5 = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=n_atoms, gamma=gamma), basis=basis)
    start = lambda_atoms.map_to_oscillator(psi0, n_atoms, basis)
    dev, leak = 0.0, 0.0
    for atomic, osc in zip(evolve_many(H, psi0, times), evolve_many(H5, start, times)):
        leak = max(leak, abs(lambda_atoms.symmetric_deficit(atomic, n_atoms)))
        mapped = lambda_atoms.map_to_oscillator(atomic, n_atoms, basis)
        dev = max(dev, float(np.max(np.abs(mapped.amplitudes - osc.amplitudes))))
    return dev, leak


def suite_lambda_osc(n_max: int = 3, m_max: int = 3) -> list[CheckReport]:
    dev, leak = 0.0, 0.0
    for n in range(1, n_max + 1):
        for m in range(0, m_max + 1):
            d, lk = lambda_oscillator_deviation(n, m)
            dev, leak = max(dev, d), max(leak, lk)
    perm = 0.0
    H, _ = lambda_atoms.lambda_model(3, 1)
    dense = H.to_dense()
    for p in itertools.permutations(range(3)):
        perm = max(perm, float(np.max(np.abs(lambda_atoms.permute_atoms(H, 3, p) - dense))))
    return [
        CheckReport(f"lambda/oscillator dynamics, N<={n_max}, m<={m_max}", dev, 1e-10),
        CheckReport("symmetric sector leakage", leak, 1e-10),
        CheckReport("atom permutation invariance", perm, 0.0),
    ]


def twov_deviation(times=VPAIR_TIMES, gamma: float = 1.0) -> float:
    H, psi0 = vsystem.v_model(1, 1, gamma)
    G, E1, E2 = vsystem.VAtomLevel.G, vsystem.VAtomLevel.E1, vsystem.VAtomLevel.E2
    r2, dev = 1 / math.sqrt(2), 0.0
    for t, psi in zip(times, evolve_many(H, psi0, times)):
        c, s = math.cos(gamma * math.sqrt(3) * t), math.sin(gamma * math.sqrt(3) * t)
        want = {
            (E1, E2, 1, 0): c * r2,
            (E2, E1, 1, 0): -c * r2,
            (G, E2, 2, 0): -1j * s * math.sqrt(2 / 3) * r2,
            (E2, G, 2, 0): 1j * s * math.sqrt(2 / 3) * r2,
            (E1, G, 1, 1): -1j * s * math.sqrt(1 / 3) * r2,
            (G, E1, 1, 1): 1j * s * math.sqrt(1 / 3) * r2,
        }
        expected = StateVector.from_dict(psi.basis, want)
        dev = max(dev, float(np.max(np.abs(psi.amplitudes - expected.amplitudes))))
    return dev


def vpair_deviation(n_pairs: int, m: int, times=VPAIR_TIMES, gamma: float = 1.0):
    """(commutation gap, triplet-sector leakage, clone-statistics gap)."""
    Hv, psi_v = vsystem.v_model(n_pairs, m, gamma)
    Hl, psi_l = lambda_atoms.lambda_model(n_pairs, m, gamma)
    start = vsystem.pair_substitution_map(psi_v, n_pairs, Hl.basis)
    comm, leak, stats = float(np.max(np.abs(start.amplitudes - psi_l.amplitudes))), 0.0, 0.0
    basis5 = oscillator.universal_basis(n_pairs, m)
    for v, lam in zip(evolve_many(Hv, psi_v, times), evolve_many(Hl, start, times)):
        leak = max(leak, abs(vsystem.pair_sector_deficit(v, n_pairs)))
        mapped = vsystem.pair_substitution_map(v, n_pairs, Hl.basis)
        comm = max(comm, float(np.max(np.abs(mapped.amplitudes - lam.amplitudes))))
        pv = analysis.sector_fidelities(lambda_atoms.map_to_oscillator(mapped, n_pairs, basis5))
        pl = analysis.sector_fidelities(lambda_atoms.map_to_oscillator(lam, n_pairs, basis5))
        for l in pl.probabilities:
            stats = max(stats, abs(pv.probabilities.get(l, 0.0) - pl.probabilities[l]))
    return comm, leak, stats


def suite_vpair(pairs_max: int = 2, m_max: int = 2) -> list[CheckReport]:
    comm, leak, stats = 0.0, 0.0, 0.0
    for n in range(1, pairs_max + 1):
        for m in range(0, m_max + 1):
            c, lk, st = vpair_deviation(n, m)
            comm, leak, stats = max(comm, c), max(leak, lk), max(stats, st)
    return [
        CheckReport("single pair reproduces closed-form evolution", twov_deviation(), 1e-12),
        CheckReport(f"pair map commutes with evolution, pairs<={pairs_max}, m<={m_max}", comm, 1e-10),
        CheckReport("pair triplet-sector leakage", leak, 1e-12),
        CheckReport("V-pair and Lambda clone statistics", stats, 1e-10),
    ]


def ladder_deviations(
    n_max: int = 5,
    m_max: int = 5,
    construct: Callable[[int, int, int, object], StateVector] = ladder.construct_F_l,
    gamma: float = 1.0,
) -> dict[str, float]:
    """Recursion coefficients, closure, orthonormality and ladder/full agreement."""
    rec = clos = ortho = agree = 0.0
    for N in range(1, n_max + 1):
        for m in range(0, m_max + 1):
            basis, H = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=N, gamma=gamma))
            F = np.column_stack([construct(N, m, l, basis).amplitudes for l in range(N + 1)])
            dense = H.to_dense()
            rec = max(rec, float(np.max(np.abs(F.conj().T @ dense @ F - ladder.effective_hamiltonian(N, m, gamma)))))
            ortho = max(ortho, float(np.max(np.abs(F.conj().T @ F - np.eye(N + 1)))))
            HF = dense @ F
            clos = max(clos, float(np.max(np.abs(HF - F @ (F.conj().T @ HF)))))
            if N <= 5 and m <= 5:
                psi0 = oscillator.initial_state(basis, N, m)
                for t, full in zip(LADDER_TIMES, evolve_many(H, psi0, LADDER_TIMES)):
                    f = ladder.evolve_ladder(N, m, gamma, t).amplitudes
                    agree = max(agree, float(np.max(np.abs(F.conj().T @ full.amplitudes - f))))
    return {"recursion": rec, "closure": clos, "orthonormality": ortho, "agreement": agree}


def fidelity_attainment(m_max: int = 4, n_max: int = 4, t: float = 0.45, gamma: float = 1.0):
    """Largest gap between post-selected fidelity and the optimal-cloner formula,
    and the largest relative-frequency / single-particle discrepancy."""
    gap = ident = 0.0
    densities = []
    for m in range(1, m_max + 1):
        for N in range(1, n_max + 1):
            basis, H = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=N, gamma=gamma))
            psi = evolve_many(H, oscillator.initial_state(basis, N, m), [t])[0]
            sectors = analysis.post_select_all(psi)
            for l in range(1, N + 1):
                if l not in sectors:
                    gap = math.inf
                    continue
                _, rho = sectors[l]
                densities.append(rho)
                f = analysis.relative_frequency_fidelity(rho)
                gap = max(gap, abs(f - float(ladder.fidelity_formula(m, l))))
                ident = max(ident, abs(f - analysis.single_particle_fidelity(rho)))
    return gap, ident, densities


def suite_ladder(construct=ladder.construct_F_l) -> list[CheckReport]:
    d = ladder_deviations(construct=construct)
    gap, ident, _ = fidelity_attainment()
    rel = 0.0
    for m in range(1, 6):
        for l in range(0, 6):
            _, rho = analysis.post_select(construct(l, m, l, None), l)
            rel = max(rel, abs(analysis.relative_frequency_fidelity(rho) - float(ladder.fidelity_formula(m, l))))
    return [
        CheckReport("ladder recursion coefficients, N,m<=5", d["recursion"], 1e-12),
        CheckReport("ladder closure under H", d["closure"], 1e-12),
        CheckReport("ladder orthonormality", d["orthonormality"], 1e-12),
        CheckReport("ladder vs full evolution", d["agreement"], 1e-10),
        CheckReport("relative frequency of |F_l> equals optimal fidelity", rel, 1e-12),
        CheckReport("post-selected fidelity attains optimum, m<=4, l<=N<=4", gap, 1e-10),
        CheckReport("relative frequency equals single-particle fidelity", ident, 1e-12),
    ]


def suite_universality(count: int = 20, seed: int = 7, t: float = 0.6) -> list[CheckReport]:
    pols = analysis.haar_polarizations(count, seed)
    dev = 0.0
    for N in (1, 2):
        dev = max(dev, analysis.universality_check(N, 1, t, pols).max_deviation)
    rng = np.random.default_rng(seed)
    cov = max(oscillator.su2_covariance_deviation(N, m, oscillator.haar_su2(rng)) for N in (1, 2) for m in (0, 1, 2))
    circ = analysis.universality_check(2, 1, t, [analysis.Polarization(1 / math.sqrt(2), 1j / math.sqrt(2))])
    return [
        CheckReport("circular polarization, N=2, m=1", circ.max_deviation, 1e-10),
        CheckReport(f"{count} Haar-random polarizations, N<=2, m=1", dev, 1e-10),
        CheckReport("SU(2) covariance of the coupling", cov, 1e-12),
    ]


def suite_bh() -> list[CheckReport]:
    rep = analysis.buzek_hillery_equivalence()
    anc = float(np.max(np.abs(rep.ancilla_state - np.diag([1 / 3, 2 / 3]))))
    return [
        CheckReport("Buzek-Hillery overlap", abs(rep.overlap - 1), 1e-12),
        CheckReport("clone qubit fidelities 5/6", max(abs(f - 5 / 6) for f in rep.clone_fidelities), 1e-12),
        CheckReport("anti-clone (ancilla) state", anc, 1e-12),
    ]


def suite_pdc(N_list=(4, 8, 16, 32), gamma_eff: float = 1.0, m: int = 1, t: float = 0.3) -> list[CheckReport]:
    rep = oscillator.pdc_limit_convergence(N_list, gamma_eff, m, t, l_max=2)
    rate = "n/a" if rep.rate is None else f"{rep.rate:.3f}"
    detail = "deviations " + ", ".join(f"N={n}: {d:.3e}" for n, d in zip(rep.N_list, rep.deviations))
    return [
        CheckReport(
            "quantized-pump deviation strictly decreasing in N",
            0.0 if rep.monotone else 1.0,
            0.0,
            f"({detail}; fitted exponent {rate})",
        )
    ]


def suite_large_m(N: int = 3, m: int = 400, gamma: float = 1.0, x_max: float = 1.0) -> list[CheckReport]:
    """Closed form vs exact ladder amplitudes over ``gamma sqrt(m) t`` in ``[0, x_max]``."""
    times = np.linspace(0, x_max, 201) / (gamma * math.sqrt(m))
    exact = ladder.evolve_ladder_many(N, m, gamma, times)
    amp = prob = mean = 0.0
    for f in exact:
        closed = ladder.large_m_solution(N, m, gamma, f.t)
        amp = max(amp, float(np.max(np.abs(f.amplitudes - closed.amplitudes))))
        prob = max(prob, float(np.max(np.abs(f.probabilities - ladder.binomial_distribution(N, m, gamma, f.t)))))
        stats = ladder.clone_number_distribution(f)
        mean = max(mean, abs(stats.mean_clones - ladder.mean_clones_closed_form(N, m, gamma, f.t)))
    span = f"gamma sqrt(m) t in [0, {x_max:g}]"
    return [
        CheckReport(f"large-m amplitudes, N={N}, m={m}, {span}", amp, 0.02),
        CheckReport("large-m binomial p(l)", prob, 0.02),
        CheckReport("large-m mean clone number", mean, 0.02 * N),
    ]


SUITES: dict[str, Callable[[], list[CheckReport]]] = {
    "schwinger": suite_schwinger,
    "lambda-osc": suite_lambda_osc,
    "vpair": suite_vpair,
    "ladder": suite_ladder,
    "universality": suite_universality,
    "bh": suite_bh,
    "pdc-limit": suite_pdc,
    "large-m": suite_large_m,
}


def run(selector: str = "all") -> list[CheckReport]:
    names = list(SUITES) if selector == "all" else [selector]
    reports = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        reports.extend(SUITES[name]())
    return reports
