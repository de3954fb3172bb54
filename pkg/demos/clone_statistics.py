"""
Clone-number statistics for several atoms
=========================================

N excited atoms and m input photons.  Measuring how many atoms are still
excited tells how many clones (l) were made.  Every sector attains the
optimal m -> m+l fidelity, whatever the input polarization.
"""
import numpy as np

from stimclone import analysis, ladder, oscillator
from stimclone.fock import evolve

N, m, t = 4, 2, 0.4

# Exact tridiagonal dynamics in the |F_l> ladder
f = ladder.evolve_ladder(N, m, 1.0, t)
stats = ladder.clone_number_distribution(f)
print(f"N={N}, m={m}, t={t}")
print(" l      p(l)       F_l")
for l, (p, F) in enumerate(zip(stats.p, stats.fidelities)):
    print(f"{l:2d}  {p:10.6f}  {F:8.6f}")
print("mean number of clones:", round(stats.mean_clones, 6))

# Same numbers from the full five-mode model with a random polarization
pol = analysis.Polarization.haar_random(np.random.default_rng(0))
basis = oscillator.universal_basis(N, m)
_, H = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=N), basis=basis)
psi = evolve(H, oscillator.polarized_input(basis, N, m, pol.alpha, pol.beta), t)
sectors = analysis.sector_fidelities(psi, pol)
print("input polarization:", np.round(pol.vector, 4))
for l in sorted(sectors.probabilities):
    print(f"l={l}: p={sectors.probabilities[l]:.6f}  F={sectors.fidelities[l]:.6f}")
print("p(l)-weighted fidelity:", round(sectors.average, 6))
