"""
One atom, one photon
====================

A single Lambda atom in its excited state meets one photon polarized
along a1.  Stimulated emission into a1 produces two identical photons;
spontaneous emission into a2 produces the imperfect part.  Post-selecting
on the atom having emitted gives the optimal 1 -> 2 cloner.
"""
import math

import numpy as np

from stimclone import analysis, ladder, lambda_atoms
from stimclone.fock import evolve_many

# Full atom + two-mode field model, three states reachable
H, psi0 = lambda_atoms.lambda_model(n_atoms=1, m=1, gamma=1.0)
print("basis dimension:", H.dim)

# The cloning probability sin^2(sqrt3 t) reaches 1 at t = pi / (2 sqrt3)
t_full = math.pi / (2 * math.sqrt(3))
times = np.linspace(0, t_full, 6)
for t, psi in zip(times, evolve_many(H, psi0, times)):
    five = lambda_atoms.map_to_oscillator(psi, 1)
    p_emit = sum(abs(a) ** 2 for k, a in five.nonzero().items() if k[4] == 0)
    print(f"t = {t:.3f}   p(emitted) = {p_emit:.6f}   sin^2(sqrt3 t) = {math.sin(math.sqrt(3) * t) ** 2:.6f}")

# Fidelity of the two output photons
_, rho = analysis.post_select(ladder.construct_F_l(1, 1, 1), 1)
print("relative-frequency fidelity:", analysis.relative_frequency_fidelity(rho))
print("single-particle fidelity:   ", analysis.single_particle_fidelity(rho))
print("optimal 1 -> 2 value:       ", ladder.fidelity_formula(1, 1))

# The same state is the Buzek-Hillery cloner output; the atom is the anti-clone
rep = analysis.buzek_hillery_equivalence()
print("overlap with Buzek-Hillery output:", round(rep.overlap, 15))
print("anti-clone state (up, down):", np.real(np.diag(rep.ancilla_state)))
