"""
Many photons, few atoms
=======================

For m >> N each atom emits independently with probability
sin^2(gamma sqrt(m) t): the clone number is binomial and its mean
oscillates at a frequency growing like sqrt(m).
"""
import math

import numpy as np

from stimclone import ladder

N, m = 3, 400
x = np.linspace(0, math.pi, 9)
times = x / math.sqrt(m)
print("gamma sqrt(m) t   exact mean   N sin^2   max |f_l - closed form|")
for xi, f in zip(x, ladder.evolve_ladder_many(N, m, 1.0, times)):
    closed = ladder.large_m_solution(N, m, 1.0, f.t)
    mean = ladder.clone_number_distribution(f).mean_clones
    gap = np.max(np.abs(f.amplitudes - closed.amplitudes))
    print(f"{xi:15.3f}   {mean:10.5f}   {ladder.mean_clones_closed_form(N, m, 1.0, f.t):7.5f}   {gap:.4f}")

# The gap grows with time: the exact ladder couplings carry an extra
# (m + l + 2) / m factor that slowly dephases the closed form.


def fitted_frequency(m):
    t = np.linspace(0, 2 * math.pi / math.sqrt(m), 400)
    means = [ladder.clone_number_distribution(f).mean_clones for f in ladder.evolve_ladder_many(N, m, 1.0, t)]
    return ladder.fit_oscillation_frequency(t, means, 2 * math.sqrt(m))


w100, w400 = fitted_frequency(100), fitted_frequency(400)
print(f"fitted frequencies: m=100 -> {w100:.4f}, m=400 -> {w400:.4f}, ratio {w100 / w400:.4f} (sqrt ratio 0.5)")
