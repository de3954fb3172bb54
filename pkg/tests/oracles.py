"""Independent reference computations used by the tests.

Nothing here imports the package: each oracle is a separate, deliberately
naive implementation (brute-force enumeration, Taylor series, explicit
small matrices) against which the library is checked.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def brute_enumerate(n_modes, max_occ, constraints):
    """All occupation tuples with entries <= max_occ obeying ``sum(c*n) == target``."""
    out = []
    for occ in itertools.product(range(max_occ + 1), repeat=n_modes):
        if all(sum(c * n for c, n in zip(coeffs, occ)) == target for coeffs, target in constraints):
            out.append(occ)
    return sorted(out)


def taylor_propagate(H, vec, t, tol=1e-16):
    """``exp(-i H t) vec`` by a plain Taylor series on short substeps."""
    H = np.asarray(H, dtype=complex)
    vec = np.asarray(vec, dtype=complex)
    scale = max(np.abs(H).sum(axis=0).max(), 1e-300) * abs(t)
    steps = max(1, int(math.ceil(scale / 0.25)))
    dt = t / steps
    for _ in range(steps):
        term = vec.copy()
        acc = vec.copy()
        k = 1
        while np.linalg.norm(term) > tol and k < 80:
            term = (-1j * dt / k) * (H @ term)
            acc = acc + term
            k += 1
        vec = acc
    return vec


def onelam(t, gamma=1.0):
    """One Lambda atom, one photon: (|e>|1,0>, |g1>|2,0>, |g2>|1,1>) amplitudes."""
    w = gamma * math.sqrt(3) * t
    return np.array([math.cos(w), -1j * math.sqrt(2 / 3) * math.sin(w), -1j * math.sqrt(1 / 3) * math.sin(w)])


def hampd_3x3(gamma=1.0):
    """N=1, m=1 antisymmetric coupling on ((1,0,0,0,1), (2,0,0,1,0), (1,1,1,0,0)) worked by hand.

    a1 b2 c+ takes (2,0,0,1,0) -> (1,0,0,0,1) with sqrt2 * 1 * 1;
    -a2 b1 c+ takes (1,1,1,0,0) -> (1,0,0,0,1) with -1.
    """
    H = np.zeros((3, 3))
    H[0, 1] = H[1, 0] = gamma * math.sqrt(2)
    H[0, 2] = H[2, 0] = -gamma
    return H


def max_mixed_m2_fidelity():
    """Single-particle fidelity of the maximally mixed two-photon symmetric state.

    Symmetric projector on two qubits divided by 3, reduced to one qubit,
    overlap with |0>.
    """
    dicke = [
        np.array([1, 0, 0, 0.0]),
        np.array([0, 1, 1, 0.0]) / math.sqrt(2),
        np.array([0, 0, 0, 1.0]),
    ]
    rho = sum(np.outer(v, v) for v in dicke) / 3
    red = np.einsum("ijkj->ik", rho.reshape(2, 2, 2, 2))
    return float(red[0, 0])


def binomial_amplitudes(N, m, gamma, t):
    """(-i)^l sqrt(C(N,l)) cos^(N-l) sin^l (gamma sqrt(m) t)."""
    x = gamma * math.sqrt(m) * t
    return np.array([(-1j) ** l * math.sqrt(math.comb(N, l)) * math.cos(x) ** (N - l) * math.sin(x) ** l for l in range(N + 1)])


def krylov_ladder(H, start, count):
    """Orthonormal Krylov vectors of ``H`` from ``start`` (classical Gram-Schmidt, twice)."""
    vecs = [np.asarray(start, dtype=complex) / np.linalg.norm(start)]
    while len(vecs) < count:
        w = H @ vecs[-1]
        for _ in range(2):
            for v in vecs:
                w = w - (v.conj() @ w) * v
        vecs.append(w / np.linalg.norm(w))
    return np.column_stack(vecs)
