"""Bosonic Fock-space machinery.

Bases are enumerated exactly from linear conservation laws, so the
cloning models never need an occupation cutoff.  Operators are assembled
as sparse matrices from products of ladder operators and evolved with an
exact Hermitian eigendecomposition (or a scaled Taylor propagator for
large bases).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import expm_multiply

from .errors import BasisError, NotHermitianError, ResourceError

DENSE_THRESHOLD = 2000
SPARSE_THRESHOLD = 200_000

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class ModeLayout:
    """Ordered mode labels with optional per-mode occupation caps."""

    modes: tuple[str, ...]
    caps: tuple[int | None, ...] | None = None

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate mode labels in {modes}")
        caps = self.caps if self.caps is not None else (None,) * len(modes)
        caps = tuple(caps)
        if len(caps) != len(modes):
            raise ValueError("caps must have one entry per mode")
        object.__setattr__(self, "caps", caps)

    def __len__(self):
        return len(self.modes)

    def position(self, mode: str) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise KeyError(f"mode {mode!r} not in layout {self.modes}") from None


@dataclass(frozen=True)
class ConservedQuantity:
    """Linear form ``sum(coefficients[i] * n_i) == target``."""

    coefficients: tuple[int, ...]
    target: int

    @classmethod
    def from_modes(cls, layout: ModeLayout, coefficients: Mapping[str, int], target: int):
        coeffs = [0] * len(layout)
        for mode, c in coefficients.items():
            coeffs[layout.position(mode)] = int(c)
        return cls(tuple(coeffs), int(target))

    def value(self, occupations: Sequence[int]) -> int:
        return sum(c * n for c, n in zip(self.coefficients, occupations))


@dataclass(frozen=True, eq=False)
class Basis:
    """Deterministically ordered list of occupation tuples with an index map."""

    layout: ModeLayout
    states: tuple[Occupation, ...]
    index: dict[Occupation, int] = field(init=False, repr=False)

    def __post_init__(self):
        states = tuple(tuple(int(n) for n in s) for s in self.states)
        object.__setattr__(self, "states", states)
        for s in states:
            if len(s) != len(self.layout):
                raise ValueError(f"state {s} does not match layout size {len(self.layout)}")
        index = {s: i for i, s in enumerate(states)}
        if len(index) != len(states):
            raise ValueError("duplicate states in basis")
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.states)

    def __contains__(self, state):
        return tuple(state) in self.index

    def __iter__(self):
        return iter(self.states)

    def occupations(self, mode: str) -> np.ndarray:
        """Occupation of ``mode`` in every basis state, as an integer array."""
        k = self.layout.position(mode)
        return np.array([s[k] for s in self.states], dtype=int)


def _mode_bounds(layout: ModeLayout, constraints: Sequence[ConservedQuantity]):
    # Interval propagation: each equality bounds a mode once the modes with
    # opposing sign are bounded.  Lower bounds stay at zero.
    ub: list[float] = [math.inf if c is None else c for c in layout.caps]
    changed = True
    while changed:
        changed = False
        for q in constraints:
            for i, ci in enumerate(q.coefficients):
                if ci == 0:
                    continue
                # ci * n_i = target - sum_{j != i} c_j n_j
                rest_max = 0.0
                for j, cj in enumerate(q.coefficients):
                    if j == i or cj == 0:
                        continue
                    if (ci > 0 and cj < 0) or (ci < 0 and cj > 0):
                        rest_max += abs(cj) * ub[j]
                bound = (q.target * np.sign(ci) + rest_max) / abs(ci)
                if bound < ub[i]:
                    ub[i] = math.floor(bound) if math.isfinite(bound) else bound
                    changed = True
                    if ub[i] < 0:
                        return ub
    return ub


def enumerate_basis(
    layout: ModeLayout, constraints: Iterable[ConservedQuantity] = ()
) -> Basis:
    """Every occupation tuple satisfying all constraints and caps.

    States come out in lexicographic order of the occupation tuples.
    Raises :class:`ResourceError` when some mode is bounded neither by a
    cap nor by the constraints.
    """
    constraints = list(constraints)
    for q in constraints:
        if len(q.coefficients) != len(layout):
            raise ValueError("constraint length does not match layout")
    ub = _mode_bounds(layout, constraints)
    if any(u < 0 for u in ub):
        return Basis(layout, ())
    unbounded = [m for m, u in zip(layout.modes, ub) if not math.isfinite(u)]
    if unbounded:
        raise ResourceError(
            f"occupations of modes {unbounded} are unbounded by the constraints; give explicit caps"
        )
    ub_int = [int(u) for u in ub]
    n = len(layout)
    coeffs = np.array([q.coefficients for q in constraints], dtype=np.int64).reshape(len(constraints), n)
    targets = np.array([q.target for q in constraints], dtype=np.int64)
    # Suffix ranges of each constraint over the still-unassigned modes.
    pos = np.clip(coeffs, 0, None) * np.array(ub_int)
    neg = np.clip(coeffs, None, 0) * np.array(ub_int)
    suffix_max = np.zeros((len(constraints), n + 1), dtype=np.int64)
    suffix_min = np.zeros((len(constraints), n + 1), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        suffix_max[:, k] = suffix_max[:, k + 1] + pos[:, k]
        suffix_min[:, k] = suffix_min[:, k + 1] + neg[:, k]

    states: list[Occupation] = []
    occ = [0] * n

    def visit(k: int, partial: np.ndarray):
        if k == n:
            if np.all(partial == targets):
                states.append(tuple(occ))
            return
        for v in range(ub_int[k] + 1):
            p = partial + coeffs[:, k] * v
            remaining = targets - p
            if np.all(remaining <= suffix_max[:, k + 1]) and np.all(remaining >= suffix_min[:, k + 1]):
                occ[k] = v
                visit(k + 1, p)
        occ[k] = 0

    visit(0, np.zeros(len(constraints), dtype=np.int64))
    return Basis(layout, tuple(states))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a basis.

    Normalization is not enforced here so that operator actions can return
    unnormalized vectors; use :meth:`normalized` when a physical state is
    needed.
    """

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise ValueError(f"expected {len(self.basis)} amplitudes, got shape {amps.shape}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_dict(cls, basis: Basis, amplitudes: Mapping[Occupation, complex]):
        vec = np.zeros(len(basis), dtype=complex)
        for state, amp in amplitudes.items():
            try:
                vec[basis.index[tuple(state)]] += amp
            except KeyError:
                raise BasisError(f"state {tuple(state)} is not in the basis", state=tuple(state)) from None
        return cls(basis, vec)

    @classmethod
    def fock(cls, basis: Basis, state: Sequence[int]):
        return cls.from_dict(basis, {tuple(state): 1.0})

    def __len__(self):
        return len(self.amplitudes)

    def amplitude(self, state: Sequence[int]) -> complex:
        i = self.basis.index.get(tuple(state))
        return 0j if i is None else complex(self.amplitudes[i])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / nrm)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``; both vectors must share a basis."""
        if other.basis is not self.basis:
            other = reexpress(other, self.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def nonzero(self, tol: float = 0.0) -> dict[Occupation, complex]:
        return {
            s: complex(a) for s, a in zip(self.basis.states, self.amplitudes) if abs(a) > tol
        }

    def __add__(self, other: "StateVector"):
        if other.basis is not self.basis:
            other = reexpress(other, self.basis)
        return StateVector(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector"):
        if other.basis is not self.basis:
            other = reexpress(other, self.basis)
        return StateVector(self.basis, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return StateVector(self.basis, self.amplitudes * scalar)

    __rmul__ = __mul__


def reexpress(psi: StateVector, basis: Basis, tol: float = 0.0) -> StateVector:
    """Copy ``psi`` onto another basis of the same layout, matching kets.

    Amplitudes larger than ``tol`` on kets absent from ``basis`` raise
    :class:`BasisError`.
    """
    if psi.basis is basis:
        return psi
    if psi.basis.layout.modes != basis.layout.modes:
        raise ValueError("bases have different mode layouts")
    vec = np.zeros(len(basis), dtype=complex)
    for state, amp in zip(psi.basis.states, psi.amplitudes):
        i = basis.index.get(state)
        if i is None:
            if abs(amp) > tol:
                raise BasisError(f"amplitude {amp:.3g} on {state}, which is outside the target basis", state=state)
            continue
        vec[i] = amp
    return StateVector(basis, vec)


@dataclass(frozen=True)
class LadderTerm:
    """Scalar times an ordered product of ladder operators.

    ``ops`` lists ``(mode, dagger)`` pairs left to right as written; the
    rightmost operator acts first.
    """

    coefficient: complex
    ops: tuple[tuple[str, bool], ...]

    @classmethod
    def parse(cls, text: str, coefficient: complex = 1.0) -> "LadderTerm":
        """Build from text such as ``"a1+ b2+ c"`` (``+`` marks a creator)."""
        ops = []
        for tok in text.split():
            if tok.endswith("+"):
                ops.append((tok[:-1], True))
            else:
                ops.append((tok, False))
        return cls(complex(coefficient), tuple(ops))

    def adjoint(self) -> "LadderTerm":
        return LadderTerm(
            complex(np.conj(self.coefficient)),
            tuple((mode, not dag) for mode, dag in reversed(self.ops)),
        )

    def act(self, layout: ModeLayout, occupations: Sequence[int]):
        """Return ``(factor, new_occupations)``, or ``None`` if annihilated."""
        occ = list(occupations)
        factor = complex(self.coefficient)
        for mode, dag in reversed(self.ops):
            k = layout.position(mode)
            if dag:
                occ[k] += 1
                factor *= math.sqrt(occ[k])
            else:
                if occ[k] == 0:
                    return None
                factor *= math.sqrt(occ[k])
                occ[k] -= 1
        return factor, tuple(occ)


def ladder(text: str, coefficient: complex = 1.0) -> LadderTerm:
    return LadderTerm.parse(text, coefficient)


def apply_ladder(term: LadderTerm, psi: StateVector) -> StateVector:
    """Apply one ladder product to ``psi`` (result is not renormalized)."""
    basis = psi.basis
    for mode, _ in term.ops:
        basis.layout.position(mode)
    out = np.zeros(len(basis), dtype=complex)
    for state, amp in zip(basis.states, psi.amplitudes):
        if amp == 0:
            continue
        res = term.act(basis.layout, state)
        if res is None:
            continue
        factor, target = res
        j = basis.index.get(target)
        if j is None:
            raise BasisError(f"{term.ops} maps {state} to {target}, outside the basis", state=target)
        out[j] += factor * amp
    return StateVector(basis, out)


@dataclass(frozen=True, eq=False)
class SparseHermitian:
    """Hermitian operator stored as a CSR matrix over a basis."""

    basis: Basis
    matrix: sp.csr_matrix

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        if mat.shape != (len(self.basis), len(self.basis)):
            raise ValueError("matrix shape does not match basis")
        mat.sum_duplicates()
        mat.eliminate_zeros()
        if not is_hermitian(mat):
            raise NotHermitianError("operator is not equal to its conjugate transpose")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, psi: StateVector) -> StateVector:
        if psi.basis is not self.basis:
            psi = reexpress(psi, self.basis)
        return StateVector(self.basis, self.matrix @ psi.amplitudes)

    def element(self, row: Sequence[int], col: Sequence[int]) -> complex:
        return complex(self.matrix[self.basis.index[tuple(row)], self.basis.index[tuple(col)]])

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        return eigh(self.to_dense())


def is_hermitian(mat) -> bool:
    diff = sp.csr_matrix(mat) - sp.csr_matrix(mat).conj().T
    diff.eliminate_zeros()
    return diff.nnz == 0


def operator_from_entries(
    basis: Basis,
    rows: Sequence[int],
    cols: Sequence[int],
    values: Sequence[complex],
    hermitize: bool = True,
) -> SparseHermitian:
    """Assemble ``T`` from COO entries and return ``T + T^dagger`` (or ``T``)."""
    n = len(basis)
    t = sp.coo_matrix(
        (np.asarray(values, dtype=complex), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
        shape=(n, n),
    ).tocsr()
    if hermitize:
        t = t + t.conj().T
    return SparseHermitian(basis, t)


def build_operator(
    terms: Sequence[LadderTerm], basis: Basis, hermitize: bool = True
) -> SparseHermitian:
    """Matrix of ``sum(terms)`` (plus its adjoint when ``hermitize``).

    Without ``hermitize`` the summed terms must already form a Hermitian
    operator, otherwise :class:`NotHermitianError` is raised.
    """
    rows, cols, vals = [], [], []
    for j, state in enumerate(basis.states):
        for term in terms:
            res = term.act(basis.layout, state)
            if res is None:
                continue
            factor, target = res
            i = basis.index.get(target)
            if i is None:
                raise BasisError(f"{term.ops} maps {state} to {target}, outside the basis", state=target)
            rows.append(i)
            cols.append(j)
            vals.append(factor)
    return operator_from_entries(basis, rows, cols, vals, hermitize=hermitize)


def number_operator(basis: Basis, coefficients: Mapping[str, float]) -> np.ndarray:
    """Diagonal of ``sum_k c_k n_k`` over the basis."""
    diag = np.zeros(len(basis))
    for mode, c in coefficients.items():
        diag += c * basis.occupations(mode)
    return diag


def conserved_expectation(psi: StateVector, q: ConservedQuantity) -> float:
    values = np.array([q.value(s) for s in psi.basis.states], dtype=float)
    return float(np.sum(values * np.abs(psi.amplitudes) ** 2))


def evolve(
    H: SparseHermitian,
    psi: StateVector,
    t: float,
    dense_threshold: int = DENSE_THRESHOLD,
    sparse_threshold: int = SPARSE_THRESHOLD,
) -> StateVector:
    """Return ``exp(-i H t) psi`` (hbar = 1)."""
    return evolve_many(H, psi, [t], dense_threshold, sparse_threshold)[0]


def evolve_many(
    H: SparseHermitian,
    psi: StateVector,
    times: Iterable[float],
    dense_threshold: int = DENSE_THRESHOLD,
    sparse_threshold: int = SPARSE_THRESHOLD,
) -> list[StateVector]:
    """Evolve ``psi`` to every time in ``times``, sharing one diagonalization."""
    if psi.basis is not H.basis:
        psi = reexpress(psi, H.basis)
    times = [float(t) for t in times]
    dim = H.dim
    if dim <= dense_threshold:
        w, v = H.eigensystem
        coeffs = v.conj().T @ psi.amplitudes
        step = lambda t: v @ (np.exp(-1j * w * t) * coeffs)
    elif dim > sparse_threshold:
        raise ResourceError(
            f"basis dimension {dim} exceeds the sparse propagation limit {sparse_threshold}"
        )
    else:
        step = lambda t: _taylor_steps(H.matrix, psi.amplitudes, t)
    # t = 0 is returned exactly rather than through the eigenbasis round trip
    return [StateVector(H.basis, psi.amplitudes.copy() if t == 0 else step(t)) for t in times]


def _taylor_steps(mat: sp.csr_matrix, vec: np.ndarray, t: float) -> np.ndarray:
    # Scaled truncated Taylor propagation; the result is checked against
    # unitarity since the step control is internal to expm_multiply.
    if t == 0:
        return vec.copy()
    out = expm_multiply(-1j * t * mat, vec, traceA=0.0)
    drift = abs(np.linalg.norm(out) - np.linalg.norm(vec))
    if drift > 1e-10:
        raise ResourceError(f"sparse propagation lost unitarity (norm drift {drift:.2e})")
    return out


# -- JSON forms -----------------------------------------------------------


def basis_to_json(basis: Basis) -> dict:
    return {"modes": list(basis.layout.modes), "states": [list(s) for s in basis.states]}


def basis_from_json(data: Mapping) -> Basis:
    return Basis(ModeLayout(tuple(data["modes"])), tuple(tuple(s) for s in data["states"]))


def state_to_json(psi: StateVector) -> dict:
    return {
        "basis": basis_to_json(psi.basis),
        "amplitudes": [[float(a.real), float(a.imag)] for a in psi.amplitudes],
    }


def state_from_json(data: Mapping, basis: Basis | None = None) -> StateVector:
    basis = basis if basis is not None else basis_from_json(data["basis"])
    amps = [complex(re, im) for re, im in data["amplitudes"]]
    return StateVector(basis, np.array(amps))
