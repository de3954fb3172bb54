import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_enumerate, hampd_3x3, taylor_propagate
from stimclone.errors import BasisError, NotHermitianError, ResourceError
from stimclone.fock import (
    Basis,
    ConservedQuantity,
    ModeLayout,
    SparseHermitian,
    StateVector,
    apply_ladder,
    basis_from_json,
    basis_to_json,
    build_operator,
    enumerate_basis,
    evolve,
    evolve_many,
    ladder,
    state_from_json,
    state_to_json,
)
from stimclone.oscillator import FIVE_MODES, hampd_constraints, hampd_terms
from stimclone.serialize import canonical_json


def hampd_basis(N, m):
    return enumerate_basis(FIVE_MODES, hampd_constraints(N, m))


class TestEnumerate:
    def test_three_state_example(self):
        basis = hampd_basis(1, 1)
        assert set(basis.states) == {(1, 0, 0, 0, 1), (2, 0, 0, 1, 0), (1, 1, 1, 0, 0)}

    @pytest.mark.parametrize("N", range(0, 7))
    def test_size_matches_brute_force(self, N):
        m = 2
        cons = [((1, 0, 0, -1, 0), m), ((0, 1, -1, 0, 0), 0), ((0, 0, 1, 1, 1), N)]
        oracle = brute_enumerate(5, m + N, cons)
        basis = hampd_basis(N, m)
        assert list(basis.states) == oracle
        assert len(basis) == (N + 1) * (N + 2) // 2

    def test_no_atoms_single_state(self):
        assert hampd_basis(0, 3).states == ((3, 0, 0, 0, 0),)

    def test_lexicographic_and_indexed(self):
        basis = hampd_basis(3, 2)
        assert list(basis.states) == sorted(basis.states)
        assert all(basis.index[s] == i for i, s in enumerate(basis.states))

    def test_unbounded_mode_rejected(self):
        layout = ModeLayout(("x", "y"))
        q = ConservedQuantity.from_modes(layout, {"x": 1, "y": -1}, 0)
        with pytest.raises(ResourceError):
            enumerate_basis(layout, [q])

    def test_caps_bound_modes(self):
        layout = ModeLayout(("x", "y"), caps=(2, 3))
        basis = enumerate_basis(layout)
        assert len(basis) == 12

    def test_infeasible_constraints_give_empty_basis(self):
        layout = ModeLayout(("x", "y"))
        q = ConservedQuantity.from_modes(layout, {"x": 1, "y": 1}, -1)
        assert len(enumerate_basis(layout, [q])) == 0


class TestLadder:
    @pytest.fixture
    def wide(self):
        states = [(1, 0, 0, 0, 1), (2, 0, 0, 0, 1), (2, 0, 0, 1, 0), (0, 0, 0, 0, 0)]
        return Basis(FIVE_MODES, tuple(sorted(states)))

    def test_creation_sqrt_rule(self, wide):
        psi = StateVector.fock(wide, (1, 0, 0, 0, 1))
        out = apply_ladder(ladder("a1+"), psi)
        assert out.nonzero() == pytest.approx({(2, 0, 0, 0, 1): math.sqrt(2)})

    def test_vacuum_annihilation(self, wide):
        psi = StateVector.fock(wide, (0, 0, 0, 0, 0))
        assert apply_ladder(ladder("a1"), psi).norm() == 0

    def test_three_factor_product(self, wide):
        psi = StateVector.fock(wide, (1, 0, 0, 0, 1))
        out = apply_ladder(ladder("a1+ b2+ c"), psi)
        assert out.amplitude((2, 0, 0, 1, 0)) == pytest.approx(math.sqrt(2))

    def test_leaving_basis_raises(self, wide):
        psi = StateVector.fock(wide, (2, 0, 0, 1, 0))
        with pytest.raises(BasisError):
            apply_ladder(ladder("a2+"), psi)

    def test_unknown_mode(self, wide):
        with pytest.raises(KeyError):
            apply_ladder(ladder("z"), StateVector.fock(wide, (1, 0, 0, 0, 1)))

    def test_adjoint_reverses(self):
        term = ladder("a1 b2 c+", 2j).adjoint()
        assert term.coefficient == -2j
        assert term.ops == (("c", False), ("b2", True), ("a1", True))


class TestOperator:
    def test_hampd_matches_hand_matrix(self):
        basis = hampd_basis(1, 1)
        H = build_operator(hampd_terms(1.0), basis)
        order = [basis.index[s] for s in [(1, 0, 0, 0, 1), (2, 0, 0, 1, 0), (1, 1, 1, 0, 0)]]
        np.testing.assert_allclose(H.to_dense()[np.ix_(order, order)], hampd_3x3(), atol=1e-15)

    def test_empty_terms_zero(self):
        H = build_operator([], hampd_basis(2, 1))
        assert H.matrix.nnz == 0

    @given(st.floats(0.01, 10), st.floats(0.01, 10))
    @settings(max_examples=25, deadline=None)
    def test_hermitian_for_random_gamma(self, g1, g2):
        H = build_operator([ladder("a1 b2 c+", g1), ladder("a2 b1 c+", -g2)], hampd_basis(2, 2))
        d = H.to_dense()
        assert np.array_equal(d, d.conj().T)

    def test_non_hermitian_rejected(self):
        basis = hampd_basis(1, 1)
        with pytest.raises(NotHermitianError):
            build_operator([ladder("a1 b2 c+")], basis, hermitize=False)

    def test_eigenfrequencies(self):
        basis = hampd_basis(1, 1)
        w = np.linalg.eigvalsh(build_operator(hampd_terms(1.0), basis).to_dense())
        np.testing.assert_allclose(w, [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-14)


class TestEvolve:
    @pytest.fixture
    def system(self):
        basis = hampd_basis(3, 2)
        return build_operator(hampd_terms(1.0), basis), StateVector.fock(basis, (2, 0, 0, 0, 3))

    def test_zero_time_identity(self, system):
        H, psi = system
        np.testing.assert_allclose(evolve(H, psi, 0.0).amplitudes, psi.amplitudes, atol=0)

    def test_group_property(self, system):
        H, psi = system
        a = evolve(H, evolve(H, psi, 0.37), 0.81)
        b = evolve(H, psi, 1.18)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-10

    def test_taylor_oracle(self, system):
        H, psi = system
        for t in (0.1, 0.9, 2.5):
            ref = taylor_propagate(H.to_dense(), psi.amplitudes, t)
            assert np.max(np.abs(evolve(H, psi, t).amplitudes - ref)) < 1e-9

    def test_sparse_path_matches_dense(self, system):
        H, psi = system
        times = [0.2, 1.3]
        dense = evolve_many(H, psi, times)
        sparse = evolve_many(H, psi, times, dense_threshold=0)
        for a, b in zip(dense, sparse):
            assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-10

    def test_sparse_ceiling(self, system):
        H, psi = system
        with pytest.raises(ResourceError):
            evolve(H, psi, 1.0, dense_threshold=0, sparse_threshold=1)

    def test_deterministic(self, system):
        H, psi = system
        a = evolve(H, psi, 0.77).amplitudes
        b = evolve(H, psi, 0.77).amplitudes
        assert np.array_equal(a, b)


class TestSerialization:
    def test_state_round_trip_is_byte_identical(self):
        basis = hampd_basis(2, 1)
        H = build_operator(hampd_terms(1.0), basis)
        psi = evolve(H, StateVector.fock(basis, (1, 0, 0, 0, 2)), 0.6)
        text = canonical_json(state_to_json(psi))
        again = state_from_json(json.loads(text))
        assert canonical_json(state_to_json(again)) == text
        assert np.array_equal(again.amplitudes, psi.amplitudes)

    def test_basis_round_trip(self):
        basis = hampd_basis(2, 2)
        assert basis_from_json(basis_to_json(basis)).states == basis.states

    def test_hermitian_check_on_construction(self):
        import scipy.sparse as sp

        basis = hampd_basis(1, 1)
        with pytest.raises(NotHermitianError):
            SparseHermitian(basis, sp.csr_matrix(np.triu(np.ones((3, 3)), 1)))
