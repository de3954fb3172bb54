import math
import warnings

import numpy as np
import pytest

from oracles import hampd_3x3, onelam
from stimclone import oscillator as osc
from stimclone.errors import ResourceError
from stimclone.fock import StateVector, evolve, evolve_many, number_operator
from stimclone.ladder import construct_F_l


def spec(N, m, gamma=1.0, **kw):
    return osc.OscillatorModelSpec(m=m, N=N, gamma=gamma, **kw)


class TestHampd:
    def test_three_by_three(self):
        basis, H = osc.build_hampd(spec(1, 1))
        order = [basis.index[s] for s in [(1, 0, 0, 0, 1), (2, 0, 0, 1, 0), (1, 1, 1, 0, 0)]]
        np.testing.assert_allclose(H.to_dense()[np.ix_(order, order)], hampd_3x3(), atol=1e-15)
        np.testing.assert_allclose(np.linalg.eigvalsh(H.to_dense()), [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-14)

    def test_no_atoms(self):
        basis, H = osc.build_hampd(spec(0, 2))
        assert len(basis) == 1 and H.to_dense().tolist() == [[0]]

    @pytest.mark.parametrize("N,m", [(1, 1), (2, 3), (4, 0), (5, 5)])
    def test_first_ladder_element(self, N, m):
        gamma = 1.3
        basis, H = osc.build_hampd(spec(N, m, gamma))
        f0 = construct_F_l(N, m, 0, basis)
        f1 = construct_F_l(N, m, 1, basis)
        assert f1.inner(H.apply(f0)) == pytest.approx(gamma * math.sqrt(N * (m + 2)), abs=1e-12)

    def test_dimension_ceiling(self):
        with pytest.raises(ResourceError):
            osc.build_hampd(spec(3, 1), max_dim=5)

    def test_spec_from_json(self):
        s = osc.OscillatorModelSpec.from_json('{"m": 2, "N": 3, "gamma": 0.5, "t": [0, 1]}')
        assert (s.m, s.N, s.gamma, s.times) == (2, 3, 0.5, (0.0, 1.0))


class TestHampd1:
    @pytest.mark.parametrize("N,m", [(1, 1), (2, 2), (3, 1), (4, 4)])
    def test_relabeling_is_exact(self, N, m):
        b1, H1 = osc.build_hampd1(spec(N, m))
        b, H = osc.build_hampd(spec(N, m))
        P = osc.relabel_matrix(b1, b)
        assert np.max(np.abs(P @ H1.to_dense() @ P.T - H.to_dense())) == 0
        np.testing.assert_allclose(P @ P.T, np.eye(len(b)), atol=0)

    @pytest.mark.parametrize("N", range(1, 5))
    @pytest.mark.parametrize("m", range(0, 5))
    def test_spectra_agree(self, N, m):
        _, H1 = osc.build_hampd1(spec(N, m))
        _, H = osc.build_hampd(spec(N, m))
        np.testing.assert_allclose(np.linalg.eigvalsh(H1.to_dense()), np.linalg.eigvalsh(H.to_dense()), atol=1e-12)

    def test_onelam_in_symmetric_convention(self):
        basis, H = osc.build_hampd1(spec(1, 1))
        psi0 = osc.initial_state(basis, 1, 1)
        kets = [(1, 0, 0, 0, 1), (2, 0, 1, 0, 0), (1, 1, 0, 1, 0)]
        for t in (0.2, 1.0, 3.3):
            psi = evolve(H, psi0, t)
            got = np.array([psi.amplitude(k) for k in kets])
            assert np.max(np.abs(got - onelam(t))) < 1e-12


class TestGeneralized:
    def test_r2_is_hampd1(self):
        b, H = osc.build_generalized(3, (2, 0))
        b1, H1 = osc.build_hampd1(spec(3, 2))
        assert b.states == b1.states
        assert np.array_equal(H.to_dense(), H1.to_dense())

    def test_r3_conservation_and_norm(self):
        b, H = osc.build_generalized(2, (1, 0, 0))
        psi0 = osc.generalized_initial_state(b, 2, (1, 0, 0))
        q = number_operator(b, {"a1": 1, "a2": 1, "a3": 1, "c": 1})
        for psi in evolve_many(H, psi0, [0.3, 1.2, 2.9]):
            assert psi.norm() == pytest.approx(1, abs=1e-12)
            assert np.sum(q * np.abs(psi.amplitudes) ** 2) == pytest.approx(3, abs=1e-10)

    def test_r_below_two(self):
        with pytest.raises(ValueError):
            osc.build_generalized(1, (1,))


class TestClassicalPump:
    @pytest.mark.parametrize("m", range(0, 5))
    def test_first_ladder_element(self, m):
        g = 0.8
        basis, H = osc.build_classical_pump(g, m, 4)
        f0 = StateVector.fock(basis, (m, 0, 0, 0))
        f1 = StateVector.from_dict(
            basis, {(m + 1, 0, 0, 1): math.sqrt((m + 1) / (m + 2)), (m, 1, 1, 0): -math.sqrt(1 / (m + 2))}
        )
        assert f1.inner(H.apply(f0)) / g == pytest.approx(math.sqrt(m + 2), abs=1e-12)

    def test_short_time_pair_emission(self):
        g = 1.0
        ratios = []
        for t in (1e-2, 5e-3):
            p = osc.classical_pump_distribution(g, 0, [t], 6).probabilities[0]
            ratios.append(p[1] / t**2)
        # leading order 2 g^2 t^2 (one pair into either polarization)
        assert ratios == pytest.approx([2.0, 2.0], rel=1e-3)

    def test_zero_coupling_identity(self):
        basis, H = osc.build_classical_pump(0.0, 2, 3)
        psi0 = StateVector.fock(basis, (2, 0, 0, 0))
        assert np.array_equal(evolve(H, psi0, 5.0).amplitudes, psi0.amplitudes)

    def test_truncation_warning(self):
        with pytest.warns(osc.TruncationWarning):
            osc.classical_pump_distribution(1.0, 1, [2.0], 1)

    def test_converged_cap(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            res = osc.converged_classical_pump(1.0, 1, [0.3, 1.0])
        assert not res.truncated
        np.testing.assert_allclose(res.probabilities.sum(axis=1), 1, atol=1e-12)


class TestPdcLimit:
    def test_trend(self):
        rep = osc.pdc_limit_convergence((4, 8, 16, 32), 1.0, 1, 0.3)
        assert rep.monotone
        assert rep.rate is not None and rep.rate < 0

    def test_zero_time_zero_deviation(self):
        rep = osc.pdc_limit_convergence((4, 8), 1.0, 1, 0.0)
        assert rep.deviations == (0.0, 0.0)

    def test_l_max_must_be_small(self):
        with pytest.raises(ValueError):
            osc.pdc_limit_convergence((2, 4), 1.0, 1, 0.3, l_max=2)


class TestRotations:
    def test_passive_rotation_unitary(self):
        basis = osc.universal_basis(2, 2)
        U = osc.haar_su2(np.random.default_rng(3))
        R = osc.passive_rotation(basis, ("a1", "a2"), U)
        np.testing.assert_allclose(R @ R.conj().T, np.eye(len(basis)), atol=1e-12)

    def test_polarized_input_is_rotated_pump_ket(self):
        N, m = 1, 3
        basis = osc.universal_basis(N, m)
        a, b = 0.6, 0.8j
        U = osc.polarization_unitary(a, b)
        R = osc.passive_rotation(basis, ("a1", "a2"), U)
        want = osc.polarized_input(basis, N, m, a, b).amplitudes
        np.testing.assert_allclose(R @ osc.initial_state(basis, N, m).amplitudes, want, atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_su2_covariance(self, seed):
        U = osc.haar_su2(np.random.default_rng(seed))
        assert osc.su2_covariance_deviation(2, 1, U) < 1e-12
