import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import max_mixed_m2_fidelity
from stimclone import analysis as an
from stimclone import ladder
from stimclone import oscillator as osc
from stimclone.errors import EmptySectorError
from stimclone.fock import evolve


def evolved(N, m, t, gamma=1.0):
    basis, H = osc.build_hampd(osc.OscillatorModelSpec(m=m, N=N, gamma=gamma))
    return evolve(H, osc.initial_state(basis, N, m), t)


class TestPostSelect:
    def test_ladder_state(self):
        N, m, l = 3, 2, 2
        p, rho = an.post_select(ladder.construct_F_l(N, m, l), l)
        assert p == pytest.approx(1)
        # row k holds k photons in a2; F_l puts i <= l of them there
        want = np.zeros(m + l + 1)
        for i in range(l + 1):
            want[i] = math.comb(m + l - i, m) / math.comb(m + l + 1, l)
        np.testing.assert_allclose(rho.rho, np.diag(want), atol=1e-14)

    def test_initial_state(self):
        psi = evolved(3, 1, 0.0)
        assert set(an.post_select_all(psi)) == {0}
        with pytest.raises(EmptySectorError):
            an.post_select(psi, 1)

    @pytest.mark.parametrize("t", [0.2, 0.9, 2.4])
    def test_complete(self, t):
        total = sum(p for p, _ in an.post_select_all(evolved(4, 2, t)).values())
        assert total == pytest.approx(1, abs=1e-12)

    def test_densities_valid(self):
        for _, rho in an.post_select_all(evolved(3, 3, 0.8)).values():
            rho.validate()
            assert rho.min_eigenvalue() >= -1e-12

    def test_bad_l(self):
        with pytest.raises(ValueError):
            an.post_select(evolved(2, 1, 0.3), 3)


class TestFidelities:
    def test_one_to_two(self):
        _, rho = an.post_select(ladder.construct_F_l(1, 1, 1), 1)
        assert an.relative_frequency_fidelity(rho) == pytest.approx(5 / 6, abs=1e-14)

    def test_all_in_pol(self):
        rho = an.PhotonSectorDensity.pure(3, [1, 0, 0, 0])
        assert an.relative_frequency_fidelity(rho) == pytest.approx(1)
        assert an.single_particle_fidelity(rho) == pytest.approx(1)

    @pytest.mark.parametrize("m", range(1, 6))
    def test_ladder_states_attain_formula(self, m):
        for l in range(6):
            _, rho = an.post_select(ladder.construct_F_l(l, m, l), l)
            assert an.relative_frequency_fidelity(rho) == pytest.approx(float(ladder.fidelity_formula(m, l)), abs=1e-12)

    def test_max_mixed_two_photons(self):
        # oracle value 1/2: the reduced one-photon state is I/2
        rho = an.PhotonSectorDensity(2, np.eye(3) / 3)
        assert an.single_particle_fidelity(rho) == pytest.approx(max_mixed_m2_fidelity(), abs=1e-12)
        assert an.relative_frequency_fidelity(rho) == pytest.approx(max_mixed_m2_fidelity(), abs=1e-12)

    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_concepts_agree_on_random_densities(self, M, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(M + 1, M + 1)) + 1j * rng.normal(size=(M + 1, M + 1))
        rho = an.PhotonSectorDensity(M, X @ X.conj().T / np.trace(X @ X.conj().T))
        pol = an.Polarization.haar_random(rng)
        assert an.relative_frequency_fidelity(rho, pol) == pytest.approx(an.single_particle_fidelity(rho, pol), abs=1e-12)

    def test_dicke_embedding_isometry(self):
        D = an.dicke_embedding(4)
        np.testing.assert_allclose((D.T @ D).toarray(), np.eye(5), atol=1e-14)

    def test_polarization_normalized(self):
        with pytest.raises(ValueError):
            an.Polarization(1, 1)


class TestUniversality:
    def test_reference_zero(self):
        assert an.universality_check(2, 1, 0.6, [an.H_POL]).max_deviation == 0

    def test_circular(self):
        pol = an.Polarization(1 / math.sqrt(2), 1j / math.sqrt(2))
        assert an.universality_check(2, 1, 0.6, [pol]).max_deviation < 1e-10

    def test_haar(self):
        pols = an.haar_polarizations(20, seed=11)
        for N in (1, 2):
            assert an.universality_check(N, 1, 0.6, pols).max_deviation < 1e-10

    def test_haar_deterministic(self):
        a = an.haar_polarizations(3, 5)
        b = an.haar_polarizations(3, 5)
        assert [p.vector.tolist() for p in a] == [p.vector.tolist() for p in b]

    def test_sector_average(self):
        s = an.sector_fidelities(evolved(2, 1, 0.5))
        assert 7 / 9 <= s.average <= 1


class TestBuzekHillery:
    def test_report(self):
        rep = an.buzek_hillery_equivalence()
        assert rep.passed
        assert rep.overlap == pytest.approx(1, abs=1e-12)
        assert rep.clone_fidelities == pytest.approx((5 / 6, 5 / 6), abs=1e-12)

    def test_anti_clone_is_optimal_not(self):
        # input "up" (photon in a1): anti-clone is (2/3) down + (1/3) up
        rep = an.buzek_hillery_equivalence()
        np.testing.assert_allclose(rep.ancilla_state, np.diag([1 / 3, 2 / 3]), atol=1e-12)

    def test_sign_convention_matters(self):
        # dropping the b-relabeling sign leaves only a partial overlap
        F1 = ladder.construct_F_l(1, 1, 1)
        naive = np.zeros(8, dtype=complex)
        for (n1, n2, b1, b2, c), a in F1.nonzero().items():
            anc = 1 if b2 == 1 else 0
            if (n1, n2) == (2, 0):
                naive[0b110 | anc] += a
            else:
                naive[0b010 | anc] += a / math.sqrt(2)
                naive[0b100 | anc] += a / math.sqrt(2)
        assert abs(naive @ an.buzek_hillery_state()) == pytest.approx(1 / 3)


def test_embedding_ceiling():
    from stimclone.errors import ResourceError

    with pytest.raises(ResourceError):
        an.dicke_embedding(an.DICKE_MAX_PHOTONS + 1)


def test_twenty_photon_identity():
    rho = an.post_select(ladder.construct_F_l(2, 18, 2), 2)[1]
    assert an.single_particle_fidelity(rho) == pytest.approx(an.relative_frequency_fidelity(rho), abs=1e-12)
