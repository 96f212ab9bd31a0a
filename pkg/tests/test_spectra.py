import itertools
import math

import numpy as np
import pytest

from conftest import random_commutant, random_hermitian

from spincontact import (
    CouplingMatrix,
    MomentumSet,
    SpinConfig,
    Statistics,
    ValidationError,
    bound_state_boundary_residual,
    cluster_scattering_matrix,
    consistent_coupling,
    delta_bc,
    embed_two_site,
    encode,
    hyperplane_samples,
    n_body_bound_states,
    pair_exchange_matrix,
    permutation_parity,
    propagate_coefficients,
    s_element,
    scattering_matrix,
    separated_bound_states,
    separated_boundary_residual,
    site_permutation_operator,
    swap_matrix,
    symmetry_residual,
    two_body_bound_states,
    unitarity_residual,
)

BOSON, FERMION = Statistics.BOSON, Statistics.FERMION


class TestTwoBodyBoundStates:
    def test_scalar_coupling_on_symmetric_subspace(self):
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        modes = two_body_bound_states(h, a=1.0, c=0.0, statistics=BOSON)
        # the jump relation for psi = v exp(kappa |x1 - x2|) forces
        # 2 kappa = lambda, and the relative kinetic term gives E = -2 kappa^2
        kappa = -2.0 / 2
        expected_energy = -2 * kappa**2
        assert len(modes) == 3  # symmetric pair subspace of two 2-state spins
        for m in modes:
            assert m.kappa == pytest.approx(kappa)
            assert m.energy == pytest.approx(expected_energy) == pytest.approx(-2.0)
            assert m.lambda_val == pytest.approx(-2.0)

    def test_fermion_count_is_antisymmetric_dimension(self):
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        modes = two_body_bound_states(h, statistics=FERMION)
        assert len(modes) == 1

    def test_positive_definite_coupling_binds_nothing(self, rng):
        raw = random_hermitian(4, rng)
        h = CouplingMatrix(n=2, entries=raw @ raw.conj().T + 0.1 * np.eye(4))
        assert two_body_bound_states(h) == []

    def test_zero_coupling_binds_nothing(self):
        assert two_body_bound_states(CouplingMatrix(n=2, entries=np.zeros((4, 4)))) == []

    def test_spinless_count_is_one(self):
        h = CouplingMatrix(n=1, entries=[[-1.4]])
        modes = two_body_bound_states(h)
        assert len(modes) == 1  # n^2 = 1: the full count is reached
        assert modes[0].energy == pytest.approx(-(1.4**2) / 2)

    def test_mixed_spectrum_keeps_only_binding_symmetric_part(self, rng):
        # scalar -2 on the exchange-symmetric subspace, positive block on the
        # antisymmetric one: only the symmetric modes bind
        h = consistent_coupling(2, BOSON, -2.0, 3.0 * np.eye(4))
        modes = two_body_bound_states(h, statistics=BOSON)
        assert len(modes) == 3
        assert all(m.lambda_val == pytest.approx(-2.0) for m in modes)


class TestNBodyBoundStates:
    def test_three_body_string(self):
        cfg = SpinConfig(N=3, n=2, statistics=BOSON)
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        modes = n_body_bound_states(cfg, h)
        assert len(modes) == 4  # totally symmetric subspace of (C^2)^3
        mode = modes[0]
        assert mode.momenta.k == (2j, 0j, -2j)
        # independent oracle: sum of squared momenta
        assert sum(k * k for k in mode.momenta.k) == pytest.approx(-8.0)
        assert mode.energy == pytest.approx(-8.0)

    def test_two_body_reduction_matches(self, rng):
        h = consistent_coupling(2, BOSON, -1.3, random_hermitian(4, rng))
        direct = two_body_bound_states(h, statistics=BOSON)
        via_n = n_body_bound_states(SpinConfig(N=2, n=2, statistics=BOSON), h)
        assert len(direct) == len(via_n)
        for m1, m2 in zip(direct, via_n):
            assert m1.energy == pytest.approx(m2.energy)
            assert m1.kappa == pytest.approx(m2.kappa)

    def test_fermions_with_too_few_spin_states_bind_nothing(self):
        cfg = SpinConfig(N=3, n=2, statistics=FERMION)
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        assert n_body_bound_states(cfg, h) == []

    def test_boundary_residual_of_closed_form(self, rng):
        cfg = SpinConfig(N=3, n=2, statistics=BOSON)
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        mode = n_body_bound_states(cfg, h)[0]
        for pair in [(1, 2), (2, 3), (1, 3)]:
            samples = hyperplane_samples(3, pair, 20, rng.random)
            rep = bound_state_boundary_residual(cfg, h, mode, pair, samples)
            assert rep.max < 1e-10, pair

    def test_nonunit_scalars_break_the_jump(self, rng):
        # with a != 1 the declared decay no longer matches the coupling jump
        cfg = SpinConfig(N=2, n=2, statistics=BOSON)
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        mode = n_body_bound_states(cfg, h, a=2.0, c=0.0)[0]
        samples = hyperplane_samples(2, (1, 2), 5, rng.random)
        rep = bound_state_boundary_residual(cfg, h, mode, (1, 2), samples)
        assert rep.jump_max > 1e-2

    def test_energy_crosscheck_all_sizes(self, rng):
        for N in (2, 3, 4):
            cfg = SpinConfig(N=N, n=2, statistics=BOSON)
            h = consistent_coupling(2, BOSON, float(rng.uniform(-3, -0.5)),
                                    np.eye(4))
            for mode in n_body_bound_states(cfg, h):
                assert abs(sum(k * k for k in mode.momenta.k) - mode.energy) < 1e-12
                closed = -((mode.kappa * 2) ** 2) * N * (N**2 - 1) / 12
                assert mode.energy == pytest.approx(closed)


class TestSeparatedBoundStates:
    def test_spinless_pair_has_two_sign_states(self):
        cfg = SpinConfig(N=2, n=1, statistics=BOSON)
        states = separated_bound_states(cfg, [[-1.0]])
        assert len(states) == 2
        eps = sorted(st.epsilon[(2, 1)] for st in states)
        assert eps == [-1, 1]
        for st in states:
            assert st.energy == pytest.approx(-2.0)
            assert st.momenta.k == (-1j, 1j)
            assert sum(k * k for k in st.momenta.k) == pytest.approx(-2.0)
        compat = {st.epsilon[(2, 1)]: st.statistics_compatible for st in states}
        assert compat[1] is True and compat[-1] is False

    def test_positive_semidefinite_has_none(self):
        cfg = SpinConfig(N=2, n=1)
        assert separated_bound_states(cfg, [[0.5]]) == []
        cfg2 = SpinConfig(N=2, n=2)
        assert separated_bound_states(cfg2, np.eye(4) * 0.3) == []

    def test_full_negative_pair_space(self):
        cfg = SpinConfig(N=2, n=2, statistics=BOSON)
        states = separated_bound_states(cfg, -np.eye(4))
        # eps = +1 hosts the symmetric 3-dim block, eps = -1 the antisymmetric
        plus = [st for st in states if st.epsilon[(2, 1)] == 1]
        minus = [st for st in states if st.epsilon[(2, 1)] == -1]
        assert len(plus) == 3 and len(minus) == 1
        assert all(st.statistics_compatible for st in states)
        p = swap_matrix(2)
        for st in states:
            want = st.epsilon[(2, 1)]
            assert np.max(np.abs(p @ st.spin_vector - want * st.spin_vector)) < 1e-10

    def test_three_body_sign_degeneracy(self):
        cfg = SpinConfig(N=3, n=1, statistics=BOSON)
        states = separated_bound_states(cfg, [[-1.0]])
        assert len(states) == 2 ** (3 * 2 // 2)  # one per sign table
        assert all(st.energy == pytest.approx(-8.0) for st in states)
        compatible = [st for st in states if st.statistics_compatible]
        assert len(compatible) == 1  # only the all-plus table
        assert all(v == 1 for v in compatible[0].epsilon.values())

    def test_boundary_conditions_hold_for_every_sign_table(self, rng):
        cfg = SpinConfig(N=3, n=1, statistics=BOSON)
        G = [[-1.0]]
        for st in separated_bound_states(cfg, G):
            for pair in [(1, 2), (2, 3), (1, 3)]:
                samples = hyperplane_samples(3, pair, 10, rng.random)
                rep = separated_boundary_residual(cfg, G, st, pair, samples)
                assert rep.max < 1e-10, (st.epsilon, pair)

    def test_pair_boundary_conditions_spin_half(self, rng):
        cfg = SpinConfig(N=2, n=2, statistics=BOSON)
        G = -np.eye(4)
        for st in separated_bound_states(cfg, G):
            samples = hyperplane_samples(2, (1, 2), 10, rng.random)
            rep = separated_boundary_residual(cfg, G, st, (1, 2), samples)
            assert rep.max < 1e-10


def transfer_route_smatrix(cfg, h, ks):
    """Independent route: S = T^{-1} Pi_rev from coefficient propagation.

    T carries the seed coefficient vector to the reversed ordering along
    adjacent exchanges; the incoming amplitude is the statistics reversal of
    the reversed-ordering coefficient, so S must equal T^{-1} times the
    signed reversal operator.
    """
    dim = cfg.dim
    T = np.eye(dim, dtype=complex)
    perm = list(range(1, cfg.N + 1))
    target = list(range(cfg.N, 0, -1))
    while perm != target:
        for slot in range(1, cfg.N):
            a, b = perm[slot - 1], perm[slot]
            if a < b:
                k = (ks[a - 1] - ks[b - 1]) / 2
                pair = pair_exchange_matrix(h, k, cfg.statistics)
                T = embed_two_site(cfg, pair, slot, slot + 1) @ T
                perm[slot - 1], perm[slot] = b, a
                break
    rev = tuple(range(cfg.N, 0, -1))
    sign = cfg.statistics.sign ** permutation_parity(rev)
    return np.linalg.solve(T, sign * site_permutation_operator(cfg, rev))


class TestScatteringMatrix:
    def test_free_particles_do_nothing(self):
        for stat in (BOSON, FERMION):
            cfg = SpinConfig(N=2, n=2, statistics=stat)
            h = CouplingMatrix(n=2, entries=np.zeros((4, 4)))
            S = scattering_matrix(cfg, h, MomentumSet([0.2, 1.3]))
            assert np.max(np.abs(S.matrix - np.eye(4))) < 1e-14
            assert unitarity_residual(S) < 1e-14

    def test_spinless_pair_closed_form(self):
        # independent oracle: the delta-gas transmission phase
        c = 0.7
        cfg = SpinConfig(N=2, n=1, statistics=BOSON)
        h = CouplingMatrix(n=1, entries=[[2 * c]])
        k1, k2 = 0.2, 1.3
        S = scattering_matrix(cfg, h, MomentumSet([k1, k2]))
        delta = k2 - k1
        expected = (delta - 2j * c) / (delta + 2j * c)
        assert S.matrix[0, 0] == pytest.approx(expected)
        assert abs(abs(S.matrix[0, 0]) - 1) < 1e-14

    @pytest.mark.parametrize("N", [2, 3])
    def test_unitary_for_commutant_coupling(self, N, rng):
        cfg = SpinConfig(N=N, n=2, statistics=FERMION)
        h = random_commutant(2, rng)
        ks = MomentumSet(np.sort(rng.uniform(-2, 2, N)))
        S = scattering_matrix(cfg, h, ks)
        assert unitarity_residual(S) < 1e-12

    def test_symmetric_for_real_symmetric_consistent_coupling(self, rng):
        for stat in (BOSON, FERMION):
            cfg = SpinConfig(N=3, n=2, statistics=stat)
            blk = rng.standard_normal((4, 4))
            h = consistent_coupling(2, stat, 0.8, (blk + blk.T) / 2)
            ks = MomentumSet(np.sort(rng.uniform(-2, 2, 3)))
            S = scattering_matrix(cfg, h, ks)
            assert symmetry_residual(S) < 1e-12

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_matches_transfer_route(self, stat, rng):
        from spincontact import random_consistent_coupling

        cfg = SpinConfig(N=3, n=2, statistics=stat)
        h = random_consistent_coupling(2, stat, rng)
        ks = MomentumSet(np.sort(rng.uniform(-2, 2, 3)))
        S = scattering_matrix(cfg, h, ks)
        expected = transfer_route_smatrix(cfg, h, ks)
        assert np.max(np.abs(S.matrix - expected)) < 1e-11

    def test_momenta_must_increase(self):
        cfg = SpinConfig(N=2, n=2)
        h = CouplingMatrix(n=2, entries=np.zeros((4, 4)))
        with pytest.raises(ValidationError):
            scattering_matrix(cfg, h, MomentumSet([1.3, 0.2]))
        with pytest.raises(ValidationError):
            scattering_matrix(cfg, h, MomentumSet([0.2, 0.2 + 1j]))


class TestSElement:
    def test_free_elements(self):
        cfg = SpinConfig(N=2, n=2, statistics=BOSON)
        h = CouplingMatrix(n=2, entries=np.zeros((4, 4)))
        S = scattering_matrix(cfg, h, MomentumSet([0.2, 1.3]))
        # no interaction: spins ride along with their momenta
        assert s_element(S, (2, 1), (1, 2)) == pytest.approx(0.0)
        assert s_element(S, (1, 2), (1, 2)) == pytest.approx(1.0)

    def test_free_fermion_diagonal(self):
        cfg = SpinConfig(N=2, n=2, statistics=FERMION)
        h = CouplingMatrix(n=2, entries=np.zeros((4, 4)))
        S = scattering_matrix(cfg, h, MomentumSet([0.2, 1.3]))
        assert s_element(S, (1, 1), (1, 1)) == pytest.approx(1.0)

    def test_unitarity_column_norms(self, rng):
        cfg = SpinConfig(N=2, n=2, statistics=FERMION)
        h = random_commutant(2, rng)
        S = scattering_matrix(cfg, h, MomentumSet([0.2, 1.3]))
        for in_spins in itertools.product((1, 2), repeat=2):
            total = sum(
                abs(s_element(S, out, in_spins)) ** 2
                for out in itertools.product((1, 2), repeat=2)
            )
            assert total == pytest.approx(1.0)


class TestClusterScattering:
    def test_reproduces_bracket_order(self, rng):
        cfg = SpinConfig(N=5, n=2, statistics=FERMION, dim_cap=4096)
        h = random_commutant(2, rng)
        ks = MomentumSet([0.1 + 0.5j, 0.1 - 0.5j, 1.0 + 1j, 1.0, 1.0 - 1j])
        S = cluster_scattering_matrix(cfg, h, (1, 2), (3, 4, 5), ks)
        sign = cfg.statistics.sign
        p = swap_matrix(2)

        def X(j, i):
            k = (ks[j - 1] - ks[i - 1]) / 2
            pair = pair_exchange_matrix(h, k, cfg.statistics) @ (sign * p)
            return embed_two_site(cfg, pair, min(i, j), max(i, j))

        expected = X(3, 2) @ X(4, 2) @ X(5, 2) @ X(3, 1) @ X(4, 1) @ X(5, 1)
        assert np.max(np.abs(S.matrix - expected)) < 1e-12

    def test_empty_cluster_gives_identity(self, rng):
        cfg = SpinConfig(N=3, n=2)
        h = random_commutant(2, rng)
        ks = MomentumSet([0.1, 0.6, 1.2])
        S = cluster_scattering_matrix(cfg, h, (), (1, 2, 3), ks)
        assert np.array_equal(S.matrix, np.eye(8))

    def test_free_coupling_unitary(self):
        cfg = SpinConfig(N=4, n=2)
        h = CouplingMatrix(n=2, entries=np.zeros((4, 4)))
        ks = MomentumSet([0.1, 0.6, 1.2, 1.9])
        S = cluster_scattering_matrix(cfg, h, (1, 2), (3, 4), ks)
        assert unitarity_residual(S) < 1e-14

    def test_invalid_partition_rejected(self, rng):
        cfg = SpinConfig(N=3, n=2)
        h = random_commutant(2, rng)
        ks = MomentumSet([0.1, 0.6, 1.2])
        with pytest.raises(ValidationError):
            cluster_scattering_matrix(cfg, h, (1, 2), (2, 3), ks)
        with pytest.raises(ValidationError):
            cluster_scattering_matrix(cfg, h, (1,), (3,), ks)


class TestBoundStateModeInvariants:
    def test_simultaneous_eigenvector_relations(self, rng):
        cfg = SpinConfig(N=3, n=2, statistics=BOSON)
        h = CouplingMatrix(n=2, entries=-2.0 * np.eye(4))
        from spincontact import statistics_permutation

        for mode in n_body_bound_states(cfg, h):
            v = mode.spin_vector
            for (i, j) in [(1, 2), (2, 3), (1, 3)]:
                hv = embed_two_site(cfg, h.entries, i, j) @ v
                assert np.max(np.abs(hv - mode.lambda_val * v)) < 1e-10
                pv = statistics_permutation(cfg, i, j) @ v
                assert np.max(np.abs(pv - v)) < 1e-10

    def test_scattering_matrix_consistency_with_propagation(self, rng):
        # the factorized matrix maps incoming to outgoing amplitudes of an
        # actual propagated coefficient table
        cfg = SpinConfig(N=3, n=2, statistics=FERMION)
        h = random_commutant(2, rng)
        ks = MomentumSet(np.sort(rng.uniform(-2, 2, 3)))
        u0 = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        coeffs = propagate_coefficients(cfg, h, ks, u0)
        rev = (3, 2, 1)
        sign = cfg.statistics.sign ** permutation_parity(rev)
        incoming = sign * site_permutation_operator(cfg, rev) @ coeffs.table[rev]
        S = scattering_matrix(cfg, h, ks)
        assert np.max(np.abs(S.matrix @ incoming - coeffs.table[(1, 2, 3)])) < 1e-11
