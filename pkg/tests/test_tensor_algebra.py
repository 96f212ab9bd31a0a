import itertools

import numpy as np
import pytest

from spincontact import (
    SpinConfig,
    Statistics,
    ValidationError,
    apply_site_permutation,
    decode,
    embed_two_site,
    encode,
    permutation_operator,
    permutation_parity,
    site_permutation_operator,
    statistics_permutation,
)


def lexicographic_index(idx, n, N):
    # independent oracle: position in the enumeration (1,..,1), (1,..,2), ...
    return list(itertools.product(range(1, n + 1), repeat=N)).index(tuple(idx))


class TestSpinConfig:
    def test_rejects_bad_counts(self):
        with pytest.raises(ValidationError):
            SpinConfig(N=0, n=2)
        with pytest.raises(ValidationError):
            SpinConfig(N=2, n=0)

    def test_dimension_cap(self):
        with pytest.raises(ValidationError):
            SpinConfig(N=13, n=2)  # 8192 > 4096
        cfg = SpinConfig(N=13, n=2, dim_cap=10000)
        assert cfg.dim == 8192

    def test_statistics_sign(self):
        assert Statistics.BOSON.sign == 1
        assert Statistics.FERMION.sign == -1
        assert Statistics.from_string("Fermion") is Statistics.FERMION
        with pytest.raises(ValidationError):
            Statistics.from_string("anyon")


class TestEncodeDecode:
    def test_first_basis_element(self):
        cfg = SpinConfig(N=2, n=2)
        assert encode((1, 1), cfg) == 0

    def test_second_component_is_fast_index(self):
        cfg = SpinConfig(N=2, n=2)
        assert encode((1, 2), cfg) == 1

    def test_against_lexicographic_enumeration(self):
        cfg = SpinConfig(N=3, n=2)
        assert encode((2, 1, 2), cfg) == lexicographic_index((2, 1, 2), 2, 3) == 5
        for idx in itertools.product((1, 2), repeat=3):
            assert encode(idx, cfg) == lexicographic_index(idx, 2, 3)

    @pytest.mark.parametrize("N,n", [(2, 2), (3, 2), (2, 3), (4, 2), (6, 4)])
    def test_round_trip(self, N, n):
        cfg = SpinConfig(N=N, n=n)
        for flat in range(cfg.dim):
            assert encode(decode(flat, cfg), cfg) == flat

    def test_out_of_range_names_position(self):
        cfg = SpinConfig(N=3, n=2)
        with pytest.raises(ValidationError, match="position 2"):
            encode((1, 3, 1), cfg)
        with pytest.raises(ValidationError):
            encode((1, 2), cfg)
        with pytest.raises(ValidationError):
            decode(8, cfg)


class TestPermutationOperator:
    def test_two_site_swap_matrix(self):
        cfg = SpinConfig(N=2, n=2)
        p = permutation_operator(cfg, 1, 2)
        expected = np.zeros((4, 4))
        for a, b in itertools.product((1, 2), repeat=2):
            expected[encode((b, a), cfg), encode((a, b), cfg)] = 1
        assert np.array_equal(p, expected)

    def test_involution_all_pairs(self):
        cfg = SpinConfig(N=3, n=3)
        eye = np.eye(27)
        for i, j in itertools.combinations(range(1, 4), 2):
            p = permutation_operator(cfg, i, j)
            assert np.array_equal(p @ p, eye)
            assert np.array_equal(p, p.T)
            assert np.array_equal(p.conj().T @ p, eye)

    def test_braid_identity_against_basis_action(self):
        cfg = SpinConfig(N=3, n=2)
        p12 = permutation_operator(cfg, 1, 2)
        p23 = permutation_operator(cfg, 2, 3)
        # oracle: p13 from its action on every basis multi-index
        p13 = np.zeros((8, 8), dtype=complex)
        for idx in itertools.product((1, 2), repeat=3):
            swapped = (idx[2], idx[1], idx[0])
            p13[encode(swapped, cfg), encode(idx, cfg)] = 1
        assert np.max(np.abs(p12 @ p23 @ p12 - p13)) == 0
        assert np.max(np.abs(p13 - permutation_operator(cfg, 1, 3))) == 0

    def test_pair_normalization_and_errors(self):
        cfg = SpinConfig(N=3, n=2)
        assert np.array_equal(
            permutation_operator(cfg, 2, 1), permutation_operator(cfg, 1, 2)
        )
        with pytest.raises(ValidationError):
            permutation_operator(cfg, 2, 2)
        with pytest.raises(ValidationError):
            permutation_operator(cfg, 1, 4)


class TestStatisticsPermutation:
    def test_boson_equals_plain_swap(self):
        cfg = SpinConfig(N=2, n=2, statistics=Statistics.BOSON)
        assert np.array_equal(
            statistics_permutation(cfg, 1, 2), permutation_operator(cfg, 1, 2)
        )

    def test_fermion_negates(self):
        cfg = SpinConfig(N=2, n=2, statistics=Statistics.FERMION)
        assert np.array_equal(
            statistics_permutation(cfg, 1, 2), -permutation_operator(cfg, 1, 2)
        )

    @pytest.mark.parametrize("stat", [Statistics.BOSON, Statistics.FERMION])
    def test_squares_to_identity(self, stat):
        cfg = SpinConfig(N=3, n=2, statistics=stat)
        P = statistics_permutation(cfg, 1, 3)
        assert np.array_equal(P @ P, np.eye(8))


class TestSitePermutation:
    def test_matches_adjacent_swap(self):
        cfg = SpinConfig(N=3, n=2)
        assert np.array_equal(
            site_permutation_operator(cfg, (2, 1, 3)), permutation_operator(cfg, 1, 2)
        )

    def test_composition(self, rng):
        cfg = SpinConfig(N=4, n=2)
        perms = list(itertools.permutations(range(1, 5)))
        for _ in range(10):
            a = perms[rng.integers(len(perms))]
            b = perms[rng.integers(len(perms))]
            comp = tuple(a[x - 1] for x in b)
            lhs = site_permutation_operator(cfg, a) @ site_permutation_operator(cfg, b)
            assert np.array_equal(lhs, site_permutation_operator(cfg, comp))

    def test_vector_action_matches_matrix(self, rng):
        cfg = SpinConfig(N=4, n=3, dim_cap=4096)
        sigma = (3, 1, 4, 2)
        v = rng.standard_normal(cfg.dim) + 1j * rng.standard_normal(cfg.dim)
        direct = site_permutation_operator(cfg, sigma) @ v
        assert np.max(np.abs(apply_site_permutation(cfg, sigma, v) - direct)) == 0

    def test_parity(self):
        assert permutation_parity((1, 2, 3)) == 0
        assert permutation_parity((2, 1, 3)) == 1
        assert permutation_parity((3, 1, 2)) == 0
        assert permutation_parity((3, 2, 1)) == 1
        assert permutation_parity((2, 1, 4, 3)) == 0


class TestEmbedTwoSite:
    def test_identity_embedding_for_two_sites(self, rng):
        cfg = SpinConfig(N=2, n=2)
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.array_equal(embed_two_site(cfg, h, 1, 2), h)

    def test_identity_operator_stays_identity(self):
        cfg = SpinConfig(N=4, n=2)
        assert np.array_equal(embed_two_site(cfg, np.eye(4), 2, 4), np.eye(16))

    def test_swap_embedding_equals_permutation(self):
        cfg = SpinConfig(N=3, n=2)
        swap = permutation_operator(SpinConfig(N=2, n=2), 1, 2)
        assert np.max(np.abs(
            embed_two_site(cfg, swap, 1, 3) - permutation_operator(cfg, 1, 3)
        )) == 0

    def test_disjoint_sites_commute(self, rng):
        cfg = SpinConfig(N=4, n=2)
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h12 = embed_two_site(cfg, h, 1, 2)
        p34 = permutation_operator(cfg, 3, 4)
        assert np.max(np.abs(h12 @ p34 - p34 @ h12)) == 0

    def test_conjugation_moves_site(self, rng):
        cfg = SpinConfig(N=3, n=2)
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        p23 = permutation_operator(cfg, 2, 3)
        lhs = p23 @ embed_two_site(cfg, h, 1, 2) @ p23
        assert np.max(np.abs(lhs - embed_two_site(cfg, h, 1, 3))) < 1e-15

    def test_dimension_mismatch(self):
        cfg = SpinConfig(N=3, n=2)
        with pytest.raises(ValidationError):
            embed_two_site(cfg, np.eye(3), 1, 2)
