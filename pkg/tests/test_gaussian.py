import numpy as np
import pytest

from cvcorr import gaussian as g
from cvcorr import linalg
from cvcorr.errors import (
    EmptySelection,
    InvalidFactor,
    InvalidGrouping,
    InvalidPartition,
    InvalidPermutation,
    NotPositiveDefinite,
)

from oracles import elimination_det


def random_state(seed, sizes):
    return g.make_random_physical(sum(sizes), sizes, seed=seed)


def local_symplectic(rng, state):
    blocks = [g.random_symplectic(len(p), rng, 0.4) for p in state.partition]
    s = np.zeros_like(state.cm)
    for party, blk in zip(range(state.n_parties), blocks):
        idx = state.party_indices(party)
        s[np.ix_(idx, idx)] = blk
    return state.with_cm(s @ state.cm @ s.T)


class TestPartitionedCovariance:
    def test_default_partition_is_one_mode_per_party(self):
        s = g.vacuum(3)
        assert s.partition == ((0,), (1,), (2,))
        assert s.total_modes == 3 and s.n_parties == 3

    def test_symmetrized_and_frozen(self):
        cm = np.eye(2)
        cm[0, 1] = 0.2
        s = g.PartitionedCovariance(cm)
        assert s.cm[0, 1] == s.cm[1, 0] == 0.1
        with pytest.raises(ValueError):
            s.cm[0, 0] = 5.0

    @pytest.mark.parametrize("partition", [[[0], [0]], [[0]], [[0, 1], []], [[0], [2]]])
    def test_bad_partitions(self, partition):
        with pytest.raises(InvalidPartition):
            g.PartitionedCovariance(np.eye(4), partition)

    def test_noncontiguous_party_blocks(self):
        s = random_state(0, [1, 1, 1])
        t = g.PartitionedCovariance(s.cm, [[0, 2], [1]])
        np.testing.assert_array_equal(t.block(0, 0), s.cm[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])])


class TestPhysicality:
    def test_vacuum(self):
        rep = g.is_physical(g.vacuum(2))
        assert rep.physical
        assert rep.min_eigenvalue == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(rep.symplectic_eigenvalues, [1, 1], atol=1e-12)

    def test_below_vacuum(self):
        rep = g.is_physical(g.PartitionedCovariance(0.5 * np.eye(4)))
        assert not rep.physical
        assert rep.min_eigenvalue == pytest.approx(-0.5)

    def test_example_is_physical(self, example_state):
        rep = g.is_physical(example_state)
        assert rep.physical
        assert np.all(rep.symplectic_eigenvalues >= 1 - 1e-9)

    def test_non_pd_reports_no_spectrum(self):
        rep = g.is_physical(g.PartitionedCovariance(np.zeros((2, 2))))
        assert not rep.physical and rep.symplectic_eigenvalues is None


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        np.testing.assert_allclose(g.symplectic_eigenvalues(g.vacuum(4)), np.ones(4), atol=1e-12)

    def test_thermal_single_mode(self):
        np.testing.assert_allclose(g.symplectic_eigenvalues(np.diag([3.0, 3.0])), [3.0])

    def test_two_mode_squeezed(self):
        s = g.make_pure(g.PureFactors([2.0]))
        np.testing.assert_allclose(g.symplectic_eigenvalues(s), [1, 1], atol=1e-12)

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefinite):
            g.symplectic_eigenvalues(np.zeros((2, 2)))

    @pytest.mark.parametrize("seed", range(20))
    def test_recovers_williamson_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        nus = np.sort(1 + np.abs(rng.standard_normal(n)))
        s = g.random_symplectic(n, rng, 0.4)
        cm = s @ np.diag(np.repeat(nus, 2)) @ s.T
        np.testing.assert_allclose(g.symplectic_eigenvalues(cm), nus, rtol=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_physical_iff_spectrum_at_least_one(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        nus = rng.uniform(0.6, 2.0, n)
        s = g.random_symplectic(n, rng)
        state = g.PartitionedCovariance(s @ np.diag(np.repeat(nus, 2)) @ s.T)
        rep = g.is_physical(state)
        assert rep.physical == bool(np.all(rep.symplectic_eigenvalues >= 1 - 1e-9))


class TestReduce:
    def test_all_parties_identity(self):
        s = random_state(1, [1, 2, 1])
        r = g.reduce(s, [0, 1, 2])
        np.testing.assert_array_equal(r.cm, s.cm)
        assert r.partition == s.partition

    def test_example_ac(self, example_state):
        t = 1 / 3
        expected = [[2, 0, t, 0], [0, 2, 0, t], [t, 0, 2, 0], [0, t, 0, 2]]
        r = g.reduce(example_state, {0, 2})
        np.testing.assert_allclose(r.cm, expected, atol=0)
        assert r.partition == ((0,), (1,))

    def test_composition(self):
        s = random_state(2, [2, 1, 2])
        once = g.reduce(s, [0])
        twice = g.reduce(g.reduce(s, [0, 1]), [0])
        np.testing.assert_array_equal(once.cm, twice.cm)

    def test_empty(self):
        with pytest.raises(EmptySelection):
            g.reduce(g.vacuum(2), [])

    def test_noncontiguous_renumbering(self):
        s = g.PartitionedCovariance(random_state(3, [1, 1, 1]).cm, [[2], [0, 1]])
        r = g.reduce(s, [0])
        assert r.partition == ((0,),)
        np.testing.assert_array_equal(r.cm, s.cm[4:, 4:])

    def test_displacement_follows(self):
        s = g.PartitionedCovariance(np.eye(4), None, [1, 2, 3, 4])
        np.testing.assert_array_equal(g.reduce(s, [1]).displacement, [3, 4])

    def test_reduced_physical_states_stay_physical(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            s = g.make_random_physical(n, rng=rng)
            keep = [int(p) for p in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)]
            assert g.is_physical(g.reduce(s, keep)).physical


class TestMerge:
    def test_singletons_unchanged(self):
        s = random_state(5, [1, 1, 1])
        m = g.merge_parties(s, [[0], [1], [2]])
        assert m.partition == s.partition
        np.testing.assert_array_equal(m.cm, s.cm)

    def test_group_bc(self):
        s = random_state(6, [1, 1, 1])
        m = g.merge_parties(s, [[0], [1, 2]])
        assert m.partition == ((0,), (1, 2))
        np.testing.assert_array_equal(m.cm, s.cm)

    @pytest.mark.parametrize("grouping", [[[0], [1]], [[0, 1], [1, 2]], [[0, 1, 2], []], [[0], [1], [3]]])
    def test_invalid(self, grouping):
        with pytest.raises(InvalidGrouping):
            g.merge_parties(random_state(7, [1, 1, 1]), grouping)

    def test_commutes_with_reduce(self):
        s = random_state(8, [1, 2, 1, 1])
        # merge {1,2} then reduce to the merged party and party 3
        a = g.reduce(g.merge_parties(s, [[0], [1, 2], [3]]), [1, 2])
        b = g.merge_parties(g.reduce(s, [1, 2, 3]), [[0, 1], [2]])
        np.testing.assert_array_equal(a.cm, b.cm)
        assert a.partition == b.partition


class TestPermute:
    def test_identity(self):
        s = random_state(9, [2, 1, 1])
        p = g.permute_parties(s, [0, 1, 2])
        np.testing.assert_array_equal(p.cm, s.cm)
        assert p.partition == s.partition

    def test_swap_twice(self):
        s = random_state(10, [2, 1])
        back = g.permute_parties(g.permute_parties(s, [1, 0]), [1, 0])
        np.testing.assert_array_equal(back.cm, s.cm)
        assert back.partition == s.partition

    def test_perm_then_inverse(self):
        s = random_state(11, [1, 2, 1, 2])
        perm = [2, 0, 3, 1]
        inv = list(np.argsort(perm))
        back = g.permute_parties(g.permute_parties(s, perm), inv)
        np.testing.assert_array_equal(back.cm, s.cm)

    def test_blocks_move(self):
        s = random_state(12, [1, 2, 1])
        p = g.permute_parties(s, [2, 0, 1])
        for new, old in enumerate([2, 0, 1]):
            np.testing.assert_array_equal(p.block(new, new), s.block(old, old))
        np.testing.assert_array_equal(p.block(0, 2), s.block(2, 1))

    @pytest.mark.parametrize("seed", range(10))
    def test_symplectic_spectrum_preserved(self, seed):
        s = random_state(seed, [1, 2, 1])
        perm = list(np.random.default_rng(seed).permutation(3))
        np.testing.assert_allclose(
            g.symplectic_eigenvalues(g.permute_parties(s, perm)),
            g.symplectic_eigenvalues(s),
            rtol=1e-9,
        )

    @pytest.mark.parametrize("perm", [[0, 0, 1], [0, 1], [1, 2, 3]])
    def test_invalid(self, perm):
        with pytest.raises(InvalidPermutation):
            g.permute_parties(random_state(0, [1, 1, 1]), perm)


class TestTensor:
    def test_vacua(self):
        t = g.tensor(g.vacuum(1), g.vacuum(1))
        np.testing.assert_array_equal(t.cm, np.eye(4))
        assert t.partition == ((0,), (1,))

    def test_physical_and_determinant(self):
        a, b = random_state(13, [1, 2]), random_state(14, [1])
        t = g.tensor(a, b)
        assert g.is_physical(t).physical
        assert t.partition == ((0,), (1, 2), (3,))
        assert elimination_det(t.cm) == pytest.approx(
            elimination_det(a.cm) * elimination_det(b.cm), rel=1e-12
        )

    def test_displacements_concatenate(self):
        a = g.PartitionedCovariance(np.eye(2), None, [1.0, 2.0])
        t = g.tensor(a, g.vacuum(1))
        np.testing.assert_array_equal(t.displacement, [1, 2, 0, 0])


class TestStandardForm:
    def test_fixed_point(self):
        p = g.StandardFormParams(2.0, 3.0, 1.0, -1.0)
        q = g.standard_form(g.standard_form_state(p))
        assert (q.a, q.b, q.c, q.d) == pytest.approx((2, 3, 1, -1), abs=1e-12)

    def test_ssts(self):
        q = g.standard_form(g.make_ssts(g.SstsParams(1.0, 1.0)))
        r8 = 2 * np.sqrt(2)
        assert (q.a, q.b, q.c, q.d) == pytest.approx((3, 3, r8, -r8), abs=1e-7)

    @pytest.mark.parametrize("seed", range(25))
    def test_recovered_after_local_symplectics(self, seed):
        rng = np.random.default_rng(seed)
        base = g.standard_form(g.make_random_physical(2, seed=seed))
        state = local_symplectic(rng, g.standard_form_state(base))
        q = g.standard_form(state)
        assert (q.a, q.b, q.c, q.d) == pytest.approx((base.a, base.b, base.c, base.d), abs=1e-8)

    @pytest.mark.parametrize("seed", range(25))
    def test_invariants_round_trip(self, seed):
        s = g.make_random_physical(2, seed=100 + seed)
        p = g.standard_form(s)
        assert p.c >= abs(p.d) - 1e-12 and p.c >= 0
        r = g.standard_form_state(p)
        for blk in [(0, 0), (1, 1), (0, 1)]:
            assert np.linalg.det(r.block(*blk)) == pytest.approx(np.linalg.det(s.block(*blk)), rel=1e-9, abs=1e-9)
        assert np.linalg.det(r.cm) == pytest.approx(np.linalg.det(s.cm), rel=1e-9)
        q = g.standard_form(r)
        assert (q.a, q.b, q.c, q.d) == pytest.approx((p.a, p.b, p.c, p.d), abs=1e-9)

    def test_requires_two_single_modes(self):
        with pytest.raises(Exception):
            g.standard_form(random_state(0, [1, 2]))


class TestBuilders:
    def test_ssts_product_when_unmixed(self):
        s = g.make_ssts(g.SstsParams(2.0, 0.0))
        np.testing.assert_array_equal(s.block(0, 1), np.zeros((2, 2)))

    def test_ssts_vacuum_at_zero_photons(self):
        np.testing.assert_array_equal(g.make_ssts(g.SstsParams(0.0, 0.7)).cm, np.eye(4))

    def test_ssts_pure_at_full_mixing(self):
        s = g.make_ssts(g.SstsParams(1.0, 1.0))
        assert g.is_physical(s).physical
        np.testing.assert_allclose(g.symplectic_eigenvalues(s), [1, 1], atol=1e-9)

    @pytest.mark.parametrize("nbar,mu", [(0.1, 0.3), (5.0, 0.99), (50.0, 1.0), (3.0, 0.0)])
    def test_ssts_physical(self, nbar, mu):
        assert g.is_physical(g.make_ssts(g.SstsParams(nbar, mu))).physical

    @pytest.mark.parametrize("nbar,mu", [(-1.0, 0.5), (1.0, 1.5), (1.0, -0.1)])
    def test_ssts_param_ranges(self, nbar, mu):
        with pytest.raises(ValueError):
            g.SstsParams(nbar, mu)

    def test_pure_all_ones_is_vacuum(self):
        s = g.make_pure(g.PureFactors([1.0, 1.0], 1))
        np.testing.assert_array_equal(s.cm, np.eye(10))
        assert s.partition == ((0, 1), (2, 3, 4))

    def test_pure_schmidt_form(self):
        gam = 1.7
        s = g.make_pure(g.PureFactors([gam], 2))
        r = np.sqrt(gam**2 - 1)
        head = np.array([[gam, 0, r, 0], [0, gam, 0, -r], [r, 0, gam, 0], [0, -r, 0, gam]])
        np.testing.assert_allclose(s.cm[:4, :4], head)
        np.testing.assert_array_equal(s.cm[4:, 4:], np.eye(4))
        np.testing.assert_array_equal(s.cm[:4, 4:], 0)

    @pytest.mark.parametrize("seed", range(20))
    def test_pure_is_pure(self, seed):
        rng = np.random.default_rng(seed)
        f = g.PureFactors(tuple(1 + rng.exponential(1.0, int(rng.integers(1, 5)))), int(rng.integers(0, 3)))
        s = g.make_pure(f)
        assert linalg.cholesky_logdet(s.cm) == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(g.symplectic_eigenvalues(s), 1.0, atol=1e-9)

    @pytest.mark.parametrize("gammas", [[0.5], [], [1.0, 0.99]])
    def test_pure_invalid(self, gammas):
        with pytest.raises(InvalidFactor):
            g.PureFactors(gammas)

    def test_random_deterministic(self):
        a = g.make_random_physical(3, [1, 1, 1], seed=7)
        b = g.make_random_physical(3, [1, 1, 1], seed=7)
        assert a.cm.tobytes() == b.cm.tobytes()
        assert not np.array_equal(a.cm, g.make_random_physical(3, seed=8).cm)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_physical_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        nus = np.sort(1 + np.abs(rng.standard_normal(4)))
        s = g.make_random_physical(4, [2, 2], seed=seed)
        assert g.is_physical(s).physical
        np.testing.assert_allclose(g.symplectic_eigenvalues(s), nus, rtol=1e-8)

    def test_random_symplectic_is_symplectic(self):
        rng = np.random.default_rng(0)
        for n in range(1, 9):
            s = g.random_symplectic(n, rng)
            assert g.symplectic_violation(s) <= 1e-9
