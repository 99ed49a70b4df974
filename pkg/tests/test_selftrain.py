import numpy as np

from gfcluster.selftrain import (
    hard_labels,
    kl_loss,
    soft_assign,
    target_distribution,
)


def random_q(rng, n, k):
    raw = rng.random((n, k)) + 1e-3
    return raw / raw.sum(axis=1, keepdims=True)


class TestSoftAssign:
    def test_equidistant_is_uniform(self):
        z = np.zeros((1, 2))
        centers = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        q = soft_assign(z, centers)
        assert np.allclose(q, 1.0 / 3.0)

    def test_hand_two_center_case(self):
        # z sits on center 0; center 1 is at distance 1:
        # kernels (1, 1/2) -> q = (2/3, 1/3)
        z = np.array([[0.0, 0.0]])
        centers = np.array([[0.0, 0.0], [1.0, 0.0]])
        q = soft_assign(z, centers)
        assert np.allclose(q, [[2.0 / 3.0, 1.0 / 3.0]], atol=1e-12)

    def test_row_sums(self):
        rng = np.random.default_rng(0)
        z = rng.standard_normal((40, 3))
        centers = rng.standard_normal((5, 3))
        q = soft_assign(z, centers)
        assert np.allclose(q.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(q > 0.0)
        assert np.all(q < 1.0)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(1)
        z = rng.standard_normal((10, 3))
        centers = rng.standard_normal((4, 3))
        rot, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        shift = rng.standard_normal(3)
        q1 = soft_assign(z, centers)
        q2 = soft_assign(z @ rot + shift, centers @ rot + shift)
        assert np.max(np.abs(q1 - q2)) < 1e-10


class TestTargetDistribution:
    def test_single_node_identity(self):
        q = np.array([[0.3, 0.7]])
        assert np.allclose(target_distribution(q), q, atol=1e-15)

    def test_hand_case(self):
        q = np.array([[0.9, 0.1], [0.5, 0.5]])
        p = target_distribution(q)
        # f = (1.4, 0.6); row 1 = (0.81/1.4, 0.01/0.6) normalized
        assert np.allclose(p[0], [0.9720, 0.0280], atol=5e-5)

    def test_uniform_fixed_point(self):
        q = np.full((6, 3), 1.0 / 3.0)
        assert np.allclose(target_distribution(q), q, atol=1e-12)

    def test_sharpens_under_equal_mass(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            block = random_q(rng, 5, 3)
            # stack all cyclic column shifts so every cluster carries the
            # same total mass; sharpening then holds row by row
            q = np.vstack([block, block[:, [1, 2, 0]], block[:, [2, 0, 1]]])
            masses = q.sum(axis=0)
            assert np.allclose(masses, masses[0])
            p = target_distribution(q)
            assert np.all(p.max(axis=1) >= q.max(axis=1) - 1e-12)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        p = target_distribution(random_q(rng, 30, 4))
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)


class TestKlLoss:
    def test_identity_zero(self):
        rng = np.random.default_rng(4)
        q = random_q(rng, 10, 3)
        assert abs(kl_loss(q, q)) < 1e-12

    def test_hand_value(self):
        p = np.array([[1.0, 0.0]])
        q = np.array([[0.5, 0.5]])
        assert abs(kl_loss(p, q) - np.log(2.0)) < 1e-12

    def test_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = random_q(rng, 8, 4)
            q = random_q(rng, 8, 4)
            assert kl_loss(p, q) >= -1e-12

    def test_zero_iff_equal(self):
        rng = np.random.default_rng(6)
        p = random_q(rng, 6, 3)
        q = p.copy()
        q[0, 0] += 0.05
        q[0, 1] -= 0.05
        assert kl_loss(p, q) > 1e-6


class TestHardLabels:
    def test_strict_max(self):
        assert hard_labels(np.array([[0.2, 0.5, 0.3]]))[0] == 1

    def test_tie_goes_low(self):
        assert hard_labels(np.array([[0.5, 0.5]]))[0] == 0

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(7)
        q = random_q(rng, 12, 4)
        perm = np.array([2, 3, 1, 0])
        base = hard_labels(q)
        permuted = hard_labels(q[:, perm])
        # column j of the permuted matrix is column perm[j] of the original
        assert np.array_equal(perm[permuted], base)
