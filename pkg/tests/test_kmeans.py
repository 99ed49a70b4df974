import numpy as np
import pytest

from gfcluster.errors import TooFewDistinctPoints
from gfcluster.kmeans import kmeans, kmeanspp_init, lloyd


class TestKmeansppInit:
    def test_exhaustion_permutes_points(self):
        points = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0], [5.0, 5.0]])
        centers = kmeanspp_init(points, 4, seed=0)
        got = {tuple(c) for c in centers}
        want = {tuple(p) for p in points}
        assert got == want

    def test_two_blobs_split(self):
        # two tight, far-apart blobs: D^2 seeding lands one seed in each
        rng = np.random.default_rng(1)
        blob_a = rng.normal(0.0, 0.05, size=(20, 2))
        blob_b = rng.normal(0.0, 0.05, size=(20, 2)) + 100.0
        points = np.vstack([blob_a, blob_b])
        hits = 0
        for seed in range(100):
            centers = kmeanspp_init(points, 2, seed=seed)
            sides = centers[:, 0] > 50.0
            if sides[0] != sides[1]:
                hits += 1
        assert hits >= 99

    def test_determinism(self):
        rng = np.random.default_rng(2)
        points = rng.standard_normal((30, 3))
        a = kmeanspp_init(points, 4, seed=7)
        b = kmeanspp_init(points, 4, seed=7)
        assert np.array_equal(a, b)

    def test_too_few_distinct(self):
        points = np.zeros((5, 2))
        with pytest.raises(TooFewDistinctPoints):
            kmeanspp_init(points, 2, seed=0)


class TestLloyd:
    def test_two_points_exact_fit(self):
        points = np.array([[0.0, 0.0], [3.0, 4.0]])
        res = lloyd(points, points.copy())
        assert res.inertia == 0.0
        assert {tuple(c) for c in res.centers} == {(0.0, 0.0), (3.0, 4.0)}

    def test_converged_input_single_iteration(self):
        points = np.array([[0.0], [1.0], [10.0], [11.0]])
        centers = np.array([[0.5], [10.5]])
        res = lloyd(points, centers)
        assert res.iterations == 1
        assert np.allclose(res.centers, centers)

    def test_two_cluster_line(self):
        # exhaustive 2-partition optimum for {0,1,2,10,11,12} is {1, 11}
        points = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        res = lloyd(points, np.array([[0.0], [12.0]]))
        assert np.allclose(np.sort(res.centers.ravel()), [1.0, 11.0])

    def test_inertia_monotone(self):
        rng = np.random.default_rng(3)
        for trial in range(10):
            points = rng.standard_normal((50, 2))
            init = points[rng.choice(50, size=4, replace=False)]
            res = lloyd(points, init)
            hist = np.asarray(res.inertia_history)
            assert np.all(np.diff(hist) <= 1e-9)

    def test_labels_are_nearest(self):
        rng = np.random.default_rng(4)
        points = rng.standard_normal((40, 3))
        res = kmeans(points, 5, seed=0)
        d2 = (
            np.sum(points**2, axis=1)[:, None]
            + np.sum(res.centers**2, axis=1)[None, :]
            - 2.0 * points @ res.centers.T
        )
        own = d2[np.arange(40), res.labels]
        assert np.all(own <= d2.min(axis=1) + 1e-9)

    def test_empty_cluster_repair(self):
        # third center starts absurdly far away; repair must give it a point
        points = np.vstack(
            [np.zeros((5, 2)), np.ones((5, 2)), np.array([[10.0, 10.0]])]
        )
        centers = np.array([[0.0, 0.0], [1.0, 1.0], [1000.0, 1000.0]])
        res = lloyd(points, centers)
        assert np.unique(res.labels).size == 3

    def test_permutation_equivalence(self):
        rng = np.random.default_rng(5)
        points = rng.standard_normal((30, 2))
        init = points[:3].copy()
        res_a = lloyd(points, init)
        perm = np.array([2, 0, 1])
        res_b = lloyd(points, init[perm])
        # labels must agree up to the same permutation of cluster ids
        assert np.array_equal(perm[res_b.labels], res_a.labels)
        assert np.allclose(res_b.centers[np.argsort(perm)], res_a.centers)
