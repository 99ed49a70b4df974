import numpy as np
import pytest

from gfcluster.errors import ConfigInvalid, TooManySuperpixels
from gfcluster.hsi import make_cube
from gfcluster.slic import identity_segmentation, slic_segment


def is_four_connected(assignment, label):
    coords = np.argwhere(assignment == label)
    if coords.shape[0] == 0:
        return False
    seen = {tuple(coords[0])}
    stack = [tuple(coords[0])]
    members = {tuple(c) for c in coords}
    while stack:
        y, x = stack.pop()
        for ny, nx in ((y + 1, x), (y - 1, x), (y, x + 1), (y, x - 1)):
            if (ny, nx) in members and (ny, nx) not in seen:
                seen.add((ny, nx))
                stack.append((ny, nx))
    return len(seen) == coords.shape[0]


class TestSlic:
    def test_constant_image_grid_voronoi(self):
        # on a constant image the color term vanishes, so the result must be
        # the nearest-seed Voronoi of the 2x2 seed grid: four quadrants.
        # brute-force oracle: assign each pixel to its nearest seed center.
        cube = make_cube(np.ones((4, 4, 2)))
        seg = slic_segment(cube, 4, compactness=1.0, iters=3, seed=0)
        seeds = [(0.5, 0.5), (0.5, 2.5), (2.5, 0.5), (2.5, 2.5)]
        oracle = np.zeros((4, 4), dtype=int)
        for y in range(4):
            for x in range(4):
                d = [(y - sy) ** 2 + (x - sx) ** 2 for sy, sx in seeds]
                oracle[y, x] = int(np.argmin(d))
        assert seg.n_superpixels == 4
        assert np.array_equal(seg.assignment, oracle)
        assert np.all(seg.sizes == 4)

    def test_two_vertical_halves(self):
        # homogeneous halves with a strong color split: the 2-center solution
        # is the halves themselves. verify both the recovery and that it is a
        # Lloyd fixed point in (color, scaled spatial) feature space.
        data = np.zeros((8, 8, 1))
        data[:, 4:, 0] = 10.0
        cube = make_cube(data)
        seg = slic_segment(cube, 2, compactness=1.0, iters=10, seed=0)
        expected = (np.arange(8)[None, :] >= 4).astype(int)
        expected = np.broadcast_to(expected, (8, 8))
        assert seg.n_superpixels == 2
        assert np.array_equal(seg.assignment, expected)
        # fixed-point check: each pixel nearer to its own segment mean
        interval = np.sqrt(64 / 2)
        scale = 1.0 / interval  # compactness 1
        feats = np.concatenate(
            [
                data.reshape(-1, 1),
                np.indices((8, 8)).reshape(2, -1).T * scale,
            ],
            axis=1,
        )
        for lab in (0, 1):
            own = feats[seg.assignment.ravel() == lab].mean(axis=0)
            other = feats[seg.assignment.ravel() != lab].mean(axis=0)
            mine = feats[seg.assignment.ravel() == lab]
            d_own = np.sum((mine - own) ** 2, axis=1)
            d_other = np.sum((mine - other) ** 2, axis=1)
            assert np.all(d_own <= d_other)

    def test_saturation_every_pixel(self):
        cube = make_cube(np.random.default_rng(0).standard_normal((3, 5, 2)))
        seg = slic_segment(cube, 15, compactness=1.0, iters=2, seed=0)
        assert seg.n_superpixels == 15
        assert np.all(seg.sizes == 1)

    def test_partition_property(self):
        rng = np.random.default_rng(1)
        cube = make_cube(rng.standard_normal((12, 9, 3)))
        seg = slic_segment(cube, 6, compactness=0.5, iters=5, seed=0)
        assert int(seg.sizes.sum()) == 12 * 9
        assert np.array_equal(
            np.unique(seg.assignment), np.arange(seg.n_superpixels)
        )

    def test_connectivity_enforced(self):
        rng = np.random.default_rng(2)
        for trial in range(5):
            cube = make_cube(rng.standard_normal((16, 16, 3)) * 3.0)
            seg = slic_segment(cube, 9, compactness=0.2, iters=4, seed=0)
            for label in range(seg.n_superpixels):
                assert is_four_connected(seg.assignment, label)

    def test_determinism(self):
        rng = np.random.default_rng(3)
        cube = make_cube(rng.standard_normal((10, 10, 2)))
        a = slic_segment(cube, 8, compactness=1.0, iters=6, seed=5)
        b = slic_segment(cube, 8, compactness=1.0, iters=6, seed=5)
        assert np.array_equal(a.assignment, b.assignment)

    def test_single_superpixel(self):
        cube = make_cube(np.random.default_rng(4).standard_normal((6, 7, 2)))
        seg = slic_segment(cube, 1, compactness=1.0, iters=2, seed=0)
        assert seg.n_superpixels == 1
        assert seg.sizes[0] == 42

    def test_too_many(self):
        cube = make_cube(np.zeros((2, 2, 1)))
        with pytest.raises(TooManySuperpixels):
            slic_segment(cube, 5)


class TestIdentitySegmentation:
    def test_every_pixel_own_node(self):
        seg = identity_segmentation(3, 4)
        assert seg.n_superpixels == 12
        assert np.array_equal(seg.assignment.ravel(), np.arange(12))

    def test_ceiling(self):
        with pytest.raises(ConfigInvalid):
            identity_segmentation(100, 100, max_nodes=50)
