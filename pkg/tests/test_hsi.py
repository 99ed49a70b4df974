import json

import numpy as np
import pytest

from gfcluster.errors import MalformedSidecar, SizeMismatch, UnsupportedDtype
from gfcluster.graph_core import symmetric_eigendecompose
from gfcluster.hsi import load_cube, load_gt, make_cube, pca_reduce, save_cube, save_gt


def write_cube_files(tmp_path, data):
    cube = make_cube(np.asarray(data, dtype="<f4").astype(float))
    save_cube(cube, tmp_path / "cube.f32", tmp_path / "cube.json")
    return cube


class TestCubeIO:
    def test_roundtrip_identity(self, tmp_path):
        rng = np.random.default_rng(0)
        cube = write_cube_files(tmp_path, rng.standard_normal((2, 2, 3)))
        back = load_cube(tmp_path / "cube.f32", tmp_path / "cube.json")
        assert np.array_equal(back.data, cube.data)

    def test_size_mismatch(self, tmp_path):
        meta = {"height": 10, "width": 10, "bands": 5, "dtype": "float32", "interleave": "bsq"}
        (tmp_path / "cube.json").write_text(json.dumps(meta))
        (tmp_path / "cube.f32").write_bytes(b"\x00" * 400)
        with pytest.raises(SizeMismatch):
            load_cube(tmp_path / "cube.f32", tmp_path / "cube.json")

    def test_unsupported_dtype(self, tmp_path):
        meta = {"height": 1, "width": 1, "bands": 1, "dtype": "float64", "interleave": "bsq"}
        (tmp_path / "cube.json").write_text(json.dumps(meta))
        (tmp_path / "cube.f32").write_bytes(b"\x00" * 8)
        with pytest.raises(UnsupportedDtype):
            load_cube(tmp_path / "cube.f32", tmp_path / "cube.json")

    def test_malformed_sidecar(self, tmp_path):
        (tmp_path / "cube.json").write_text('{"height": 2}')
        (tmp_path / "cube.f32").write_bytes(b"")
        with pytest.raises(MalformedSidecar):
            load_cube(tmp_path / "cube.f32", tmp_path / "cube.json")

    def test_gt_roundtrip_and_mismatch(self, tmp_path):
        gt = np.array([[0, 1], [2, 3]], dtype=np.int64)
        save_gt(gt, tmp_path / "gt.u16")
        assert np.array_equal(load_gt(tmp_path / "gt.u16", 2, 2), gt)
        with pytest.raises(SizeMismatch):
            load_gt(tmp_path / "gt.u16", 3, 3)


class TestPca:
    def test_rank_one_captures_everything(self):
        t = np.linspace(-1.0, 1.0, 16).reshape(4, 4)
        data = np.zeros((4, 4, 3))
        data[:, :, 0] = t  # variance along a single coordinate
        reduced, info = pca_reduce(make_cube(data), 1)
        assert abs(info.explained_ratio - 1.0) < 1e-12
        assert not info.degenerate

    def test_full_basis_reconstructs(self):
        rng = np.random.default_rng(1)
        data = rng.standard_normal((5, 4, 3))
        cube = make_cube(data)
        reduced, info = pca_reduce(cube, 3)
        centered = cube.flatten_pixels() - cube.flatten_pixels().mean(axis=0)
        recon = reduced.flatten_pixels() @ info.axes.T
        assert np.max(np.abs(recon - centered)) < 1e-6

    def test_projection_variance_matches_eigenvalues(self):
        rng = np.random.default_rng(2)
        cube = make_cube(rng.standard_normal((8, 8, 4)))
        reduced, info = pca_reduce(cube, 2)
        pixels = cube.flatten_pixels()
        centered = pixels - pixels.mean(axis=0)
        cov = centered.T @ centered / (pixels.shape[0] - 1)
        vals, _ = symmetric_eigendecompose(cov)
        top2 = np.sort(vals)[::-1][:2]
        proj = reduced.flatten_pixels()
        var = proj.var(axis=0, ddof=1).sum()
        assert abs(var - top2.sum()) < 1e-6
        assert np.allclose(np.sort(info.explained_variance)[::-1], top2, atol=1e-9)

    def test_degenerate_cube(self):
        cube = make_cube(np.full((3, 3, 2), 7.0))
        reduced, info = pca_reduce(cube, 1)
        assert info.degenerate
        assert np.all(reduced.data == 0.0)

    def test_invalid_component_count(self):
        cube = make_cube(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            pca_reduce(cube, 3)
