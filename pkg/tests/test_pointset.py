import os

import numpy as np
import pytest

import diffcomb as dc
from diffcomb import AveragingRegion, Lattice, WeightedPointSet
from diffcomb.pointset import GoldenAlgebra, LatticeAlgebra, same_algebra


def _z_comb(n=16):
    L = Lattice(np.array([[1.0]]))
    return dc.lattice_comb(L, AveragingRegion.interval(0.0, float(n)))


def test_basic_properties():
    S = _z_comb(16)
    assert len(S) == 16
    assert S.dim == 1
    assert S.total_weight() == 16.0 + 0j
    assert S.density() == pytest.approx(1.0)
    assert S.positions.shape == (16, 1)


def test_arrays_are_frozen():
    S = _z_comb(8)
    with pytest.raises(ValueError):
        S.coords[0, 0] = 99
    with pytest.raises(ValueError):
        S.weights[0] = 0.0


def test_duplicate_points_rejected():
    L = Lattice(np.array([[1.0]]))
    alg = LatticeAlgebra(L)
    coords = np.array([[1], [1]], dtype=np.int64)
    w = np.ones(2, dtype=np.complex128)
    with pytest.raises(ValueError, match="duplicate"):
        WeightedPointSet(alg, coords, w, AveragingRegion.interval(0.0, 4.0))


def test_points_outside_region_rejected():
    L = Lattice(np.array([[1.0]]))
    alg = LatticeAlgebra(L)
    coords = np.array([[7]], dtype=np.int64)
    w = np.ones(1, dtype=np.complex128)
    with pytest.raises(ValueError, match="outside"):
        WeightedPointSet(alg, coords, w, AveragingRegion.interval(0.0, 4.0))


def test_save_load_round_trip_lattice(tmp_path):
    S = _z_comb(32)
    path = str(tmp_path / "points.csv")
    dc.save_pointset(S, path)
    assert os.path.exists(path)
    assert os.path.exists(str(tmp_path / "points.json"))
    T = dc.load_pointset(path)
    assert same_algebra(S.algebra, T.algebra)
    assert np.array_equal(S.coords, T.coords)
    assert np.array_equal(S.weights, T.weights)
    assert T.region.volume() == pytest.approx(S.region.volume())
    assert T.provenance == S.provenance


def test_save_load_round_trip_golden(tmp_path):
    S = dc.fibonacci_model_set(200.0)
    assert isinstance(S.algebra, GoldenAlgebra)
    path = str(tmp_path / "fib.csv")
    dc.save_pointset(S, path)
    T = dc.load_pointset(path)
    assert isinstance(T.algebra, GoldenAlgebra)
    assert np.array_equal(S.coords, T.coords)
    assert np.array_equal(S.weights, T.weights)
    # exact integer coordinates survive, not just float positions
    assert T.coords.dtype == S.coords.dtype


def test_save_load_complex_weights(tmp_path):
    L = Lattice(np.array([[1.0]]))
    alg = LatticeAlgebra(L)
    coords = np.arange(6, dtype=np.int64)[:, None]
    w = np.array([1, -1, 1j, -1j, 0.5 + 0.25j, 2], dtype=np.complex128)
    S = WeightedPointSet(alg, coords, w, AveragingRegion.interval(0.0, 6.0))
    path = str(tmp_path / "cw.csv")
    dc.save_pointset(S, path)
    T = dc.load_pointset(path)
    assert np.array_equal(S.weights, T.weights)


def test_load_missing_sidecar(tmp_path):
    S = _z_comb(4)
    path = str(tmp_path / "points.csv")
    dc.save_pointset(S, path)
    os.remove(str(tmp_path / "points.json"))
    with pytest.raises(FileNotFoundError):
        dc.load_pointset(path)


def test_load_detects_tampered_csv(tmp_path):
    S = _z_comb(4)
    path = str(tmp_path / "points.csv")
    dc.save_pointset(S, path)
    with open(path) as fh:
        lines = fh.readlines()
    del lines[-1]
    with open(path, "w") as fh:
        fh.writelines(lines)
    with pytest.raises(ValueError):
        dc.load_pointset(path)


def test_mismatched_weights_length():
    L = Lattice(np.array([[1.0]]))
    alg = LatticeAlgebra(L)
    coords = np.array([[0], [1]], dtype=np.int64)
    with pytest.raises(ValueError):
        WeightedPointSet(alg, coords, np.ones(3, dtype=np.complex128),
                         AveragingRegion.interval(0.0, 4.0))


def test_nonfinite_weights_rejected():
    L = Lattice(np.array([[1.0]]))
    alg = LatticeAlgebra(L)
    coords = np.array([[0]], dtype=np.int64)
    with pytest.raises(ValueError):
        WeightedPointSet(alg, coords, np.array([np.nan + 0j]),
                         AveragingRegion.interval(0.0, 4.0))
