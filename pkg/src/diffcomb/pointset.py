"""Weighted point sets with exact internal coordinates.

A point set stores integer coordinates in an algebra (an integer lattice or
the golden ring Z[tau]) plus complex weights.  Physical positions are derived
views; all displacement bookkeeping downstream happens on the integer
coordinates, so equal displacements collide exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .golden import TAU
from .lattice import AveragingRegion, Lattice, LatticeError


class AlgebraError(TypeError):
    """Raised when an operation needs exact coordinates and has none."""


@dataclass(frozen=True)
class LatticeAlgebra:
    """Coordinates are integer vectors on a fixed lattice."""

    lattice: Lattice

    @property
    def coord_dim(self) -> int:
        return self.lattice.dim

    @property
    def phys_dim(self) -> int:
        return self.lattice.dim

    @property
    def is_exact(self) -> bool:
        return True

    @property
    def embedding(self) -> np.ndarray:
        """Matrix E with position = E @ coords."""
        return self.lattice.basis

    def positions(self, coords: np.ndarray) -> np.ndarray:
        return coords.astype(np.float64) @ self.lattice.basis.T

    def coord_names(self) -> list[str]:
        return [f"z{i + 1}" for i in range(self.lattice.dim)]

    def as_dict(self) -> dict:
        return {"kind": "lattice", "basis": self.lattice.basis.tolist()}


@dataclass(frozen=True)
class GoldenAlgebra:
    """Coordinates are (m, n) with position m + n*tau on the line."""

    @property
    def coord_dim(self) -> int:
        return 2

    @property
    def phys_dim(self) -> int:
        return 1

    @property
    def is_exact(self) -> bool:
        return True

    @property
    def embedding(self) -> np.ndarray:
        return np.array([[1.0, TAU]])

    def positions(self, coords: np.ndarray) -> np.ndarray:
        return (coords[:, 0] + TAU * coords[:, 1]).astype(np.float64).reshape(-1, 1)

    def coord_names(self) -> list[str]:
        return ["m", "n"]

    def as_dict(self) -> dict:
        return {"kind": "golden"}


@dataclass(frozen=True)
class FloatAlgebra:
    """No exact structure; coordinates are the float positions themselves."""

    dim: int

    @property
    def coord_dim(self) -> int:
        return self.dim

    @property
    def phys_dim(self) -> int:
        return self.dim

    @property
    def is_exact(self) -> bool:
        return False

    @property
    def embedding(self) -> np.ndarray:
        return np.eye(self.dim)

    def positions(self, coords: np.ndarray) -> np.ndarray:
        return coords.astype(np.float64)

    def coord_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.dim)]

    def as_dict(self) -> dict:
        return {"kind": "float", "dim": self.dim}


Algebra = Union[LatticeAlgebra, GoldenAlgebra, FloatAlgebra]


def algebra_from_dict(d: dict) -> Algebra:
    kind = d.get("kind")
    if kind == "lattice":
        return LatticeAlgebra(Lattice(np.array(d["basis"], dtype=np.float64)))
    if kind == "golden":
        return GoldenAlgebra()
    if kind == "float":
        return FloatAlgebra(int(d["dim"]))
    raise AlgebraError(f"unknown algebra kind {kind!r}")


def same_algebra(a: Algebra, b: Algebra) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, LatticeAlgebra):
        return a.lattice == b.lattice
    if isinstance(a, FloatAlgebra):
        return a.dim == b.dim
    return True


@dataclass(frozen=True)
class WeightedPointSet:
    """Finitely many weighted points inside an averaging region."""

    algebra: Algebra
    coords: np.ndarray
    weights: np.ndarray
    region: AveragingRegion
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        dtype = np.int64 if self.algebra.is_exact else np.float64
        coords = np.array(self.coords, dtype=dtype, order="C", copy=True)
        if coords.ndim != 2 or coords.shape[1] != self.algebra.coord_dim:
            raise ValueError(
                f"coords must have shape (N, {self.algebra.coord_dim}), got {coords.shape}"
            )
        weights = np.array(self.weights, dtype=np.complex128, order="C", copy=True)
        if weights.shape != (coords.shape[0],):
            raise ValueError(f"weights shape {weights.shape} does not match {coords.shape[0]} points")
        if weights.size and not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if self.region.dim != self.algebra.phys_dim:
            raise LatticeError(
                f"region dimension {self.region.dim} does not match point dimension {self.algebra.phys_dim}"
            )
        if coords.shape[0]:
            uniq = np.unique(coords, axis=0)
            if uniq.shape[0] != coords.shape[0]:
                raise ValueError("duplicate points are not allowed (merge weights first)")
            pos = self.algebra.positions(coords)
            pad = AveragingRegion(
                self.region.kind, self.region.radius * (1.0 + 1e-9) + 1e-9, self.region.dim, self.region.center
            )
            if not np.all(pad.contains(pos)):
                bad = int(np.flatnonzero(~pad.contains(pos))[0])
                raise ValueError(f"point {pos[bad]} lies outside the averaging region")
        coords.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.algebra.phys_dim

    @property
    def positions(self) -> np.ndarray:
        return self.algebra.positions(self.coords)

    def total_weight(self) -> complex:
        return complex(self.weights.sum())

    def density(self) -> float:
        """Number of points per unit region volume (weights ignored)."""
        return len(self) / self.region.volume()


def _sidecar_path(csv_path: str) -> str:
    base, ext = os.path.splitext(csv_path)
    return base + ".json"


def save_pointset(S: WeightedPointSet, csv_path: str) -> None:
    """Write positions and weights as CSV plus an exact JSON sidecar.

    The CSV holds float positions at 15 significant digits for plotting and
    interchange.  The sidecar keeps the integer coordinates, the algebra, the
    region, and full-precision weights so loading reproduces the set exactly.
    """
    pos = S.positions
    n = S.dim
    header = ",".join([f"x{i + 1}" for i in range(n)] + ["re_w", "im_w"])
    with open(csv_path, "w") as fh:
        fh.write(header + "\n")
        for row, w in zip(pos, S.weights):
            cells = [f"{v:.15g}" for v in row] + [f"{w.real:.15g}", f"{w.imag:.15g}"]
            fh.write(",".join(cells) + "\n")
    sidecar = {
        "schema": "diffcomb-points-v1",
        "algebra": S.algebra.as_dict(),
        "region": S.region.as_dict(),
        "coords": S.coords.tolist(),
        "weights_re": S.weights.real.tolist(),
        "weights_im": S.weights.imag.tolist(),
        "provenance": S.provenance,
    }
    with open(_sidecar_path(csv_path), "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_pointset(csv_path: str) -> WeightedPointSet:
    """Reload a point set written by save_pointset.

    Requires the JSON sidecar next to the CSV; the CSV alone cannot restore
    exact coordinates.  The CSV is cross-checked against the sidecar.
    """
    side = _sidecar_path(csv_path)
    if not os.path.exists(side):
        raise FileNotFoundError(f"sidecar {side} not found; cannot reconstruct exact coordinates")
    with open(side) as fh:
        d = json.load(fh)
    if d.get("schema") != "diffcomb-points-v1":
        raise ValueError(f"unrecognized sidecar schema {d.get('schema')!r}")
    algebra = algebra_from_dict(d["algebra"])
    weights = np.array(d["weights_re"], dtype=np.float64) + 1j * np.array(d["weights_im"], dtype=np.float64)
    coords = np.array(d["coords"], dtype=np.int64 if algebra.is_exact else np.float64)
    if coords.size == 0:
        coords = coords.reshape(0, algebra.coord_dim)
    S = WeightedPointSet(
        algebra=algebra,
        coords=coords,
        weights=weights,
        region=AveragingRegion.from_dict(d["region"]),
        provenance=d.get("provenance", {}),
    )
    if os.path.exists(csv_path):
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[0] != len(S):
            raise ValueError(f"CSV has {data.shape[0]} rows, sidecar has {len(S)} points")
        if len(S) and not np.allclose(data[:, : S.dim], S.positions, atol=1e-9, rtol=0.0):
            raise ValueError("CSV positions disagree with sidecar coordinates")
    return S
