"""Lattices, dual lattices, averaging regions, and fundamental-domain folding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class LatticeError(ValueError):
    """Raised for degenerate bases, dimension mismatches, or bad regions."""


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice in R^n, generated by the columns of `basis`."""

    basis: np.ndarray
    _inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        B = np.array(self.basis, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise LatticeError(f"basis must be a square matrix, got shape {B.shape}")
        det = np.linalg.det(B)
        if abs(det) <= 1e-12:
            raise LatticeError(f"basis is singular or near-singular (det = {det:.3e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)
        inv = np.linalg.inv(B)
        inv.setflags(write=False)
        object.__setattr__(self, "_inv", inv)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def det(self) -> float:
        return float(np.linalg.det(self.basis))

    def density(self) -> float:
        """Points per unit volume: 1 / |det basis|."""
        return 1.0 / abs(self.det())

    def dual(self) -> "Lattice":
        """Dual lattice, generated by the columns of (basis^T)^{-1}."""
        return Lattice(np.linalg.inv(self.basis.T))

    def point(self, coords: Iterable[int]) -> np.ndarray:
        return self.basis @ np.asarray(coords, dtype=np.float64)

    def to_coords(self, x: Iterable[float]) -> np.ndarray:
        return self._inv @ np.asarray(x, dtype=np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.basis.shape == other.basis.shape and bool(np.array_equal(self.basis, other.basis))

    def __hash__(self) -> int:
        return hash(self.basis.tobytes())


def dual_lattice(L: Lattice) -> Lattice:
    return L.dual()


def density(L: Lattice) -> float:
    return L.density()


def fold_vector(k: Iterable[float], L: Lattice) -> np.ndarray:
    """Fold k into the fundamental domain basis @ [0,1)^n of lattice L.

    The fractional parts are computed coordinate-wise; a fractional part that
    rounds up to exactly 1.0 is mapped back to 0.0 so the result always lies
    in the half-open cell.  Folding is idempotent.
    """
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (L.dim,):
        raise LatticeError(f"vector shape {k.shape} does not match lattice dimension {L.dim}")
    c = L._inv @ k
    f = c - np.floor(c)
    f[f >= 1.0] = 0.0
    return L.basis @ f


_BALL_VOLUME_COEFF = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


@dataclass(frozen=True)
class AveragingRegion:
    """Centered box or ball used as the finite averaging volume.

    Boxes are half-open, [c_d - r, c_d + r) in every axis; balls are open.
    The same region object fixes both the point-set support and the
    normalization volume of autocorrelation estimates.
    """

    kind: str
    radius: float
    dim: int
    center: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in ("box", "ball"):
            raise LatticeError(f"unknown region kind {self.kind!r}")
        if not (self.radius > 0.0):
            raise LatticeError(f"region radius must be positive, got {self.radius}")
        if self.dim < 1:
            raise LatticeError(f"region dimension must be >= 1, got {self.dim}")
        c = tuple(float(v) for v in self.center) if self.center else (0.0,) * self.dim
        if len(c) != self.dim:
            raise LatticeError(f"center has {len(c)} entries for dimension {self.dim}")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "center", c)

    @classmethod
    def box(cls, radius: float, dim: int, center: tuple = ()) -> "AveragingRegion":
        return cls("box", radius, dim, center)

    @classmethod
    def ball(cls, radius: float, dim: int, center: tuple = ()) -> "AveragingRegion":
        return cls("ball", radius, dim, center)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "AveragingRegion":
        """One-dimensional box [lo, hi)."""
        if not (hi > lo):
            raise LatticeError(f"empty interval [{lo}, {hi})")
        return cls("box", (hi - lo) / 2.0, 1, ((lo + hi) / 2.0,))

    def volume(self) -> float:
        if self.kind == "box":
            return (2.0 * self.radius) ** self.dim
        try:
            coeff = _BALL_VOLUME_COEFF[self.dim]
        except KeyError:
            coeff = math.pi ** (self.dim / 2.0) / math.gamma(self.dim / 2.0 + 1.0)
        return coeff * self.radius**self.dim

    def diameter(self) -> float:
        """Largest distance between two points of the region."""
        if self.kind == "box":
            return 2.0 * self.radius * math.sqrt(self.dim)
        return 2.0 * self.radius

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (N, dim) array (or a single point)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.dim:
            raise LatticeError(f"points have dimension {x.shape[1]}, region has {self.dim}")
        d = x - np.asarray(self.center)
        if self.kind == "box":
            return np.all((d >= -self.radius) & (d < self.radius), axis=1)
        return np.einsum("ij,ij->i", d, d) < self.radius**2

    def overlap_volume(self, z: np.ndarray) -> float:
        """Volume of the intersection of the region with its translate by z.

        Used for boundary-corrected autocorrelation normalization.  Closed
        forms exist for boxes in any dimension and balls in dimensions 1 and
        2; higher-dimensional balls are rejected.
        """
        z = np.asarray(z, dtype=np.float64).reshape(-1)
        if z.shape != (self.dim,):
            raise LatticeError(f"translate has shape {z.shape}, region dimension is {self.dim}")
        r = self.radius
        if self.kind == "box":
            edges = 2.0 * r - np.abs(z)
            return float(np.prod(np.maximum(edges, 0.0)))
        d = float(np.linalg.norm(z))
        if d >= 2.0 * r:
            return 0.0
        if self.dim == 1:
            return 2.0 * r - d
        if self.dim == 2:
            # Lens area of two radius-r disks with center distance d.
            return float(2.0 * r * r * math.acos(d / (2.0 * r)) - 0.5 * d * math.sqrt(4.0 * r * r - d * d))
        raise LatticeError("ball overlap volume is only available in dimensions 1 and 2")

    def as_dict(self) -> dict:
        return {"kind": self.kind, "radius": self.radius, "dim": self.dim, "center": list(self.center)}

    @classmethod
    def from_dict(cls, d: dict) -> "AveragingRegion":
        return cls(d["kind"], d["radius"], d["dim"], tuple(d.get("center", ())))


def region_points(L: Lattice, region: AveragingRegion) -> np.ndarray:
    """Integer coordinates of all lattice points inside the region.

    Returns an (M, n) int64 array in lexicographic coordinate order.  The
    candidate box is derived from the operator norm rows of the inverse
    basis, then trimmed by exact region membership.
    """
    if region.dim != L.dim:
        raise LatticeError(f"region dimension {region.dim} does not match lattice dimension {L.dim}")
    c0 = L.to_coords(np.asarray(region.center))
    # Max Euclidean distance from the center to any point of the region.
    reach = region.radius * (math.sqrt(L.dim) if region.kind == "box" else 1.0)
    row_norms = np.linalg.norm(L._inv, axis=1)
    lo = np.floor(c0 - reach * row_norms - 1e-9).astype(np.int64)
    hi = np.ceil(c0 + reach * row_norms + 1e-9).astype(np.int64)
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grids = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([g.ravel() for g in grids], axis=1)
    pos = cand.astype(np.float64) @ L.basis.T
    keep = region.contains(pos)
    pts = cand[keep]
    order = np.lexsort(pts.T[::-1])
    return np.ascontiguousarray(pts[order])
