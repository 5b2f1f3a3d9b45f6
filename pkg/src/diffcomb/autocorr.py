"""Finite-volume autocorrelation of weighted point sets.

The estimator averages w(x) * conj(w(y)) over all point pairs with a fixed
displacement x - y = z inside the averaging region, normalized either by the
full region volume ("literal") or by the volume of the region's overlap with
its translate ("boundary_corrected").  Displacements are tracked as exact
integer coordinate differences, so equal displacements always land in the
same bin.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from ._config import get_threads
from .generators import build_pointset
from .golden import TAU
from .lattice import AveragingRegion, LatticeError
from .pointset import AlgebraError, Algebra, GoldenAlgebra, LatticeAlgebra, WeightedPointSet, same_algebra

NORMALIZATIONS = ("literal", "boundary_corrected")


@dataclass(frozen=True)
class AutocorrelationEstimate:
    """Autocorrelation coefficients on the exact displacement set.

    `coefficients` maps integer coordinate displacements (tuples) to the
    normalized complex coefficient; `counts` holds the raw pair counts.
    """

    algebra: Algebra
    region: AveragingRegion
    z_max: float
    normalization: str
    n_points: int
    coefficients: dict[tuple, complex]
    counts: dict[tuple, int] = field(repr=False)

    def displacement_phys(self, key: tuple) -> np.ndarray:
        g = np.asarray(key, dtype=np.float64)
        return self.algebra.embedding @ g

    def eta(self, key: tuple) -> complex:
        return self.coefficients.get(tuple(int(v) for v in key), 0.0 + 0.0j)

    def keys(self) -> list[tuple]:
        return list(self.coefficients.keys())

    def hermitian_defect(self) -> float:
        """max |eta(z) - conj(eta(-z))|; zero for any autocorrelation."""
        worst = 0.0
        for k, v in self.coefficients.items():
            neg = tuple(-c for c in k)
            worst = max(worst, abs(v - np.conj(self.coefficients.get(neg, 0.0 + 0.0j))))
        return worst


def _linearize(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Map integer coordinate rows to unique scalar keys via mixed-radix packing.

    Returns (keys, strides, ranges).  Differences of two in-range rows have
    digits in [-span, span] per axis, so the radix must be the balanced
    2*span + 1 (not span + 1) for key differences to identify coordinate
    differences uniquely.
    """
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    ranges = (2 * (hi - lo) + 1).astype(np.int64)
    total_bits = float(np.sum(np.log2(ranges.astype(np.float64))))
    if total_bits >= 62.0:
        raise LatticeError("coordinate ranges too large to linearize into 64-bit keys")
    strides = np.ones_like(ranges)
    for d in range(len(ranges) - 2, -1, -1):
        strides[d] = strides[d + 1] * ranges[d + 1]
    keys = (coords - lo) @ strides
    return keys, strides, ranges


def _candidate_displacements(
    algebra: Algebra, coords: np.ndarray, z_max: float
) -> np.ndarray:
    """All integer coordinate displacements that could connect two points at
    physical distance <= z_max.  Superset is fine; empty bins are dropped."""
    if isinstance(algebra, LatticeAlgebra):
        L = algebra.lattice
        row_norms = np.linalg.norm(L._inv, axis=1)
        span = coords.max(axis=0) - coords.min(axis=0)
        lim = np.minimum(np.floor(z_max * row_norms + 1e-9).astype(np.int64), span)
        axes = [np.arange(-l, l + 1, dtype=np.int64) for l in lim]
        grids = np.meshgrid(*axes, indexing="ij")
        cand = np.stack([g.ravel() for g in grids], axis=1)
        phys = cand.astype(np.float64) @ L.basis.T
        keep = np.einsum("ij,ij->i", phys, phys) <= (z_max * (1.0 + 1e-12)) ** 2
        cand = cand[keep]
    else:  # golden ring
        star = coords[:, 0].astype(np.float64) + (1.0 - TAU) * coords[:, 1]
        w = float(star.max() - star.min()) + 1e-9 if star.size else 0.0
        sqrt5 = 2.0 * TAU - 1.0
        dn_max = int(math.floor((z_max + w) / sqrt5)) + 1
        rows = []
        for dn in range(-dn_max, dn_max + 1):
            lo = max(-z_max - dn * TAU, -w - dn * (1.0 - TAU))
            hi = min(z_max - dn * TAU, w - dn * (1.0 - TAU))
            if hi < lo - 1e-9:
                continue
            dm = np.arange(int(math.floor(lo - 1e-9)), int(math.ceil(hi + 1e-9)) + 1, dtype=np.int64)
            phys = dm + TAU * dn
            starv = dm + (1.0 - TAU) * dn
            keep = (np.abs(phys) <= z_max * (1.0 + 1e-12)) & (np.abs(starv) <= w + 1e-9)
            dm = dm[keep]
            if dm.size:
                rows.append(np.stack([dm, np.full(dm.shape, dn, dtype=np.int64)], axis=1))
        cand = np.concatenate(rows, axis=0) if rows else np.zeros((0, 2), dtype=np.int64)
        span = coords.max(axis=0) - coords.min(axis=0) if coords.size else np.zeros(2, dtype=np.int64)
        cand = cand[np.all(np.abs(cand) <= span, axis=1)]
    order = np.lexsort(cand.T[::-1])
    return cand[order]


def _chunked_pair_sums(keys, weights, deltas, threads):
    if threads <= 1 or deltas.shape[0] < 2 * threads:
        return _kernels.pair_sums(keys, weights, deltas)
    chunks = np.array_split(deltas, threads)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(lambda ch: _kernels.pair_sums(keys, weights, ch), chunks))
    sums = np.concatenate([p[0] for p in parts])
    counts = np.concatenate([p[1] for p in parts])
    return sums, counts


def autocorrelation(
    S: WeightedPointSet,
    region: AveragingRegion | None = None,
    z_max: float = 64.0,
    normalization: str = "boundary_corrected",
    threads: int | None = None,
) -> AutocorrelationEstimate:
    """Estimate the autocorrelation of S over an averaging region.

    Points of S outside the region are ignored.  Needs an exact coordinate
    algebra; float positions cannot be binned by displacement reliably and
    are rejected.
    """
    if not S.algebra.is_exact:
        raise AlgebraError("autocorrelation needs exact coordinates; float positions cannot be binned")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    region = region or S.region
    if region.dim != S.dim:
        raise LatticeError(f"region dimension {region.dim} does not match point dimension {S.dim}")
    if not (0.0 < z_max <= region.diameter() * (1.0 + 1e-12)):
        raise ValueError(
            f"z_max must lie in (0, {region.diameter():.6g}] for this region, got {z_max}"
        )
    threads = threads if threads is not None else get_threads()

    inside = region.contains(S.positions)
    coords = np.ascontiguousarray(S.coords[inside])
    weights = np.ascontiguousarray(S.weights[inside])
    n_points = coords.shape[0]
    if n_points == 0:
        return AutocorrelationEstimate(
            S.algebra, region, float(z_max), normalization, 0, {}, {}
        )

    cand = _candidate_displacements(S.algebra, coords, z_max)
    keys, strides, _ = _linearize(coords)
    order = np.argsort(keys, kind="stable")
    keys_s = keys[order]
    w_s = weights[order]
    deltas = cand @ strides
    sums, counts = _chunked_pair_sums(keys_s, w_s, deltas, threads)

    vol = region.volume()
    coefficients: dict[tuple, complex] = {}
    count_map: dict[tuple, int] = {}
    E = S.algebra.embedding
    for g, s, c in zip(cand, sums, counts):
        if c == 0:
            continue
        key = tuple(int(v) for v in g)
        if normalization == "literal":
            denom = vol
        else:
            denom = region.overlap_volume(E @ g.astype(np.float64))
        coefficients[key] = complex(s / denom)
        count_map[key] = int(c)
    return AutocorrelationEstimate(
        S.algebra, region, float(z_max), normalization, n_points, coefficients, count_map
    )


def compare_autocorrelations(a: AutocorrelationEstimate, b: AutocorrelationEstimate) -> float:
    """Largest coefficient difference over the union of displacement sets.

    Displacements present in one estimate only are compared against zero.
    The estimates must share algebra, z_max, and normalization.
    """
    if not same_algebra(a.algebra, b.algebra):
        raise AlgebraError("cannot compare autocorrelations on different coordinate algebras")
    if a.z_max != b.z_max:
        raise ValueError(f"z_max mismatch: {a.z_max} vs {b.z_max}")
    if a.normalization != b.normalization:
        raise ValueError(f"normalization mismatch: {a.normalization} vs {b.normalization}")
    worst = 0.0
    for k in set(a.coefficients) | set(b.coefficients):
        worst = max(worst, abs(a.eta(k) - b.eta(k)))
    return worst


def convergence_table(
    builder: "str | Callable[[float], WeightedPointSet]",
    sizes: Sequence[float],
    z: tuple,
    normalization: str = "boundary_corrected",
    params: dict | None = None,
) -> list[tuple[float, int, complex]]:
    """Autocorrelation coefficient at a fixed exact displacement for a family
    of growing sets.

    `builder` is a registered generator name (sized via its natural size
    parameter) or a callable mapping size -> point set.  `z` is the integer
    coordinate displacement to track.  Returns rows (size, n_points, eta).
    For self-similar deterministic sets the successive differences shrink as
    the size grows.
    """
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if isinstance(builder, str):
        name = builder

        def build(sz: float) -> WeightedPointSet:
            return build_pointset(name, params, size=sz)

    else:
        build = builder

    rows: list[tuple[float, int, complex]] = []
    z = tuple(int(v) for v in z)
    for sz in sizes:
        S = build(sz)
        zphys = float(np.linalg.norm(S.algebra.embedding @ np.asarray(z, dtype=np.float64)))
        est = autocorrelation(S, z_max=zphys + 1e-9, normalization=normalization)
        rows.append((float(sz), est.n_points, est.eta(z)))
    return rows


def almost_period_scan(
    est: AutocorrelationEstimate,
    epsilon: float,
    t_candidates: Iterable[tuple],
) -> list[tuple[tuple, float]]:
    """Scan candidate displacements t for epsilon-almost periods of the
    autocorrelation: max |eta(z + t) - eta(z)| <= epsilon.

    The maximum runs over stored displacements z with |z| <= z_max / 2 such
    that z + t is also stored, so the comparison never mixes estimated values
    with structural zeros.  A candidate with no comparable displacement at
    all is an error; candidates reaching beyond z_max / 2 are rejected.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    accepted: list[tuple[tuple, float]] = []
    half = est.z_max / 2.0
    for t in t_candidates:
        t = tuple(int(v) for v in t)
        tphys = float(np.linalg.norm(est.displacement_phys(t)))
        if tphys > half * (1.0 + 1e-12):
            raise ValueError(f"candidate {t} has length {tphys:.6g} > z_max/2 = {half:.6g}")
        devs = []
        for z, val in est.coefficients.items():
            if float(np.linalg.norm(est.displacement_phys(z))) > half * (1.0 + 1e-12):
                continue
            shifted = tuple(zi + ti for zi, ti in zip(z, t))
            if shifted in est.coefficients:
                devs.append(abs(est.coefficients[shifted] - val))
        if not devs:
            raise ValueError(f"candidate {t} has no comparable displacements within z_max/2")
        dev = max(devs)
        if dev <= epsilon:
            accepted.append((t, dev))
    return accepted


def save_autocorrelation(est: AutocorrelationEstimate, csv_path: str) -> None:
    """Write displacement coordinates and coefficients as CSV.

    A JSON sidecar (same path plus ``.json``) records the averaging region,
    z_max, and normalization so the estimate parameters travel with the data.
    """
    names = est.algebra.coord_names() if est.algebra.is_exact else []
    header = ",".join(names + ["re", "im"])
    keys = sorted(est.coefficients.keys())
    with open(csv_path, "w") as fh:
        fh.write(header + "\n")
        for k in keys:
            v = est.coefficients[k]
            cells = [str(int(c)) for c in k] + [f"{v.real:.15g}", f"{v.imag:.15g}"]
            fh.write(",".join(cells) + "\n")
    sidecar = {
        "format": "diffcomb-autocorr-v1",
        "region": est.region.as_dict(),
        "z_max": est.z_max,
        "normalization": est.normalization,
        "n_points": est.n_points,
        "algebra": est.algebra.as_dict(),
    }
    with open(csv_path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
