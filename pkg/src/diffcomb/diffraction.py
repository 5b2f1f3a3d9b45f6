"""Diffraction estimators: exponential sums on k grids, crystallographic
peak prediction, peak detection, and folding modulo a reciprocal lattice.

Amplitudes are computed with per-dimension fractional reduction of the dual
coordinates before the phase dot product.  For integer coordinates this is an
exact rewrite, so two k vectors that agree modulo the reciprocal lattice see
identical phases, not merely close ones.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._config import get_threads
from .autocorr import AutocorrelationEstimate
from .lattice import AveragingRegion, Lattice, LatticeError
from .pointset import WeightedPointSet

ESTIMATORS = ("amplitude_squared", "periodogram")


@dataclass(frozen=True)
class DiffractionEstimate:
    """Intensities on a finite k grid."""

    k: np.ndarray
    intensity: np.ndarray
    estimator: str
    region_volume: float
    n_points: int
    grid_shape: tuple | None = None

    def __post_init__(self) -> None:
        k = np.atleast_2d(np.asarray(self.k, dtype=np.float64))
        if k.shape[0] == 1 and k.shape[1] > 1 and np.asarray(self.k).ndim == 1:
            k = k.T  # a flat list of scalars is a 1D grid
        k = np.array(k, copy=True)
        inten = np.array(self.intensity, dtype=np.float64, copy=True).reshape(-1)
        if k.shape[0] != inten.shape[0]:
            raise ValueError(f"{k.shape[0]} k vectors but {inten.shape[0]} intensities")
        k.setflags(write=False)
        inten.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "intensity", inten)

    @property
    def dim(self) -> int:
        return self.k.shape[1]


def uniform_grid(lo: float, hi: float, step: float, dim: int = 1) -> np.ndarray:
    """Half-open uniform grid [lo, hi) with the given step in every axis.

    Grid values are lo + j*step, which keeps dyadic grids exactly
    representable.  Returns (K, dim) rows in lexicographic order.
    """
    if step <= 0 or hi <= lo:
        raise ValueError("need step > 0 and hi > lo")
    n = int(round((hi - lo) / step))
    axis = lo + step * np.arange(n, dtype=np.float64)
    if dim == 1:
        return axis.reshape(-1, 1)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _reduced_dual_coords(S: WeightedPointSet, K: np.ndarray) -> np.ndarray:
    """Rows of K mapped to fractional coordinate space: frac(E^T k)."""
    C = K @ S.algebra.embedding  # (M, coord_dim)
    return C - np.floor(C)


def _amplitudes(S: WeightedPointSet, K: np.ndarray, region: AveragingRegion, threads: int) -> np.ndarray:
    inside = region.contains(S.positions)
    coords = np.ascontiguousarray(S.coords[inside])
    weights = np.ascontiguousarray(S.weights[inside])
    if coords.shape[0] == 0:
        return np.zeros(K.shape[0], dtype=np.complex128)
    if S.algebra.is_exact:
        C = _reduced_dual_coords(S, K)
        fn = lambda rows: _kernels.expsum_int_batch(coords, weights, rows)
    else:
        C = K
        pos = S.algebra.positions(coords)
        fn = lambda rows: _kernels.expsum_float_batch(pos, weights, rows)
    if threads <= 1 or C.shape[0] < 2 * threads:
        return fn(C)
    chunks = np.array_split(C, threads)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(fn, chunks))
    return np.concatenate(parts)


def bragg_amplitude(
    S: WeightedPointSet,
    k: Sequence[float] | float,
    region: AveragingRegion | None = None,
    threads: int | None = None,
) -> complex:
    """Volume-normalized exponential sum at a single k vector."""
    region = region or S.region
    K = np.atleast_1d(np.asarray(k, dtype=np.float64)).reshape(1, -1)
    if K.shape[1] != S.dim:
        raise LatticeError(f"k has dimension {K.shape[1]}, points have {S.dim}")
    threads = threads if threads is not None else get_threads()
    return complex(_amplitudes(S, K, region, threads)[0] / region.volume())


def intensity_scan(
    S: WeightedPointSet,
    k_grid: np.ndarray,
    estimator: str = "amplitude_squared",
    region: AveragingRegion | None = None,
    threads: int | None = None,
    grid_shape: tuple | None = None,
) -> DiffractionEstimate:
    """Scan |amplitude|^2 (or the periodogram) over a grid of k vectors.

    amplitude_squared is |sum w e(-k.x) / vol|^2 and converges to Bragg peak
    intensities; periodogram is |sum w e(-k.x)|^2 / vol and estimates the
    diffraction density away from peaks.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    region = region or S.region
    K = np.atleast_2d(np.asarray(k_grid, dtype=np.float64))
    if K.shape[0] == 1 and K.shape[1] > 1 and np.asarray(k_grid).ndim == 1:
        K = K.T
    if K.shape[1] != S.dim:
        raise LatticeError(f"k grid has dimension {K.shape[1]}, points have {S.dim}")
    threads = threads if threads is not None else get_threads()
    amps = _amplitudes(S, K, region, threads)
    vol = region.volume()
    inside = region.contains(S.positions)
    if estimator == "amplitude_squared":
        inten = np.abs(amps / vol) ** 2
    else:
        inten = np.abs(amps) ** 2 / vol
    return DiffractionEstimate(
        k=K,
        intensity=inten,
        estimator=estimator,
        region_volume=vol,
        n_points=int(inside.sum()),
        grid_shape=tuple(grid_shape) if grid_shape else None,
    )


def wiener_khinchin(
    est: AutocorrelationEstimate,
    k_grid: np.ndarray,
    mode: str = "auto",
    threads: int | None = None,
) -> DiffractionEstimate:
    """Periodogram from autocorrelation coefficients.

    mode="exact" transforms a literal-normalized estimate whose z_max covers
    the full region diameter; the result then equals the direct periodogram
    to rounding.  mode="truncated" applies a Bartlett window 1 - |z|/z_max to
    a truncated displacement set, trading bias for usability at small z_max.
    mode="auto" picks exact whenever the estimate qualifies.
    """
    if mode not in ("auto", "exact", "truncated"):
        raise ValueError(f"mode must be auto, exact, or truncated, got {mode!r}")
    if mode == "auto":
        qualifies = est.normalization == "literal" and est.z_max >= est.region.diameter() * (
            1.0 - 1e-12
        )
        mode = "exact" if qualifies else "truncated"
    if mode == "exact":
        if est.normalization != "literal":
            raise ValueError("exact mode needs literal normalization (coefficients = pair sums / volume)")
        if est.z_max < est.region.diameter() * (1.0 - 1e-12):
            raise ValueError(
                f"exact mode needs z_max >= region diameter {est.region.diameter():.6g}, got {est.z_max}"
            )
    keys = list(est.coefficients.keys())
    K = np.atleast_2d(np.asarray(k_grid, dtype=np.float64))
    if K.shape[0] == 1 and K.shape[1] > 1 and np.asarray(k_grid).ndim == 1:
        K = K.T
    d = est.region.dim
    if K.shape[1] != d:
        raise LatticeError(f"k grid has dimension {K.shape[1]}, estimate has {d}")
    if not keys:
        return DiffractionEstimate(K, np.zeros(K.shape[0]), "periodogram", est.region.volume(), est.n_points)
    Z = np.array([est.displacement_phys(z) for z in keys], dtype=np.float64).reshape(len(keys), d)
    eta = np.array([est.coefficients[z] for z in keys], dtype=np.complex128)
    if mode == "truncated":
        taper = 1.0 - np.linalg.norm(Z, axis=1) / est.z_max
        eta = eta * np.maximum(taper, 0.0)
    threads = threads if threads is not None else get_threads()
    if threads <= 1 or K.shape[0] < 2 * threads:
        vals = _kernels.expsum_float_batch(Z, eta, K)
    else:
        chunks = np.array_split(K, threads)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda rows: _kernels.expsum_float_batch(Z, eta, rows), chunks))
        vals = np.concatenate(parts)
    scale = float(np.max(np.abs(vals))) if vals.size else 1.0
    bad = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if bad > 1e-9 * max(1.0, scale):
        raise ValueError(
            f"transform has imaginary part {bad:.3e}; autocorrelation is not Hermitian enough"
        )
    inten = vals.real
    floor_tol = 1e-9 * max(1.0, scale)
    if np.any(inten < -floor_tol):
        warnings.warn(f"clamping negative intensities down to {float(inten.min()):.3e}")
    inten = np.maximum(inten, 0.0)
    return DiffractionEstimate(K, inten, "periodogram", est.region.volume(), est.n_points)


def crystallographic_prediction(
    L: Lattice,
    motif: Sequence[tuple[Sequence[float], complex]],
    k: Sequence[float] | float,
) -> float:
    """Predicted Bragg intensity of a fully periodic motif comb at k.

    Nonzero only when k lies on the dual lattice (within 1e-9 in dual
    coordinates); there the intensity is |sum of w e(-k.t)|^2 * density^2.
    """
    kv = np.atleast_1d(np.asarray(k, dtype=np.float64))
    if kv.shape != (L.dim,):
        raise LatticeError(f"k has shape {kv.shape}, lattice dimension is {L.dim}")
    c = L.basis.T @ kv
    if np.max(np.abs(c - np.round(c))) > 1e-9:
        return 0.0
    h = 0.0 + 0.0j
    for t, w in motif:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        h += complex(w) * np.exp(-2j * np.pi * float(kv @ t))
    return float(abs(h) ** 2 * L.density() ** 2)


@dataclass(frozen=True)
class BraggPeakList:
    """Detected peaks, sorted by descending intensity."""

    k: np.ndarray
    intensity: np.ndarray
    threshold: float

    def __len__(self) -> int:
        return self.k.shape[0]

    def top_nonzero(self, count: int, k_eps: float = 1e-6) -> "BraggPeakList":
        """Strongest `count` peaks with |k| > k_eps (drops the origin peak)."""
        keep = np.linalg.norm(self.k, axis=1) > k_eps
        return BraggPeakList(self.k[keep][:count], self.intensity[keep][:count], self.threshold)


def detect_peaks(
    est: DiffractionEstimate,
    threshold: float,
    pointset: WeightedPointSet | None = None,
    refine_iters: int = 20,
    min_separation: float | None = None,
) -> BraggPeakList:
    """Local intensity maxima above a threshold.

    Works on amplitude_squared estimates, whose values approximate Bragg
    intensities.  One-dimensional scans are refined by golden-section search
    on the continuous intensity when the generating point set is supplied,
    then peaks closer together than min_separation (default: two grid steps)
    collapse to the strongest one.  Grid endpoints count as maxima.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if est.estimator != "amplitude_squared":
        raise ValueError("peak detection needs an amplitude_squared estimate")
    if est.dim == 1:
        return _detect_peaks_1d(est, threshold, pointset, refine_iters, min_separation)
    if est.grid_shape is None:
        raise ValueError("peak detection beyond 1D needs grid_shape on the estimate")
    return _detect_peaks_grid(est, threshold)


def _detect_peaks_1d(est, threshold, pointset, refine_iters, min_separation):
    order = np.argsort(est.k[:, 0], kind="stable")
    k = est.k[order, 0]
    inten = est.intensity[order]
    n = k.shape[0]
    if n < 3:
        raise ValueError("grid too small for peak detection")
    step = float(np.median(np.diff(k)))
    if min_separation is None:
        min_separation = 2.0 * step

    pad = np.concatenate([[-np.inf], inten, [-np.inf]])
    is_max = (pad[1:-1] >= pad[:-2]) & (pad[1:-1] >= pad[2:]) & (inten >= threshold)
    idx = np.flatnonzero(is_max)

    peaks_k, peaks_i = [], []
    for i in idx:
        lo = k[max(i - 1, 0)]
        hi = k[min(i + 1, n - 1)]
        kk, ii = float(k[i]), float(inten[i])
        if pointset is not None and hi > lo:
            rk, ri = _golden_refine(pointset, est, lo, hi, refine_iters)
            if ri > ii:  # refinement may only improve on the sampled value
                kk, ii = rk, ri
        peaks_k.append(kk)
        peaks_i.append(ii)

    # Merge refined peaks that collapsed onto the same location.
    merged: list[tuple[float, float]] = []
    for kk, ii in sorted(zip(peaks_k, peaks_i)):
        if merged and kk - merged[-1][0] < min_separation:
            if ii > merged[-1][1]:
                merged[-1] = (kk, ii)
        else:
            merged.append((kk, ii))
    merged = [(kk, ii) for kk, ii in merged if ii >= threshold]
    merged.sort(key=lambda t: -t[1])
    karr = np.array([m[0] for m in merged], dtype=np.float64).reshape(-1, 1)
    iarr = np.array([m[1] for m in merged], dtype=np.float64)
    return BraggPeakList(karr, iarr, float(threshold))


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_refine(S, est, lo, hi, iters):
    region = S.region
    vol = region.volume()

    def f_batch(ks: np.ndarray) -> np.ndarray:
        K = np.asarray(ks, dtype=np.float64).reshape(-1, 1)
        return np.abs(_amplitudes(S, K, region, 1) / vol) ** 2

    def f(kk: float) -> float:
        return float(f_batch(np.array([kk]))[0])

    # A Bragg spike of a large set can be far narrower than a grid cell, so
    # zoom in by repeated dense scans before trusting golden-section (which
    # assumes the bracket is unimodal).
    a, b = float(lo), float(hi)
    for _ in range(3):
        ks = np.linspace(a, b, 33)
        vals = f_batch(ks)
        j = int(np.argmax(vals))
        step = ks[1] - ks[0]
        a = max(float(lo), ks[j] - step)
        b = min(float(hi), ks[j] + step)

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return float(c), float(fc)
    return float(d), float(fd)


def _detect_peaks_grid(est, threshold):
    shape = est.grid_shape
    inten = est.intensity.reshape(shape)
    mask = inten >= threshold
    for axis in range(len(shape)):
        padded = np.pad(inten, [(1, 1) if ax == axis else (0, 0) for ax in range(len(shape))], constant_values=-np.inf)
        up = np.take(padded, range(2, shape[axis] + 2), axis=axis)
        down = np.take(padded, range(0, shape[axis]), axis=axis)
        mask &= (inten >= up) & (inten >= down)
    flat = np.flatnonzero(mask.ravel())
    order = np.argsort(-est.intensity[flat], kind="stable")
    flat = flat[order]
    return BraggPeakList(est.k[flat], est.intensity[flat], float(threshold))


@dataclass(frozen=True)
class FoldedDiffraction:
    """Intensities folded into a fundamental domain of a reciprocal lattice.

    Bins partition [0,1)^dim in folded (dual coordinate) space.  `spread` is
    the max-min intensity range within each bin; for a grid that folds onto
    bin-aligned classes it measures how far the scan is from exact
    periodicity modulo the lattice.
    """

    lattice: Lattice
    bins: int
    index: np.ndarray
    mean: np.ndarray
    spread: np.ndarray
    count: np.ndarray

    def max_spread(self) -> float:
        return float(self.spread.max()) if self.spread.size else 0.0

    @property
    def dim(self) -> int:
        return self.index.shape[1]


def fold_diffraction(est: DiffractionEstimate, L: Lattice, bins: int = 64) -> FoldedDiffraction:
    """Fold a k grid modulo the lattice L and aggregate intensities per bin.

    The grid must span at least two fundamental domains in every dual
    coordinate, otherwise periodicity modulo L is not being tested at all.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if L.dim != est.dim:
        raise LatticeError(f"lattice dimension {L.dim} does not match k dimension {est.dim}")
    c = est.k @ L._inv.T
    for d in range(est.dim):
        vals = np.unique(c[:, d])
        span = float(vals[-1] - vals[0]) if vals.size > 1 else 0.0
        step = float(np.min(np.diff(vals))) if vals.size > 1 else 0.0
        if span + step < 2.0 - 1e-9:
            raise LatticeError(
                f"k grid spans {span:.3g} fundamental domains in axis {d}; need at least 2"
            )
    f = c - np.floor(c)
    f[f >= 1.0] = 0.0
    idx = np.minimum((f * bins).astype(np.int64), bins - 1)

    flat = idx @ (bins ** np.arange(est.dim - 1, -1, -1, dtype=np.int64))
    order = np.argsort(flat, kind="stable")
    flat_s = flat[order]
    inten_s = est.intensity[order]
    starts = np.flatnonzero(np.concatenate([[True], flat_s[1:] != flat_s[:-1]]))
    ends = np.concatenate([starts[1:], [flat_s.shape[0]]])

    out_idx = np.zeros((starts.shape[0], est.dim), dtype=np.int64)
    mean = np.zeros(starts.shape[0])
    spread = np.zeros(starts.shape[0])
    count = np.zeros(starts.shape[0], dtype=np.int64)
    for row, (s, e) in enumerate(zip(starts, ends)):
        vals = inten_s[s:e]
        mean[row] = float(vals.mean())
        spread[row] = float(vals.max() - vals.min())
        count[row] = e - s
        rem = int(flat_s[s])
        for d in range(est.dim - 1, -1, -1):
            out_idx[row, d] = rem % bins
            rem //= bins
    return FoldedDiffraction(L, int(bins), out_idx, mean, spread, count)


def save_diffraction(est: DiffractionEstimate, csv_path: str) -> None:
    names = [f"k{i + 1}" for i in range(est.dim)]
    with open(csv_path, "w") as fh:
        fh.write(",".join(names + ["intensity"]) + "\n")
        for row, v in zip(est.k, est.intensity):
            fh.write(",".join([f"{x:.15g}" for x in row] + [f"{v:.15g}"]) + "\n")


def save_peaks(peaks: BraggPeakList, csv_path: str) -> None:
    dim = peaks.k.shape[1] if peaks.k.size else 1
    names = [f"k{i + 1}" for i in range(dim)]
    with open(csv_path, "w") as fh:
        fh.write(",".join(names + ["intensity"]) + "\n")
        for row, v in zip(peaks.k, peaks.intensity):
            fh.write(",".join([f"{x:.15g}" for x in row] + [f"{v:.15g}"]) + "\n")


def save_folded(fd: FoldedDiffraction, csv_path: str) -> None:
    names = [f"b{i + 1}" for i in range(fd.dim)]
    with open(csv_path, "w") as fh:
        fh.write(",".join(names + ["mean_intensity", "spread", "count"]) + "\n")
        for row, m, s, c in zip(fd.index, fd.mean, fd.spread, fd.count):
            cells = [str(int(x)) for x in row] + [f"{m:.15g}", f"{s:.15g}", str(int(c))]
            fh.write(",".join(cells) + "\n")
