"""Comparison experiments on top of the estimators: intensity scaling fits,
Bernoulli thinning checks, homometry verdicts, and block entropy rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .autocorr import autocorrelation, compare_autocorrelations
from .diffraction import BraggPeakList, bragg_amplitude
from .generators import bernoulli_thin, build_pointset
from .lattice import AveragingRegion
from .pointset import WeightedPointSet


@dataclass(frozen=True)
class ScalingReport:
    """Log-log fit of the normalized power |sum w e(-k.x)|^2 / N against N."""

    k_probe: tuple
    sizes: tuple
    n_points: tuple
    power: tuple
    beta: float
    residual: float
    label: str
    excluded_sizes: tuple


def scaling_exponent(
    builder: "str | Callable[[float], WeightedPointSet]",
    k_probe: Sequence[float] | float,
    sizes: Sequence[float],
    params: dict | None = None,
) -> ScalingReport:
    """Fit P_N = |sum_x w(x) e(-k.x)|^2 / N ~ N^beta over a size sweep.

    Needs at least four sizes, roughly geometrically spaced, so the fit sees
    a decade or so of growth.  Sizes whose power vanishes identically (full
    extinction) are excluded from the fit and reported.
    """
    sizes = [float(s) for s in sizes]
    if len(sizes) < 4:
        raise ValueError("need at least four sizes for a scaling fit")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    ratios = [b / a for a, b in zip(sizes, sizes[1:])]
    if min(ratios) < 1.2 or max(ratios) / min(ratios) > 2.0:
        raise ValueError("sizes must be roughly geometrically spaced")
    if isinstance(builder, str):
        name = builder

        def build(sz: float) -> WeightedPointSet:
            return build_pointset(name, params, size=sz)

    else:
        build = builder

    kv = np.atleast_1d(np.asarray(k_probe, dtype=np.float64))
    n_points, power, excluded = [], [], []
    for sz in sizes:
        S = build(sz)
        vol = S.region.volume()
        amp = bragg_amplitude(S, kv) * vol  # raw exponential sum
        N = len(S)
        P = abs(amp) ** 2 / N if N else 0.0
        n_points.append(N)
        power.append(float(P))
        if P <= 0.0:
            excluded.append(sz)

    xs = np.array([math.log(n) for n, p in zip(n_points, power) if p > 0.0])
    ys = np.array([math.log(p) for p in power if p > 0.0])
    if xs.size < 3:
        raise ValueError("too few usable sizes after excluding zero-power points")
    beta, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (beta * xs + intercept)) ** 2)))
    if abs(beta) <= 0.15:
        label = "ac-like"
    elif beta >= 0.85:
        label = "pp-like"
    elif 0.15 < beta < 0.85:
        label = "sc-like"
    else:
        label = "irregular"
    return ScalingReport(
        k_probe=tuple(float(v) for v in kv),
        sizes=tuple(sizes),
        n_points=tuple(n_points),
        power=tuple(power),
        beta=float(beta),
        residual=resid,
        label=label,
        excluded_sizes=tuple(excluded),
    )


@dataclass(frozen=True)
class ThinningReport:
    """Bernoulli thinning of a weight-1 comb against the p^2 / p(1-p) law."""

    p: float
    seeds: tuple
    peak_k: np.ndarray
    intensity_full: np.ndarray
    ratios: np.ndarray  # (n_seeds, n_peaks)
    ratio_mean: np.ndarray
    ratio_predicted: float
    background_per_seed: np.ndarray
    background_mean: float
    background_predicted: float
    relative_full: np.ndarray
    relative_thinned: np.ndarray
    max_relative_deviation: float
    n_background: int
    density: float
    ratio_tol: float
    background_rel_tol: float
    verdict: str


def thinning_experiment(
    S: WeightedPointSet,
    p: float,
    seeds: Sequence[int],
    peaks: "BraggPeakList | np.ndarray",
    n_background: int = 200,
    background_range: tuple[float, float] = (0.0, 1.0),
    n_candidates: int = 4096,
    exclusion: float = 0.05,
    ratio_tol: float = 0.05,
    background_rel_tol: float = 0.20,
) -> ThinningReport:
    """Measure how Bernoulli thinning scales Bragg peaks and lifts the diffuse
    background.

    Peak intensities (amplitude_squared) of each thinned set are divided by
    the full-set values; independent thinning predicts the ratio p^2 at every
    peak, with relative peak intensities unchanged.  The background is the
    mean periodogram over `n_background` probe wavenumbers picked from an
    equispaced midpoint ladder, at least `exclusion` away from every supplied
    peak and from the ladder endpoints, preferring the k with the smallest
    full-set periodogram so the probes sit between peaks.  Prediction:
    p(1-p) * density.

    The verdict is PASS when every mean ratio lands within ratio_tol of p^2
    and the mean background within background_rel_tol (relative) of the
    prediction, FAIL otherwise.
    """
    if len(seeds) < 3:
        raise ValueError("need at least three seeds for a thinning experiment")
    if len(set(int(s) for s in seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    if not (0.0 < p <= 1.0):
        raise ValueError("thinning probability must be in (0, 1]")
    if not np.allclose(S.weights, 1.0):
        raise ValueError("the thinning law applies to weight-1 combs")
    if S.dim != 1:
        raise ValueError("thinning experiment currently supports 1D sets")

    if isinstance(peaks, BraggPeakList):
        peak_k = peaks.k.reshape(-1)
    else:
        peak_k = np.asarray(peaks, dtype=np.float64).reshape(-1)
    if peak_k.size == 0:
        raise ValueError("need at least one peak")

    vol = S.region.volume()
    full_amp = np.array([bragg_amplitude(S, [kk]) for kk in peak_k])
    intensity_full = np.abs(full_amp) ** 2
    if np.any(intensity_full <= 0.0):
        raise ValueError("full-set intensity vanishes at a supplied peak")

    lo, hi = background_range
    step = (hi - lo) / n_candidates
    ladder = lo + (np.arange(n_candidates) + 0.5) * step
    dist_pk = np.min(np.abs(ladder[:, None] - peak_k[None, :]), axis=1)
    ok = (dist_pk >= exclusion) & (ladder - lo >= exclusion) & (hi - ladder >= exclusion)
    ladder = ladder[ok]
    if ladder.size < n_background:
        raise ValueError(f"only {ladder.size} background candidates survive the exclusion zones")
    ladder_amp = np.array([bragg_amplitude(S, [kk]) for kk in ladder])
    ladder_per = np.abs(ladder_amp * vol) ** 2 / vol
    pick = np.argsort(ladder_per, kind="stable")[:n_background]
    pick.sort()
    bg_k = ladder[pick]

    ratios = np.zeros((len(seeds), peak_k.size))
    bg = np.zeros(len(seeds))
    for si, seed in enumerate(seeds):
        T = bernoulli_thin(S, p, int(seed))
        amp = np.array([bragg_amplitude(T, [kk]) for kk in peak_k])
        ratios[si] = np.abs(amp) ** 2 / intensity_full
        amp_bg = np.array([bragg_amplitude(T, [kk]) for kk in bg_k])
        bg[si] = float(np.mean(np.abs(amp_bg * vol) ** 2 / vol))

    density = len(S) / vol
    rel_full = intensity_full / intensity_full[0]
    mean_thin = ratios.mean(axis=0) * intensity_full
    rel_thin = mean_thin / mean_thin[0]
    max_rel_dev = float(np.max(np.abs(rel_thin - rel_full) / rel_full))
    ratio_mean = ratios.mean(axis=0)
    bg_pred = float(p * (1.0 - p) * density)
    ratio_ok = bool(np.all(np.abs(ratio_mean - p * p) <= ratio_tol))
    if bg_pred > 0.0:
        bg_ok = abs(float(bg.mean()) - bg_pred) <= background_rel_tol * bg_pred
    else:
        # p = 1 predicts no added background; the residual belongs to the
        # full set itself, so there is nothing to judge.
        bg_ok = True
    return ThinningReport(
        p=float(p),
        seeds=tuple(int(s) for s in seeds),
        peak_k=peak_k,
        intensity_full=intensity_full,
        ratios=ratios,
        ratio_mean=ratio_mean,
        ratio_predicted=float(p * p),
        background_per_seed=bg,
        background_mean=float(bg.mean()),
        background_predicted=bg_pred,
        relative_full=rel_full,
        relative_thinned=rel_thin,
        max_relative_deviation=max_rel_dev,
        n_background=int(n_background),
        density=float(density),
        ratio_tol=float(ratio_tol),
        background_rel_tol=float(background_rel_tol),
        verdict="PASS" if (ratio_ok and bg_ok) else "FAIL",
    )


@dataclass(frozen=True)
class HomometryReport:
    """Side-by-side autocorrelations of two point sets at a fixed scale."""

    verdict: str
    max_deviation: float
    tolerance: float
    z_max: float
    normalization: str
    n_a: int
    n_b: int
    table: tuple  # rows (key, eta_a, eta_b, abs difference)


def homometry_report(
    A: WeightedPointSet,
    B: WeightedPointSet,
    region: AveragingRegion | None = None,
    z_max: float = 32.0,
    tolerance: float = 0.03,
    normalization: str = "boundary_corrected",
) -> HomometryReport:
    """Compare two autocorrelations displacement by displacement.

    Verdict HOMOMETRIC-AT-SCALE means the largest coefficient difference over
    the union of displacement sets stays within the tolerance; it is a
    statement about this region and z_max only, not a theorem about the
    infinite sets.
    """
    if region is None:
        if A.region != B.region:
            raise ValueError("point sets have different regions; pass an explicit common region")
        region = A.region
    est_a = autocorrelation(A, region, z_max=z_max, normalization=normalization)
    est_b = autocorrelation(B, region, z_max=z_max, normalization=normalization)
    max_dev = compare_autocorrelations(est_a, est_b)
    rows = []
    for key in sorted(set(est_a.coefficients) | set(est_b.coefficients)):
        va, vb = est_a.eta(key), est_b.eta(key)
        rows.append((key, va, vb, abs(va - vb)))
    verdict = "HOMOMETRIC-AT-SCALE" if max_dev <= tolerance else "DISTINCT-AT-SCALE"
    return HomometryReport(
        verdict=verdict,
        max_deviation=float(max_dev),
        tolerance=float(tolerance),
        z_max=float(z_max),
        normalization=normalization,
        n_a=est_a.n_points,
        n_b=est_b.n_points,
        table=tuple(rows),
    )


def _as_symbol_codes(seq: np.ndarray) -> np.ndarray:
    seq = np.asarray(seq)
    if np.iscomplexobj(seq):
        seq = seq.real
    vals = np.unique(seq)
    if vals.size > 64:
        raise ValueError(f"sequence has {vals.size} distinct symbols; expected a small alphabet")
    return np.searchsorted(vals, seq)


def block_entropy(seq: np.ndarray, block_len: int) -> float:
    """Miller-Madow corrected Shannon entropy (bits) of overlapping blocks."""
    if block_len < 1:
        raise ValueError("block length must be >= 1")
    codes = _as_symbol_codes(seq)
    n_sym = int(codes.max()) + 1 if codes.size else 1
    if codes.size < block_len:
        raise ValueError("sequence shorter than the block length")
    windows = np.lib.stride_tricks.sliding_window_view(codes, block_len)
    mult = n_sym ** np.arange(block_len, dtype=np.int64)
    keys = windows @ mult
    _, counts = np.unique(keys, return_counts=True)
    M = keys.shape[0]
    probs = counts / M
    H = float(-np.sum(probs * np.log2(probs)))
    return H + (counts.size - 1) / (2.0 * M * math.log(2.0))


def block_entropy_rate(seq: np.ndarray, block_len: int = 8) -> float:
    """Block entropy per symbol, H(block_len) / block_len, in bits/symbol.

    Upper-bounds the true entropy rate and decreases in block_len; for
    deterministic low-complexity sequences it vanishes only logarithmically
    slowly, so treat small block lengths as a coarse contrast diagnostic,
    not a limit value.
    """
    if block_len < 1:
        raise ValueError("block length must be >= 1")
    return block_entropy(seq, block_len) / block_len
