"""Pure-numpy reference kernels.

Kept dependency-free and simple on purpose: the compiled backend must agree
with these, and tests compare the two directly.
"""

from __future__ import annotations

import numpy as np


def pair_sums(keys: np.ndarray, weights: np.ndarray, deltas: np.ndarray):
    """Pair sums over a keyed point set.

    keys must be sorted ascending and unique (one linearized integer key per
    point).  For every candidate key displacement d, accumulates
    sum of w[i] * conj(w[j]) over all pairs with keys[i] - keys[j] = d,
    plus the bare pair count.

    Returns (sums complex128 (M,), counts int64 (M,)).
    """
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    deltas = np.ascontiguousarray(deltas, dtype=np.int64)
    N = keys.shape[0]
    M = deltas.shape[0]
    sums = np.zeros(M, dtype=np.complex128)
    counts = np.zeros(M, dtype=np.int64)
    if N == 0:
        return sums, counts
    wc = np.conj(weights)
    for a in range(M):
        targets = keys - deltas[a]
        idx = np.searchsorted(keys, targets)
        idx_c = np.minimum(idx, N - 1)
        valid = (idx < N) & (keys[idx_c] == targets)
        j = idx_c[valid]
        counts[a] = j.shape[0]
        if j.shape[0]:
            sums[a] = np.sum(weights[valid] * wc[j])
    return sums, counts


def expsum_int_batch(coords: np.ndarray, weights: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Exponential sums with exact phase reduction on integer coordinates.

    For each row c of C computes sum of w * exp(-2 pi i frac(c . coords)).
    The per-point phase is reduced to [0, 1) after the dot product; callers
    pass C rows that are already fractional per dimension, which keeps the
    dot products small and the reduction exact.
    """
    coords_f = np.ascontiguousarray(coords, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    C = np.ascontiguousarray(np.atleast_2d(C), dtype=np.float64)
    out = np.empty(C.shape[0], dtype=np.complex128)
    for a in range(C.shape[0]):
        t = coords_f @ C[a]
        theta = t - np.floor(t)
        out[a] = np.sum(weights * np.exp(-2j * np.pi * theta))
    return out


def expsum_float_batch(pos: np.ndarray, weights: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Exponential sums over float positions: sum of w * exp(-2 pi i k . x)."""
    pos = np.ascontiguousarray(np.atleast_2d(pos), dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    K = np.ascontiguousarray(np.atleast_2d(K), dtype=np.float64)
    out = np.empty(K.shape[0], dtype=np.complex128)
    for a in range(K.shape[0]):
        t = pos @ K[a]
        theta = t - np.floor(t)
        out[a] = np.sum(weights * np.exp(-2j * np.pi * theta))
    return out
