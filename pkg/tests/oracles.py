"""Brute-force reference implementations for regression freezing.

Everything here is deliberately naive and independent of the library's
optimized code paths: O(N^2) double loops over point pairs keyed by exact
coordinate differences, direct complex exponential sums without phase
reduction, and a bit-counting definition of the Rudin-Shapiro signs (the
library builds them by the doubling recursion instead).
"""

from __future__ import annotations

import numpy as np


def naive_autocorrelation(S, region=None, z_max=32.0, normalization="boundary_corrected"):
    """Map exact displacement tuple -> coefficient, by looping over all pairs."""
    region = region if region is not None else S.region
    inside = region.contains(S.positions)
    coords = np.asarray(S.coords)[inside]
    weights = np.asarray(S.weights)[inside]
    E = np.asarray(S.algebra.embedding, dtype=np.float64)
    cut = (z_max * (1.0 + 1e-12)) ** 2
    n = coords.shape[0]
    sums: dict[tuple, complex] = {}
    for i in range(n):
        dg = coords[i] - coords
        dz = dg @ E.T
        keep = np.einsum("ij,ij->i", dz, dz) <= cut
        prods = weights[i] * np.conj(weights)
        for j in np.flatnonzero(keep):
            key = tuple(int(v) for v in dg[j])
            sums[key] = sums.get(key, 0.0 + 0.0j) + prods[j]
    vol = region.volume()
    out = {}
    for key, s in sums.items():
        if normalization == "literal":
            denom = vol
        else:
            denom = region.overlap_volume(E @ np.asarray(key, dtype=np.float64))
        out[key] = s / denom
    return out


def naive_amplitude(S, k, region=None):
    """(1/vol) * sum w exp(-2 pi i k.x) summed directly over float positions."""
    region = region if region is not None else S.region
    inside = region.contains(S.positions)
    pos = np.asarray(S.positions)[inside]
    w = np.asarray(S.weights)[inside]
    kv = np.atleast_1d(np.asarray(k, dtype=np.float64))
    phases = pos @ kv
    return complex(np.sum(w * np.exp(-2j * np.pi * phases)) / region.volume())


def rudin_shapiro_signs_bitcount(N: int) -> np.ndarray:
    """(-1)**(number of '11' factors in the binary expansion of n)."""
    out = np.empty(N, dtype=np.float64)
    for n in range(N):
        pairs = bin(n & (n >> 1)).count("1")
        out[n] = -1.0 if pairs & 1 else 1.0
    return out


def fibonacci_word(generations: int) -> str:
    """a -> ab, b -> a iterated from 'a'."""
    word = "a"
    for _ in range(generations):
        word = "".join("ab" if s == "a" else "a" for s in word)
    return word
