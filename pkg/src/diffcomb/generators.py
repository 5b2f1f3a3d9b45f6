"""Point-set generators: lattice combs, substitution sequences, cut-and-project
sets, visible lattice points, and Bernoulli randomizations.

All deterministic generators emit exact integer coordinates.  Stochastic ones
take an explicit integer seed and use the counter-based Philox generator, so
(seed, input order) fixes the output bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .golden import TAU, GoldenInt, golden_sign_array, golden_star_sign_array
from .lattice import AveragingRegion, Lattice, LatticeError, region_points
from .pointset import (
    AlgebraError,
    FloatAlgebra,
    GoldenAlgebra,
    LatticeAlgebra,
    WeightedPointSet,
)

_RNG_NAME = "philox4x64-10"


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def lattice_comb(L: Lattice, region: AveragingRegion) -> WeightedPointSet:
    """Weight-1 comb on all lattice points inside the region."""
    pts = region_points(L, region)
    return WeightedPointSet(
        algebra=LatticeAlgebra(L),
        coords=pts,
        weights=np.ones(pts.shape[0], dtype=np.complex128),
        region=region,
        provenance={"generator": "lattice_comb", "basis": L.basis.tolist()},
    )


def motif_comb(
    L: Lattice,
    motif: Sequence[tuple[Sequence[float], complex]],
    region: AveragingRegion,
) -> WeightedPointSet:
    """Lattice translates of a finite weighted motif, clipped to the region.

    If every motif offset lies on the refinement L/q for some q <= 64, the
    result is snapped onto that refined lattice and keeps exact coordinates.
    Otherwise the points fall back to plain float positions.
    """
    if not motif:
        raise ValueError("motif must contain at least one (offset, weight) pair")
    offsets = np.array([np.atleast_1d(np.asarray(t, dtype=np.float64)) for t, _ in motif])
    wts = np.array([w for _, w in motif], dtype=np.complex128)
    if offsets.shape[1] != L.dim:
        raise LatticeError(f"motif offsets have dimension {offsets.shape[1]}, lattice has {L.dim}")
    oc = offsets @ L._inv.T  # offsets in lattice coordinates
    q = None
    for cand in range(1, 65):
        if np.all(np.abs(cand * oc - np.round(cand * oc)) <= 1e-9):
            q = cand
            break

    pad = float(np.max(np.linalg.norm(offsets, axis=1), initial=0.0))
    wide = AveragingRegion(region.kind, region.radius + pad + 1e-9, region.dim, region.center)
    base = region_points(L, wide)

    if q is not None:
        refined = Lattice(L.basis / q)
        shifts = np.round(q * oc).astype(np.int64)
        coords = (q * base[:, None, :] + shifts[None, :, :]).reshape(-1, L.dim)
        weights = np.broadcast_to(wts, (base.shape[0], len(motif))).reshape(-1).copy()
        pos = coords.astype(np.float64) @ refined.basis.T
        keep = region.contains(pos)
        coords, weights = coords[keep], weights[keep]
        uniq = np.unique(coords, axis=0)
        if uniq.shape[0] != coords.shape[0]:
            raise ValueError("motif offsets collide modulo the lattice")
        order = np.lexsort(coords.T[::-1])
        return WeightedPointSet(
            algebra=LatticeAlgebra(refined),
            coords=coords[order],
            weights=weights[order],
            region=region,
            provenance={
                "generator": "motif_comb",
                "basis": L.basis.tolist(),
                "motif": [[list(map(float, t)), [complex(w).real, complex(w).imag]] for t, w in motif],
                "refinement": q,
            },
        )

    pos = (base.astype(np.float64) @ L.basis.T)[:, None, :] + offsets[None, :, :]
    pos = pos.reshape(-1, L.dim)
    weights = np.broadcast_to(wts, (base.shape[0], len(motif))).reshape(-1).copy()
    keep = region.contains(pos)
    pos, weights = pos[keep], weights[keep]
    if np.unique(pos, axis=0).shape[0] != pos.shape[0]:
        raise ValueError("motif offsets collide modulo the lattice")
    order = np.lexsort(pos.T[::-1])
    warnings.warn("motif offsets are not commensurate with the lattice; using float positions")
    return WeightedPointSet(
        algebra=FloatAlgebra(L.dim),
        coords=pos[order],
        weights=weights[order],
        region=region,
        provenance={
            "generator": "motif_comb",
            "basis": L.basis.tolist(),
            "motif": [[list(map(float, t)), [complex(w).real, complex(w).imag]] for t, w in motif],
            "refinement": None,
        },
    )


@dataclass(frozen=True)
class SubstitutionRule:
    """Symbol substitution on a finite alphabet with per-symbol tile data.

    `rules` maps each symbol to its image word (a string over the alphabet).
    `lengths` gives each symbol's tile length as an int or a GoldenInt;
    `weights` gives the point weight placed at the tile's left endpoint.
    """

    name: str
    alphabet: tuple[str, ...]
    rules: dict[str, str]
    lengths: dict[str, "GoldenInt | int | float"] = field(default_factory=dict)
    weights: dict[str, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise ValueError("alphabet must be non-empty")
        for s in self.alphabet:
            if len(s) != 1:
                raise ValueError(f"symbols must be single characters, got {s!r}")
            if s not in self.rules or not self.rules[s]:
                raise ValueError(f"symbol {s!r} has no substitution image")
        known = set(self.alphabet)
        for s, image in self.rules.items():
            if s not in known:
                raise ValueError(f"rule defined for unknown symbol {s!r}")
            bad = set(image) - known
            if bad:
                raise ValueError(f"rule image for {s!r} uses unknown symbols {sorted(bad)}")
        for s in self.alphabet:
            if float(self.length_of(s)) <= 0.0:
                raise ValueError(f"tile length for {s!r} must be positive")

    def length_of(self, s: str) -> "GoldenInt | int | float":
        return self.lengths.get(s, 1)

    def weight_of(self, s: str) -> complex:
        return complex(self.weights.get(s, 1.0))

    def apply(self, word: str) -> str:
        return "".join(self.rules[s] for s in word)


FIBONACCI = SubstitutionRule(
    name="fibonacci",
    alphabet=("a", "b"),
    rules={"a": "ab", "b": "a"},
    lengths={"a": GoldenInt(0, 1), "b": GoldenInt(1, 0)},
)

THUE_MORSE = SubstitutionRule(
    name="thue_morse",
    alphabet=("a", "b"),
    rules={"a": "ab", "b": "ba"},
    weights={"a": 1.0, "b": -1.0},
)

PERIOD_DOUBLING = SubstitutionRule(
    name="period_doubling",
    alphabet=("a", "b"),
    rules={"a": "ab", "b": "aa"},
)

BUILTIN_RULES = {r.name: r for r in (FIBONACCI, THUE_MORSE, PERIOD_DOUBLING)}

_MAX_WORD = 1 << 26


def substitution_sequence(
    rule: "SubstitutionRule | str",
    iterations: int | None = None,
    x_max: float | None = None,
    seed_symbol: str | None = None,
) -> WeightedPointSet:
    """Point set read off a substitution word: one weighted point per tile
    left endpoint.

    Exactly one of `iterations` (take the k-th iterate of the seed symbol)
    and `x_max` (iterate until the word covers [0, x_max), then clip) must be
    given.  Golden tile lengths give exact (m, n) coordinates; integer
    lengths give exact integer coordinates.
    """
    if isinstance(rule, str):
        try:
            rule = BUILTIN_RULES[rule]
        except KeyError:
            raise ValueError(f"unknown built-in rule {rule!r}; have {sorted(BUILTIN_RULES)}") from None
    if (iterations is None) == (x_max is None):
        raise ValueError("give exactly one of iterations and x_max")
    seed_symbol = seed_symbol or rule.alphabet[0]
    if seed_symbol not in rule.alphabet:
        raise ValueError(f"seed symbol {seed_symbol!r} not in alphabet")

    lengths = [rule.length_of(s) for s in rule.alphabet]
    golden = any(isinstance(v, GoldenInt) for v in lengths)
    integral = all(isinstance(v, (int, np.integer)) for v in lengths)

    def total_length(word: str) -> float:
        if golden:
            acc = GoldenInt(0, 0)
            for s in rule.alphabet:
                acc = acc + _as_golden(rule.length_of(s)) * word.count(s)
            return acc.value()
        return float(sum(float(rule.length_of(s)) * word.count(s) for s in rule.alphabet))

    word = seed_symbol
    if iterations is not None:
        if iterations < 0:
            raise ValueError("iterations must be >= 0")
        for _ in range(iterations):
            word = rule.apply(word)
            if len(word) > _MAX_WORD:
                raise ValueError(f"substitution word exceeds {_MAX_WORD} symbols")
    else:
        if x_max <= 0:
            raise ValueError("x_max must be positive")
        while total_length(word) < x_max:
            nxt = rule.apply(word)
            if nxt == word:
                raise ValueError("substitution does not grow; cannot reach x_max")
            word = nxt
            if len(word) > _MAX_WORD:
                raise ValueError(f"substitution word exceeds {_MAX_WORD} symbols")

    sym_idx = {s: i for i, s in enumerate(rule.alphabet)}
    idx = np.fromiter((sym_idx[s] for s in word), dtype=np.int64, count=len(word))
    wvals = np.array([rule.weight_of(s) for s in rule.alphabet], dtype=np.complex128)
    weights = wvals[idx]

    if golden:
        lm = np.array([_as_golden(rule.length_of(s)).m for s in rule.alphabet], dtype=np.int64)
        ln = np.array([_as_golden(rule.length_of(s)).n for s in rule.alphabet], dtype=np.int64)
        ends_m, ends_n = np.cumsum(lm[idx]), np.cumsum(ln[idx])
        coords = np.zeros((len(word), 2), dtype=np.int64)
        coords[1:, 0], coords[1:, 1] = ends_m[:-1], ends_n[:-1]
        algebra = GoldenAlgebra()
        pos = coords[:, 0] + TAU * coords[:, 1]
        total = float(GoldenInt(int(ends_m[-1]), int(ends_n[-1])).value())
    elif integral:
        li = np.array([int(rule.length_of(s)) for s in rule.alphabet], dtype=np.int64)
        ends = np.cumsum(li[idx])
        coords = np.zeros((len(word), 1), dtype=np.int64)
        coords[1:, 0] = ends[:-1]
        algebra = LatticeAlgebra(Lattice(np.array([[1.0]])))
        pos = coords[:, 0].astype(np.float64)
        total = float(ends[-1])
    else:
        lf = np.array([float(rule.length_of(s)) for s in rule.alphabet], dtype=np.float64)
        ends = np.cumsum(lf[idx])
        coords = np.zeros((len(word), 1), dtype=np.float64)
        coords[1:, 0] = ends[:-1]
        algebra = FloatAlgebra(1)
        pos = coords[:, 0]
        total = float(ends[-1])

    if x_max is not None:
        if golden and float(x_max).is_integer():
            X = int(x_max)
            keep = golden_sign_array(coords[:, 0] - X, coords[:, 1]) < 0
        else:
            keep = pos < x_max
        coords, weights = coords[keep], weights[keep]
        hi = float(x_max)
    else:
        hi = total
    return WeightedPointSet(
        algebra=algebra,
        coords=coords,
        weights=weights,
        region=AveragingRegion.interval(0.0, hi),
        provenance={
            "generator": "substitution_sequence",
            "rule": rule.name,
            "iterations": iterations,
            "x_max": x_max,
            "seed_symbol": seed_symbol,
        },
    )


def _as_golden(v: "GoldenInt | int") -> GoldenInt:
    return v if isinstance(v, GoldenInt) else GoldenInt(int(v), 0)


def rudin_shapiro_weights(N: int) -> np.ndarray:
    """First N terms of the Rudin-Shapiro +-1 sequence.

    Built by doubling: e[2n] = e[n], e[2n+1] = (-1)^n e[n], starting from
    e[0] = 1.  Equivalently e[n] is (-1) to the number of "11" factors in
    the binary expansion of n.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    e = np.ones(1, dtype=np.float64)
    while e.size < N:
        out = np.empty(2 * e.size, dtype=np.float64)
        out[0::2] = e
        out[1::2] = e * (1.0 - 2.0 * (np.arange(e.size) & 1))
        e = out
    return e[:N]


def rudin_shapiro_comb(N: int) -> WeightedPointSet:
    """Rudin-Shapiro +-1 weights on the integers 0..N-1."""
    coords = np.arange(N, dtype=np.int64).reshape(-1, 1)
    return WeightedPointSet(
        algebra=LatticeAlgebra(Lattice(np.array([[1.0]]))),
        coords=coords,
        weights=rudin_shapiro_weights(N).astype(np.complex128),
        region=AveragingRegion.interval(0.0, float(N)),
        provenance={"generator": "rudin_shapiro_comb", "n": int(N)},
    )


@dataclass(frozen=True)
class CutProjectScheme:
    """Window [lo, hi) on the internal (star) line of the golden ring.

    GoldenInt endpoints make window membership an exact integer decision;
    float endpoints fall back to floating-point comparison.
    """

    window_lo: "GoldenInt | float"
    window_hi: "GoldenInt | float"

    def __post_init__(self) -> None:
        if not (self._lo_value() < self._hi_value()):
            raise ValueError(f"empty window [{self._lo_value()}, {self._hi_value()})")

    @classmethod
    def default(cls) -> "CutProjectScheme":
        # Window [-1, tau - 1): the Fibonacci chain with left tile endpoints.
        return cls(GoldenInt(-1, 0), GoldenInt(-1, 1))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.window_lo, GoldenInt) and isinstance(self.window_hi, GoldenInt)

    def _lo_value(self) -> float:
        return float(self.window_lo)

    def _hi_value(self) -> float:
        return float(self.window_hi)

    def as_dict(self) -> dict:
        def enc(v):
            return {"m": v.m, "n": v.n} if isinstance(v, GoldenInt) else float(v)

        return {"window_lo": enc(self.window_lo), "window_hi": enc(self.window_hi)}


def fibonacci_model_set(
    x_max: float,
    scheme: CutProjectScheme | None = None,
    x_min: float = 0.0,
) -> WeightedPointSet:
    """Cut-and-project set {m + n*tau : m + n*tau' in window} on [x_min, x_max).

    With the default scheme this is the Fibonacci chain.  Window membership
    and, for integer bounds, the physical clipping are decided exactly in
    integer arithmetic.
    """
    scheme = scheme or CutProjectScheme.default()
    if not (x_max > x_min):
        raise ValueError(f"empty physical range [{x_min}, {x_max})")
    wlo, whi = scheme._lo_value(), scheme._hi_value()
    sqrt5 = 2.0 * TAU - 1.0
    n_lo = int(np.floor((x_min - whi) / sqrt5)) - 2
    n_hi = int(np.ceil((x_max - wlo) / sqrt5)) + 2

    ms, ns = [], []
    tau_star = 1.0 - TAU
    for n in range(n_lo, n_hi + 1):
        m0 = int(np.floor(max(x_min - n * TAU, wlo - n * tau_star))) - 2
        m1 = int(np.ceil(min(x_max - n * TAU, whi - n * tau_star))) + 2
        if m1 < m0:
            continue
        m = np.arange(m0, m1 + 1, dtype=np.int64)
        ms.append(m)
        ns.append(np.full(m.shape, n, dtype=np.int64))
    if ms:
        m = np.concatenate(ms)
        n = np.concatenate(ns)
    else:
        m = np.zeros(0, dtype=np.int64)
        n = np.zeros(0, dtype=np.int64)

    keep = _window_mask(m, n, scheme)
    keep &= _range_mask(m, n, x_min, x_max)
    m, n = m[keep], n[keep]
    pos = m + TAU * n
    order = np.argsort(pos, kind="stable")
    coords = np.stack([m[order], n[order]], axis=1)

    prov = {
        "generator": "fibonacci_model_set",
        "scheme": scheme.as_dict(),
        "x_min": float(x_min),
        "x_max": float(x_max),
    }
    if coords.shape[0] == 0:
        prov["warning"] = "empty model set for this window and range"
        warnings.warn("model set is empty for this window and range")
    return WeightedPointSet(
        algebra=GoldenAlgebra(),
        coords=coords,
        weights=np.ones(coords.shape[0], dtype=np.complex128),
        region=AveragingRegion.interval(float(x_min), float(x_max)),
        provenance=prov,
    )


def _window_mask(m: np.ndarray, n: np.ndarray, scheme: CutProjectScheme) -> np.ndarray:
    # star(m + n tau) = (m + n) - n tau
    sm, sn = m + n, -n
    if scheme.is_exact:
        lo, hi = scheme.window_lo, scheme.window_hi
        ge_lo = golden_sign_array(sm - lo.m, sn - lo.n) >= 0
        lt_hi = golden_sign_array(sm - hi.m, sn - hi.n) < 0
        return ge_lo & lt_hi
    s = sm + TAU * sn
    return (s >= scheme._lo_value()) & (s < scheme._hi_value())


def _range_mask(m: np.ndarray, n: np.ndarray, x_min: float, x_max: float) -> np.ndarray:
    if float(x_min).is_integer() and float(x_max).is_integer():
        ge = golden_sign_array(m - int(x_min), n) >= 0
        lt = golden_sign_array(m - int(x_max), n) < 0
        return ge & lt
    x = m + TAU * n
    return (x >= x_min) & (x < x_max)


def visible_points(r: float) -> WeightedPointSet:
    """Visible points of Z^2 (coprime coordinate pairs) in the open ball |x| < r.

    The origin is excluded; points on the axes survive only at distance 1,
    since gcd(0, k) = k.
    """
    if r <= 1.0:
        raise ValueError("radius must exceed 1")
    R = int(np.ceil(r))
    ax = np.arange(-R, R + 1, dtype=np.int64)
    M, N = np.meshgrid(ax, ax, indexing="ij")
    m, n = M.ravel(), N.ravel()
    r2 = m * m + n * n
    keep = (r2 > 0) & (r2.astype(np.float64) < r * r) & (np.gcd(np.abs(m), np.abs(n)) == 1)
    coords = np.stack([m[keep], n[keep]], axis=1)
    order = np.lexsort(coords.T[::-1])
    coords = coords[order]
    return WeightedPointSet(
        algebra=LatticeAlgebra(Lattice(np.eye(2))),
        coords=coords,
        weights=np.ones(coords.shape[0], dtype=np.complex128),
        region=AveragingRegion.ball(float(r), 2),
        provenance={"generator": "visible_points", "r": float(r)},
    )


def bernoulli_thin(S: WeightedPointSet, p: float, seed: int) -> WeightedPointSet:
    """Keep each point independently with probability p (Philox, keyed by seed).

    Exactly one uniform variate is drawn per input point in storage order, so
    the kept subset is reproducible from (seed, input order) alone.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"retention probability must be in [0, 1], got {p}")
    u = _rng(seed).random(len(S))
    keep = u < p
    prov = dict(S.provenance)
    prov["thinning"] = {"p": float(p), "seed": int(seed), "rng": _RNG_NAME, "kept": int(keep.sum())}
    return WeightedPointSet(
        algebra=S.algebra,
        coords=S.coords[keep],
        weights=S.weights[keep],
        region=S.region,
        provenance=prov,
    )


def bernoulli_lattice_gas(
    L: Lattice, p: float, region: AveragingRegion, seed: int
) -> WeightedPointSet:
    """Bernoulli site percolation on the lattice points inside the region."""
    return bernoulli_thin(lattice_comb(L, region), p, seed)


def coin_flip_comb(N: int, seed: int) -> WeightedPointSet:
    """Full comb on {0, .., N-1} with i.i.d. fair +-1 weights.

    The weight randomization counterpart of the occupation gas: every site is
    present, only the sign is random.  Same RNG contract as bernoulli_thin.
    """
    N = int(N)
    if N < 1:
        raise ValueError(f"need at least one point, got N={N}")
    u = _rng(seed).random(N)
    weights = np.where(u < 0.5, 1.0, -1.0).astype(np.complex128)
    L = Lattice(np.array([[1.0]]))
    return WeightedPointSet(
        algebra=LatticeAlgebra(L),
        coords=np.arange(N, dtype=np.int64).reshape(-1, 1),
        weights=weights,
        region=AveragingRegion.interval(0.0, float(N)),
        provenance={
            "generator": "coin_flip_comb",
            "n": N,
            "seed": int(seed),
            "rng": _RNG_NAME,
        },
    )


def complement_in_lattice(
    S: WeightedPointSet,
    L: Lattice | None = None,
    region: AveragingRegion | None = None,
) -> WeightedPointSet:
    """Weight-1 comb on the lattice points of L in the region that are not in S.

    S must be supported on L; a point of S outside the lattice-region comb is
    an error.
    """
    if L is None:
        if not isinstance(S.algebra, LatticeAlgebra):
            raise AlgebraError(
                f"complement needs a lattice-supported set, got {type(S.algebra).__name__}"
            )
        L = S.algebra.lattice
    if not isinstance(S.algebra, LatticeAlgebra) or S.algebra.lattice != L:
        raise LatticeError("point set is not supported on the given lattice")
    region = region or S.region
    full = region_points(L, region)
    key_full = _void_view(full)
    key_s = _void_view(np.ascontiguousarray(S.coords))
    missing = ~np.isin(key_s, key_full)
    if np.any(missing):
        bad = S.coords[np.flatnonzero(missing)[0]]
        raise ValueError(f"point {tuple(int(v) for v in bad)} of S is not a lattice point of the region")
    keep = ~np.isin(key_full, key_s)
    coords = full[keep]
    return WeightedPointSet(
        algebra=LatticeAlgebra(L),
        coords=coords,
        weights=np.ones(coords.shape[0], dtype=np.complex128),
        region=region,
        provenance={"generator": "complement_in_lattice", "parent": S.provenance},
    )


def _void_view(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view([("", a.dtype)] * a.shape[1]).reshape(-1)


# ---------------------------------------------------------------------------
# Registry: size-parameterized construction by name, shared by the CLI and by
# convergence / scaling sweeps.

def _build_lattice(params: dict) -> Lattice:
    basis = params.get("basis", [[1.0]])
    return Lattice(np.array(basis, dtype=np.float64))


def _region_from(params: dict, dim: int, default_r: float) -> AveragingRegion:
    if params.get("x_max") is not None:
        if dim != 1:
            raise LatticeError("x_min/x_max describe a 1D interval; use r for higher dimensions")
        lo = params.get("x_min")
        return AveragingRegion.interval(0.0 if lo is None else float(lo), float(params["x_max"]))
    kind = params.get("region", "box")
    r = float(params.get("r", default_r))
    center = tuple(params.get("center", ()))
    return AveragingRegion(kind, r, dim, center)


def _gen_lattice(params: dict) -> WeightedPointSet:
    L = _build_lattice(params)
    return lattice_comb(L, _region_from(params, L.dim, 16.0))


def _gen_motif(params: dict) -> WeightedPointSet:
    L = _build_lattice(params)
    motif = [(np.atleast_1d(t), complex(wr, wi)) for t, (wr, wi) in params["motif"]]
    return motif_comb(L, motif, _region_from(params, L.dim, 16.0))


def _gen_fibonacci(params: dict) -> WeightedPointSet:
    if params.get("window_lo") is None and params.get("window_hi") is None:
        scheme = CutProjectScheme.default()
    else:
        scheme = CutProjectScheme(float(params["window_lo"]), float(params["window_hi"]))
    return fibonacci_model_set(float(params["x_max"]), scheme, float(params.get("x_min", 0.0)))


def _gen_substitution(rule_name: str) -> Callable[[dict], WeightedPointSet]:
    def build(params: dict) -> WeightedPointSet:
        if "iterations" in params and params["iterations"] is not None:
            return substitution_sequence(rule_name, iterations=int(params["iterations"]))
        return substitution_sequence(rule_name, x_max=float(params["x_max"]))

    return build


def _gen_rudin_shapiro(params: dict) -> WeightedPointSet:
    return rudin_shapiro_comb(int(params["n"]))


def _gen_visible(params: dict) -> WeightedPointSet:
    return visible_points(float(params["r"]))


def _gen_bernoulli_gas(params: dict) -> WeightedPointSet:
    L = _build_lattice(params)
    return bernoulli_lattice_gas(
        L, float(params["p"]), _region_from(params, L.dim, 16.0), int(params.get("seed", 0))
    )


def _gen_coin(params: dict) -> WeightedPointSet:
    return coin_flip_comb(int(params["n"]), int(params.get("seed", 0)))


GENERATORS: dict[str, Callable[[dict], WeightedPointSet]] = {
    "lattice": _gen_lattice,
    "motif": _gen_motif,
    "fibonacci": _gen_fibonacci,
    "fibonacci_substitution": _gen_substitution("fibonacci"),
    "thue_morse": _gen_substitution("thue_morse"),
    "period_doubling": _gen_substitution("period_doubling"),
    "rudin_shapiro": _gen_rudin_shapiro,
    "visible": _gen_visible,
    "bernoulli_gas": _gen_bernoulli_gas,
    "coin": _gen_coin,
}

# Parameter that scales the set in size sweeps (convergence, scaling fits).
SIZE_PARAM: dict[str, str] = {
    "lattice": "r",
    "motif": "r",
    "fibonacci": "x_max",
    "fibonacci_substitution": "x_max",
    "thue_morse": "x_max",
    "period_doubling": "x_max",
    "rudin_shapiro": "n",
    "visible": "r",
    "bernoulli_gas": "r",
    "coin": "n",
}


def build_pointset(name: str, params: dict | None = None, size: float | None = None) -> WeightedPointSet:
    """Build a registered point set by name.

    `size` overrides the generator's natural size parameter (region radius,
    x_max, or point count), which is how radius sweeps are run.
    """
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; have {sorted(GENERATORS)}")
    params = dict(params or {})
    if size is not None:
        params[SIZE_PARAM[name]] = size
    try:
        return GENERATORS[name](params)
    except KeyError as missing:
        raise ValueError(f"generator {name!r} requires parameter {missing}") from None
