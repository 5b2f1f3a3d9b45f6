import numpy as np
import pytest

import diffcomb as dc
from diffcomb import AlgebraError, AveragingRegion, Lattice
from diffcomb.generators import GENERATORS, SIZE_PARAM
from diffcomb.golden import TAU
from oracles import fibonacci_word, rudin_shapiro_signs_bitcount

Z1 = Lattice(np.array([[1.0]]))


def test_lattice_comb_count_and_weights():
    S = dc.lattice_comb(Z1, AveragingRegion.interval(0.0, 100.0))
    assert len(S) == 100
    assert np.all(S.weights == 1.0 + 0j)
    assert S.density() == pytest.approx(1.0)
    S2 = dc.lattice_comb(Z1, AveragingRegion.box(50.0, 1))
    assert len(S2) == 100  # half-open [-50, 50)


def test_motif_comb_equals_refined_lattice():
    region = AveragingRegion.interval(0.0, 64.0)
    M = dc.motif_comb(Z1, [((0.0,), 1.0), ((0.5,), 1.0)], region)
    H = dc.lattice_comb(Lattice(np.array([[0.5]])), region)
    assert len(M) == len(H) == 128
    assert np.allclose(np.sort(M.positions[:, 0]), np.sort(H.positions[:, 0]), atol=1e-12)


def test_motif_weights_attach_to_offsets():
    region = AveragingRegion.interval(0.0, 4.0)
    M = dc.motif_comb(Z1, [((0.0,), 1.0), ((0.5,), -2.0 + 1.0j)], region)
    pos = M.positions[:, 0]
    w = M.weights
    on_integer = np.isclose(pos % 1.0, 0.0)
    assert np.all(w[on_integer] == 1.0 + 0j)
    assert np.all(w[~on_integer] == -2.0 + 1.0j)


def test_rudin_shapiro_weights_match_bit_count_rule():
    N = 2**20
    got = dc.rudin_shapiro_weights(N)
    want = rudin_shapiro_signs_bitcount(N)
    assert np.array_equal(got.real.astype(np.int64), want)
    assert np.all(np.abs(got) == 1.0)


def test_rudin_shapiro_partial_sums_grow_like_sqrt_n():
    N = 2**16
    s = np.cumsum(dc.rudin_shapiro_weights(N).real)
    ratio = np.abs(s) / np.sqrt(np.arange(1, N + 1))
    # classical bound: partial sums stay below (2 + sqrt 2) sqrt(N)
    assert ratio.max() <= 2.0 + np.sqrt(2.0)


def test_rudin_shapiro_comb_layout():
    S = dc.rudin_shapiro_comb(64)
    assert len(S) == 64
    assert np.array_equal(S.coords[:, 0], np.arange(64))
    assert set(np.unique(S.weights.real)) == {-1.0, 1.0}


def test_fibonacci_gaps_are_exact_ring_elements():
    S = dc.fibonacci_model_set(10_000.0)
    d = np.diff(S.coords, axis=0)
    gaps = {tuple(row) for row in d.tolist()}
    # every gap is exactly 1 = (1,0) or tau = (0,1)
    assert gaps == {(1, 0), (0, 1)}


def test_fibonacci_density():
    S = dc.fibonacci_model_set(10_000.0)
    assert len(S) == 7237
    assert S.density() == pytest.approx(TAU / np.sqrt(5.0), abs=0.002)


def test_fibonacci_matches_substitution_word():
    # symbol sequence read off the gap lengths equals the substitution word
    S = dc.fibonacci_model_set(500.0)
    d = np.diff(S.coords, axis=0)
    word_from_gaps = "".join("a" if tuple(r) == (0, 1) else "b" for r in d.tolist())
    word = fibonacci_word(20)
    assert word.startswith(word_from_gaps) or word_from_gaps.startswith(word)


def test_substitution_chain_equals_model_set():
    A = dc.substitution_sequence("fibonacci", x_max=500.0)
    B = dc.fibonacci_model_set(500.0)
    assert np.array_equal(A.coords, B.coords)
    assert np.array_equal(A.weights, B.weights)


def test_substitution_rules_run():
    for name, x_max in (("thue_morse", 256.0), ("period_doubling", 256.0)):
        S = dc.substitution_sequence(name, x_max=x_max)
        assert len(S) == 256
        assert np.array_equal(S.coords[:, 0], np.arange(256))
    with pytest.raises((KeyError, ValueError)):
        dc.substitution_sequence("nonesuch", x_max=10.0)


def test_thue_morse_weights():
    S = dc.substitution_sequence("thue_morse", x_max=16.0)
    # +1 at even bit-count positions, -1 at odd
    bits = np.array([bin(i).count("1") for i in range(16)])
    assert np.array_equal(S.weights.real.astype(int), 1 - 2 * (bits % 2))


def test_bernoulli_thin_edge_cases():
    S = dc.lattice_comb(Z1, AveragingRegion.interval(0.0, 4096.0))
    full = dc.bernoulli_thin(S, 1.0, 7)
    assert np.array_equal(full.coords, S.coords)
    assert np.array_equal(full.weights, S.weights)
    empty = dc.bernoulli_thin(S, 0.0, 7)
    assert len(empty) == 0
    with pytest.raises(ValueError):
        dc.bernoulli_thin(S, 1.5, 7)
    with pytest.raises(ValueError):
        dc.bernoulli_thin(S, -0.1, 7)


def test_bernoulli_thin_statistics_and_determinism():
    S = dc.lattice_comb(Z1, AveragingRegion.interval(0.0, 65536.0))
    T1 = dc.bernoulli_thin(S, 0.5, 11)
    T2 = dc.bernoulli_thin(S, 0.5, 11)
    assert np.array_equal(T1.coords, T2.coords)
    assert abs(len(T1) / len(S) - 0.5) <= 0.005
    # different seeds give different subsets
    others = [dc.bernoulli_thin(S, 0.5, s) for s in range(5)]
    keys = {o.coords.tobytes() for o in others}
    assert len(keys) == 5
    # kept points form a subset with unchanged weights
    kept = set(map(tuple, T1.coords.tolist()))
    assert kept <= set(map(tuple, S.coords.tolist()))


def test_complement_partitions_the_comb():
    S = dc.lattice_comb(Z1, AveragingRegion.interval(0.0, 16384.0))
    T = dc.bernoulli_thin(S, 0.5, 0)
    C = dc.complement_in_lattice(T)
    assert len(T) + len(C) == len(S)
    merged = np.sort(np.concatenate([T.coords[:, 0], C.coords[:, 0]]))
    assert np.array_equal(merged, S.coords[:, 0])
    assert np.all(C.weights == 1.0 + 0j)


def test_complement_requires_lattice_algebra():
    with pytest.raises(AlgebraError):
        dc.complement_in_lattice(dc.fibonacci_model_set(50.0))


def test_visible_points_small_radius():
    V = dc.visible_points(2.0)
    got = sorted(map(tuple, V.coords.tolist()))
    assert got == [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def test_visible_points_coprimality_and_density():
    V = dc.visible_points(200.0)
    m, n = V.coords[:, 0], V.coords[:, 1]
    assert np.all(np.gcd(np.abs(m), np.abs(n)) == 1)
    assert V.density() == pytest.approx(6.0 / np.pi**2, abs=0.005)


def test_bernoulli_gas_density_and_determinism():
    region = AveragingRegion.interval(0.0, 50_000.0)
    G1 = dc.bernoulli_lattice_gas(Z1, 0.5, region, 42)
    G2 = dc.bernoulli_lattice_gas(Z1, 0.5, region, 42)
    assert np.array_equal(G1.coords, G2.coords)
    assert G1.density() == pytest.approx(0.5, abs=0.01)
    assert len({dc.bernoulli_lattice_gas(Z1, 0.5, region, s).coords.tobytes()
                for s in range(4)}) == 4


def test_coin_flip_comb():
    S1 = dc.coin_flip_comb(4096, 1)
    S2 = dc.coin_flip_comb(4096, 1)
    assert np.array_equal(S1.weights, S2.weights)
    assert np.array_equal(S1.coords[:, 0], np.arange(4096))
    assert set(np.unique(S1.weights.real)) == {-1.0, 1.0}
    frac = float(np.mean(S1.weights.real > 0))
    assert abs(frac - 0.5) < 0.05
    assert not np.array_equal(S1.weights, dc.coin_flip_comb(4096, 2).weights)


def test_registry_builds_every_generator():
    sizes = {"lattice": 32.0, "motif": 32.0, "fibonacci": 64.0,
             "fibonacci_substitution": 64.0, "thue_morse": 64.0,
             "period_doubling": 64.0, "rudin_shapiro": 64.0, "visible": 16.0,
             "bernoulli_gas": 64.0, "coin": 64.0}
    assert set(GENERATORS) == set(sizes) == set(SIZE_PARAM)
    for name, size in sizes.items():
        params = None
        if name == "motif":
            params = {"motif": [((0.0,), (1.0, 0.0)), ((0.5,), (1.0, 0.0))]}
        elif name == "bernoulli_gas":
            params = {"p": 0.5, "seed": 0}
        elif name == "coin":
            params = {"seed": 0}
        S = dc.build_pointset(name, params=params, size=size)
        assert len(S) > 0
        assert S.provenance.get("generator")
    with pytest.raises(ValueError):
        dc.build_pointset("unknown_generator", size=8.0)


def test_seeded_provenance_records_rng():
    G = dc.bernoulli_lattice_gas(Z1, 0.5, AveragingRegion.interval(0.0, 64.0), 9)
    thin = G.provenance.get("thinning", {})
    assert thin.get("seed") == 9
    assert "philox" in str(thin.get("rng", "")).lower()
    C = dc.coin_flip_comb(16, 3)
    assert C.provenance.get("seed") == 3
    assert "philox" in str(C.provenance.get("rng", "")).lower()
