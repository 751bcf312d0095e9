"""Distribution plumbing: dense/sparse agreement, WHT, joints, serialization.

Every operation is checked against a brute-force reference built from plain
dictionaries, and dense and sparse representations of the same law must give
identical numbers.
"""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_pfr.dists import (Dist, JointDist, dense_from_csv, entropy,
                                fwht, joint_product, load_dist,
                                pushforward_dist, uniform_on,
                                uniform_on_subgroup, xor_convolve)
from entropic_pfr.groups import LinearMap, span
from entropic_pfr.randgen import make_rng, random_dist, random_joint


def plain_entropy(w):
    return -sum(p * math.log(p) for p in w if p > 0)


def brute_convolve(X, Y):
    out = np.zeros(1 << X.n)
    ix, wx = X.items()
    iy, wy = Y.items()
    for i, a in zip(ix, wx):
        for j, b in zip(iy, wy):
            out[i ^ j] += a * b
    return out


def joint_table(J):
    """Packed key -> weight as a plain dict."""
    keys, w = J.items()
    return {int(k): float(v) for k, v in zip(keys, w)}


# -- Dist ---------------------------------------------------------------------


def test_dist_normalizes_and_validates():
    X = Dist.from_dense([1, 1, 2, 0], 2)
    assert abs(X.dense().sum() - 1.0) < 1e-15
    assert X.weight(2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        Dist.from_dense([1, -1, 0, 0], 2)
    with pytest.raises(ValueError):
        Dist.from_dense([0, 0, 0, 0], 2)
    with pytest.raises(ValueError):
        Dist.from_dense([1, 1], 2)


def test_sparse_accumulates_duplicates():
    X = Dist.from_sparse([3, 3, 1], [1.0, 1.0, 2.0], n=2)
    assert X.weight(3) == pytest.approx(0.5)
    assert X.weight(1) == pytest.approx(0.5)
    Y = Dist.from_sparse({1: 2.0, 3: 2.0}, n=2)
    assert np.allclose(X.dense(), Y.dense())


def test_dense_sparse_round_trip_preserves_everything():
    rng = make_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 9))
        X = random_dist(rng, n)
        S = X.to_sparse()
        D = X.to_dense()
        assert np.allclose(S.dense(), D.dense(), atol=1e-15)
        assert S.entropy() == pytest.approx(D.entropy(), abs=1e-12)
        assert S.argmax() == D.argmax()
        g = int(rng.integers(0, 1 << n))
        assert np.allclose(S.translate(g).dense(), D.translate(g).dense())


def test_entropy_matches_plain_sum():
    rng = make_rng(12)
    for _ in range(20):
        X = random_dist(rng, int(rng.integers(1, 8)))
        _, w = X.items()
        assert X.entropy() == pytest.approx(plain_entropy(w), abs=1e-12)
    assert Dist.point_mass(5, 3).entropy() == 0.0
    assert uniform_on(range(8), 3).entropy() == pytest.approx(3 * math.log(2))


def test_translate_is_group_action():
    X = Dist.from_dense([0.1, 0.2, 0.3, 0.4], 2)
    assert np.allclose(X.translate(3).translate(3).dense(), X.dense())
    assert X.translate(1).weight(0) == pytest.approx(X.weight(1))


def test_prune_drops_dust_and_renormalizes():
    X = Dist.from_sparse([0, 1, 2], [1.0, 1e-20, 1.0], n=2)
    P = X.prune(1e-13)
    assert P.support_size() == 2
    assert P.weight(0) == pytest.approx(0.5)


def test_argmax_smallest_index_on_tie():
    X = Dist.from_dense([0.25, 0.25, 0.5, 0.0], 2)
    assert X.argmax() == 2
    Y = Dist.from_dense([0.5, 0.5, 0, 0], 2)
    assert Y.argmax() == 0


# -- WHT and convolution ------------------------------------------------------


def direct_wht(a):
    n = len(a)
    out = np.zeros(n)
    for y in range(n):
        for x in range(n):
            out[y] += a[x] * (-1) ** bin(x & y).count("1")
    return out


def test_fwht_matches_direct_transform():
    rng = make_rng(13)
    for n in (1, 2, 4, 8, 16, 32):
        a = rng.normal(size=n)
        assert np.allclose(fwht(a), direct_wht(a), atol=1e-12)
        assert np.allclose(fwht(fwht(a)) / n, a, atol=1e-12)


def test_fwht_batches_rows_independently():
    rng = make_rng(14)
    rows = rng.normal(size=(5, 16))
    batched = fwht(rows)
    for i in range(5):
        assert np.allclose(batched[i], fwht(rows[i]))


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        fwht(np.ones(3))


def test_xor_convolve_matches_brute_force_all_paths():
    rng = make_rng(15)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        X = random_dist(rng, n)
        Y = random_dist(rng, n)
        ref = brute_convolve(X, Y)
        for A, B in ((X, Y), (X.to_sparse(), Y.to_sparse()),
                     (X.to_dense(), Y.to_sparse())):
            assert np.allclose(xor_convolve(A, B).dense(), ref, atol=1e-12)


def test_xor_convolve_identities():
    H = span([1, 2], 4)
    U = uniform_on_subgroup(H)
    # subgroup uniform is idempotent under convolution
    assert np.allclose(xor_convolve(U, U).dense(), U.dense(), atol=1e-12)
    X = Dist.from_dense([0.7, 0.1, 0.1, 0.1], 2)
    P = Dist.point_mass(3, 2)
    assert np.allclose(xor_convolve(X, P).dense(), X.translate(3).dense())
    with pytest.raises(ValueError):
        xor_convolve(X, Dist.point_mass(0, 3))


def test_pushforward_dist_matches_brute():
    rng = make_rng(16)
    for _ in range(15):
        n = int(rng.integers(1, 8))
        m = int(rng.integers(1, 8))
        X = random_dist(rng, n)
        cols = tuple(int(c) for c in rng.integers(0, 1 << m, size=n))
        pi = LinearMap(n, m, cols)
        ref = {}
        idx, w = X.items()
        for i, p in zip(idx, w):
            ref[pi.apply(int(i))] = ref.get(pi.apply(int(i)), 0.0) + p
        Y = pushforward_dist(X, pi)
        assert Y.n == m
        for k, v in ref.items():
            assert Y.weight(k) == pytest.approx(v, abs=1e-14)


def test_pushforward_large_out_dim_stays_sparse():
    X = Dist.point_mass(1, 2)
    pi = LinearMap(2, 14, (1, 2))
    Y = pushforward_dist(X, pi)
    assert not Y.is_dense and Y.weight(1) == 1.0


# -- JointDist ----------------------------------------------------------------


def random_joint_pair_forms(rng, n, arity, labels):
    """The same joint in sparse-key and dense form (when it fits)."""
    J = random_joint(rng, n, arity, labels)
    keys, w = J.items()
    sparse = JointDist(n, arity, labels, keys=keys, w=w)
    if n * arity <= 24:
        dense = JointDist(n, arity, labels, dense=J.dense())
        return sparse, dense
    return sparse, sparse


def test_joint_marginal_matches_brute():
    rng = make_rng(17)
    for _ in range(15):
        n = int(rng.integers(1, 4))
        arity = int(rng.integers(2, 5))
        labels = list("ABCD")[:arity]
        S, D = random_joint_pair_forms(rng, n, arity, labels)
        axes = [int(a) for a in rng.permutation(arity)[: rng.integers(1, arity + 1)]]
        ref = {}
        for key, w in joint_table(S).items():
            sub = 0
            for j, a in enumerate(axes):
                sub |= ((key >> (a * n)) & ((1 << n) - 1)) << (j * n)
            ref[sub] = ref.get(sub, 0.0) + w
        for J in (S, D):
            got = joint_table(J.marginal(axes))
            assert set(got) == {k for k, v in ref.items() if v > 0}
            for k in got:
                assert got[k] == pytest.approx(ref[k], abs=1e-13)


def test_joint_condition_matches_brute():
    rng = make_rng(18)
    for _ in range(15):
        n = int(rng.integers(1, 4))
        arity = int(rng.integers(2, 5))
        labels = list("ABCD")[:arity]
        S, D = random_joint_pair_forms(rng, n, arity, labels)
        a = int(rng.integers(0, arity))
        mask = (1 << n) - 1
        table = joint_table(S)
        vals = sorted({(k >> (a * n)) & mask for k in table})
        v = vals[0]
        ref = {}
        tot = 0.0
        for key, w in table.items():
            if (key >> (a * n)) & mask != v:
                continue
            low = key & ((1 << (a * n)) - 1)
            high = (key >> ((a + 1) * n)) << (a * n)
            ref[low | high] = ref.get(low | high, 0.0) + w
            tot += w
        for J in (S, D):
            C = J.condition(a, v)
            assert C.labels == tuple(labels[:a] + labels[a + 1:])
            got = joint_table(C)
            for k in ref:
                assert got[k] == pytest.approx(ref[k] / tot, abs=1e-12)


def test_joint_condition_zero_mass_raises():
    J = JointDist.from_mapping({(0, 0): 1.0}, 2, ["X", "Y"])
    with pytest.raises(ValueError):
        J.condition("Y", 3)


def test_joint_pushforward_matches_brute():
    rng = make_rng(19)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        S, D = random_joint_pair_forms(rng, n, 3, ["A", "B", "C"])
        ref = {}
        for key, w in joint_table(S).items():
            a = key & ((1 << n) - 1)
            b = (key >> n) & ((1 << n) - 1)
            c = (key >> (2 * n)) & ((1 << n) - 1)
            out = (a ^ b) | (c << n)
            ref[out] = ref.get(out, 0.0) + w
        for J in (S, D):
            P = J.pushforward([["A", "B"], ["C"]])
            assert P.labels == ("A^B", "C")
            got = joint_table(P)
            for k, v in ref.items():
                if v > 0:
                    assert got[k] == pytest.approx(v, abs=1e-13)


def test_joint_entropy_calculus_against_brute():
    rng = make_rng(20)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        J = random_joint(rng, n, 3, ["A", "B", "C"])
        t = joint_table(J)

        def h(axes):
            acc = {}
            for key, w in t.items():
                sub = tuple((key >> (a * n)) & ((1 << n) - 1) for a in axes)
                acc[sub] = acc.get(sub, 0.0) + w
            return plain_entropy(acc.values())

        assert J.entropy() == pytest.approx(h((0, 1, 2)), abs=1e-12)
        assert J.entropy("B") == pytest.approx(h((1,)), abs=1e-12)
        assert J.cond_entropy("A", "C") == pytest.approx(
            h((0, 2)) - h((2,)), abs=1e-12)
        assert J.mutual_info("A", "B") == pytest.approx(
            h((0,)) + h((1,)) - h((0, 1)), abs=1e-12)
        assert J.cond_mutual_info("A", "B", "C") == pytest.approx(
            h((0, 2)) + h((1, 2)) - h((0, 1, 2)) - h((2,)), abs=1e-12)


def test_joint_axis_errors():
    J = JointDist.from_mapping({(0, 1): 1.0, (1, 0): 1.0}, 1, ["X", "Y"])
    with pytest.raises(ValueError):
        J.mutual_info("X", "X")
    with pytest.raises(ValueError):
        J.marginal(["X", "X"])
    with pytest.raises(ValueError):
        J.entropy(5)
    with pytest.raises(ValueError):
        JointDist.from_mapping({(0,): 1.0}, 1, ["X", "X"])


def test_joint_slices_reconstruct_the_joint():
    rng = make_rng(21)
    J = random_joint(rng, 2, 3, ["A", "B", "C"])
    parts = J.slices("A", ["B", "C"])
    assert sum(p for _, p, _ in parts) == pytest.approx(1.0, abs=1e-12)
    t = joint_table(J)
    for (b, c), mass, law in parts:
        idx, w = law.items()
        assert abs(w.sum() - 1.0) < 1e-12
        for a, p in zip(idx, w):
            key = int(a) | (b << 2) | (c << 4)
            assert mass * p == pytest.approx(t[key], abs=1e-13)


def test_independent_product_and_joint_product():
    X = Dist.from_dense([0.5, 0.5, 0, 0], 2)
    Y = Dist.from_dense([0.25, 0.25, 0.25, 0.25], 2)
    J = JointDist.independent_product([X, Y], ["X", "Y"])
    assert J.mutual_info("X", "Y") == pytest.approx(0.0, abs=1e-14)
    assert J.entropy() == pytest.approx(X.entropy() + Y.entropy(), abs=1e-12)
    assert np.allclose(J.marginal_dist("X").dense(), X.dense())
    P = joint_product(J, J)
    assert P.labels == ("X", "Y", "X'", "Y'")
    assert P.entropy() == pytest.approx(2 * J.entropy(), abs=1e-12)


def test_to_dist_requires_arity_one():
    J = JointDist.from_mapping({(0, 1): 1.0}, 2, ["X", "Y"])
    with pytest.raises(ValueError):
        J.to_dist()
    assert J.marginal(["Y"]).to_dist().weight(1) == 1.0


def test_joint_json_round_trip():
    rng = make_rng(22)
    J = random_joint(rng, 3, 2, ["X", "Y"])
    back = JointDist.from_json(json.loads(json.dumps(J.to_json())))
    assert back.labels == J.labels
    assert joint_table(back) == pytest.approx(joint_table(J))


def test_dist_file_round_trips(tmp_path):
    X = Dist.from_sparse([1, 6], [0.25, 0.75], n=3)
    p = tmp_path / "x.json"
    p.write_text(json.dumps(X.to_json()))
    assert np.allclose(load_dist(str(p)).dense(), X.dense())
    q = tmp_path / "x.csv"
    q.write_text("\n".join(str(v) for v in X.dense()))
    assert np.allclose(load_dist(str(q)).dense(), X.dense())
    with pytest.raises(ValueError):
        dense_from_csv("1, 2, 3")


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_convolution_entropy_never_decreases(n, seed):
    # H[X+Y] >= max(H[X], H[Y]) for independent summands in a group
    rng = make_rng(seed)
    X = random_dist(rng, n)
    Y = random_dist(rng, n)
    h = entropy(xor_convolve(X, Y))
    assert h >= max(X.entropy(), Y.entropy()) - 1e-10
    assert h <= n * math.log(2) + 1e-12
