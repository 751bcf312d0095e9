"""Ruzsa distance, batched evaluation, conditional forms, inequality corpus."""
import math

import numpy as np
import pytest

from entropic_pfr.dists import (Dist, JointDist, uniform_on,
                                uniform_on_subgroup, xor_convolve)
from entropic_pfr.groups import span
from entropic_pfr.randgen import make_rng, random_dist, random_joint
from entropic_pfr.ruzsa import (ETA_MAX, IneqReport, RefPair,
                                check_cond_distance, check_double_shift,
                                check_madiman, check_ruzsa_diff,
                                check_submodularity, check_sum_shift,
                                check_sum_shift_cond, check_triangle,
                                check_xor_lower, cond_rdist,
                                cond_rdist_via_joint, one, rdist,
                                rdist_matrix, rdist_one_many, rdist_paired,
                                slices_of)


def test_distance_of_three_point_uniform_with_itself():
    # uniform on {0, 1, 2} in F_2^2: the convolution puts 3/9 on 0 and 2/9
    # on each of 1, 2, 3, giving d = (2/3) log(3/2)
    U = uniform_on([0, 1, 2], 2)
    assert rdist(U, U) == pytest.approx((2.0 / 3.0) * math.log(1.5), abs=1e-12)


def test_distance_symmetry_and_nonnegativity():
    rng = make_rng(30)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        X = random_dist(rng, n)
        Y = random_dist(rng, n)
        d = rdist(X, Y)
        assert d >= -1e-12
        assert d == pytest.approx(rdist(Y, X), abs=1e-12)


def test_distance_vanishes_exactly_on_coset_pairs():
    H = span([0b011, 0b100], 5)
    A = uniform_on_subgroup(H).translate(0b01000)
    B = uniform_on_subgroup(H).translate(0b10001)
    assert rdist(A, B) == pytest.approx(0.0, abs=1e-12)
    assert rdist(Dist.point_mass(7, 5), Dist.point_mass(21, 5)) == 0.0


def test_distance_invariant_under_translation():
    rng = make_rng(31)
    X = random_dist(rng, 5)
    Y = random_dist(rng, 5)
    assert rdist(X.translate(9), Y.translate(17)) == pytest.approx(
        rdist(X, Y), abs=1e-12)


def test_batched_distances_match_pairwise_loop():
    rng = make_rng(32)
    xs = [random_dist(rng, 5) for _ in range(7)]
    ys = [random_dist(rng, 5) for _ in range(5)]
    M = rdist_matrix(xs, ys)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert M[i, j] == pytest.approx(rdist(x, y), abs=1e-11)
    row = rdist_one_many(xs[0], ys)
    assert np.allclose(row, M[0], atol=1e-12)
    diag = rdist_paired(xs[:5], ys)
    assert np.allclose(diag, np.diag(M[:5]), atol=1e-12)
    assert rdist_matrix([], ys).shape == (0, 5)
    with pytest.raises(ValueError):
        rdist_paired(xs, ys)


def test_batched_distances_large_dim_fallback():
    # n > 16 leaves the dense-stack fast path
    rng = make_rng(33)
    xs = [Dist.from_sparse(rng.integers(0, 1 << 18, 4), rng.random(4), n=18)
          for _ in range(2)]
    M = rdist_matrix(xs, xs)
    assert M[0, 1] == pytest.approx(rdist(xs[0], xs[1]), abs=1e-11)


def test_conditional_distance_agrees_between_definitions():
    rng = make_rng(34)
    for _ in range(15):
        n = int(rng.integers(1, 5))
        JX = random_joint(rng, n, 2, ["X", "Z"])
        JY = random_joint(rng, n, 2, ["Y", "W"])
        lhs = cond_rdist(slices_of(JX, "X", "Z"), slices_of(JY, "Y", "W"))
        rhs = cond_rdist_via_joint(JX, JY)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_trivial_conditioning_recovers_plain_distance():
    rng = make_rng(35)
    X = random_dist(rng, 4)
    Y = random_dist(rng, 4)
    assert cond_rdist(one(X), one(Y)) == pytest.approx(rdist(X, Y), abs=1e-12)


def test_ref_pair_validation_and_tau():
    rng = make_rng(36)
    X01 = random_dist(rng, 4)
    X02 = random_dist(rng, 4)
    ref = RefPair(X01, X02)
    # at the swapped start the tau value collapses to (1 + 2 eta) d
    tau0 = ref.tau(X02, X01)
    assert tau0 == pytest.approx((1 + 2 * ref.eta) * rdist(X01, X02), abs=1e-12)
    k, a, b = ref.tau_parts(X02, X01)
    assert tau0 == pytest.approx(k + ref.eta * (a + b), abs=1e-14)
    with pytest.raises(ValueError):
        RefPair(X01, X02, eta=0.0)
    with pytest.raises(ValueError):
        RefPair(X01, X02, eta=ETA_MAX)
    with pytest.raises(ValueError):
        RefPair(X01, random_dist(rng, 5))
    assert ETA_MAX == pytest.approx(1.0 / (4.0 + math.sqrt(17.0)))
    assert 1.0 / 9.0 < ETA_MAX


def test_ineq_report_slack_semantics():
    r = IneqReport("demo", 1.0, 2.0)
    assert r.slack == pytest.approx(1.0) and r.holds
    bad = IneqReport("demo", 2.0, 1.0)
    assert not bad.holds


def test_inequality_corpus_on_random_inputs():
    rng = make_rng(37)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        X, Y, Z, W = (random_dist(rng, n) for _ in range(4))
        assert check_triangle(X, Y, Z).holds
        assert check_madiman(X, Y, Z).holds
        assert check_sum_shift(X, Y, Z).holds
        assert check_sum_shift_cond(X, Y, Z).holds
        assert check_double_shift(X, Y, Z, W).holds
        assert check_ruzsa_diff(X, Y).holds
        J2 = random_joint(rng, n, 2, ["X", "Z"])
        K2 = random_joint(rng, n, 2, ["Y", "W"])
        assert check_cond_distance(J2, K2).holds
        assert check_xor_lower(random_joint(rng, n, 2, ["A", "B"])).holds
        assert check_submodularity(random_joint(rng, min(n, 4), 3,
                                                ["A", "B", "C"])).holds


def test_equality_cases_pin_the_constants():
    H = span([1, 2, 4], 4)
    U = uniform_on_subgroup(H)
    P = Dist.point_mass(9, 4)
    # |H[U] - H[P]| = log 8 and d[U; P] = log(8)/2: ruzsa-diff is tight
    r = check_ruzsa_diff(U, P)
    assert r.slack == pytest.approx(0.0, abs=1e-12)
    # a point-mass summand shifts without smoothing: Madiman is tight
    rng = make_rng(38)
    X, Y = random_dist(rng, 4), random_dist(rng, 4)
    m = check_madiman(X, Y, P)
    assert m.lhs == pytest.approx(m.rhs, abs=1e-12)
    # triangle through one of its own endpoints costs d[X;X]
    t = check_triangle(X, Y, X)
    assert t.slack == pytest.approx(rdist(X, X), abs=1e-11)


def test_sum_shift_entropy_forms():
    # the rhs of sum-shift is (H[Y+Z] - H[Y])/2, nonnegative by the
    # convolution entropy bound, so d[X;Y+Z] never undercuts d[X;Y] by more
    rng = make_rng(39)
    X, Y, Z = (random_dist(rng, 5) for _ in range(3))
    r = check_sum_shift(X, Y, Z)
    assert r.rhs >= -1e-12
    assert r.lhs == pytest.approx(
        rdist(X, xor_convolve(Y, Z)) - rdist(X, Y), abs=1e-12)
