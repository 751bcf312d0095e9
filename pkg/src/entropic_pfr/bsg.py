"""Entropic Balog-Szemeredi-Gowers, conditionally independent trials, and
the endgame tables over the sum variables U, V, W, S.

Given independent X1, X2 and fresh copies X~1, X~2:

    U = X1 ^ X2,  V = X~1 ^ X2,  W = X1 ^ X~1,  S = X1 ^ X2 ^ X~1 ^ X~2,

so U ^ V ^ W = 0 and S is the sum of all four. The joint law of (U, V, S)
determines every entropy the endgame estimates need; swapping X1 with X~1
exchanges U and V while fixing S, which forces I[W:U|S] = I[V:W|S] exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dists import (DENSE_BITS, Dist, JointDist, _clean_wht_output,
                    _entropy_weights, fwht)
from .ruzsa import RefPair, _entropy_rows, rdist, rdist_one_many, rdist_paired

__all__ = [
    "BsgReport",
    "bsg_check",
    "cond_indep_trials",
    "trials_entropy_gap",
    "EndgameTables",
    "endgame_tables",
    "EndgameChoice",
    "abstract_endgame",
]

ENDGAME_DENSE_BITS = 21   # spectral path: one length-8^n transform
ENDGAME_SUPPORT_CAP = 1 << 24


@dataclass(frozen=True)
class BsgReport:
    """Average slice distance against 3 I[A:B] + 2H[A^B] - H[A] - H[B]."""
    lhs: float
    i_AB: float
    rhs: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.slack >= -1e-9


def bsg_check(J: JointDist, a=0, b=1) -> BsgReport:
    """Check the sum-conditioned distance bound on a joint pair (A, B).

    Conditioning both coordinates on Z = A ^ B and averaging d over the
    slices is controlled by the mutual information between A and B.
    """
    J3 = J.pushforward([[a], [b], [a, b]], ["A", "B", "Z"])
    sl_a = J3.slices("A", "Z")
    sl_b = J3.slices("B", "Z")
    probs = np.array([p for _, p, _ in sl_a])
    D = rdist_paired([d for _, _, d in sl_a], [d for _, _, d in sl_b])
    lhs = float(probs @ D)
    i_ab = J.mutual_info(a, b)
    rhs = (3.0 * i_ab + 2.0 * J3.entropy("Z")
           - J3.entropy("A") - J3.entropy("B"))
    return BsgReport(lhs, i_ab, rhs, rhs - lhs)


def cond_indep_trials(J: JointDist, x=0, y=1) -> JointDist:
    """Two trials of X that are independent conditionally on Y.

    p(x1, x2, y) = p(x1, y) p(x2, y) / p(y); axes come back as (X1, X2, Y).
    """
    M = J.marginal([x, y])
    n = M.n
    parts = M.slices(0, 1)
    keys_out: List[np.ndarray] = []
    w_out: List[np.ndarray] = []
    for (yval,), mass, law in parts:
        idx, w = law.items()
        pair = (idx[:, None] | (idx[None, :] << n)).ravel()
        keys_out.append(pair | (yval << (2 * n)))
        w_out.append(mass * np.outer(w, w).ravel())
    return JointDist(n, 3, ["X1", "X2", "Y"],
                     keys=np.concatenate(keys_out), w=np.concatenate(w_out))


def trials_entropy_gap(J: JointDist, x=0, y=1) -> float:
    """H[X1, X2, Y] - (2 H[X, Y] - H[Y]); identically zero."""
    T = cond_indep_trials(J, x, y)
    M = J.marginal([x, y])
    return T.entropy() - (2.0 * M.entropy() - M.entropy(1))


# -- endgame tables ----------------------------------------------------------

@dataclass(frozen=True)
class EndgameTables:
    joint_UVS: JointDist
    I1: float
    I2: float
    I3: float
    H_S: float
    k: float


def _uvs_spectral(X1: Dist, X2: Dist) -> JointDist:
    n = X1.n
    a = np.arange(1 << n)
    s1 = fwht(X1.dense())
    s2 = fwht(X2.dense())
    T = a[:, None] ^ a[None, :]
    cube = (s1[T][:, None, :]            # alpha ^ gamma over (gamma, ., alpha)
            * s1[T][:, :, None]          # beta ^ gamma over (gamma, beta, .)
            * s2[T[:, :, None] ^ a[None, None, :]]
            * s2[a][:, None, None])
    flat = fwht(cube.ravel()) / (1 << (3 * n))
    return JointDist(n, 3, ["U", "V", "S"], dense=_clean_wht_output(flat, "endgame"))


def _uvs_sparse(X1: Dist, X2: Dist) -> JointDist:
    n = X1.n
    i1, w1 = X1.items()
    i2, w2 = X2.items()
    if (len(i1) * len(i2)) ** 2 > ENDGAME_SUPPORT_CAP:
        raise ValueError("endgame support enumeration too large")
    # Full 4-fold product over (x1, x2, x~1, x~2), mapped to (u, v, s).
    x1 = i1[:, None, None, None]
    x2 = i2[None, :, None, None]
    t1 = i1[None, None, :, None]
    t2 = i2[None, None, None, :]
    uu = (x1 ^ x2)
    vv = (t1 ^ x2)
    ss = (x1 ^ x2 ^ t1 ^ t2)
    keys = (uu | (vv << n) | (ss << (2 * n))).ravel()
    w = (w1[:, None, None, None] * w2[None, :, None, None]
         * w1[None, None, :, None] * w2[None, None, None, :]).ravel()
    return JointDist(n, 3, ["U", "V", "S"], keys=keys, w=w)


def endgame_tables(X1: Dist, X2: Dist) -> EndgameTables:
    """Joint law of (U, V, S) plus the three conditional informations.

    Dense inputs up to n = 7 go through one Walsh-Hadamard transform on 3n
    bits; larger or sparse inputs enumerate the four-fold support product.
    """
    if X1.n != X2.n:
        raise ValueError("dimension mismatch")
    n = X1.n
    if 3 * n <= ENDGAME_DENSE_BITS:
        J = _uvs_spectral(X1, X2)
    else:
        J = _uvs_sparse(X1, X2)
    I1 = J.cond_mutual_info("U", "V", "S")
    JW = J.pushforward([["U", "V"], ["U"], ["S"]], ["W", "U", "S"])
    I2 = JW.cond_mutual_info("W", "U", "S")
    JW2 = J.pushforward([["V"], ["U", "V"], ["S"]], ["V", "W", "S"])
    I3 = JW2.cond_mutual_info("V", "W", "S")
    return EndgameTables(J, I1, I2, I3, J.entropy("S"), rdist(X1, X2))


# -- the abstract endgame choice ---------------------------------------------

@dataclass(frozen=True)
class EndgameChoice:
    T1p: Dist
    T2p: Dist
    psi: float
    bound: float
    choice: Tuple[int, int, int, int]   # (gamma, alpha, beta, t)


def abstract_endgame(ref: RefPair, J: JointDist, X1: Dist, X2: Dist,
                     t1=0, t2=1) -> EndgameChoice:
    """Pick the best conditioned pair from a triple summing to zero.

    T3 := T1 ^ T2. Over all permutations (alpha, beta, gamma) of the triple
    and all t in the support of T_gamma, score the conditioned pair
    (T_alpha | T_gamma = t, T_beta | T_gamma = t) by

        psi[A; B] = d[A; B] + eta (d[X01; A] - d[X01; X1])
                            + eta (d[X02; B] - d[X02; X2])

    and return the exact minimizer, first in (gamma, alpha, beta, t) order on
    ties. Its psi is bounded by delta + (eta/3)(delta + Sigma), where delta
    sums the three pairwise mutual informations and Sigma the distance
    increments from the reference pair to the T's.
    """
    eta = ref.eta
    d01 = rdist(ref.X01, X1)
    d02 = rdist(ref.X02, X2)
    n = J.n

    if 2 * n <= DENSE_BITS:
        # All six conditional families are reindexings of the pair table
        # P[b, a] = P(T1 = a, T2 = b); gather them instead of materializing
        # the three-axis joint, and score whole rows at once.
        M = J if J.arity == 2 and (t1, t2) == (0, 1) else J.marginal([t1, t2])
        N = 1 << n
        P2 = M.dense().reshape(N, N)
        idx = np.arange(N)
        X = idx[:, None] ^ idx[None, :]
        cond = {
            (0, 1): P2.T,                        # [t, b] = P(T1=t, T2=b)
            (0, 2): P2[X, idx[:, None]],         # [t, c] = P(T1=t, T3=c)
            (1, 0): P2,                          # [t, a] = P(T2=t, T1=a)
            (1, 2): P2[idx[:, None], X],         # [t, c] = P(T2=t, T3=c)
            (2, 0): P2[X, idx[None, :]],         # [t, a] = P(T3=t, T1=a)
            (2, 1): P2[idx[None, :], X],         # [t, b] = P(T3=t, T2=b)
        }
        marg = [cond[(j, 1 if j == 0 else 0)].sum(axis=1) for j in range(3)]
        # H[Ti, Tj] is the same for all pairs: each determines the third.
        H12 = _entropy_weights(P2.ravel())
        H = [_entropy_weights(m) for m in marg]
        delta = (H[0] + H[1] + H[2]) * 2.0 - 3.0 * H12
        sigma = 0.0
        for j in range(3):
            Tj = Dist(n, dense=marg[j])
            sigma += (rdist(ref.X01, Tj) - d01) + (rdist(ref.X02, Tj) - d02)
        bound = delta + (eta / 3.0) * (delta + sigma)

        w01 = ref.X01.dense()
        w02 = ref.X02.dense()
        s01, s02 = fwht(w01), fwht(w02)
        h01 = _entropy_weights(w01)
        h02 = _entropy_weights(w02)

        def conv_entropy(spec: np.ndarray) -> np.ndarray:
            rows = fwht(spec) / N
            rows = np.maximum(rows, 0.0)
            rows /= rows.sum(axis=-1, keepdims=True)
            return _entropy_rows(rows)

        best_val = np.inf
        best_key = None
        for gamma in range(3):
            others = [i for i in range(3) if i != gamma]
            supp = np.flatnonzero(marg[gamma] > 0)
            rows = {ax: cond[(gamma, ax)][supp] / marg[gamma][supp, None]
                    for ax in others}
            hl = {ax: _entropy_rows(rows[ax]) for ax in others}
            sl = {ax: fwht(rows[ax]) for ax in others}
            ref1 = {ax: conv_entropy(sl[ax] * s01) - 0.5 * hl[ax] - 0.5 * h01
                    for ax in others}
            ref2 = {ax: conv_entropy(sl[ax] * s02) - 0.5 * hl[ax] - 0.5 * h02
                    for ax in others}
            for alpha in others:
                for beta in others:
                    if beta == alpha:
                        continue
                    D = (conv_entropy(sl[alpha] * sl[beta])
                         - 0.5 * hl[alpha] - 0.5 * hl[beta])
                    psis = D + eta * (ref1[alpha] - d01) + eta * (ref2[beta] - d02)
                    pos = int(np.argmin(psis))
                    if psis[pos] < best_val:
                        best_val = float(psis[pos])
                        best_key = (gamma, alpha, beta, int(supp[pos]),
                                    rows[alpha][pos], rows[beta][pos])
        assert best_key is not None
        gamma, alpha, beta, t, rowa, rowb = best_key
        return EndgameChoice(Dist(n, dense=rowa), Dist(n, dense=rowb),
                             best_val, bound, (gamma, alpha, beta, t))

    J3 = J.pushforward([[t1], [t2], [t1, t2]], ["T1", "T2", "T3"])
    delta = (J3.mutual_info(0, 1) + J3.mutual_info(0, 2) + J3.mutual_info(1, 2))
    sigma = 0.0
    for j in range(3):
        Tj = J3.marginal_dist(j)
        sigma += (rdist(ref.X01, Tj) - d01) + (rdist(ref.X02, Tj) - d02)
    bound = delta + (eta / 3.0) * (delta + sigma)

    best: Optional[EndgameChoice] = None
    for gamma in range(3):
        others = [i for i in range(3) if i != gamma]
        laws = {}
        tvals: List[int] = []
        for axis in others:
            sl = J3.slices(axis, gamma)
            laws[axis] = [d for _, _, d in sl]
            tvals = [v[0] for v, _, _ in sl]
        ref1 = {ax: rdist_one_many(ref.X01, laws[ax]) for ax in others}
        ref2 = {ax: rdist_one_many(ref.X02, laws[ax]) for ax in others}
        for alpha in others:
            for beta in others:
                if beta == alpha:
                    continue
                D = rdist_paired(laws[alpha], laws[beta])
                psis = D + eta * (ref1[alpha] - d01) + eta * (ref2[beta] - d02)
                for pos, t in enumerate(tvals):
                    psi = float(psis[pos])
                    if best is None or psi < best.psi:
                        best = EndgameChoice(laws[alpha][pos], laws[beta][pos],
                                             psi, bound, (gamma, alpha, beta, t))
    assert best is not None
    return best
