"""Entropic Ruzsa distance over F_2^n and the inequality corpus around it.

The distance of two distributions is

    d[X; Y] = H[X' ^ Y'] - H[X']/2 - H[Y']/2

with X', Y' independent copies; addition and subtraction coincide with XOR
here. Conditional distances average d over independent conditioning values
(slice form); an equivalent joint-entropy form is kept alongside as a
cross-check. Each check_* function evaluates one inequality exactly on
concrete distributions and reports lhs, rhs and slack; slack below -1e-9
counts as a violation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .dists import (
    Dist,
    ENTROPY_FLOOR,
    JointDist,
    entropy,
    fwht,
    joint_product,
    xor_convolve,
)

__all__ = [
    "ETA_MAX",
    "SLACK_TOL",
    "IneqReport",
    "RefPair",
    "rdist",
    "rdist_matrix",
    "rdist_one_many",
    "rdist_paired",
    "cond_rdist",
    "cond_rdist_via_joint",
    "one",
    "slices_of",
    "check_triangle",
    "check_madiman",
    "check_cond_distance",
    "check_sum_shift",
    "check_sum_shift_cond",
    "check_double_shift",
    "check_ruzsa_diff",
    "check_submodularity",
    "check_xor_lower",
]

# The tau functional needs eta strictly below 1/(4 + sqrt 17); the default 1/9
# leaves room in every estimate downstream.
ETA_MAX = 1.0 / (4.0 + math.sqrt(17.0))
ETA_DEFAULT = 1.0 / 9.0
SLACK_TOL = 1e-9

Slices = Sequence[Tuple[float, Dist]]


@dataclass(frozen=True)
class IneqReport:
    """One evaluated inequality: lhs <= rhs expected, slack = rhs - lhs."""
    name: str
    lhs: float
    rhs: float
    slack: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "slack", self.rhs - self.lhs)
        object.__setattr__(self, "holds", self.slack >= -SLACK_TOL)


def rdist(X: Dist, Y: Dist) -> float:
    return entropy(xor_convolve(X, Y)) - 0.5 * X.entropy() - 0.5 * Y.entropy()


def one(X: Dist) -> List[Tuple[float, Dist]]:
    """A distribution as a trivial one-slice conditional."""
    return [(1.0, X)]


# -- batched distance evaluation -------------------------------------------

def _entropy_rows(w: np.ndarray) -> np.ndarray:
    mx = w.max(axis=-1, keepdims=True)
    safe = np.where(w > ENTROPY_FLOOR * mx, w, 1.0)
    return -np.einsum("...i,...i->...", safe, np.log(safe))

def _stack_dense(dists: Sequence[Dist]) -> np.ndarray:
    return np.stack([d.dense() for d in dists])


def rdist_matrix(xs: Sequence[Dist], ys: Sequence[Dist]) -> np.ndarray:
    """All pairwise distances d[xs[i]; ys[j]] as an (len(xs), len(ys)) array."""
    if not xs or not ys:
        return np.zeros((len(xs), len(ys)))
    n = xs[0].n
    if any(d.n != n for d in xs) or any(d.n != n for d in ys):
        raise ValueError("dimension mismatch")
    if n > 16:
        return np.array([[rdist(x, y) for y in ys] for x in xs])
    N = 1 << n
    wx = _stack_dense(xs)
    wy = _stack_dense(ys)
    hx = _entropy_rows(wx)
    hy = _entropy_rows(wy)
    sx = fwht(wx)
    sy = fwht(wy)
    out = np.empty((len(xs), len(ys)))
    chunk = max(1, (1 << 22) // (len(ys) * N))
    for lo in range(0, len(xs), chunk):
        hi = min(lo + chunk, len(xs))
        prod = sx[lo:hi, None, :] * sy[None, :, :]
        conv = fwht(prod) / N
        conv = np.maximum(conv, 0.0)
        conv /= conv.sum(axis=-1, keepdims=True)
        out[lo:hi] = _entropy_rows(conv)
    return out - 0.5 * hx[:, None] - 0.5 * hy[None, :]


def rdist_one_many(X: Dist, ys: Sequence[Dist]) -> np.ndarray:
    return rdist_matrix([X], ys)[0]


def rdist_paired(xs: Sequence[Dist], ys: Sequence[Dist]) -> np.ndarray:
    """Elementwise distances d[xs[i]; ys[i]] for aligned slice lists."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    if not xs:
        return np.zeros(0)
    n = xs[0].n
    if n > 16:
        return np.array([rdist(x, y) for x, y in zip(xs, ys)])
    N = 1 << n
    wx = _stack_dense(xs)
    wy = _stack_dense(ys)
    conv = fwht(fwht(wx) * fwht(wy)) / N
    conv = np.maximum(conv, 0.0)
    conv /= conv.sum(axis=-1, keepdims=True)
    return _entropy_rows(conv) - 0.5 * _entropy_rows(wx) - 0.5 * _entropy_rows(wy)


def cond_rdist(slices_x: Slices, slices_y: Slices) -> float:
    """d[X|Z; Y|W] as the probability-weighted average of slice distances.

    The two conditionings are independent, so every (z, w) pair contributes
    p(z) p(w) d[(X|Z=z); (Y|W=w)].
    """
    px = np.array([p for p, _ in slices_x])
    py = np.array([p for p, _ in slices_y])
    D = rdist_matrix([d for _, d in slices_x], [d for _, d in slices_y])
    return float(px @ D @ py)


def cond_rdist_via_joint(JX: JointDist, JY: JointDist,
                         x=0, z=1, y=0, w=1) -> float:
    """The same conditional distance through joint entropies.

    Computes H[X^Y | Z,W] - H[X|Z]/2 - H[Y|W]/2 on the independent product
    of the two joints. Agrees with the slice average to numerical precision;
    kept as an independent path for tests.
    """
    P = joint_product(JX.marginal([x, z]), JY.marginal([y, w]))
    S = P.pushforward([[0, 2], [1], [3]])
    return (S.cond_entropy(0, [1, 2])
            - 0.5 * JX.cond_entropy(x, z)
            - 0.5 * JY.cond_entropy(y, w))


def slices_of(J: JointDist, target, given) -> List[Tuple[float, Dist]]:
    return [(p, d) for _, p, d in J.slices(target, given)]


# -- the reference pair and tau --------------------------------------------

@dataclass(frozen=True)
class RefPair:
    """The fixed pair (X01, X02) every tau evaluation refers back to."""
    X01: Dist
    X02: Dist
    eta: float = ETA_DEFAULT

    def __post_init__(self):
        if not 0.0 < self.eta < ETA_MAX:
            raise ValueError(f"eta must lie in (0, {ETA_MAX:.6f})")
        if self.X01.n != self.X02.n:
            raise ValueError("reference distributions live in different groups")

    @property
    def n(self) -> int:
        return self.X01.n

    def tau(self, X1: Dist, X2: Dist) -> float:
        return (rdist(X1, X2)
                + self.eta * rdist(self.X01, X1)
                + self.eta * rdist(self.X02, X2))

    def tau_parts(self, X1: Dist, X2: Dist) -> Tuple[float, float, float]:
        return rdist(X1, X2), rdist(self.X01, X1), rdist(self.X02, X2)


# -- inequality corpus ------------------------------------------------------

def check_triangle(X: Dist, Y: Dist, Z: Dist) -> IneqReport:
    """d[X;Y] <= d[X;Z] + d[Z;Y]."""
    return IneqReport("triangle", rdist(X, Y), rdist(X, Z) + rdist(Z, Y))


def check_madiman(X: Dist, Y: Dist, Z: Dist) -> IneqReport:
    """H[X+Y+Z] - H[X+Y] <= H[Y+Z] - H[Y] for independent X, Y, Z."""
    XY = xor_convolve(X, Y)
    YZ = xor_convolve(Y, Z)
    lhs = entropy(xor_convolve(XY, Z)) - entropy(XY)
    rhs = entropy(YZ) - Y.entropy()
    return IneqReport("madiman", lhs, rhs)


def check_cond_distance(JX: JointDist, JY: JointDist,
                        x=0, z=1, y=0, w=1) -> IneqReport:
    """d[X|Z; Y|W] <= d[X;Y] + I[X:Z]/2 + I[Y:W]/2."""
    lhs = cond_rdist(slices_of(JX, x, z), slices_of(JY, y, w))
    rhs = (rdist(JX.marginal_dist(x), JY.marginal_dist(y))
           + 0.5 * JX.mutual_info(x, z) + 0.5 * JY.mutual_info(y, w))
    return IneqReport("cond-distance", lhs, rhs)


def check_sum_shift(X: Dist, Y: Dist, Z: Dist) -> IneqReport:
    """d[X;Y+Z] - d[X;Y] <= (H[Y+Z] - H[Y])/2 for independent Y, Z."""
    YZ = xor_convolve(Y, Z)
    lhs = rdist(X, YZ) - rdist(X, Y)
    rhs = 0.5 * (entropy(YZ) - Y.entropy())
    return IneqReport("sum-shift", lhs, rhs)


def check_sum_shift_cond(X: Dist, Y: Dist, Z: Dist) -> IneqReport:
    """d[X; Y|Y+Z] - d[X;Y] <= (H[Y+Z] - H[Z])/2 for independent Y, Z."""
    J = JointDist.independent_product([Y, Z], ["Y", "Z"])
    YS = J.pushforward([["Y"], ["Y", "Z"]], ["Y", "S"])
    lhs = cond_rdist(one(X), slices_of(YS, "Y", "S")) - rdist(X, Y)
    rhs = 0.5 * (YS.entropy("S") - Z.entropy())
    return IneqReport("sum-shift-cond", lhs, rhs)


def check_double_shift(X: Dist, Y: Dist, Z: Dist, Zp: Dist) -> IneqReport:
    """d[X; Y+Z | Y+Z+Z'] - d[X;Y] <= (H[Y+Z+Z'] + H[Y+Z] - H[Y] - H[Z'])/2.

    Y, Z, Z' independent.
    """
    J = JointDist.independent_product([Y, Z, Zp], ["Y", "Z", "Zp"])
    TU = J.pushforward([["Y", "Z"], ["Y", "Z", "Zp"]], ["T", "U"])
    lhs = cond_rdist(one(X), slices_of(TU, "T", "U")) - rdist(X, Y)
    rhs = 0.5 * (TU.entropy("U") + TU.entropy("T") - Y.entropy() - Zp.entropy())
    return IneqReport("double-shift", lhs, rhs)


def check_ruzsa_diff(X: Dist, Y: Dist) -> IneqReport:
    """|H[X] - H[Y]| <= 2 d[X;Y]."""
    return IneqReport("ruzsa-diff", abs(X.entropy() - Y.entropy()), 2.0 * rdist(X, Y))


def check_submodularity(J: JointDist, a=0, b=1, given=2) -> IneqReport:
    """I[a : b | given] >= 0."""
    return IneqReport("submodularity", 0.0, J.cond_mutual_info(a, b, given))


def check_xor_lower(J: JointDist, a=0, b=1) -> IneqReport:
    """max(H[X], H[Y]) - I[X:Y] <= H[X^Y] on a joint pair."""
    lhs = max(J.entropy(a), J.entropy(b)) - J.mutual_info(a, b)
    rhs = J.pushforward([[a, b]]).entropy()
    return IneqReport("xor-lower", lhs, rhs)
