"""Probability distributions on F_2^n and its small powers.

Entropy calculus (joint/conditional entropy, mutual information), XOR
convolution through the fast Walsh-Hadamard transform, pushforwards under
GF(2)-linear maps, and conditioning. Natural logarithms throughout.

A Dist is dense (table of length 2^n) or sparse (support indices plus
weights); a JointDist over (F_2^n)^k packs the k coordinates into a single
flat key, axis 0 in the lowest n bits. Every operation must give the same
numbers (to 1e-12) under either representation; tests enforce this.
"""
from __future__ import annotations

import json
import warnings
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .groups import LinearMap, SubgroupBasis

__all__ = [
    "Dist",
    "JointDist",
    "fwht",
    "uniform_on",
    "uniform_on_subgroup",
    "entropy",
    "xor_convolve",
    "pushforward_dist",
    "joint_product",
    "load_dist",
]

# Dense tables are capped at 2^24 entries (Dist and JointDist alike); a sparse
# JointDist additionally needs its packed key n*k to fit an int64.
DENSE_BITS = 24
ENTROPY_FLOOR = 1e-15  # entries below this fraction of max count as zero
WHT_CLAMP_WARN = 1e-9  # pre-clamp negative mass worth reporting


def fwht(a: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (length a power of two).

    Unnormalized: applying twice multiplies by the length.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        b = a.reshape(a.shape[:-1] + (n // (2 * h), 2, h))
        diff = b[..., 0, :] - b[..., 1, :]
        b[..., 0, :] += b[..., 1, :]
        b[..., 1, :] = diff
        h *= 2
    return a


def _entropy_weights(w: np.ndarray) -> float:
    """Sum of -p log p with the zero/rounding policy applied."""
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        return 0.0
    m = w.max()
    if m <= 0.0:
        return 0.0
    live = w[w > ENTROPY_FLOOR * m]
    return float(-np.dot(live, np.log(live)))


def _clean_wht_output(w: np.ndarray, context: str) -> np.ndarray:
    """Clamp round-off negatives from an inverse transform and renormalize."""
    neg = float(w.min())
    if neg < -WHT_CLAMP_WARN:
        warnings.warn(f"{context}: pre-clamp deviation {-neg:.3e} exceeds {WHT_CLAMP_WARN:.0e}")
    w = np.where(w > ENTROPY_FLOOR * w.max(), w, 0.0)
    return w / w.sum()


def _group(keys: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Accumulate weights sharing a key; keys returned sorted ascending."""
    ks, inv = np.unique(keys, return_inverse=True)
    return ks, np.bincount(inv, weights=w, minlength=len(ks))


class Dist:
    """A probability distribution on F_2^n, dense or sparse."""

    __slots__ = ("n", "_dense", "_idx", "_w", "_H")

    def __init__(self, n: int, dense: Optional[np.ndarray] = None,
                 idx: Optional[np.ndarray] = None, w: Optional[np.ndarray] = None):
        if n < 0 or n > DENSE_BITS:
            raise ValueError(f"ambient dimension {n} out of range")
        self.n = n
        self._H: Optional[float] = None
        if dense is not None:
            dense = np.asarray(dense, dtype=np.float64)
            if dense.shape != (1 << n,):
                raise ValueError("dense table has wrong length")
            if dense.min() < 0:
                raise ValueError("negative weight")
            total = dense.sum()
            if total <= 0:
                raise ValueError("zero total mass")
            self._dense = dense / total
            self._idx = None
            self._w = None
        else:
            assert idx is not None and w is not None
            idx = np.asarray(idx, dtype=np.int64)
            w = np.asarray(w, dtype=np.float64)
            keep = w > 0
            if w.min(initial=0.0) < 0:
                raise ValueError("negative weight")
            idx, w = idx[keep], w[keep]
            if len(idx) == 0:
                raise ValueError("zero total mass")
            if idx.min() < 0 or idx.max() >= (1 << n):
                raise ValueError("support exceeds ambient dimension")
            idx, w = _group(idx, w)
            self._dense = None
            self._idx = idx
            self._w = w / w.sum()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_dense(weights: Sequence[float], n: int) -> "Dist":
        return Dist(n, dense=np.asarray(weights, dtype=np.float64))

    @staticmethod
    def from_sparse(mapping_or_idx, w=None, *, n: int) -> "Dist":
        if w is None:
            items = sorted(mapping_or_idx.items())
            idx = np.array([k for k, _ in items], dtype=np.int64)
            w = np.array([v for _, v in items], dtype=np.float64)
        else:
            idx = np.asarray(mapping_or_idx, dtype=np.int64)
            w = np.asarray(w, dtype=np.float64)
        return Dist(n, idx=idx, w=w)

    @staticmethod
    def point_mass(x: int, n: int) -> "Dist":
        return Dist(n, idx=np.array([x]), w=np.array([1.0]))

    # -- representation ----------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        out = np.zeros(1 << self.n)
        out[self._idx] = self._w
        return out

    def to_dense(self) -> "Dist":
        return self if self.is_dense else Dist(self.n, dense=self.dense())

    def to_sparse(self) -> "Dist":
        if not self.is_dense:
            return self
        idx = np.nonzero(self._dense)[0]
        return Dist(self.n, idx=idx, w=self._dense[idx])

    def items(self) -> Tuple[np.ndarray, np.ndarray]:
        """Support indices (ascending) and their weights."""
        if self.is_dense:
            idx = np.nonzero(self._dense)[0]
            return idx.astype(np.int64), self._dense[idx]
        return self._idx, self._w

    def support(self) -> np.ndarray:
        return self.items()[0]

    def support_size(self) -> int:
        return len(self.support())

    def weight(self, x: int) -> float:
        if self.is_dense:
            return float(self._dense[x])
        pos = np.searchsorted(self._idx, x)
        if pos < len(self._idx) and self._idx[pos] == x:
            return float(self._w[pos])
        return 0.0

    def argmax(self) -> int:
        """Heaviest point; smallest index on ties."""
        idx, w = self.items()
        return int(idx[np.argmax(w)])

    # -- calculus ----------------------------------------------------------

    def entropy(self) -> float:
        if self._H is None:
            self._H = _entropy_weights(self._w if not self.is_dense else self._dense)
        return self._H

    def translate(self, g: int) -> "Dist":
        if self.is_dense:
            out = np.zeros_like(self._dense)
            out[np.arange(1 << self.n) ^ g] = self._dense
            return Dist(self.n, dense=out)
        return Dist(self.n, idx=self._idx ^ g, w=self._w)

    def prune(self, rel_floor: float = 1e-13) -> "Dist":
        """Drop weights below rel_floor of the max and renormalize."""
        idx, w = self.items()
        keep = w >= rel_floor * w.max()
        if keep.all() and not self.is_dense:
            return self
        return Dist(self.n, idx=idx[keep], w=w[keep])

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        idx, w = self.items()
        return {"dim": self.n, "entries": [[int(i), float(x)] for i, x in zip(idx, w)]}

    @staticmethod
    def from_json(obj: dict) -> "Dist":
        idx = np.array([e[0] for e in obj["entries"]], dtype=np.int64)
        w = np.array([e[-1] for e in obj["entries"]], dtype=np.float64)
        return Dist(int(obj["dim"]), idx=idx, w=w)

    def __repr__(self) -> str:
        return f"Dist(n={self.n}, support={self.support_size()}, H={self.entropy():.4f})"


def uniform_on(S: Iterable[int], n: int) -> Dist:
    """Uniform distribution on a nonempty subset of F_2^n."""
    idx = np.unique(np.fromiter(S, dtype=np.int64))
    if len(idx) == 0:
        raise ValueError("empty support")
    return Dist(n, idx=idx, w=np.full(len(idx), 1.0))


def uniform_on_subgroup(H: SubgroupBasis) -> Dist:
    return uniform_on(H.enumerate_array(), H.ambient_dim)


def entropy(X: Dist) -> float:
    return X.entropy()


def xor_convolve(X: Dist, Y: Dist) -> Dist:
    """Exact distribution of X' ^ Y' for independent copies.

    Dense pairs go through the Walsh-Hadamard transform in O(n 2^n); sparse
    pairs with a small support product are convolved by pair enumeration.
    """
    if X.n != Y.n:
        raise ValueError("dimension mismatch")
    n = X.n
    both_sparse = not (X.is_dense or Y.is_dense)
    if both_sparse and X.support_size() * Y.support_size() < (1 << n) * max(n, 1):
        ix, wx = X.items()
        iy, wy = Y.items()
        keys = (ix[:, None] ^ iy[None, :]).ravel()
        w = np.outer(wx, wy).ravel()
        idx, w = _group(keys, w)
        return Dist(n, idx=idx, w=w)
    spec = fwht(X.dense()) * fwht(Y.dense())
    out = fwht(spec) / (1 << n)
    return Dist(n, dense=_clean_wht_output(out, "xor_convolve"))


def pushforward_dist(X: Dist, pi: LinearMap) -> Dist:
    """Image distribution of X under a GF(2)-linear map."""
    if pi.in_dim != X.n:
        raise ValueError("dimension mismatch")
    tab = pi.table()
    idx, w = X.items()
    keys, w = _group(tab[idx], w)
    if pi.out_dim <= 12:
        out = np.zeros(1 << pi.out_dim)
        out[keys] = w
        return Dist(pi.out_dim, dense=out)
    return Dist(pi.out_dim, idx=keys, w=w)


AxisKey = Union[int, str]


class JointDist:
    """A distribution on (F_2^n)^k with axis labels; k in {2,3,4} publicly.

    Coordinates are packed into one integer key, axis i in bits [i*n, (i+1)*n),
    axis 0 lowest. Dense when n*k <= 24 (flat table indexed by the key),
    otherwise sparse with int64 keys, which caps sparse joints at n*k <= 62.
    Operations that drop axes may return the internal arity-1 form; call
    to_dist() to get the Dist back out.
    """

    __slots__ = ("n", "arity", "labels", "_dense", "_keys", "_w")

    def __init__(self, n: int, arity: int, labels: Sequence[str],
                 dense: Optional[np.ndarray] = None,
                 keys: Optional[np.ndarray] = None, w: Optional[np.ndarray] = None):
        if arity < 1 or arity > 4:
            raise ValueError("arity out of range")
        if len(labels) != arity or len(set(labels)) != arity:
            raise ValueError("need one distinct label per axis")
        self.n = n
        self.arity = arity
        self.labels = tuple(labels)
        if dense is not None:
            if n * arity > DENSE_BITS:
                raise ValueError("table too large for dense form")
            dense = np.asarray(dense, dtype=np.float64).ravel()
            if dense.shape != (1 << (n * arity),):
                raise ValueError("dense table has wrong length")
            if dense.min() < 0:
                raise ValueError("negative weight")
            total = dense.sum()
            if total <= 0:
                raise ValueError("zero total mass")
            self._dense = dense / total
            self._keys = None
            self._w = None
        else:
            assert keys is not None and w is not None
            if n * arity > 62:
                raise ValueError("packed sparse keys need n*arity <= 62")
            keys = np.asarray(keys, dtype=np.int64)
            w = np.asarray(w, dtype=np.float64)
            if w.min(initial=0.0) < 0:
                raise ValueError("negative weight")
            keep = w > 0
            keys, w = _group(keys[keep], w[keep])
            if len(keys) == 0:
                raise ValueError("zero total mass")
            self._dense = None
            self._keys = keys
            self._w = w / w.sum()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_mapping(mapping: Dict[Tuple[int, ...], float], n: int,
                     labels: Sequence[str]) -> "JointDist":
        arity = len(labels)
        keys = np.array([_pack(t, n) for t in mapping], dtype=np.int64)
        w = np.array(list(mapping.values()), dtype=np.float64)
        return JointDist(n, arity, labels, keys=keys, w=w)

    @staticmethod
    def independent_product(dists: Sequence[Dist], labels: Sequence[str]) -> "JointDist":
        n = dists[0].n
        if any(d.n != n for d in dists):
            raise ValueError("dimension mismatch")
        k = len(dists)
        if n * k <= DENSE_BITS:
            flat = dists[-1].dense()
            for d in dists[-2::-1]:
                flat = np.outer(flat, d.dense()).ravel()
            return JointDist(n, k, labels, dense=flat)
        keys = None
        w = None
        for i, d in enumerate(dists):
            idx, wi = d.items()
            if keys is None:
                keys, w = idx << (i * n), wi
            else:
                keys = (keys[:, None] | (idx[None, :] << (i * n))).ravel()
                w = np.outer(w, wi).ravel()
        return JointDist(n, k, labels, keys=keys, w=w)

    # -- plumbing ----------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def items(self) -> Tuple[np.ndarray, np.ndarray]:
        """Packed keys with positive mass and their weights."""
        if self.is_dense:
            keys = np.nonzero(self._dense)[0].astype(np.int64)
            return keys, self._dense[keys]
        return self._keys, self._w

    def dense(self) -> np.ndarray:
        """Full table in packed-key order (axis 0 in the low bits)."""
        if self.n * self.arity > DENSE_BITS:
            raise ValueError("table too large for dense form")
        if self.is_dense:
            return self._dense.copy()
        out = np.zeros(1 << (self.n * self.arity))
        out[self._keys] = self._w
        return out

    def _axis_index(self, axis: AxisKey) -> int:
        if isinstance(axis, str):
            return self.labels.index(axis)
        if axis < 0 or axis >= self.arity:
            raise ValueError(f"axis {axis} out of range")
        return axis

    def _axes(self, axes: Union[AxisKey, Sequence[AxisKey]]) -> List[int]:
        if isinstance(axes, (int, str)):
            axes = [axes]
        out = [self._axis_index(a) for a in axes]
        if len(set(out)) != len(out):
            raise ValueError("repeated axis")
        return out

    def axis_values(self, keys: np.ndarray, axis: int) -> np.ndarray:
        return (keys >> (axis * self.n)) & ((1 << self.n) - 1)

    def to_dist(self) -> Dist:
        if self.arity != 1:
            raise ValueError("to_dist needs an arity-1 joint")
        keys, w = self.items()
        return Dist(self.n, idx=keys, w=w)

    # -- marginals, conditioning, maps --------------------------------------

    def marginal(self, axes: Union[AxisKey, Sequence[AxisKey]]) -> "JointDist":
        """Marginal on the listed axes, in the listed order."""
        ax = self._axes(axes)
        labels = [self.labels[a] for a in ax]
        k = len(ax)
        if self.is_dense:
            # Packed C-order puts axis a at cube dim arity-1-a; sum away the
            # dropped dims, then put the kept ones in the requested order.
            m = self.arity
            cube = self._dense.reshape((1 << self.n,) * m)
            keep = [m - 1 - a for a in ax]
            drop = tuple(d for d in range(m) if d not in keep)
            red = cube.sum(axis=drop) if drop else cube
            surv = sorted(keep)
            perm = [surv.index(keep[k - 1 - i]) for i in range(k)]
            if perm != list(range(k)):
                red = red.transpose(perm)
            return JointDist(self.n, k, labels, dense=np.ascontiguousarray(red).ravel())
        keys, w = self.items()
        sub = np.zeros_like(keys)
        for j, a in enumerate(ax):
            sub |= self.axis_values(keys, a) << (j * self.n)
        if self.n * k <= DENSE_BITS:
            flat = np.bincount(sub, weights=w, minlength=1 << (self.n * k))
            return JointDist(self.n, k, labels, dense=flat)
        sub, w = _group(sub, w)
        return JointDist(self.n, k, labels, keys=sub, w=w)

    def marginal_dist(self, axis: AxisKey) -> Dist:
        return self.marginal([axis]).to_dist()

    def condition(self, axis: AxisKey, value: int) -> "JointDist":
        """Normalized slice on {axis = value}; the axis is removed."""
        a = self._axis_index(axis)
        if self.arity == 1:
            raise ValueError("cannot condition an arity-1 joint")
        labels_out = self.labels[:a] + self.labels[a + 1:]
        if self.is_dense:
            m = self.arity
            cube = self._dense.reshape((1 << self.n,) * m)
            sl: List[object] = [slice(None)] * m
            sl[m - 1 - a] = value
            sub = np.ascontiguousarray(cube[tuple(sl)]).ravel()
            if sub.sum() <= 0:
                raise ValueError(f"conditioning event {self.labels[a]}={value} has zero mass")
            return JointDist(self.n, m - 1, labels_out, dense=sub)
        keys, w = self.items()
        mask = self.axis_values(keys, a) == value
        if not mask.any():
            raise ValueError(f"conditioning event {self.labels[a]}={value} has zero mass")
        keys, w = keys[mask], w[mask]
        low = keys & ((1 << (a * self.n)) - 1)
        high = (keys >> ((a + 1) * self.n)) << (a * self.n)
        keys = low | high
        k = self.arity - 1
        if self.n * k <= DENSE_BITS:
            flat = np.bincount(keys, weights=w, minlength=1 << (self.n * k))
            return JointDist(self.n, k, labels_out, dense=flat)
        return JointDist(self.n, k, labels_out, keys=keys, w=w)

    def pushforward(self, groups: Sequence[Sequence[AxisKey]],
                    labels: Optional[Sequence[str]] = None) -> "JointDist":
        """New joint whose axis j is the XOR of the input axes in groups[j]."""
        gs = [self._axes(g) for g in groups]
        if labels is None:
            labels = ["^".join(self.labels[a] for a in g) for g in gs]
        keys, w = self.items()
        out = np.zeros_like(keys)
        for j, g in enumerate(gs):
            v = np.zeros_like(keys)
            for a in g:
                v ^= self.axis_values(keys, a)
            out |= v << (j * self.n)
        k = len(gs)
        if self.n * k <= DENSE_BITS:
            flat = np.bincount(out, weights=w, minlength=1 << (self.n * k))
            return JointDist(self.n, k, labels, dense=flat)
        out, w = _group(out, w)
        return JointDist(self.n, k, labels, keys=out, w=w)

    def slices(self, target: AxisKey,
               given: Union[AxisKey, Sequence[AxisKey]]) -> List[Tuple[Tuple[int, ...], float, Dist]]:
        """Decompose into conditional laws of `target` given the other axes.

        Returns (value tuple, probability, law) per point of the conditioning
        support, values ascending in packed order.
        """
        t = self._axis_index(target)
        g = self._axes(given)
        M = self.marginal([t] + g)
        keys, w = M.items()
        tvals = M.axis_values(keys, 0)
        gkey = keys >> self.n
        order = np.argsort(gkey, kind="stable")
        gkey, tvals, w = gkey[order], tvals[order], w[order]
        cuts = np.flatnonzero(np.diff(gkey)) + 1
        out: List[Tuple[Tuple[int, ...], float, Dist]] = []
        for lo, hi in zip(np.r_[0, cuts], np.r_[cuts, len(gkey)]):
            mass = w[lo:hi].sum()
            vals = tuple(int((gkey[lo] >> (j * self.n)) & ((1 << self.n) - 1))
                         for j in range(len(g)))
            out.append((vals, float(mass), Dist(self.n, idx=tvals[lo:hi], w=w[lo:hi])))
        return out

    # -- calculus ----------------------------------------------------------

    def entropy(self, axes: Optional[Union[AxisKey, Sequence[AxisKey]]] = None) -> float:
        """Entropy of the marginal on `axes` (all axes when omitted)."""
        if axes is None:
            return _entropy_weights(self._dense if self.is_dense else self._w)
        ax = self._axes(axes)
        if len(ax) == self.arity:
            return _entropy_weights(self._dense if self.is_dense else self._w)
        return self.marginal(ax).entropy()

    def cond_entropy(self, target, given) -> float:
        """H[target | given] by the chain rule."""
        t, g = self._axes(target), self._axes(given)
        if set(t) & set(g):
            raise ValueError("overlapping axes")
        return self.entropy(t + g) - self.entropy(g)

    def mutual_info(self, a, b) -> float:
        ax, bx = self._axes(a), self._axes(b)
        if set(ax) & set(bx):
            raise ValueError("overlapping axes")
        return self.entropy(ax) + self.entropy(bx) - self.entropy(ax + bx)

    def cond_mutual_info(self, a, b, given) -> float:
        """I[a : b | given] = H[a,g] + H[b,g] - H[a,b,g] - H[g]."""
        ax, bx, gx = self._axes(a), self._axes(b), self._axes(given)
        if set(ax) & set(bx) or set(ax) & set(gx) or set(bx) & set(gx):
            raise ValueError("overlapping axes")
        return (self.entropy(ax + gx) + self.entropy(bx + gx)
                - self.entropy(ax + bx + gx) - self.entropy(gx))

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        keys, w = self.items()
        entries = []
        for key, x in zip(keys, w):
            coords = [int(self.axis_values(np.int64(key), a)) for a in range(self.arity)]
            entries.append(coords + [float(x)])
        return {"dim": self.n, "arity": self.arity, "labels": list(self.labels),
                "entries": entries}

    @staticmethod
    def from_json(obj: dict) -> "JointDist":
        n, arity = int(obj["dim"]), int(obj["arity"])
        keys = np.array([_pack(e[:arity], n) for e in obj["entries"]], dtype=np.int64)
        w = np.array([e[arity] for e in obj["entries"]], dtype=np.float64)
        return JointDist(n, arity, obj["labels"], keys=keys, w=w)

    def __repr__(self) -> str:
        return (f"JointDist(n={self.n}, axes={self.labels}, "
                f"H={self.entropy():.4f})")


def joint_product(A: JointDist, B: JointDist, max_support: int = 1 << 26) -> JointDist:
    """Independent product of two joints, axes of A first.

    Colliding labels on the B side get a prime appended.
    """
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    n, k = A.n, A.arity + B.arity
    labels = list(A.labels)
    for lab in B.labels:
        while lab in labels:
            lab = lab + "'"
        labels.append(lab)
    ka, wa = A.items()
    kb, wb = B.items()
    if n * k <= DENSE_BITS:
        flat = np.zeros(1 << (n * k))
        keys = (ka[:, None] | (kb[None, :] << (A.arity * n))).ravel()
        np.add.at(flat, keys, np.outer(wa, wb).ravel())
        return JointDist(n, k, labels, dense=flat)
    if len(ka) * len(kb) > max_support:
        raise ValueError("product support too large")
    keys = (ka[:, None] | (kb[None, :] << (A.arity * n))).ravel()
    return JointDist(n, k, labels, keys=keys, w=np.outer(wa, wb).ravel())


def _pack(coords: Sequence[int], n: int) -> int:
    key = 0
    for i, c in enumerate(coords):
        if c < 0 or c >= (1 << n):
            raise ValueError("coordinate exceeds ambient dimension")
        key |= int(c) << (i * n)
    return key


def load_dist(path: str) -> Dist:
    """Read a Dist from a JSON file ({dim, entries}) or a dense CSV vector."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return Dist.from_json(json.loads(stripped))
    return dense_from_csv(text)


def dense_from_csv(text: str) -> Dist:
    """Dense vector, one weight per line or comma-separated; length 2^n."""
    vals = [float(tok) for tok in text.replace(",", "\n").split()]
    n = (len(vals) - 1).bit_length()
    if len(vals) != (1 << n) or not vals:
        raise ValueError("dense CSV length must be a power of two")
    return Dist.from_dense(vals, n)
