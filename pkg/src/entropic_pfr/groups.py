"""Exact arithmetic over F_2^n: elements, spans, subgroup bases, linear maps.

Elements are plain Python ints used as n-bit words; addition is XOR and every
element is its own inverse. The ambient dimension n travels alongside in each
container instead of inside the elements, so 2^n-length tables stay cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

__all__ = [
    "SubgroupBasis",
    "LinearMap",
    "span",
    "parse_elem",
    "format_elem",
]


def _rref(vectors: Iterable[int]) -> Tuple[int, ...]:
    """Reduce to row-echelon form over GF(2), leading bits strictly decreasing."""
    rows: List[int] = []
    for v in vectors:
        for r in rows:
            if v ^ r < v:
                v ^= r
        if v:
            rows.append(v)
            rows.sort(reverse=True)
    # back-substitute so each pivot appears in exactly one row
    for i, r in enumerate(rows):
        pivot = 1 << (r.bit_length() - 1)
        for j in range(i):
            if rows[j] & pivot:
                rows[j] ^= r
    return tuple(rows)


@dataclass(frozen=True)
class SubgroupBasis:
    """A subgroup of F_2^n held as a reduced row-echelon basis.

    rows are linearly independent with unique, strictly decreasing leading
    bits; two subgroups are equal iff their canonical bases are equal.
    """

    ambient_dim: int
    rows: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(r >= (1 << self.ambient_dim) for r in self.rows):
            raise ValueError("basis row exceeds ambient dimension")
        if self.rows != _rref(self.rows):
            raise ValueError("rows are not in canonical reduced form")

    @property
    def rank(self) -> int:
        return len(self.rows)

    def span_size(self) -> int:
        return 1 << self.rank

    def reduce(self, x: int) -> int:
        """Canonical coset representative: pivot bits eliminated.

        The residue is the smallest member of x + span, since any other
        member differs by a row whose leading pivot it must then carry.
        """
        if x < 0 or x >= (1 << self.ambient_dim):
            raise ValueError("element exceeds ambient dimension")
        for r in self.rows:
            if x ^ r < x:
                x ^= r
        return x

    def contains(self, x: int) -> bool:
        """Membership by successive pivot elimination; O(rank)."""
        return self.reduce(x) == 0

    def enumerate(self) -> List[int]:
        """All 2^rank members, ascending.

        Index i selects basis rows by its bits, lowest bit picking the row
        with the smallest pivot; distinct pivots make this order ascending.
        """
        if self.rank > 24:
            raise ValueError("rank too large to enumerate")
        out = [0]
        for r in reversed(self.rows):
            out += [x ^ r for x in out]
        return out

    def enumerate_array(self) -> np.ndarray:
        """Same as enumerate(), as an int64 array."""
        out = np.zeros(1, dtype=np.int64)
        for r in reversed(self.rows):
            out = np.concatenate([out, out ^ r])
        return out

    def shrink_to_size(self, bound: int) -> "SubgroupBasis":
        """Drop highest-pivot rows until the span has at most `bound` members.

        Any deterministic deletion rule gives a subgroup of the input; highest
        pivot first keeps the result reproducible.
        """
        if bound < 1:
            raise ValueError("bound must be >= 1")
        rows = self.rows
        while (1 << len(rows)) > bound:
            rows = rows[1:]
        return SubgroupBasis(self.ambient_dim, rows)


def span(elems: Iterable[int], n: int) -> SubgroupBasis:
    """RREF basis of the GF(2) span of `elems` inside F_2^n."""
    elems = list(elems)
    if any(e < 0 or e >= (1 << n) for e in elems):
        raise ValueError("element exceeds ambient dimension")
    return SubgroupBasis(n, _rref(elems))


@dataclass(frozen=True)
class LinearMap:
    """A GF(2)-linear map F_2^in_dim -> F_2^out_dim.

    cols[b] is the image of the b-th standard basis vector, so
    apply(x) = XOR of cols[b] over the set bits b of x.
    """

    in_dim: int
    out_dim: int
    cols: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.cols) != self.in_dim:
            raise ValueError("need one image per input bit")
        if any(c >= (1 << self.out_dim) for c in self.cols):
            raise ValueError("column image exceeds output dimension")

    def apply(self, x: int) -> int:
        y = 0
        b = 0
        while x:
            if x & 1:
                y ^= self.cols[b]
            x >>= 1
            b += 1
        return y

    def table(self) -> np.ndarray:
        """Images of all 2^in_dim inputs, built by linearity in O(2^in_dim)."""
        out = np.zeros(1, dtype=np.int64)
        for c in self.cols:
            out = np.concatenate([out, out ^ c])
        return out

    @staticmethod
    def identity(n: int) -> "LinearMap":
        return LinearMap(n, n, tuple(1 << b for b in range(n)))

    @staticmethod
    def zero(n: int, out_dim: int = 0) -> "LinearMap":
        return LinearMap(n, out_dim, (0,) * n)

    @staticmethod
    def pair_sum(n: int) -> "LinearMap":
        """(x, y) on 2n bits (low bits = x) mapped to x ^ y on n bits."""
        cols = tuple((1 << b) for b in range(n)) * 2
        return LinearMap(2 * n, n, cols)


def parse_elem(text: str, n: int) -> int:
    """Parse an element written as '0b0101', '0x5' or a decimal string."""
    text = text.strip()
    x = int(text, 0)
    if x < 0 or x >= (1 << n):
        raise ValueError(f"element {text!r} out of range for dimension {n}")
    return x


def format_elem(x: int, n: int, style: str = "bin") -> str:
    if style == "bin":
        return format(x, f"#0{n + 2}b")
    if style == "hex":
        return format(x, "#x")
    raise ValueError(f"unknown element format {style!r}")
