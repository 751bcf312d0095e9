"""From a finite set with small doubling to an explicit coset cover.

pfr_pipeline runs the whole chain on a concrete subset A of F_2^n: measure
the doubling constant K exactly, locate an approximating subgroup H through
tau descent on the pair (U_A, U_A), align H with A by the best shift, cover
A greedily with translates, and shrink H if it overshoots |A|. The final
cover is certified by exhaustive membership and by counting translates
against 2 K^c with the requested exponent c (default 12).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .descent import diagnostics, entropic_pfr, extract_subgroup
from .dists import Dist, uniform_on, uniform_on_subgroup
from .groups import SubgroupBasis, format_elem, parse_elem
from .ruzsa import rdist

__all__ = [
    "SetInput",
    "CosetCover",
    "doubling_constant",
    "best_shift",
    "ruzsa_cover",
    "pfr_pipeline",
    "load_set",
    "save_set",
]


@dataclass(frozen=True)
class SetInput:
    """A nonempty subset of F_2^n, points sorted and deduplicated."""
    n: int
    points: Tuple[int, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("empty set")
        pts = tuple(sorted(set(self.points)))
        if pts[0] < 0 or pts[-1] >= (1 << self.n):
            raise ValueError("point outside the ambient group")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def uniform(self) -> Dist:
        return uniform_on(self.points, self.n)


@dataclass(frozen=True)
class CosetCover:
    """Translates of a subgroup covering the input set."""
    Hp: SubgroupBasis
    translates: Tuple[int, ...]
    K: float
    C_used: float
    certified: bool

    def size_bound(self) -> float:
        return 2.0 * self.K ** self.C_used

    def covers(self, pts: Sequence[int]) -> bool:
        return all(any(self.Hp.contains(p ^ t) for t in self.translates)
                   for p in pts)


def _sumset(pts: Sequence[int]) -> np.ndarray:
    a = np.asarray(pts, dtype=np.int64)
    return np.unique((a[:, None] ^ a[None, :]).ravel())


def doubling_constant(A: SetInput) -> float:
    """|A + A| / |A|, exactly."""
    return len(_sumset(A.points)) / len(A)


def best_shift(A: SetInput, H: SubgroupBasis) -> Tuple[int, int]:
    """Translate x0 maximizing |A intersect (x0 + H)|, with that overlap.

    Equivalently the mode of U_A ^ U_H; the smallest representative wins
    ties, which is the coset's canonical reduction.
    """
    counts: Dict[int, int] = {}
    for p in A.points:
        r = H.reduce(p)
        counts[r] = counts.get(r, 0) + 1
    x0, overlap = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return x0, overlap


def ruzsa_cover(A: SetInput, core: Sequence[int]) -> List[int]:
    """Greedy translates T of A with A contained in T + core + core.

    core is a nonempty subset of a coset; T collects points of A whose
    core-translates are pairwise disjoint, so |T| <= |A + core| / |core|,
    and maximality covers every remaining point.
    """
    core = sorted(set(core))
    if not core:
        raise ValueError("empty core")
    used: set = set()
    T: List[int] = []
    for a in A.points:
        shifted = [a ^ c for c in core]
        if used.isdisjoint(shifted):
            T.append(a)
            used.update(shifted)
    return T


def _assemble_cover(A: SetInput, H: SubgroupBasis, K: float,
                    c_exponent: float) -> Tuple[CosetCover, Dict[str, object]]:
    """Shift, greedy cover, shrink, certify: the set half of the pipeline."""
    x0, overlap = best_shift(A, H)
    coset = set(h ^ x0 for h in H.enumerate())
    core = sorted(set(A.points) & coset)
    assert core, "best shift always intersects A"
    # core + core sits inside H, so T + H covers A.
    T = ruzsa_cover(A, core)

    Hp = H
    translates = list(T)
    if Hp.span_size() > len(A):
        Hp = H.shrink_to_size(len(A))
        # every t + H splits into cosets of the smaller H'
        quot: List[int] = []
        seen: set = set()
        for h in H.enumerate():
            r = Hp.reduce(h)
            if r not in seen:
                seen.add(r)
                quot.append(r)
        translates = [t ^ q for t in T for q in quot]
    translates = sorted(set(translates))

    cover = CosetCover(Hp, tuple(translates), K, c_exponent, False)
    certified = (cover.covers(A.points)
                 and Hp.span_size() <= len(A)
                 and len(translates) <= cover.size_bound() + 1e-9)
    cover = CosetCover(Hp, tuple(translates), K, c_exponent, certified)
    info: Dict[str, object] = {
        "shift": x0,
        "overlap": overlap,
        "core_size": len(core),
        "raw_translates": len(T),
        "span_size": H.span_size(),
        "final_subgroup_size": Hp.span_size(),
        "translate_count": len(translates),
        "size_bound": cover.size_bound(),
    }
    return cover, info


def pfr_pipeline(A: SetInput, *, c_exponent: float = 12.0,
                 eta: float = 1.0 / 9.0, eps_d: float = 1e-4,
                 budget: int = 64, max_iter: int = 200,
                 ) -> Tuple[CosetCover, Dict[str, object]]:
    """Explicit coset cover of a set with small doubling.

    Returns the cover plus a report with the descent state, the subgroup
    certificate, the shift, and the intermediate counts. The cover's
    `certified` flag asserts exhaustive membership, |H'| <= |A|, and the
    translate count against 2 K^c_exponent. When the descent stalls above
    eps_d, recent pairs along its trace are retried as subgroup sources and
    the certified cover with the fewest translates wins; if none certifies,
    the terminal cover is reported with certified = False plus diagnostics.
    """
    UA = A.uniform()
    K = doubling_constant(A)
    d_AA = rdist(UA, UA)
    log_K = math.log(K)
    # H[U_A + U'_A] <= log|A+A| forces d[U_A;U_A] <= log K; failing it
    # means the arithmetic itself is broken, not the input.
    if d_AA > log_K + 1e-10:
        raise ArithmeticError(
            f"d[U_A;U_A] = {d_AA!r} exceeds log K = {log_K!r}")
    state, cert = entropic_pfr(UA, UA, eta=eta, eps_d=eps_d,
                               budget=budget, max_iter=max_iter)
    cover, info = _assemble_cover(A, cert.H, K, c_exponent)
    source = "terminal"
    if not state.converged and not cover.certified:
        for back, (Y1, _) in enumerate(reversed(state.snapshots[:-1]), 1):
            cand, cinfo = _assemble_cover(A, extract_subgroup(Y1).H, K,
                                          c_exponent)
            if cand.certified and (not cover.certified
                                   or len(cand.translates)
                                   < len(cover.translates)):
                cover, info, source = cand, cinfo, f"{back} steps back"

    UH = uniform_on_subgroup(cert.H)
    report: Dict[str, object] = {
        "K": K,
        "d_AA": d_AA,
        "log_K": log_K,
        "descent": state,
        "certificate": cert,
        "cover_source": source,
        "d_UA_UH": rdist(UA, UH),
        **info,
    }
    if not state.converged:
        try:
            report["diagnostics"] = diagnostics(state.ref, state.X1,
                                                state.X2)
        except ValueError as exc:
            report["diagnostics"] = {"error": str(exc)}
    return cover, report


# -- set files ---------------------------------------------------------------

def load_set(path: str) -> SetInput:
    """Read a set file: a `dim=n` header, then one element per line.

    Elements may be binary (0b...), hex (0x...) or decimal; `#` starts a
    comment.
    """
    n: Optional[int] = None
    pts: List[int] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"dim\s*=\s*(\d+)", line)
            if m:
                if n is not None:
                    raise ValueError("duplicate dim header")
                n = int(m.group(1))
                continue
            if n is None:
                raise ValueError("dim=<n> header must precede elements")
            pts.append(parse_elem(line, n))
    if n is None:
        raise ValueError("missing dim header")
    return SetInput(n, tuple(pts))


def save_set(A: SetInput, path: str, style: str = "bin") -> None:
    with open(path, "w") as fh:
        fh.write(f"dim={A.n}\n")
        for p in A.points:
            fh.write(format_elem(p, A.n, style) + "\n")
