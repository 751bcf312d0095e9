"""Command line front end.

One JSON object per output line, deterministic for a fixed seed (no
timestamps, sorted keys). Exit status 0 means every requested check held,
converged or certified; 1 means at least one did not.

ENTROPIC_PFR_THREADS caps the worker threads used by the bulk verification
commands; 1 disables the pool entirely.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence

from . import fixtures
from .bsg import bsg_check, endgame_tables
from .cover import load_set, pfr_pipeline
from .descent import diagnostics, entropic_pfr
from .dists import Dist, load_dist, xor_convolve
from .fibring import fibring_decompose
from .groups import format_elem
from .randgen import make_rng, random_dist, random_joint, random_linear_map
from .ruzsa import (check_cond_distance, check_double_shift, check_madiman,
                    check_ruzsa_diff, check_submodularity, check_sum_shift,
                    check_sum_shift_cond, check_triangle, rdist)

SUITES = ["triangle", "madiman", "cond-distance", "sum-shift",
          "sum-shift-cond", "double-shift", "ruzsa-diff", "submodularity",
          "bsg"]


def _emit(obj: dict, quiet: bool = False, essential: bool = True) -> None:
    if quiet and not essential:
        return
    print(json.dumps(obj, sort_keys=True, default=float))


def _pool_size() -> int:
    env = os.environ.get("ENTROPIC_PFR_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _pmap(fn: Callable, items: Sequence) -> List:
    workers = _pool_size()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _suite_trial(suite: str, seed: int, n: int):
    rng = make_rng(seed)
    if suite == "triangle":
        return check_triangle(random_dist(rng, n), random_dist(rng, n),
                              random_dist(rng, n))
    if suite == "madiman":
        return check_madiman(random_dist(rng, n), random_dist(rng, n),
                             random_dist(rng, n))
    if suite == "cond-distance":
        JX = random_joint(rng, n, 2, ["X", "Z"])
        JY = random_joint(rng, n, 2, ["Y", "W"])
        return check_cond_distance(JX, JY)
    if suite == "sum-shift":
        return check_sum_shift(random_dist(rng, n), random_dist(rng, n),
                               random_dist(rng, n))
    if suite == "sum-shift-cond":
        return check_sum_shift_cond(random_dist(rng, n), random_dist(rng, n),
                                    random_dist(rng, n))
    if suite == "double-shift":
        return check_double_shift(random_dist(rng, n), random_dist(rng, n),
                                  random_dist(rng, n), random_dist(rng, n))
    if suite == "ruzsa-diff":
        return check_ruzsa_diff(random_dist(rng, n), random_dist(rng, n))
    if suite == "submodularity":
        return check_submodularity(random_joint(rng, n, 3, ["A", "B", "C"]))
    if suite == "bsg":
        return bsg_check(random_joint(rng, n, 2, ["A", "B"]))
    raise ValueError(f"unknown suite {suite!r}")


def cmd_check(args) -> int:
    suites = SUITES if args.suite == "all" else [args.suite]
    failures = 0
    for suite in suites:
        seeds = [(suite, args.seed + i, args.dim) for i in range(args.trials)]
        reports = _pmap(lambda t: _suite_trial(*t), seeds)
        worst = min(r.slack for r in reports)
        bad = sum(not r.holds for r in reports)
        failures += bad
        _emit({"suite": suite, "trials": args.trials, "violations": bad,
               "worst_slack": worst}, args.quiet)
        for (_, seed, dim), r in zip(seeds, reports):
            if not r.holds:   # the seed pins the violating inputs exactly
                _emit({"suite": suite, "counterexample": {
                    "seed": seed, "dim": dim, "lhs": r.lhs, "rhs": r.rhs,
                    "slack": r.slack}})
                break
    return 0 if failures == 0 else 1


def cmd_verify_fibring(args) -> int:
    def trial(i: int) -> float:
        rng = make_rng(args.seed + i)
        n = args.dim
        Z1 = random_dist(rng, n)
        Z2 = random_dist(rng, n)
        pi = random_linear_map(rng, n, args.out_dim)
        return abs(fibring_decompose(Z1, Z2, pi).residual)
    residuals = _pmap(trial, list(range(args.trials)))
    worst = max(residuals)
    ok = worst <= 1e-9
    _emit({"trials": args.trials, "worst_residual": worst, "holds": ok},
          args.quiet)
    return 0 if ok else 1


def cmd_rdist(args) -> int:
    X = load_dist(args.x)
    Y = load_dist(args.y)
    _emit({"d": rdist(X, Y), "H_x": X.entropy(), "H_y": Y.entropy(),
           "H_sum": xor_convolve(X, Y).entropy()})
    return 0


def cmd_entropy(args) -> int:
    for path in args.files:
        X = load_dist(path)
        _emit({"file": path, "dim": X.n, "support": X.support_size(),
               "H": X.entropy()})
    return 0


def cmd_endgame(args) -> int:
    X1 = load_dist(args.x1)
    X2 = load_dist(args.x2)
    t = endgame_tables(X1, X2)
    _emit({"k": t.k, "I1": t.I1, "I2": t.I2, "I3": t.I3, "H_S": t.H_S})
    return 0


def _cert_obj(cert) -> dict:
    return {"subgroup_rows": [int(r) for r in cert.H.rows],
            "subgroup_rank": cert.H.rank,
            "d1": cert.d1, "d2": cert.d2, "k0": cert.k0,
            "bound_check": cert.bound_check}


def _run_descent(X01: Dist, X02: Dist, args, quiet: bool) -> int:
    state, cert = entropic_pfr(X01, X02, eta=args.eta, eps_d=args.eps_d,
                               budget=args.budget, max_iter=args.max_iter)
    for rec in state.trace:
        _emit({"iter": rec["iter"], "kind": rec["kind"],
               "tau": rec["tau_after"], "k": rec["k_after"],
               "params": rec["params"]}, quiet, essential=False)
    _emit({"converged": state.converged, "stop": state.stop_reason,
           "iterations": len(state.trace), "k": state.k, "tau": state.tau,
           **_cert_obj(cert)})
    if not state.converged:
        diag = diagnostics(state.ref, state.X1, state.X2)
        _emit({"diagnostics": {k: v for k, v in diag.items() if k != "bounds"},
               "bounds": diag["bounds"]})
    return 0 if state.converged and cert.bound_check else 1


def cmd_descend(args) -> int:
    return _run_descent(load_dist(args.x1), load_dist(args.x2), args,
                        args.quiet)


def cmd_demo(args) -> int:
    X01, X02 = fixtures.demo_pair(args.index, seed=args.seed
                                  if args.seed != 0 else None)
    return _run_descent(X01, X02, args, args.quiet)


def cmd_cover(args) -> int:
    A = load_set(args.set)
    cover, report = pfr_pipeline(A, c_exponent=args.c_exponent, eta=args.eta,
                                 eps_d=args.eps_d, budget=args.budget,
                                 max_iter=args.max_iter)
    _emit({"n": A.n, "size": len(A), "K": cover.K,
           "subgroup_rank": cover.Hp.rank,
           "translates": len(cover.translates),
           "bound": cover.size_bound(), "certified": cover.certified},
          args.quiet)
    if not args.quiet:
        for t in cover.translates:
            _emit({"translate": format_elem(t, A.n, "hex")}, essential=False)
    return 0 if cover.certified else 1


def _add_descent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, default=1.0 / 9.0)
    p.add_argument("--eps-d", type=float, default=1e-4)
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--max-iter", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entropic-pfr",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--quiet", action="store_true",
                    help="print only the essential summary lines")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run an inequality suite on random inputs")
    p.add_argument("--suite", default="all", choices=["all"] + SUITES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dim", type=int, default=4)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("verify-fibring", help="check the exact fibring identity")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--out-dim", type=int, default=4)
    p.set_defaults(fn=cmd_verify_fibring)

    p = sub.add_parser("rdist", help="distance between two distribution files")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(fn=cmd_rdist)

    p = sub.add_parser("entropy", help="entropies of distribution files")
    p.add_argument("files", nargs="+")
    p.set_defaults(fn=cmd_entropy)

    p = sub.add_parser("endgame", help="sum-variable tables for a pair")
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.set_defaults(fn=cmd_endgame)

    p = sub.add_parser("descend", help="tau descent from two distribution files")
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    _add_descent_flags(p)
    p.set_defaults(fn=cmd_descend)

    p = sub.add_parser("demo", help="run a built-in descent scenario")
    p.add_argument("index", type=int, choices=[1, 2, 3])
    p.add_argument("--seed", type=int, default=0,
                   help="override the frozen fixture seed (0 keeps it)")
    _add_descent_flags(p)
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("cover", help="coset cover for a set file")
    p.add_argument("--set", required=True)
    p.add_argument("--c-exponent", type=float, default=12.0)
    _add_descent_flags(p)
    p.set_defaults(fn=cmd_cover)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
