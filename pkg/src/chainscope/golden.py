"""Golden cases: the worked examples and counterexamples, end to end.

Each case returns a dict of named checks; the case passes iff every check
is True.  Reports contain no timings so repeated runs are byte-identical.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import nested as N
from .relations import (
    Chain,
    build_gap_matrix,
    chain_reaches,
    chain_recurrent_set,
    internally_chain_transitive,
    ntilde_chain,
    ntilde_self_matrix,
    ntilde_witness,
    orbit_witness,
    recurrence_witness,
)
from .strong import strong_chain_recurrent_set, strong_chain_values
from .systems import ONES, ZEROS, Subshift, Word, builtin_system, subshift_system, word_dist, word_shift


@dataclass(frozen=True)
class Case:
    name: str
    run: Callable[..., dict]


def akin_ntilde(**_) -> dict:
    s = builtin_system("akin", grid_n=1001)
    g = build_gap_matrix(s)
    checks = {"ntilde(0,0) not found, eps=0.01, k_max=1e4": ntilde_witness(s, 0.0, 0.0, 0.01, 10**4) is None}
    zero = s.index_of(0.0)
    for eps in (0.1, 0.05, 0.02, 0.01):
        checks[f"0 in CR at eps={eps}"] = zero in chain_recurrent_set(g, eps)
    info = {"samples_with_ntilde_self_at_0.01": int(ntilde_self_matrix(s, 0.01, 10**4).sum())}
    return {"checks": checks, "info": info}


def square_restriction(**_) -> dict:
    s = builtin_system("square", grid_n=5)
    g = build_gap_matrix(s)
    one, zero = s.index_of(1.0), s.index_of(0.0)
    sub = g.induced([zero, one])
    checks = {"ambient chain 1 -> 0 at eps=0.3": chain_reaches(g, 0.3, one, zero) is not None}
    for eps in (0.1, 0.3, 0.5, 0.9, float(np.nextafter(1.0, 0.0))):
        checks[f"no chain 1 -> 0 inside {{0, 1}} at eps={eps!r}"] = chain_reaches(sub, eps, 1, 0) is None
    return {"checks": checks}


def logistic_separation(**_) -> dict:
    s = builtin_system("logistic4", grid_n=101)
    g = build_gap_matrix(s)
    M = [s.index_of(0.0), s.index_of(0.75)]
    sched = N.Schedule((0.2, 0.1))
    return {
        "checks": {
            "M={0,3/4} nested-transitive at (0.2, 0.1)": N.nested_transitive_check(g, sched, M),
            "M={0,3/4} not internally chain transitive at 0.5": not internally_chain_transitive(g, 0.5, M),
        }
    }


def cycle_subsets(**_) -> dict:
    n = 4
    s = builtin_system("cycle", n=n)
    g = build_gap_matrix(s)
    sched = N.Schedule((0.1, 0.01))
    checks = {"M={0,2} not internally chain transitive at 0.1": not internally_chain_transitive(g, 0.1, [0, 2])}
    proper = [[v for v in range(n) if mask >> v & 1] for mask in range(1, 2**n - 1)]
    checks["every proper subset nested-transitive"] = all(N.nested_transitive_check(g, sched, M) for M in proper)
    checks["no proper subset internally chain transitive at 0.1"] = not any(
        internally_chain_transitive(g, 0.1, M) for M in proper
    )
    checks["whole cycle internally chain transitive"] = internally_chain_transitive(g, 0.1, range(n))
    return {"checks": checks}


def identity_isolated(**_) -> dict:
    coarse = builtin_system("identity", samples=[0.0, 1.0])
    fine = builtin_system("identity", grid_n=11)
    gc, gf = build_gap_matrix(coarse), build_gap_matrix(fine)
    sched = N.Schedule((0.5,))
    Mf = [fine.index_of(0.0), fine.index_of(1.0)]
    return {
        "checks": {
            "coarse grid {0,1}: M={0,1} not nested-transitive": not N.nested_transitive_check(gc, sched, [0, 1]),
            "grid step 0.1: M={0,1} nested-transitive": N.nested_transitive_check(gf, sched, Mf),
            "grid step 0.1: M={0,1} not internally chain transitive": not internally_chain_transitive(gf, 0.5, Mf),
        }
    }


def sigma1_explicit_chain(n: int, dist_scale: float = 1.0):
    """(chain, gaps) for 1^inf, w_n, ..., shift^(n-1) w_n, 0^inf."""
    s = subshift_system("sigma1", max(n, 1), dist_scale=dist_scale)
    w = Subshift("sigma1").generator(n)
    pts = [ONES]
    for _ in range(n):
        pts.append(w)
        w = word_shift(w)
    pts.append(ZEROS)
    chain = Chain(pts)
    return s, chain, chain.state_gaps(s)


def sigma1_obstruction(h: int = 2, m: int = 2, k: int = 5, p: int = 5) -> float:
    """min over the forward orbit of x1 = 1^k 0^p 1^inf of d(u, .), u = 1^h 0^m 1^inf."""
    u = Word("1" * h + "0" * m, "1")
    v = Word("1" * k + "0" * p, "1")
    best = math.inf
    while True:
        v = word_shift(v)
        best = min(best, word_dist(u, v))
        if v == ONES:
            return best


def sigma1_chain(sigma1_scale: float = 1.0, **_) -> dict:
    checks = {}
    for n in range(3, 9):
        s, chain, gaps = sigma1_explicit_chain(n, sigma1_scale)
        lo, hi = 2.0**-n, 2.0 ** (-n + 1)
        exact = gaps[0] == lo and gaps[-1] == lo and all(x == 0.0 for x in gaps[1:-1])
        inside = [float(np.nextafter(lo, np.inf)), 1.5 * lo, float(np.nextafter(hi, 0.0))]
        checks[f"n={n}: endpoint gaps 2^-{n}, inner gaps 0"] = exact
        checks[f"n={n}: valid throughout (2^-{n}, 2^-{n - 1})"] = all(chain.is_valid_states(s, e) for e in inside)
    checks["obstruction min d(u, O(x1)) = 2^-4"] = sigma1_obstruction() == 2.0**-4
    checks["obstruction >= 2^-2m with m=2"] = sigma1_obstruction() >= 2.0**-4
    return {"checks": checks}


def sigma1_nested(**_) -> dict:
    s = subshift_system("sigma1", 6)
    g = build_gap_matrix(s)
    x, y = s.index_of(ONES), s.index_of(ZEROS)
    sched = N.Schedule.geometric(0.375, 6)
    res = N.nested_decide(g, sched, x, y, "exact")
    u = s.index_of(Word("1100", "1"))
    eps_2m = sched.levels[3]
    return {
        "checks": {
            "exact nested_decide(1^inf -> 0^inf) infeasible": res.status == "infeasible",
            "chain 1^inf -> 0^inf exists at eps_4": chain_reaches(g, eps_2m, x, y) is not None,
            "no eps_4-chain 1^inf -> 0^inf through u=1^2 0^2 1^inf":
                N.covering_walk_feasible(g, eps_2m, x, y, [u]) is None,
        },
        "info": {"certificate": res.certificate()},
    }


def sigma2_evidence(**_) -> dict:
    K = 8
    s = subshift_system("sigma2", K)
    g = build_gap_matrix(s)
    sched = N.Schedule.geometric(0.375, K)
    zero = s.index_of(ZEROS)
    checks = {}
    gen = Subshift("sigma2")
    for k in range(1, K + 1):
        w = gen.generator(k)
        orbit = [w]
        while orbit[-1] != ZEROS:
            orbit.append(word_shift(orbit[-1]))
        idx = [s.index_of(v) for v in orbit]
        fam = N.NestedFamily(tuple(Chain(idx) for _ in sched), idx[0], zero)
        res = N.nested_decide(g, sched, idx[0], zero, "exact")
        checks[f"k={k}: orbit reaches 0^inf after 2k+1 shifts"] = len(orbit) - 1 == 2 * k + 1
        checks[f"k={k}: exact orbit family verifies"] = N.verify_nested(fam, g, sched)
        checks[f"k={k}: nested_decide(w_k -> 0^inf) succeeds"] = res.ok and N.verify_nested(res.family, g, sched)
        checks[f"k={k}: d(w_k, 1^inf) = 2^-k"] = word_dist(w, ONES) == 2.0**-k
    res = N.nested_decide(g, sched, s.index_of(ONES), zero, "exact")
    checks["nested_decide(1^inf -> 0^inf) infeasible"] = res.status == "infeasible"
    return {"checks": checks}


LADDER_SYSTEMS = (
    ("akin", {"grid_n": 101}),
    ("square", {"grid_n": 11}),
    ("logistic4", {"grid_n": 101}),
    ("identity", {"grid_n": 11}),
    ("cycle", {"n": 5}),
    ("sigma1", {"k": 4}),
    ("sigma2", {"k": 4}),
)


def ladder_pairs(system, count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    n = system.n
    pairs = {(int(a), int(a)) for a in rng.integers(0, n, size=count // 3)}
    pairs |= {(int(a), int(b)) for a, b in rng.integers(0, n, size=(count, 2))}
    return sorted(pairs)


def check_ladder(system, pairs, eps: float, k_max: int) -> dict:
    """Walk the ladder O => R => N~ => C on each pair of sample indices at one (eps, k_max).

    C holds when the raw chain x, z, ..., f^(k-1)(z), y built from the N~
    witness is an eps-chain, or when the sampled eps-graph joins x to y.
    ``strict`` lists pairs breaking some implication at eps.  For a k = 0
    witness the built chain is only guaranteed at 2*eps (triangle inequality
    through z), so ``violations`` accepts that chain at 2*eps.
    """
    g = build_gap_matrix(system)
    stats = {"pairs": 0, "O": 0, "R": 0, "N~": 0, "C": 0, "k0_witnesses": 0, "strict": [], "violations": []}
    for a, b in pairs:
        x, y = system.samples[a], system.samples[b]
        o = orbit_witness(system, x, y, k_max) is not None
        r = recurrence_witness(system, x, y, eps, k_max) is not None
        nw = ntilde_witness(system, x, y, eps, k_max)
        c = chain_reaches(g, eps, a, b) is not None
        c_finite = c
        if nw is not None:
            chain = ntilde_chain(system, x, y, *nw)
            c = c or chain.is_valid_states(system, eps)
            k0 = nw[1] == 0 and nw[0] != system.eval(x)
            stats["k0_witnesses"] += int(k0)
            c_finite = c or chain.is_valid_states(system, 2 * eps if k0 else eps)
        stats["pairs"] += 1
        for key, val in (("O", o), ("R", r), ("N~", nw is not None), ("C", c)):
            stats[key] += int(val)
        broken = (o and not r) or (r and nw is None)
        if broken or (nw is not None and not c):
            stats["strict"].append([a, b])
        if broken or (nw is not None and not c_finite):
            stats["violations"].append([a, b])
    return stats


def scr_in_cr(g, count: int = 20) -> list:
    """Thresholds (out of ``count`` log-spaced ones) where SCR is not inside CR."""
    pos = g.gap[g.gap > 0]
    lo, hi = (float(pos.min()), float(g.gap.max())) if pos.size else (1e-3, 1.0)
    v = strong_chain_values(g)
    bad = []
    for eps in np.geomspace(lo, hi * 1.01, count):
        if not strong_chain_recurrent_set(v, float(eps)) <= chain_recurrent_set(g, float(eps)):
            bad.append(float(eps))
    return bad


def ladder(**_) -> dict:
    checks, info = {}, {}
    for name, params in LADDER_SYSTEMS:
        s = builtin_system(name, **params)
        st = check_ladder(s, ladder_pairs(s, 30), eps=0.05, k_max=200)
        checks[f"{name}: O => R => N~ => C (2eps for k=0) on {st['pairs']} pairs"] = not st["violations"]
        checks[f"{name}: SCR within CR at 20 thresholds"] = not scr_in_cr(build_gap_matrix(s))
        info[name] = st
    return {"checks": checks, "info": info}


CASES = (
    Case("akin-ntilde", akin_ntilde),
    Case("square-restriction", square_restriction),
    Case("logistic-separation", logistic_separation),
    Case("cycle-subsets", cycle_subsets),
    Case("identity-isolated", identity_isolated),
    Case("sigma1-chain", sigma1_chain),
    Case("sigma1-nested", sigma1_nested),
    Case("sigma2-evidence", sigma2_evidence),
    Case("ladder", ladder),
)


def run_golden_suite(only: Optional[str] = None, sigma1_scale: float = 1.0, timings: Optional[dict] = None):
    """Run every golden case (or those whose name starts with ``only``).

    Returns (exit code, report).  ``sigma1_scale`` multiplies the sigma1
    metric and exists to inject a fault in tests.
    """
    cases = [c for c in CASES if only is None or c.name.startswith(only)]
    results = []
    for case in cases:
        t0 = time.perf_counter()
        out = case.run(sigma1_scale=sigma1_scale)
        if timings is not None:
            timings[case.name] = time.perf_counter() - t0
        ok = all(out["checks"].values())
        results.append({"name": case.name, "passed": ok, **out})
    failed = [r["name"] for r in results if not r["passed"]]
    report = {"schema": 1, "cases": results, "failed": failed, "passed": not failed}
    return (1 if failed else 0), report
