"""Acceptance checks, one per criterion.

Each check returns (passed, detail).  Under pytest every test prints one
PASS/FAIL line and then asserts; ``python3 tests/test_acceptance.py`` prints
the same twelve lines without pytest.
"""

from __future__ import annotations

import itertools
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracle  # noqa: E402
from sapforge import analysis, madras, surgery, threedge, verify  # noqa: E402
from sapforge.enumerate import (  # noqa: E402
    closing_probability,
    is_returning_half_space,
    iter_saps,
    iter_walks,
    sap_counts,
    saw_statistics,
)
from sapforge.lattice import loomis_whitney_holds  # noqa: E402
from sapforge.polygon import global_join_plaquettes, is_left, is_right  # noqa: E402

SEED = 20240601


def _first(items, limit=3):
    return "; ".join(str(x) for x in items[:limit])


# -- checks ---------------------------------------------------------------------

def check_exact_counts():
    start = time.perf_counter()
    engine = sap_counts(14, 1)
    elapsed = time.perf_counter() - start
    expected = {n: oracle.polygon_count(n) for n in range(4, 15, 2)}
    wrong = [f"p_{n}={engine[n]} vs {v}" for n, v in expected.items() if engine[n] != v]
    ok = not wrong and engine[4] == 1 and elapsed < 10
    table = ",".join(str(engine[n]) for n in range(4, 15, 2))
    return ok, f"p_4..p_14 = {table}; {elapsed:.2f}s single-threaded {_first(wrong)}"


def check_closing_identity():
    bad = []
    for n in range(1, 12, 2):
        cp = closing_probability(n, 1)
        if not cp.agrees:
            bad.append(f"n={n}: {cp.direct} vs {cp.formula}")
    for n in range(1, 10, 2):
        if closing_probability(n, 1).direct != oracle.closing_fraction(n):
            bad.append(f"n={n}: census disagrees with naive walks")
    three = closing_probability(3, 1).direct
    ok = not bad and three == Fraction(2, 9)
    return ok, f"odd n <= 11 exact, n=3 gives {three} {_first(bad)}"


def check_supermultiplicativity():
    p = sap_counts(14, 1)
    bad = [(n, m) for n in range(4, 11, 2) for m in range(4, 15 - n, 2) if p[n + m] < p[n] * p[m]]
    pairs = sum(1 for n in range(4, 11, 2) for m in range(4, 15 - n, 2))
    return not bad, f"{pairs} pairs with n+m <= 14, violations {bad}"


def check_madras_contract():
    rng = random.Random(SEED)
    pairs = verify._madras_pairs(10, rng, 1000)
    # every vertical placement of a square against a square comes first
    square = next(iter_saps(4))
    square_pairs = len(range(square.ymin - square.ymax - 2, square.ymax - square.ymin + 3))
    failures = []
    for tau, sigma in pairs:
        problems = verify.madras_contract_failures(tau, sigma)
        if problems:
            failures.append(f"{problems} tau={list(tau.tour)} sigma={list(sigma.tour)}")
    ok = not failures and len(pairs) - square_pairs >= 1000
    return ok, (f"{len(pairs)} pairs ({square_pairs} square placements), "
                f"{len(failures)} contract failures {_first(failures, 1)}")


def check_strong_join():
    saps = {n: list(iter_saps(n)) for n in (4, 6, 8)}
    total, bad, smallest = 0, [], {}
    for n, m in itertools.product(saps, repeat=2):
        for a in (p for p in saps[n] if is_left(p)):
            for b in (p for p in saps[m] if is_right(p)):
                count = len(madras.strong_join_offsets(a, b))
                total += 1
                smallest[(n, m)] = min(smallest.get((n, m), count), count)
                if not madras.strong_join_bound_holds(count, n, m):
                    bad.append(f"{count} offsets for {list(a.tour)} / {list(b.tour)}")
    return not bad, f"{total} left/right pairs, min offsets {min(smallest.values())}, {len(bad)} below bound {_first(bad, 1)}"


def check_left_right_fractions():
    rows, bad = [], []
    for n in range(4, 15, 2):
        ps = list(iter_saps(n))
        lefts = sum(1 for p in ps if is_left(p))
        rights = sum(1 for p in ps if is_right(p))
        rows.append(f"{n}:{lefts}/{rights}/{len(ps)}")
        if 4 * lefts < len(ps) or 2 * rights < len(ps):
            bad.append(n)
    return not bad, f"left/right/all {' '.join(rows)}; failing n {bad}"


def check_injections():
    failures = []
    for n in range(4, 13, 2):
        seen = {}
        for p in iter_saps(n):
            key = surgery.reflect_split(p).vertices
            if key in seen:
                failures.append(f"reflect collision {list(p.tour)} and {list(seen[key].tour)}")
            seen[key] = p
    for n in range(1, 11):
        walks = [w for w in iter_walks(n, 2, half_space=True) if is_returning_half_space(w)]
        images = {}
        for w in walks:
            key = surgery.fold_to_bridge(w).vertices
            if key in images:
                failures.append(f"fold collision {list(w)} and {list(images[key])}")
            images[key] = w
    round_trips = 0
    for n in range(4, 13, 2):
        for p in iter_saps(n):
            gj = global_join_plaquettes(p)
            if not gj:
                continue
            for r in (0, 1, 2):
                for kappa in itertools.combinations(range(1, len(gj) + 1), r):
                    w = surgery.s_kappa(p, surgery.DetourSelection(kappa))
                    round_trips += 1
                    try:
                        if not surgery.reconstruct(w, r).same_position(p):
                            failures.append(f"wrong preimage {list(p.tour)} kappa={kappa}")
                    except surgery.SurgeryError as exc:
                        failures.append(f"{exc.code} for {list(p.tour)} kappa={kappa}")
    return not failures, f"{round_trips} detour round trips, {len(failures)} failures {_first(failures, 2)}"


def check_one_crossing_per_half():
    checked, bad = 0, []
    for n in range(4, 15, 2):
        for p in iter_saps(n):
            for plaq in global_join_plaquettes(p):
                checked += 1
                if surgery.halves_crossing(p, plaq) != (1, 1):
                    bad.append(f"{plaq.anchor} in {list(p.tour)}")
    return not bad, f"{checked} (polygon, global join plaquette) pairs, {len(bad)} failures {_first(bad, 1)}"


def check_tmha():
    report = verify.suite_tmha(14, random.Random(SEED), 1).report()
    return report["passed"], f"{report['checks']} index sets for i = 5..10, failures {report['failures']}"


def check_threedge():
    problems = []
    census = {n: len(list(threedge.iter_threedge_polygons(n, 2))) for n in (2, 4, 6)}
    if census[2] != 2:
        problems.append(f"p^_2 = {census[2]}")
    for n in (4, 6):
        if census[n] != oracle.threedge_count(n, 2):
            problems.append(f"p^_{n} = {census[n]} vs oracle {oracle.threedge_count(n, 2)}")
    polys = {n: list(threedge.iter_threedge_polygons(n, 2)) for n in (2, 4, 6)}
    pool = [p for ps in polys.values() for p in ps]
    joins, non_global = 0, []
    for a in pool:
        for b in pool:
            out = threedge.simple_join(a, b)
            joins += 1
            if out.joined.length != a.length + b.length + 2:
                problems.append(f"length law at {a.tour} {b.tour}")
            if out.junction not in threedge.global_join_edges(out.joined):
                non_global.append(f"{list(a.tour)} + {list(b.tour)}")
    if non_global:
        problems.append(f"{len(non_global)}/{joins} junctions not global, e.g. {non_global[0]}")
    for k, ell in itertools.product(polys, repeat=2):
        pairs = [(a, b) for a in polys[k] for b in polys[ell] if threedge.left_right_pair_check(a, b)]
        if 8 * len(pairs) < len(polys[k]) * len(polys[ell]):
            problems.append(f"pair count at ({k},{ell})")
        for a, b in pairs:
            if not threedge.claimmin_holds(len(threedge.strong_join_offsets_3d(a, b)), 2, k, ell):
                problems.append(f"offset bound at {a.tour} {b.tour}")
    rng = random.Random(SEED)
    lw_fail = 0
    for _ in range(10_000):
        d = rng.choice((2, 3))
        pts = {tuple(rng.randint(0, 5) for _ in range(d)) for _ in range(rng.randint(1, 80))}
        lw_fail += not loomis_whitney_holds(pts, d)
    if lw_fail:
        problems.append(f"{lw_fail} projection failures")
    return not problems, f"p^_2,4,6 = {census[2]},{census[4]},{census[6]}; {joins} joins; " + (
        "; ".join(problems) or "all parts hold")


def check_mu_lower_bound():
    p = sap_counts(14, 1)
    running = analysis.running_mu_lower(p)
    bound = analysis.mu_lower_bound(p)
    monotone = list(running.values()) == sorted(running.values())
    ok = Fraction(2) < bound < Fraction(28, 10) and monotone
    return ok, f"max_n (p_n)^(1/n) over n <= 14 = {float(bound):.6f}, monotone={monotone}; required in (2.0, 2.8)"


def check_performance():
    saw_statistics(12, 1)
    saw_statistics(12, 4)

    def timed(threads):
        best, result = None, None
        for _ in range(2):
            start = time.perf_counter()
            result = saw_statistics(18, threads)
            spent = time.perf_counter() - start
            best = spent if best is None else min(best, spent)
        return best, result

    single, one = timed(1)
    quad, four = timed(4)
    same = one == four
    speedup = single / quad
    ok = single < 60 and same and speedup >= 2
    return ok, (f"c_18 = {one.count[18]} in {single:.2f}s on 1 worker, {quad:.2f}s on 4 "
                f"(speedup {speedup:.2f}x, identical={same}, {os.cpu_count()} CPU)")


CRITERIA = [
    ("exact polygon counts", check_exact_counts),
    ("closing identity", check_closing_identity),
    ("supermultiplicativity", check_supermultiplicativity),
    ("Madras join contract", check_madras_contract),
    ("strong join offsets", check_strong_join),
    ("left and right polygon fractions", check_left_right_fractions),
    ("injection suite", check_injections),
    ("one crossing per half", check_one_crossing_per_half),
    ("many-high-arrow targets", check_tmha),
    ("3-edge model", check_threedge),
    ("connective constant lower bound", check_mu_lower_bound),
    ("performance", check_performance),
]


def _line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"


@pytest.mark.parametrize("name, check", CRITERIA, ids=[c[0].replace(" ", "-") for c in CRITERIA])
def test_acceptance(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for name, check in CRITERIA:
        ok, detail = check()
        failed += not ok
        print(_line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
