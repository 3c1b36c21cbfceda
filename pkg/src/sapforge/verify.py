"""Verification suites run by ``sapforge verify``.

Each suite returns a plain dict: its name, the statement it checks, how
many individual checks ran, and up to a handful of counterexamples.
Suites scale their census sizes with ``max_len`` and are deterministic for
a given seed.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from fractions import Fraction
from typing import Callable

from . import analysis, madras, surgery, threedge
from .enumerate import (
    closing_probability,
    is_returning_half_space,
    iter_saps,
    iter_walks,
    sap_counts,
    saw_statistics,
)
from .lattice import loomis_whitney_holds
from .polygon import (
    PolygonError,
    global_join_plaquettes,
    is_join_plaquette,
    is_left,
    is_right,
    validate_polygon,
)

MAX_FAILURES = 5


class Suite:
    def __init__(self, name: str, statement: str):
        self.name = name
        self.statement = statement
        self.checks = 0
        self.failures: list[str] = []
        self.notes: dict = {}

    def check(self, ok: bool, detail: Callable[[], str] | str = "") -> bool:
        self.checks += 1
        if not ok and len(self.failures) < MAX_FAILURES:
            self.failures.append(detail() if callable(detail) else detail)
        elif not ok:
            self.failures.append("...")
            self.failures = self.failures[:MAX_FAILURES + 1]
        return ok

    def report(self) -> dict:
        return {
            "suite": self.name,
            "statement": self.statement,
            "checks": self.checks,
            "passed": not self.failures,
            "failures": self.failures,
            "notes": self.notes,
        }


def _even(lo: int, hi: int) -> range:
    return range(lo + lo % 2, hi + 1, 2)


def _saps(max_len: int, cap: int) -> dict[int, list]:
    return {n: list(iter_saps(n)) for n in _even(4, min(max_len, cap))}


# -- suites -----------------------------------------------------------------

def suite_counts_oracle(max_len, rng, threads):
    s = Suite("counts-oracle", "compiled counts agree with direct Python enumeration")
    top = min(max_len, 12)
    fast = sap_counts(top, threads)
    for n in _even(4, top):
        slow = sum(1 for _ in iter_saps(n))
        s.check(fast.get(n, 0) == slow, f"p_{n}: engine {fast.get(n)} vs direct {slow}")
    stats = saw_statistics(min(max_len, 9), threads)
    for n in range(1, min(max_len, 9) + 1):
        slow = sum(1 for _ in iter_walks(n))
        s.check(stats.count[n] == slow, f"c_{n}: engine {stats.count[n]} vs direct {slow}")
    return s


def suite_supermult(max_len, rng, threads):
    s = Suite("supermult", "p_(n+m) >= p_n p_m / (d-1) for d = 2")
    p = sap_counts(max_len, threads)
    for n in _even(4, max_len):
        for m in _even(n, max_len - n):
            s.check(p[n + m] >= p[n] * p[m], f"p_{n + m} < p_{n} p_{m}")
    s.notes["best_constant"] = str(analysis.supermultiplicativity_constant(p))
    return s


def suite_step_a(max_len, rng, threads):
    s = Suite("step-a", "corner join adds lengths and is injective on pairs")
    saps = _saps(max_len, 10)
    for n in _even(4, min(max_len, 10)):
        for m in _even(4, min(max_len, 14) - n):
            seen = {}
            for a in saps.get(n, []):
                for b in saps.get(m, []):
                    chi, plaq = madras.step_a_join(a, b)
                    s.check(chi.length == n + m, f"length {chi.length}")
                    s.check(chi.tour not in seen, lambda: f"collision at {list(chi.tour)}")
                    seen[chi.tour] = (a, b)
    return s


def _madras_pairs(max_len, rng, samples):
    saps = _saps(max_len, 10)
    square = saps[4][0]
    pool = [p for ps in saps.values() for p in ps]
    pairs = []
    for k in range(square.ymin - square.ymax - 2, square.ymax - square.ymin + 3):
        pairs.append((square, square.translated(0, k)))
    exhaustive = len(pairs)
    while len(pairs) < exhaustive + samples and pool:
        tau, sigma = rng.choice(pool), rng.choice(pool)
        k = rng.randint(tau.ymin - sigma.ymax - 2, tau.ymax - sigma.ymin + 2)
        pairs.append((tau, sigma.translated(rng.randint(-4, 4), k)))
    return pairs


def madras_contract_failures(tau, sigma) -> list[str]:
    """Every way in which one join misses its contract (empty when fine)."""
    out = madras.madras_join(tau, sigma)
    problems = []
    if out.joined.length != tau.length + sigma.length + 16:
        problems.append("length")
    if out.T2 not in (5, 6, 7):
        problems.append(f"T2={out.T2}")
    if not is_join_plaquette(out.joined, out.junction):
        problems.append("junction")
    for mod, orig, case in ((out.tau_modified, tau, out.case_tau),
                            (out.sigma_modified, sigma, out.case_sigma)):
        if mod.length - orig.length != 8:
            problems.append(f"modify {case} adds {mod.length - orig.length}")
    ext = madras.corridor_extension(out.tau_modified, out.Y)
    if ext != madras.TEMPLATES[out.case_tau].extension or ext not in (2, 3):
        problems.append(f"extension {ext} for {out.case_tau}")
    # unjoin hands sigma back where no horizontal slide is needed
    joinable_sigma = sigma.translated(out.T1 + out.T2, 0)
    try:
        back_tau, back_sigma = madras.madras_unjoin(out.joined, out.junction)
        if not (back_tau.same_position(tau) and back_sigma.same_position(joinable_sigma)):
            problems.append("unjoin returned a different pair")
    except madras.MadrasError as exc:
        problems.append(f"unjoin: {exc}")
    return problems


def suite_madras_join(max_len, rng, threads, samples=1000):
    s = Suite("madras-join", "join contract: length +16, T2 in 5..7, +8 per side, "
                             "2 or 3 unit corridor, junction plaquette, exact unjoin")
    cases = Counter()
    for tau, sigma in _madras_pairs(max_len, rng, samples):
        problems = madras_contract_failures(tau, sigma)
        s.check(not problems, lambda: f"{problems} for tau={list(tau.tour)} sigma={list(sigma.tour)}")
        out = madras.madras_join(tau, sigma)
        cases[out.case_tau] += 1
        cases[out.case_sigma] += 1
    s.notes["cases"] = dict(sorted(cases.items()))
    return s


def suite_unjoin_roundtrip(max_len, rng, threads, samples=300):
    s = Suite("unjoin-roundtrip", "one preimage per junction, so a joined polygon has at "
                                  "most |GJ| preimages; tampered input is rejected")
    for tau, sigma in _madras_pairs(max_len, rng, samples):
        out = madras.madras_join(tau, sigma)
        s.check(len(madras.madras_preimages(out.joined, out.junction)) == 1, "preimage count")
        gj = global_join_plaquettes(out.joined)
        if out.junction in gj:
            total = sum(len(madras.madras_preimages(out.joined, p)) for p in gj)
            s.check(total <= len(gj), f"{total} preimages for {len(gj)} plaquettes")
        bottom = out.junction.bottom()
        tampered_edges = set(out.joined.edges) ^ {bottom}
        try:
            tampered = validate_polygon(tampered_edges)
        except PolygonError:
            s.check(True)
            continue
        s.check(not madras.madras_preimages(tampered, out.junction), "tampered polygon accepted")
    return s


def suite_strongjoin(max_len, rng, threads):
    s = Suite("strongjoin", "|StrongJoin| >= min(sqrt(n)/2, sqrt(m)) for left/right pairs")
    saps = _saps(max_len, 8)
    sizes = {}
    for n, m in itertools.product(saps, repeat=2):
        for a in (p for p in saps[n] if is_left(p)):
            for b in (p for p in saps[m] if is_right(p)):
                count = len(madras.strong_join_offsets(a, b))
                sizes[(n, m)] = min(sizes.get((n, m), count), count)
                s.check(madras.strong_join_bound_holds(count, n, m),
                        lambda: f"{count} offsets for {list(a.tour)} / {list(b.tour)}")
    s.notes["min_offsets"] = {f"{n},{m}": v for (n, m), v in sorted(sizes.items())}
    return s


def suite_reflect_split(max_len, rng, threads):
    s = Suite("reflect-split", "reflection map injective; each half crosses a global "
                               "join plaquette exactly once")
    for n in _even(4, min(max_len, 14)):
        seen = {}
        for p in iter_saps(n):
            w = surgery.reflect_split(p)
            s.check(w.vertices not in seen, lambda: f"collision {list(p.tour)}")
            seen[w.vertices] = p
            s.check(w.vertices[-1][0] == 2 * p.corner("ES")[0], "endpoint key")
            for plaq in global_join_plaquettes(p):
                s.check(surgery.halves_crossing(p, plaq) == (1, 1),
                        lambda: f"{plaq.anchor} in {list(p.tour)}")
    return s


def suite_s_kappa(max_len, rng, threads):
    s = Suite("s-kappa", "detour maps lengthen by 2|kappa| and invert exactly")
    strict_misses = []
    for n in _even(4, min(max_len, 12)):
        for p in iter_saps(n):
            gj = global_join_plaquettes(p)
            if not gj:
                continue
            for r in (0, 1, 2):
                for kappa in itertools.combinations(range(1, len(gj) + 1), r):
                    sel = surgery.DetourSelection(kappa)
                    w = surgery.s_kappa(p, sel)
                    s.check(w.length == n + 2 * r, "length")
                    try:
                        back = surgery.reconstruct(w, r)
                        s.check(back.same_position(p), lambda: f"wrong preimage for {list(p.tour)}")
                    except surgery.SurgeryError as exc:
                        s.check(False, f"{exc} for {list(p.tour)} kappa={kappa}")
                    if not w.strict:
                        strict_misses.append({"tour": [list(v) for v in p.tour], "kappa": list(kappa)})
    s.notes["non_strict_images"] = strict_misses[:MAX_FAILURES]
    s.notes["non_strict_count"] = len(strict_misses)
    return s


def suite_fold_bridge(max_len, rng, threads):
    s = Suite("fold-bridge", "half-space to bridge fold is injective, so |RHSSAW_n| <= bridges_n")
    for n in range(1, min(max_len, 10) + 1):
        walks = [w for w in iter_walks(n, 2, half_space=True) if is_returning_half_space(w)]
        images = {surgery.fold_to_bridge(w).vertices for w in walks}
        s.check(len(images) == len(walks), f"collision at n={n}")
    return s


def suite_ledger(max_len, rng, threads):
    s = Suite("ledger", "arrow count sandwich m|A| <= arrows <= M|B| and |B| >= m|A|/M")
    total = 16 if max_len >= 12 else 8
    i = total.bit_length() - 2
    saps = _saps(total, total - 4)
    domain = []
    for j in _even(2 ** (i - 1), 2 ** i):
        if total - j < 4 or j not in saps or total - j not in saps:
            continue
        domain += [(a, b) for a in saps[j] if is_left(a) for b in saps[total - j] if is_right(b)]

    def images(pair):
        a, b = pair
        for u in sorted(madras.strong_join_offsets(a, b)):
            out = madras.madras_join(a, b.translated(*u))
            yield out.joined.normalized().tour

    ledger = surgery.ArrowLedger.from_map(range(len(domain)), lambda k: images(domain[k]))
    s.check(ledger.sandwich_holds(), "sandwich")
    if ledger.M:
        bound = surgery.ledger_bound(ledger)
        s.check(ledger.codomain_size >= bound, f"|B| = {ledger.codomain_size} < {bound}")
    p = sap_counts(total, threads)
    rhs = sum(Fraction(p[j] * p[total - j]) * _sqrt_up(total - j)
              for j in _even(2 ** (i - 1), 2 ** i) if total - j > 0 and (total - j) in p)
    lhs = ledger.total * 16 * _sqrt_down(3)
    s.check(lhs >= rhs, f"arrows {ledger.total} below the dyadic window bound")
    s.notes["report"] = surgery.ledger_report("arrow total over the dyadic window", total,
                                              ledger.total, math.ceil(rhs / (16 * _sqrt_down(3))))
    s.notes.update({"domain": ledger.domain_size, "images": ledger.codomain_size,
                    "m": ledger.m, "M": ledger.M})
    return s


def _sqrt_down(n: int) -> Fraction:
    return analysis._root_floor(Fraction(n), 2)


def _sqrt_up(n: int) -> Fraction:
    r = _sqrt_down(n)
    return r if r * r == n else r + Fraction(1, 10 ** analysis.ROOT_DIGITS)


def suite_tmha(max_len, rng, threads, densities=100):
    s = Suite("tmha", "a dense index set has many sum targets hit by many arrows")
    for i in range(5, 11):
        block = surgery.dyadic_evens(i)
        for _ in range(densities):
            a = Fraction(rng.randint(1, 1000), 1000)
            size = min(len(block), math.ceil(a * 2 ** (i - 2)))
            chosen = rng.sample(block, size)
            _, ok = surgery.tmha(chosen, a, i)
            s.check(ok, f"i={i}, a={a}")
    return s


def suite_threedge(max_len, rng, threads):
    s = Suite("threedge", "3-edge joins: length n+m+2, junction is a join edge, "
                          "detour reconstruction, Loomis-Whitney projections")
    top = min(max_len, 6)
    polys = {n: list(threedge.iter_threedge_polygons(n, 2)) for n in _even(2, top)}
    pool = [p for ps in polys.values() for p in ps]
    non_global = []
    for a in pool:
        for b in pool:
            out = threedge.simple_join(a, b)
            s.check(out.joined.length == a.length + b.length + 2, "length")
            s.check(out.junction in threedge.join_edges(out.joined), "junction not a join edge")
            s.check(sorted(threedge.simple_unjoin(out), key=lambda q: q.tour) ==
                    sorted((a, b), key=lambda q: q.tour), "unjoin")
            if threedge.global_split(out.joined, out.junction) is None:
                non_global.append((a.tour, b.tour))
                continue
            s.check(out.junction in threedge.global_join_edges(out.joined), "not global")
    s.notes["non_global_junctions"] = len(non_global)
    s.notes["non_global_examples"] = [[list(map(list, t)) for t in pair] for pair in non_global[:3]]
    for n in _even(2, min(max_len, 8)):
        for p in threedge.iter_threedge_polygons(n, 2):
            g = threedge.global_join_edges(p)
            for r in (0, 1, 2):
                for kappa in itertools.combinations(range(1, len(g) + 1), r):
                    w = threedge.s_kappa_3d(p, kappa)
                    s.check(w.length == n + 2 * r, "length")
                    try:
                        s.check(threedge.reconstruct_3d(w, r) == p, "wrong preimage")
                    except threedge.ThreeEdgeError as exc:
                        s.check(False, f"{exc} for {p.tour}")
    for _ in range(1000):
        d = rng.choice((2, 3))
        pts = {tuple(rng.randint(0, 4) for _ in range(d)) for _ in range(rng.randint(1, 64))}
        s.check(loomis_whitney_holds(pts, d), f"{sorted(pts)}")
    return s


def suite_leftright(max_len, rng, threads):
    s = Suite("leftright", "left polygons are at least p_n/4, right ones at least p_n/2; "
                           "3-edge left/right pair and offset bounds")
    for n in _even(4, min(max_len, 14)):
        ps = list(iter_saps(n))
        lefts = sum(1 for p in ps if is_left(p))
        rights = sum(1 for p in ps if is_right(p))
        s.check(4 * lefts >= len(ps), f"left n={n}: {lefts}/{len(ps)}")
        s.check(2 * rights >= len(ps), f"right n={n}: {rights}/{len(ps)}")
    polys = {n: list(threedge.iter_threedge_polygons(n, 2)) for n in _even(2, min(max_len, 6))}
    for k, ell in itertools.product(polys, repeat=2):
        pairs = [(a, b) for a in polys[k] for b in polys[ell] if threedge.left_right_pair_check(a, b)]
        s.check(2 * 4 * len(pairs) >= len(polys[k]) * len(polys[ell]), f"pair count at {k},{ell}")
        for a, b in pairs:
            count = len(threedge.strong_join_offsets_3d(a, b))
            s.check(threedge.claimmin_holds(count, 2, k, ell), f"{count} offsets at {a.tour} {b.tour}")
    return s


def suite_closing_identity(max_len, rng, threads):
    s = Suite("closing-identity", "closing fraction equals 2(n+1)p_(n+1)/c_n for odd n")
    for n in range(1, min(max_len, 11) + 1, 2):
        cp = closing_probability(n, threads)
        s.check(cp.agrees, f"n={n}: {cp.direct} vs {cp.formula}")
    if max_len >= 3:
        s.check(closing_probability(3).direct == Fraction(2, 9), "n=3 is not 2/9")
    return s


SUITES = {
    "counts-oracle": suite_counts_oracle,
    "supermult": suite_supermult,
    "step-a": suite_step_a,
    "madras-join": suite_madras_join,
    "strongjoin": suite_strongjoin,
    "unjoin-roundtrip": suite_unjoin_roundtrip,
    "reflect-split": suite_reflect_split,
    "s-kappa": suite_s_kappa,
    "fold-bridge": suite_fold_bridge,
    "ledger": suite_ledger,
    "tmha": suite_tmha,
    "threedge": suite_threedge,
    "leftright": suite_leftright,
    "closing-identity": suite_closing_identity,
}


def run_suites(names, max_len: int, seed: int = 0, threads: int = 1) -> dict:
    reports = []
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        reports.append(SUITES[name](max_len, rng, threads).report())
    return {
        "max_len": max_len,
        "seed": seed,
        "passed": all(r["passed"] for r in reports),
        "suites": reports,
    }
