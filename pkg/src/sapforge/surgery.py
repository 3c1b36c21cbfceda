"""Injections behind the global join plaquette bound.

A normalized polygon is cut at its ES vertex into a first half (NE to ES
along the canonical tour) and a second half (ES back to NE).  Reflecting
the second half in the vertical line through ES gives a walk in the lower
half plane that returns to the x-axis.  Detours around selected global
join plaquettes lengthen the walk by two each, and the original polygon
can be read back off the walk.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from .enumerate import is_bridge, is_returning_half_space
from .lattice import Plaquette, Point, edge, reflect_horizontal_line, reflect_vertical_line
from .polygon import Polygon, PolygonError, Walk, global_join_plaquettes


class SurgeryError(ValueError):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


# -- reflection map ---------------------------------------------------------

def es_index(poly: Polygon) -> int:
    """Tour index of ES(poly)."""
    return poly.tour.index(poly.corner("ES"))


def _closed_tour(poly: Polygon) -> list[Point]:
    return list(poly.tour) + [poly.tour[0]]


def _reflect_tail(vertices: Sequence[Point], start: int, pivot: Point) -> list[Point]:
    mirror = reflect_vertical_line(pivot)
    return list(vertices[:start + 1]) + [mirror(p) for p in vertices[start + 1:]]


def reflect_split(poly: Polygon) -> Walk:
    """First half of the tour followed by the mirrored second half.

    The walk is self-avoiding exactly when NE lies strictly left of the
    rightmost column; otherwise the mirror fixes NE and the walk closes.
    """
    return s_kappa(poly, DetourSelection())


def halves_crossing(poly: Polygon, plaq: Plaquette) -> tuple[int, int]:
    """How many horizontal edges of ``plaq`` each half of the tour uses
    (poly normalized, plaq in the same coordinates)."""
    tour = _closed_tour(poly)
    j = es_index(poly)
    horizontal = set(plaq.horizontal_edges())
    steps = [edge(a, b) for a, b in zip(tour, tour[1:])]
    return (sum(1 for e in steps[:j] if e in horizontal),
            sum(1 for e in steps[j:] if e in horizontal))


# -- detour maps ------------------------------------------------------------

@dataclass(frozen=True)
class DetourSelection:
    """One-based indices into the sorted global join plaquettes."""

    indices: frozenset[int] = frozenset()

    def __init__(self, indices: Iterable[int] = ()):
        object.__setattr__(self, "indices", frozenset(indices))

    def __len__(self) -> int:
        return len(self.indices)

    def check(self, available: int) -> None:
        bad = [k for k in self.indices if not 1 <= k <= available]
        if bad:
            raise SurgeryError("bad-selection", f"indices {sorted(bad)} outside 1..{available}")


def s_kappa(poly: Polygon, selection: DetourSelection) -> Walk:
    """Reflected walk in which the second half goes the long way round
    every selected global join plaquette."""
    poly = poly.normalized()
    plaquettes = global_join_plaquettes(poly) if selection.indices else []
    selection.check(len(plaquettes))
    tour = _closed_tour(poly)
    j = es_index(poly)
    detours: dict[int, tuple[Point, Point]] = {}
    for k in sorted(selection.indices):
        plaq = plaquettes[k - 1]
        bottom, top = plaq.horizontal_edges()
        for t in range(j, len(tour) - 1):
            step = edge(tour[t], tour[t + 1])
            if step in (bottom, top):
                other = top if step == bottom else bottom
                a, b = tour[t], tour[t + 1]
                a_far = next(p for p in other if p[0] == a[0])
                b_far = next(p for p in other if p[0] == b[0])
                detours[t] = (a_far, b_far)
                break
        else:
            raise SurgeryError("bad-selection", f"second half misses plaquette {plaq.anchor}")
    second: list[Point] = []
    for t in range(j, len(tour) - 1):
        second.append(tour[t])
        if t in detours:
            second.extend(detours[t])
    second.append(tour[-1])
    vertices = tour[:j] + second
    return Walk(_reflect_tail(vertices, j, tour[j]), check=False)


def reconstruct(walk: Walk | Sequence[Point], detour_count: int) -> Polygon:
    """Invert :func:`s_kappa` for a selection of ``detour_count`` plaquettes."""
    vs = list(walk.vertices if isinstance(walk, Walk) else (tuple(p) for p in walk))
    if len(vs) < 5:
        raise SurgeryError("no-preimage", "walk too short")
    end_x = vs[-1][0]
    if end_x % 2 or vs[0] != (0, 0) or vs[-1][1] != 0:
        raise SurgeryError("no-preimage", "endpoint does not encode an ES column")
    column = end_x // 2
    on_column = [p for p in vs if p[0] == column]
    if not on_column:
        raise SurgeryError("no-preimage", "no vertex on the ES column")
    es = min(on_column, key=lambda p: p[1])
    j = vs.index(es)
    unfolded = _reflect_tail(vs, j, es)
    # Each detour runs once more along an edge of the first half.
    first_half = {edge(a, b) for a, b in zip(unfolded[:j + 1], unfolded[1:j + 1])}
    reused = {edge(a, b) for a, b in zip(unfolded[j:], unfolded[j + 1:])} & first_half
    if len(reused) != detour_count:
        raise SurgeryError("no-preimage", f"found {len(reused)} reused edges, expected {detour_count}")
    cleaned = unfolded[:j + 1]
    t = j + 1
    while t < len(unfolded):
        if t + 1 < len(unfolded) and edge(unfolded[t], unfolded[t + 1]) in reused:
            # unfolded[t-1] -> t -> t+1 -> t+2 is a detour; keep only the ends.
            t += 2
            continue
        cleaned.append(unfolded[t])
        t += 1
    if cleaned[-1] != cleaned[0]:
        raise SurgeryError("no-preimage", "unfolded walk does not close")
    try:
        poly = Polygon.from_cycle(cleaned[:-1])
    except PolygonError as exc:
        raise SurgeryError("no-preimage", str(exc)) from None
    if poly.tour[0] != (0, 0) or poly.tour[1] != cleaned[1]:
        raise SurgeryError("no-preimage", "recovered cycle is not in canonical position")
    plaquettes = global_join_plaquettes(poly)
    chosen = DetourSelection(k + 1 for k, p in enumerate(plaquettes)
                             if any(e in reused for e in p.horizontal_edges()))
    if len(chosen) != detour_count or s_kappa(poly, chosen).vertices != tuple(vs):
        raise SurgeryError("no-preimage", "forward map does not reproduce the walk")
    return poly


# -- half-space walks to bridges ---------------------------------------------

def fold_to_bridge(walk: Walk | Sequence[Point]) -> Walk:
    """Reflect everything after the last lowest visit in the horizontal
    line through it."""
    vs = list(walk.vertices if isinstance(walk, Walk) else (tuple(p) for p in walk))
    if len(set(vs)) != len(vs) or not is_returning_half_space(vs):
        raise SurgeryError("not-rhssaw", "input is not a returning half-space walk")
    low = min(p[1] for p in vs)
    last = max(i for i, p in enumerate(vs) if p[1] == low)
    mirror = reflect_horizontal_line((0, low))
    out = Walk(vs[:last + 1] + [mirror(p) for p in vs[last + 1:]], check=False)
    assert is_bridge(out.vertices)
    return out


# -- multi-valued map ledger -----------------------------------------------

@dataclass
class ArrowLedger:
    """Arrows from a finite domain A into a finite codomain B."""

    domain_size: int
    codomain_size: int
    arrows: list[tuple[Hashable, Hashable]] = field(default_factory=list)

    @classmethod
    def from_map(cls, domain: Iterable[Hashable], targets: Callable[[Hashable], Iterable[Hashable]],
                 codomain_size: int | None = None) -> "ArrowLedger":
        domain = list(domain)
        arrows = [(a, b) for a in domain for b in targets(a)]
        size = codomain_size if codomain_size is not None else len({b for _, b in arrows})
        ledger = cls(len(domain), size, arrows)
        ledger._sources = domain
        return ledger

    @property
    def out_degrees(self) -> Counter:
        deg = Counter(a for a, _ in self.arrows)
        for a in getattr(self, "_sources", ()):
            deg.setdefault(a, 0)
        return deg

    @property
    def m(self) -> int:
        deg = self.out_degrees
        if len(deg) < self.domain_size:
            return 0
        return min(deg.values(), default=0)

    @property
    def M(self) -> int:
        return max(Counter(b for _, b in self.arrows).values(), default=0)

    @property
    def total(self) -> int:
        return len(self.arrows)

    def sandwich_holds(self) -> bool:
        return self.m * self.domain_size <= self.total <= self.M * self.codomain_size


def ledger_bound(ledger: ArrowLedger) -> int:
    """ceil(m |A| / M), checking that |B| reaches it."""
    if ledger.M == 0:
        raise SurgeryError("no-arrows", "maximum in-degree is zero")
    ratio = Fraction(ledger.m * ledger.domain_size, ledger.M)
    if ledger.codomain_size < ratio:
        raise SurgeryError("ledger-violated", f"|B| = {ledger.codomain_size} < {ratio}")
    return math.ceil(ratio)


def ledger_report(lemma: str, n: int, lhs: int, rhs: int) -> dict:
    return {"lemma": lemma, "n": n, "lhs": lhs, "rhs": rhs, "holds": lhs >= rhs}


def ledger_report_json(lemma: str, n: int, lhs: int, rhs: int) -> str:
    return json.dumps(ledger_report(lemma, n, lhs, rhs), sort_keys=True)


def binomial_check(gj_size: int, k: int, delta: Fraction) -> bool:
    """C(|GJ|, floor(delta k)) >= C(k, floor(delta k)) whenever |GJ| >= k."""
    chosen = math.floor(Fraction(delta) * k)
    if gj_size < k:
        return True
    return math.comb(gj_size, chosen) >= math.comb(k, chosen)


# -- sum-map combinatorics ---------------------------------------------------

def dyadic_evens(i: int) -> list[int]:
    return [n for n in range(2 ** (i - 1), 2 ** i + 1) if n % 2 == 0]


def tmha(indices: Iterable[int], a: Fraction | float, i: int) -> tuple[set[int], bool]:
    """Targets of many high arrows.

    High arrows are the ordered pairs (j, k) of ``indices`` pointing at
    j + k.  Targets hit at least a^2 2^(i-2) / 8 times are returned, with a
    flag recording whether the size guarantee holds (vacuously true when
    ``indices`` is too sparse).
    """
    a = Fraction(a)
    block = set(dyadic_evens(i))
    chosen = sorted(set(indices))
    if any(s not in block for s in chosen):
        raise SurgeryError("bad-indices", f"indices must be even and in [2^{i - 1}, 2^{i}]")
    hits: defaultdict[int, int] = defaultdict(int)
    for j in chosen:
        for k in chosen:
            hits[j + k] += 1
    threshold = a * a * 2 ** (i - 2) / 8
    targets = {t for t, c in hits.items() if c >= threshold}
    if len(chosen) < a * 2 ** (i - 2):
        return targets, True
    return targets, len(targets) >= a * a * 2 ** (i - 1) / 8
