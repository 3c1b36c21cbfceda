"""Polygon joining in d = 2: the corner join and the Madras join.

Local case table
----------------
Coordinates below are relative to the contact vertex Y.  Write A = (0, 1),
B = (0, 0), C = (0, -1), L = (-1, 0), W = (-1, 1), V = (-1, -1).  The
polygon has no vertex in the right corridor {x >= 1} x {-1, 0, 1}, and at
least one of A, B, C is a vertex.

* I   B is a vertex.  Ia: the edge AB is present; Ib: otherwise (BC is).
* II  B is absent and A is present, so A meets W and (0, 2).
  IIa: L absent.  IIb: WL is an edge.  IIc: L is a vertex not joined to W,
  so L meets (-2, 0) and V; IIci: C absent, IIcii: C present.
* III B and A absent: case II mirrored in the horizontal line through Y.

Each case deletes one or two edges and inserts a path through the corridor
ending in a vertical run x = ext, y in [-1, 1], ext = 2 for IIa, IIci and
their mirrors IIIa, IIIci, and 3 otherwise.  The net gain is always eight edges.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from .lattice import (
    Plaquette,
    Point,
    edge,
    rotate_pi_about,
)
from .polygon import (
    Polygon,
    PolygonError,
    classify,
    global_split,
    is_join_plaquette,
    plaquette_join,
    split_at,
    validate_polygon,
)

CASES = ("Ia", "Ib", "IIa", "IIb", "IIci", "IIcii", "IIIa", "IIIb", "IIIci", "IIIcii")
# Mirroring a case keeps its extension, so IIIa is short along with IIa.
SHORT_CASES = frozenset({"IIa", "IIci", "IIIa", "IIIci"})
LOCALITY_RADIUS = 5


class MadrasError(ValueError):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


class Template(NamedTuple):
    removed: tuple[tuple[Point, Point], ...]
    path: tuple[Point, ...]
    extension: int


# Two ways of running from A through the 3-wide corridor back to B: the
# first skips (2, 0), the second skips (1, -1).
_ROUTE1 = ((0, 1), (1, 1), (2, 1), (3, 1), (3, 0), (3, -1), (2, -1), (1, -1), (1, 0), (0, 0))
_ROUTE2 = ((0, 1), (1, 1), (2, 1), (3, 1), (3, 0), (3, -1), (2, -1), (2, 0), (1, 0), (0, 0))

_UPPER_TEMPLATES = {
    "Ia": Template((((0, 1), (0, 0)),), _ROUTE1, 3),
    "IIa": Template((((0, 1), (-1, 1)),),
                    ((0, 1), (1, 1), (2, 1), (2, 0), (2, -1), (1, -1), (1, 0), (0, 0),
                     (-1, 0), (-1, 1)), 2),
    "IIb": Template((((0, 1), (-1, 1)), ((-1, 1), (-1, 0))), _ROUTE2 + ((-1, 0),), 3),
    "IIci": Template((((-1, 0), (-1, -1)),),
                     ((-1, 0), (0, 0), (1, 0), (1, 1), (2, 1), (2, 0), (2, -1), (1, -1),
                      (0, -1), (-1, -1)), 2),
    # L, then the mirror of route 2 from B down to C.
    "IIcii": Template((((-1, 0), (-1, -1)), ((-1, -1), (0, -1))),
                      ((-1, 0), (0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (3, 0), (3, -1),
                       (2, -1), (1, -1), (0, -1)), 3),
}


def _mirror(t: Template) -> Template:
    flip = lambda p: (p[0], -p[1])
    return Template(tuple((flip(a), flip(b)) for a, b in t.removed),
                    tuple(flip(p) for p in t.path), t.extension)


TEMPLATES: dict[str, Template] = dict(_UPPER_TEMPLATES)
TEMPLATES["Ib"] = _mirror(_UPPER_TEMPLATES["Ia"])
for _name in ("IIa", "IIb", "IIci", "IIcii"):
    TEMPLATES["III" + _name[2:]] = _mirror(_UPPER_TEMPLATES[_name])


def template_edges(case: str, y: Point) -> tuple[set, set]:
    """(removed, added) edge sets of ``case`` placed at contact vertex y."""
    t = TEMPLATES[case]
    shift = lambda p: (p[0] + y[0], p[1] + y[1])
    removed = {edge(shift(a), shift(b)) for a, b in t.removed}
    path = [shift(p) for p in t.path]
    added = {edge(a, b) for a, b in zip(path, path[1:])}
    return removed, added


def classify_local(poly: Polygon, y: Point) -> str:
    """Name the local configuration of ``poly`` at contact vertex y."""
    vs, es = poly.vertices, poly.edges
    at = lambda dx, dy: (y[0] + dx, y[1] + dy)
    if any(at(dx, dy) in vs for dx in range(1, 4) for dy in (-1, 0, 1)):
        raise MadrasError("unclassified-local-configuration", "right corridor is occupied")
    if at(0, 0) in vs:
        return "Ia" if edge(at(0, 1), at(0, 0)) in es else "Ib"
    for prefix, s in (("II", 1), ("III", -1)):
        if at(0, s) not in vs:
            continue
        if at(-1, 0) not in vs:
            return prefix + "a"
        if edge(at(-1, s), at(-1, 0)) in es:
            return prefix + "b"
        return prefix + ("ci" if at(0, -s) not in vs else "cii")
    raise MadrasError("unclassified-local-configuration", f"no vertex of the polygon next to {y}")


def modify(poly: Polygon, y: Point) -> tuple[Polygon, str]:
    """Local surgery at y adding eight edges and a corridor tab."""
    case = classify_local(poly, y)
    removed, added = template_edges(case, y)
    es = poly.edges
    new_vertices = {p for e in added for p in e} - {p for e in removed for p in e}
    if not removed <= es or added & es or new_vertices & poly.vertices:
        raise MadrasError("unclassified-local-configuration", f"case {case} does not fit at {y}")
    try:
        out = validate_polygon((es - removed) | added)
    except PolygonError as exc:
        raise MadrasError("unclassified-local-configuration", str(exc)) from None
    return out, case


def corridor_extension(poly: Polygon, y: Point) -> int:
    """How far ``poly`` reaches into the right corridor of y (0 if not)."""
    xs = [p[0] - y[0] for p in poly.tour if p[0] > y[0] and abs(p[1] - y[1]) <= 1]
    return max(xs, default=0)


def t2_for(case_tau: str, case_sigma: str) -> int:
    short = (case_tau in SHORT_CASES) + (case_sigma in SHORT_CASES)
    return 7 - short


# -- slide ------------------------------------------------------------------

def _rows(poly: Polygon) -> dict[int, list[int]]:
    rows: dict[int, list[int]] = defaultdict(list)
    for x, y in poly.tour:
        rows[y].append(x)
    return rows


def intervals_meet(tau: Polygon, sigma: Polygon) -> bool:
    return tau.ymin - 1 <= sigma.ymax + 1 and sigma.ymin - 1 <= tau.ymax + 1


def slide_to_contact(tau: Polygon, sigma: Polygon) -> tuple[Polygon, int, Point]:
    """Slide sigma in from the far right; return (sigma', T1, Y)."""
    if not intervals_meet(tau, sigma):
        raise MadrasError("no-vertical-overlap")
    rt, rs = _rows(tau), _rows(sigma)
    t1 = max(max(rt[a]) - min(rs[b])
             for a in rt for b in range(a - 2, a + 3) if b in rs)
    moved = sigma.translated(t1, 0)
    cols_t: dict[int, list[int]] = defaultdict(list)
    for x, y in tau.tour:
        cols_t[x].append(y)
    best = None
    for x, y in moved.tour:
        for ty in cols_t.get(x, ()):
            if abs(ty - y) <= 2:
                cand = (min(ty, y) + 1, x)
                if best is None or cand > best:
                    best = cand
    return moved, t1, (best[1], best[0])


# -- joins --------------------------------------------------------------------

@dataclass(frozen=True)
class JoinOutcome:
    joined: Polygon
    junction: Plaquette
    Y: Point
    T1: int
    T2: int
    case_tau: str
    case_sigma: str
    tau_modified: Polygon | None = None
    sigma_modified: Polygon | None = None

    @property
    def joinable(self) -> bool:
        return self.T1 + self.T2 == 0

    def to_record(self) -> dict:
        return {
            "joined": self.joined.to_record(),
            "junction": list(self.junction.anchor),
            "Y": list(self.Y),
            "T1": self.T1,
            "T2": self.T2,
            "cases": [self.case_tau, self.case_sigma],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))


def step_a_join(phi: Polygon, other: Polygon) -> tuple[Polygon, Plaquette]:
    """Corner join: put WN(other) one unit right of EN(phi), swap the
    plaquette whose upper-left corner is EN(phi).  Output is normalized."""
    en = phi.corner("EN")
    wn = other.corner("WN")
    moved = other.translated(en[0] + 1 - wn[0], en[1] - wn[1])
    plaq = Plaquette((en[0], en[1] - 1))
    chi = plaquette_join(phi, moved, plaq)
    dx, dy = chi.ne
    return chi.normalized(), Plaquette((plaq.anchor[0] - dx, plaq.anchor[1] - dy))


def _modify_sigma(sigma_slid: Polygon, y: Point) -> tuple[Polygon, str]:
    turn = rotate_pi_about(y)
    mod, case = modify(sigma_slid.transformed(turn), y)
    return mod.transformed(turn), case


def madras_join(tau: Polygon, sigma: Polygon) -> JoinOutcome:
    """Join tau and sigma into a polygon of length |tau| + |sigma| + 16."""
    moved, t1, y = slide_to_contact(tau, sigma)
    tau_mod, case_tau = modify(tau, y)
    sigma_mod, case_sigma = _modify_sigma(moved, y)
    t2 = t2_for(case_tau, case_sigma)
    ext = TEMPLATES[case_tau].extension
    shifted = sigma_mod.translated(t2, 0)
    junction = Plaquette((y[0] + ext, y[1]))
    joined = plaquette_join(tau_mod, shifted, junction)
    return JoinOutcome(joined, junction, y, t1, t2, case_tau, case_sigma, tau_mod, shifted)


def is_madras_joinable(tau: Polygon, sigma: Polygon) -> bool:
    return intervals_meet(tau, sigma) and madras_join(tau, sigma).joinable


def is_globally_madras_joinable(tau: Polygon, sigma: Polygon) -> bool:
    if not intervals_meet(tau, sigma):
        return False
    out = madras_join(tau, sigma)
    return out.joinable and global_split(out.joined, out.junction) is not None


def strong_join_offsets(phi1: Polygon, phi2: Polygon, check_classes: bool = True) -> set[Point]:
    """All u with (phi1, phi2 + u) globally Madras joinable."""
    phi1, phi2 = phi1.normalized(), phi2.normalized()
    if check_classes and not (classify(phi1)["is_left"] and classify(phi2)["is_right"]):
        raise MadrasError("classification", "need a left polygon and a right polygon")
    offsets = set()
    lo = phi1.ymin - phi2.ymax - 2
    hi = phi1.ymax - phi2.ymin + 2
    for k in range(lo, hi + 1):
        sigma = phi2.translated(0, k)
        if not intervals_meet(phi1, sigma):
            continue
        out = madras_join(phi1, sigma)
        # Shift sigma so that no horizontal slide is needed.
        u = (out.T1 + out.T2, k)
        if global_split(out.joined, out.junction) is not None:
            offsets.add(u)
    return offsets


def strong_join_bound(n: int, m: int) -> float:
    return min(n ** 0.5 / 2, m ** 0.5)


# -- inverse ----------------------------------------------------------------

def _undo(modified: Polygon, y: Point, case: str) -> Polygon | None:
    removed, added = template_edges(case, y)
    es = modified.edges
    if not added <= es or removed & es:
        return None
    try:
        before = validate_polygon((es - added) | removed)
        if classify_local(before, y) != case:
            return None
    except (PolygonError, MadrasError):
        return None
    return before


def madras_preimages(chi: Polygon, plaq: Plaquette) -> list[tuple[Polygon, Polygon]]:
    """Every Madras joinable pair whose join is chi with junction plaq."""
    if not is_join_plaquette(chi, plaq):
        return []
    try:
        a, b = split_at(chi, plaq)
    except PolygonError:
        return []
    left_side = plaq.left()
    left, right = (a, b) if left_side in a.edges else (b, a)
    found: list[tuple[Polygon, Polygon]] = []
    px, py = plaq.anchor
    for ext in (2, 3):
        y = (px - ext, py)
        taus = [t for c in CASES if TEMPLATES[c].extension == ext
                if (t := _undo(left, y, c)) is not None]
        if not taus:
            continue
        turn = rotate_pi_about(y)
        for ext2 in (2, 3):
            t2 = ext + ext2 + 1
            rotated = right.translated(-t2, 0).transformed(turn)
            for c2 in CASES:
                if TEMPLATES[c2].extension != ext2:
                    continue
                s = _undo(rotated, y, c2)
                if s is None:
                    continue
                sigma = s.transformed(turn).translated(t2, 0)
                for tau in taus:
                    try:
                        out = madras_join(tau, sigma)
                    except (MadrasError, PolygonError):
                        continue
                    if (out.joinable and out.junction == plaq
                            and out.joined.same_position(chi)):
                        pair = (tau, sigma)
                        if not any(p[0].same_position(tau) and p[1].same_position(sigma)
                                   for p in found):
                            found.append(pair)
    return found


def madras_unjoin(chi: Polygon, plaq: Plaquette) -> tuple[Polygon, Polygon]:
    """Recover the joinable pair (tau, sigma) from its join and junction.

    sigma comes back at the position where no horizontal slide is needed,
    so for a joinable input pair this is exactly the original.
    """
    pre = madras_preimages(chi, plaq)
    if not pre:
        raise MadrasError("not-a-madras-junction", f"{plaq.anchor}")
    if len(pre) > 1:
        raise MadrasError("ambiguous-preimage", f"{len(pre)} pairs join to this polygon")
    return pre[0]


def strong_join_bound_holds(count: int, n: int, m: int) -> bool:
    """count >= min(sqrt(n)/2, sqrt(m)), decided in integers."""
    return 4 * count * count >= n or count * count >= m
