"""Walks and polygons that may use each lattice edge up to three times.

A 3-edge polygon is a closing walk up to cyclic shift, reversal and
translation.  Its canonical representative is translated so the
lexicographically smallest vertex (Left) sits at the origin, then chosen
lexicographically minimal among all cyclic shifts of both orientations.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .lattice import Edge, Point, edge, is_adjacent, neighbours, project_axial, reflect_e1_hyperplane

MAX_LOCAL_TIME = 3


class ThreeEdgeError(ValueError):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


def _steps(vertices: Sequence[Point]) -> list[Edge]:
    return [edge(a, b) for a, b in zip(vertices, vertices[1:])]


class ThreeEdgeWalk:
    """Unit-step walk with at most three traversals of any edge."""

    __slots__ = ("vertices", "__dict__")

    def __init__(self, vertices: Iterable[Point], limit: int = MAX_LOCAL_TIME):
        vs = tuple(tuple(p) for p in vertices)
        for a, b in zip(vs, vs[1:]):
            if not is_adjacent(a, b):
                raise ThreeEdgeError("bad-step", f"{a} -> {b}")
        self.vertices = vs
        if self.max_local_time > limit:
            raise ThreeEdgeError("local-time", f"an edge is used {self.max_local_time} times")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @cached_property
    def edge_multiplicity(self) -> Counter:
        return Counter(_steps(self.vertices))

    @property
    def max_local_time(self) -> int:
        return max(self.edge_multiplicity.values(), default=0)

    @property
    def closes(self) -> bool:
        return self.length > 0 and self.vertices[0] == self.vertices[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, ThreeEdgeWalk) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"ThreeEdgeWalk({list(self.vertices)})"


def _canonical_cycle(cycle: Sequence[Point]) -> tuple[Point, ...]:
    low = min(cycle)
    shifted = [tuple(a - b for a, b in zip(p, low)) for p in cycle]
    n = len(shifted)
    best = None
    for seq in (shifted, shifted[::-1]):
        for k in range(n):
            if seq[k] != shifted_origin(len(low)):
                continue
            cand = tuple(seq[k:] + seq[:k])
            if best is None or cand < best:
                best = cand
    return best


def shifted_origin(d: int) -> Point:
    return (0,) * d


@dataclass(frozen=True)
class ThreeEdgePolygon:
    """Canonical closing 3-edge walk; ``tour`` lists gamma_0..gamma_{n-1}."""

    tour: tuple[Point, ...]

    @property
    def length(self) -> int:
        return len(self.tour)

    @property
    def dim(self) -> int:
        return len(self.tour[0])

    @property
    def closed_tour(self) -> tuple[Point, ...]:
        return self.tour + (self.tour[0],)

    @property
    def vertices(self) -> frozenset[Point]:
        return frozenset(self.tour)

    @property
    def left(self) -> Point:
        return min(self.tour)

    @property
    def right(self) -> Point:
        return max(self.tour)

    @property
    def x_span(self) -> int:
        xs = [p[0] for p in self.tour]
        return max(xs) - min(xs)

    def translated(self, offset: Point) -> tuple[Point, ...]:
        """Closed tour moved by ``offset`` (not re-canonicalized)."""
        return tuple(tuple(a + b for a, b in zip(p, offset)) for p in self.closed_tour)

    def projection(self, offset: Point | None = None) -> set[Point]:
        pts = self.tour if offset is None else self.translated(offset)
        return project_axial(pts, d=self.dim)

    def to_record(self) -> dict:
        return {"dim": self.dim, "n": self.length, "tour": [list(p) for p in self.tour]}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))

    @classmethod
    def from_record(cls, record: dict) -> "ThreeEdgePolygon":
        tour = [tuple(p) for p in record["tour"]]
        if len(tour) != record["n"] or any(len(p) != record["dim"] for p in tour):
            raise ThreeEdgeError("bad-record", "n or dim does not match the tour")
        return canonicalize_3e(tour + tour[:1])

    @classmethod
    def from_json(cls, text: str) -> "ThreeEdgePolygon":
        return cls.from_record(json.loads(text))


def canonicalize_3e(walk: ThreeEdgeWalk | Sequence[Point]) -> ThreeEdgePolygon:
    if not isinstance(walk, ThreeEdgeWalk):
        walk = ThreeEdgeWalk(walk, limit=10**9)
    if not walk.closes:
        raise ThreeEdgeError("not-closing", "walk does not return to its start")
    if walk.max_local_time > MAX_LOCAL_TIME:
        raise ThreeEdgeError("local-time", f"an edge is used {walk.max_local_time} times")
    return ThreeEdgePolygon(_canonical_cycle(list(walk.vertices[:-1])))


# -- enumeration --------------------------------------------------------------

def iter_closing_walks(n: int, d: int, limit: int = MAX_LOCAL_TIME,
                       first_steps: Sequence[Point] | None = None) -> Iterator[tuple[Point, ...]]:
    """Closing walks of length n from the origin with local time <= limit."""
    origin = shifted_origin(d)
    path = [origin]
    used: Counter = Counter()

    def rec():
        k = len(path) - 1
        here = path[-1]
        if k == n:
            if here == origin:
                yield tuple(path)
            return
        options = neighbours(here) if k or first_steps is None else first_steps
        for q in options:
            if sum(abs(c) for c in q) > n - k - 1:
                continue
            e = edge(here, q)
            if used[e] >= limit:
                continue
            used[e] += 1
            path.append(q)
            yield from rec()
            path.pop()
            used[e] -= 1

    yield from rec()


def _polygons_of_length(n: int, d: int) -> set[tuple[Point, ...]]:
    # Every polygon has a representative whose tour starts at Left with a
    # step in a positive direction, so the origin walks can start there.
    first = [tuple(1 if k == a else 0 for k in range(d)) for a in range(d)]
    found = set()
    for w in iter_closing_walks(n, d, first_steps=first):
        if min(w) == w[0]:
            found.add(_canonical_cycle(list(w[:-1])))
    return found


def iter_threedge_polygons(n: int, d: int = 2) -> Iterator[ThreeEdgePolygon]:
    if n < 2 or n % 2:
        return
    for tour in sorted(_polygons_of_length(n, d)):
        yield ThreeEdgePolygon(tour)


def threedge_polygon_counts(max_len: int, d: int = 2) -> dict[int, int]:
    return {n: (len(_polygons_of_length(n, d)) if n >= 2 and n % 2 == 0 else 0)
            for n in range(1, max_len + 1)}


def k_edge_walk_counts(max_len: int, d: int = 2, limit: int = 1) -> dict[int, int]:
    """Walks from the origin using each edge at most ``limit`` times."""
    counts = Counter()
    origin = shifted_origin(d)
    used: Counter = Counter()

    def rec(here, k):
        counts[k] += 1
        if k == max_len:
            return
        for q in neighbours(here):
            e = edge(here, q)
            if used[e] >= limit:
                continue
            used[e] += 1
            rec(q, k + 1)
            used[e] -= 1

    rec(origin, 0)
    return dict(sorted(counts.items()))


# -- join edges -------------------------------------------------------------

def _pieces(tour: Sequence[Point], e: Edge) -> tuple[list[Point], list[Point]] | None:
    """Remove both traversals of e from the closed tour; None unless the
    edge is used exactly twice, once each way, leaving two non-empty loops.
    The loops are returned as closed vertex sequences."""
    steps = _steps(tour)
    hits = [i for i, s in enumerate(steps) if s == e]
    if len(hits) != 2:
        return None
    s, t = hits
    if tour[s] != tour[t + 1]:
        return None  # same direction twice
    inner = list(tour[s + 1:t + 1])
    outer = list(tour[t + 1:]) + list(tour[1:s + 1])
    if len(inner) < 3 or len(outer) < 3:
        return None
    return inner, outer


def join_edges(poly: ThreeEdgePolygon) -> list[Edge]:
    steps = set(_steps(poly.closed_tour))
    return sorted(e for e in steps if _pieces(poly.closed_tour, e) is not None)


def global_split(poly: ThreeEdgePolygon, e: Edge) -> tuple[list[Point], list[Point]] | None:
    """(left piece, right piece) when e is a global join edge."""
    pieces = _pieces(poly.closed_tour, e)
    if pieces is None:
        return None
    xs = [p[0] for p in poly.tour]
    lows = {p for p in poly.tour if p[0] == min(xs)}
    highs = {p for p in poly.tour if p[0] == max(xs)}
    for a, b in (pieces, pieces[::-1]):
        if lows <= set(a) and highs <= set(b):
            return a, b
    return None


def _edge_key(e: Edge) -> tuple:
    return (e[0][0],) + e[0][1:] + (e[1][0],) + e[1][1:]


def global_join_edges(poly: ThreeEdgePolygon) -> list[Edge]:
    return sorted((e for e in join_edges(poly) if global_split(poly, e) is not None), key=_edge_key)


# -- simple joining ---------------------------------------------------------

@dataclass(frozen=True)
class JoinOutcome3d:
    joined: ThreeEdgePolygon
    junction: Edge
    shift: int
    offset: Point

    def to_record(self) -> dict:
        return {"joined": self.joined.to_record(),
                "junction": [list(self.junction[0]), list(self.junction[1])],
                "shift": self.shift, "offset": list(self.offset)}


def _e1(d: int, k: int = 1) -> Point:
    return (k,) + (0,) * (d - 1)


def slide_offset(first: ThreeEdgePolygon, second: ThreeEdgePolygon,
                 offset: Point | None = None) -> int:
    """Smallest shift s such that second + offset + t e1 misses first for
    every t >= s."""
    d = first.dim
    offset = offset or shifted_origin(d)
    placed = {tuple(a + b for a, b in zip(p, offset)) for p in second.tour}
    ahead = [q[0] - p[0] for p in first.tour for q in placed if p[1:] == q[1:]]
    if not ahead:
        raise ThreeEdgeError("no-overlap", "projections of the two polygons are disjoint")
    # second + t e1 hits first exactly when t = p_x - q_x for a matching pair.
    return max(-a for a in ahead) + 1


def simple_join(first: ThreeEdgePolygon, second: ThreeEdgePolygon,
                offset: Point | None = None) -> JoinOutcome3d:
    """Join ``second`` (placed at offset, then slid along e1) onto ``first``
    through a doubled junction edge."""
    d = first.dim
    offset = tuple(offset) if offset is not None else shifted_origin(d)
    shift = slide_offset(first, second, offset)
    total = tuple(a + b for a, b in zip(offset, _e1(d, shift)))
    placed = second.translated(total)
    placed_set = set(placed)
    bridges = [(p, tuple(a + b for a, b in zip(p, _e1(d)))) for p in first.tour]
    bridges = [e for e in bridges if e[1] in placed_set]
    u, v = max(bridges, key=_edge_key)
    tour = first.closed_tour
    i = tour.index(u)
    k = placed.index(v)
    loop = list(placed[k:-1]) + list(placed[:k]) + [v]
    walk = list(tour[:i + 1]) + loop + list(tour[i:])
    joined_walk = ThreeEdgeWalk(walk)
    joined = canonicalize_3e(joined_walk)
    low = min(walk)
    junction = edge(tuple(a - b for a, b in zip(u, low)), tuple(a - b for a, b in zip(v, low)))
    return JoinOutcome3d(joined, junction, shift, total)


def is_simply_joinable(first: ThreeEdgePolygon, second: ThreeEdgePolygon, offset: Point) -> bool:
    try:
        return slide_offset(first, second, offset) == 0
    except ThreeEdgeError:
        return False


def simple_unjoin(outcome: JoinOutcome3d) -> tuple[ThreeEdgePolygon, ThreeEdgePolygon]:
    pieces = _pieces(outcome.joined.closed_tour, outcome.junction)
    if pieces is None:
        raise ThreeEdgeError("not-a-junction", "edge is not a join edge of the polygon")
    a, b = pieces
    return canonicalize_3e(a), canonicalize_3e(b)


# -- left/right pairs -------------------------------------------------------

def projection_threshold(d: int, length: int) -> float:
    """(3d)^-(1-1/d) length^(1-1/d), for display; comparisons use
    :func:`meets_threshold`."""
    power = 1 - 1 / d
    return (3 * d) ** (-power) * length ** power


def meets_threshold(count: int, d: int, length: int) -> bool:
    """count >= (3d)^-(1-1/d) length^(1-1/d), decided in integers."""
    return count ** d * (3 * d) ** (d - 1) >= length ** (d - 1)


def left_right_pair_check(first: ThreeEdgePolygon, second: ThreeEdgePolygon) -> bool:
    return (first.x_span >= second.x_span
            and meets_threshold(len(second.projection()), first.dim, second.length))


def strong_join_offsets_3d(first: ThreeEdgePolygon, second: ThreeEdgePolygon) -> set[Point]:
    """Offsets u at which second + u is simply joinable to first, first
    holds every leftmost vertex and second + u every rightmost one."""
    perps = {tuple(a - b for a, b in zip(p, q))
             for p in first.projection() for q in second.projection()}
    found = set()
    for perp in sorted(perps):
        u = (slide_offset(first, second, (0,) + perp),) + perp
        placed = set(second.translated(u))
        union = first.vertices | placed
        lo = min(p[0] for p in union)
        hi = max(p[0] for p in union)
        if all(p in first.vertices for p in union if p[0] == lo) and \
                all(p in placed for p in union if p[0] == hi):
            found.add(u)
    return found


def claimmin_bound(d: int, k: int, ell: int) -> float:
    power = 1 - 1 / d
    return (3 * d) ** (-power) * min(k, ell) ** power


def claimmin_holds(offsets: int, d: int, k: int, ell: int) -> bool:
    return meets_threshold(offsets, d, min(k, ell))


# -- reflected detours ------------------------------------------------------

def s_kappa_3d(poly: ThreeEdgePolygon, selection: Iterable[int] = ()) -> ThreeEdgeWalk:
    """Reflect the tour after its first visit to Right in the e1 hyperplane
    through Right; each selected global join edge (one-based index) gets a
    back-and-forth double step at its first crossing after Right."""
    chosen = sorted(set(selection))
    edges = global_join_edges(poly) if chosen else []
    if any(not 1 <= k <= len(edges) for k in chosen):
        raise ThreeEdgeError("bad-selection", f"indices must lie in 1..{len(edges)}")
    tour = list(poly.closed_tour)
    right = poly.right
    j = tour.index(right)
    sites = {}
    for k in chosen:
        e = edges[k - 1]
        t = next((t for t in range(j, len(tour) - 1) if edge(tour[t], tour[t + 1]) == e), None)
        if t is None:
            raise ThreeEdgeError("bad-selection", f"edge {e} is not crossed after Right")
        sites[t] = (tour[t + 1], tour[t])
    second: list[Point] = []
    for t in range(j, len(tour) - 1):
        second.append(tour[t])
        if t in sites:
            second.extend(sites[t])
    second.append(tour[-1])
    mirror = reflect_e1_hyperplane(right)
    walk = tour[:j] + [second[0]] + [mirror(p) for p in second[1:]]
    return ThreeEdgeWalk(walk, limit=10**9)


def reconstruct_3d(walk: ThreeEdgeWalk | Sequence[Point], detour_count: int) -> ThreeEdgePolygon:
    vs = list(walk.vertices if isinstance(walk, ThreeEdgeWalk) else (tuple(p) for p in walk))
    d = len(vs[0])
    if vs[0] != shifted_origin(d) or vs[-1][0] % 2 or vs[-1][1:] != vs[0][1:]:
        raise ThreeEdgeError("no-preimage", "endpoint does not encode a Right column")
    column = vs[-1][0] // 2
    right = max(p for p in vs if p[0] == column) if any(p[0] == column for p in vs) else None
    if right is None:
        raise ThreeEdgeError("no-preimage", "no vertex on the Right column")
    j = vs.index(right)
    mirror = reflect_e1_hyperplane(right)
    unfolded = vs[:j + 1] + [mirror(p) for p in vs[j + 1:]]
    used = Counter(_steps(unfolded))
    sites = {e for e, c in used.items() if c == 4}
    if len(sites) != detour_count or any(c > 4 for c in used.values()):
        raise ThreeEdgeError("no-preimage", f"found {len(sites)} surgery sites, expected {detour_count}")
    cleaned = unfolded[:j + 1]
    t = j + 1
    pending = set(sites)
    while t < len(unfolded):
        prev = cleaned[-1]
        e = edge(prev, unfolded[t])
        if e in pending and t + 2 < len(unfolded) and unfolded[t + 1] == prev \
                and unfolded[t + 2] == unfolded[t]:
            pending.discard(e)
            cleaned.append(unfolded[t])
            t += 3
            continue
        cleaned.append(unfolded[t])
        t += 1
    if pending:
        raise ThreeEdgeError("no-preimage", "a surgery site has no double step")
    try:
        poly = canonicalize_3e(cleaned)
    except ThreeEdgeError as exc:
        raise ThreeEdgeError("no-preimage", str(exc)) from None
    if poly.tour != tuple(cleaned[:-1]):
        raise ThreeEdgeError("no-preimage", "recovered tour is not canonical")
    edges = global_join_edges(poly)
    chosen = [k + 1 for k, e in enumerate(edges) if e in sites]
    if s_kappa_3d(poly, chosen).vertices != tuple(vs):
        raise ThreeEdgeError("no-preimage", "forward map does not reproduce the walk")
    return poly

