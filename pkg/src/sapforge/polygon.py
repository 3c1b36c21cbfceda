"""Self-avoiding polygons and walks on the square lattice.

A polygon is stored as its edge set together with the canonical tour: the
vertex cycle that starts at the northeast corner, steps west first and
returns to the start from the south.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from functools import cached_property
from typing import Iterable, Sequence

from .lattice import (
    Edge,
    LatticeError,
    Motion,
    Plaquette,
    Point,
    apply_motion,
    corner_vertex,
    edge,
    is_adjacent,
)


class PolygonError(ValueError):
    """Invalid polygon input.  ``code`` names the failure."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


def _cycle_edges(cycle: Sequence[Point]) -> frozenset[Edge]:
    n = len(cycle)
    return frozenset(edge(cycle[i], cycle[(i + 1) % n]) for i in range(n))


def _canonical_cycle(cycle: Sequence[Point]) -> tuple[Point, ...]:
    """Rotate/reverse a vertex cycle so it reads NE, NE - e1, ..., NE - e2."""
    ne = corner_vertex(cycle, "NE")
    n = len(cycle)
    i = cycle.index(ne)
    west = (ne[0] - 1, ne[1])
    if cycle[(i + 1) % n] == west:
        return tuple(cycle[(i + k) % n] for k in range(n))
    if cycle[(i - 1) % n] == west:
        return tuple(cycle[(i - k) % n] for k in range(n))
    raise PolygonError("bad-tour", "northeast vertex has no western edge")


class Polygon:
    """A self-avoiding polygon in Z^2.

    Equality and hashing use the translation class, so two translates of the
    same polygon compare equal.  Use :meth:`same_position` for an exact
    comparison of edge sets.
    """

    __slots__ = ("tour", "__dict__")

    def __init__(self, tour: Sequence[Point]):
        # Trusted constructor: ``tour`` must already be a simple cycle.
        self.tour: tuple[Point, ...] = _canonical_cycle(tuple(tour))

    @classmethod
    def from_cycle(cls, cycle: Sequence[Point]) -> "Polygon":
        cyc = [tuple(p) for p in cycle]
        n = len(cyc)
        if n < 4:
            raise PolygonError("too-short", f"length {n}")
        if len(set(cyc)) != n:
            raise PolygonError("bad-degree", "cycle revisits a vertex")
        for i in range(n):
            if not is_adjacent(cyc[i], cyc[(i + 1) % n]):
                raise PolygonError("bad-edge", f"{cyc[i]} -> {cyc[(i + 1) % n]}")
        if any(len(p) != 2 for p in cyc):
            raise PolygonError("bad-dimension", "polygons live in Z^2")
        return cls(cyc)

    # -- basic data ---------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.tour)

    n = length

    def __len__(self) -> int:
        return len(self.tour)

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return _cycle_edges(self.tour)

    @cached_property
    def vertices(self) -> frozenset[Point]:
        return frozenset(self.tour)

    @cached_property
    def ne(self) -> Point:
        return self.tour[0]

    def corner(self, label: str) -> Point:
        return corner_vertex(self.tour, label)

    @cached_property
    def ymax(self) -> int:
        return self.tour[0][1]

    @cached_property
    def ymin(self) -> int:
        return min(p[1] for p in self.tour)

    @cached_property
    def xmax(self) -> int:
        return max(p[0] for p in self.tour)

    @cached_property
    def xmin(self) -> int:
        return min(p[0] for p in self.tour)

    @property
    def height(self) -> int:
        return self.ymax - self.ymin

    @property
    def width(self) -> int:
        return self.xmax - self.xmin

    @cached_property
    def es_index(self) -> int:
        """Tour index of ES (rightmost vertex, lowest among ties)."""
        return self.tour.index(self.corner("ES"))

    # -- identity -----------------------------------------------------------
    @cached_property
    def key(self) -> tuple[Point, ...]:
        ox, oy = self.ne
        return tuple((x - ox, y - oy) for x, y in self.tour)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polygon) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def same_position(self, other: "Polygon") -> bool:
        return self.tour == other.tour

    def __repr__(self) -> str:
        return f"Polygon(n={self.length}, ne={self.ne})"

    # -- geometry -----------------------------------------------------------
    def translated(self, dx: int, dy: int) -> "Polygon":
        return Polygon([(x + dx, y + dy) for x, y in self.tour])

    def transformed(self, motion: Motion) -> "Polygon":
        return Polygon([apply_motion(motion, p) for p in self.tour])

    def normalized(self) -> "Polygon":
        if self.ne == (0, 0):
            return self
        return self.translated(-self.ne[0], -self.ne[1])

    def is_normalized(self) -> bool:
        return self.ne == (0, 0)

    def to_record(self) -> dict:
        return {"dim": 2, "n": self.length, "tour": [list(p) for p in self.tour]}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))

    @classmethod
    def from_record(cls, record: dict) -> "Polygon":
        if record.get("dim") != 2:
            raise PolygonError("bad-dimension", "polygon records have dim 2")
        poly = cls.from_cycle([tuple(p) for p in record["tour"]])
        if poly.length != record.get("n"):
            raise PolygonError("bad-length", "n does not match the tour")
        if list(poly.tour) != [tuple(p) for p in record["tour"]]:
            raise PolygonError("bad-tour", "record tour is not canonical")
        return poly

    @classmethod
    def from_json(cls, line: str) -> "Polygon":
        return cls.from_record(json.loads(line))


def validate_polygon(edges: Iterable[Edge]) -> Polygon:
    """Build a polygon from an edge set, rejecting anything but one cycle."""
    es = set()
    for e in edges:
        try:
            es.add(edge(*e))
        except (LatticeError, TypeError) as exc:
            raise PolygonError("bad-edge", str(exc)) from None
    if not es:
        raise PolygonError("too-short", "empty edge set")
    adj: dict[Point, list[Point]] = defaultdict(list)
    for u, v in es:
        if len(u) != 2:
            raise PolygonError("bad-dimension", "polygons live in Z^2")
        adj[u].append(v)
        adj[v].append(u)
    bad = [u for u, nb in adj.items() if len(nb) != 2]
    if bad:
        raise PolygonError("bad-degree", f"vertex {min(bad)} has degree {len(adj[min(bad)])}")
    start = min(adj)
    cycle = [start]
    prev, cur = None, start
    while True:
        a, b = adj[cur]
        nxt = a if a != prev else b
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    if len(cycle) != len(adj):
        raise PolygonError("multiple-components",
                           f"cycle through {start} covers {len(cycle)} of {len(adj)} vertices")
    if len(cycle) < 4:
        raise PolygonError("too-short", f"length {len(cycle)}")
    return Polygon(cycle)


def normalize(poly: Polygon) -> Polygon:
    return poly.normalized()


def classify(poly: Polygon) -> dict[str, bool]:
    """Left/right classification; the right tip is the ES corner."""
    tall = poly.height >= poly.width
    tip_y = poly.corner("ES")[1]
    low_tip = 2 * tip_y <= poly.ymin + poly.ymax
    return {"is_left": tall and low_tip, "is_right": tall}


def is_left(poly: Polygon) -> bool:
    return classify(poly)["is_left"]


def is_right(poly: Polygon) -> bool:
    return classify(poly)["is_right"]


# -- plaquette surgery ------------------------------------------------------

def is_join_plaquette(poly: Polygon, plaq: Plaquette) -> bool:
    es = poly.edges
    return (all(h in es for h in plaq.horizontal_edges())
            and not any(v in es for v in plaq.vertical_edges()))


def join_plaquettes(poly: Polygon) -> list[Plaquette]:
    """All join plaquettes, sorted by anchor (x, then y)."""
    es = poly.edges
    out = []
    for u, v in es:
        if u[1] != v[1]:
            continue
        plaq = Plaquette(u)
        if edge((u[0], u[1] + 1), (u[0] + 1, u[1] + 1)) in es and is_join_plaquette(poly, plaq):
            out.append(plaq)
    return sorted(out)


def _split(poly: Polygon, plaq: Plaquette) -> tuple[Polygon, Polygon]:
    if not is_join_plaquette(poly, plaq):
        raise PolygonError("not-a-join-plaquette", f"{plaq.anchor} for {poly!r}")
    tour = poly.tour
    n = len(tour)
    ll, lr, ur, ul = plaq.corners()
    pos = {p: i for i, p in enumerate(tour)}
    # Orient each horizontal edge along the tour.
    cuts = []
    for a, b in ((ll, lr), (ul, ur)):
        i, j = pos[a], pos[b]
        cuts.append(i if (i + 1) % n == j else j)
    c1, c2 = sorted(cuts)
    arc1 = [tour[k] for k in range(c1 + 1, c2 + 1)]
    arc2 = [tour[k % n] for k in range(c2 + 1, c1 + 1 + n)]
    if not (is_adjacent(arc1[0], arc1[-1]) and is_adjacent(arc2[0], arc2[-1])):
        raise PolygonError("not-a-join-plaquette", "symmetric difference is connected")
    return Polygon(arc1), Polygon(arc2)


def plaquette_join(first: Polygon, second: Polygon, plaq: Plaquette) -> Polygon:
    """(first ∪ second) Δ plaq where the two vertical sides of plaq are
    shared out one per polygon."""
    left, right = plaq.vertical_edges()
    a, b = first.edges, second.edges
    if not ((left in a and right in b) or (left in b and right in a)):
        raise PolygonError("not-a-join-plaquette", "vertical sides not split between the polygons")
    if first.vertices & second.vertices:
        raise PolygonError("not-a-join-plaquette", "polygons are not disjoint")
    merged = (a | b) ^ plaq.edges()
    return validate_polygon(merged)


def plaquette_delta(obj, plaq: Plaquette):
    """Split a polygon at a join plaquette, or join a polygon pair across one."""
    if isinstance(obj, Polygon):
        return _split(obj, plaq)
    first, second = obj
    return plaquette_join(first, second, plaq)


def split_at(poly: Polygon, plaq: Plaquette) -> tuple[Polygon, Polygon]:
    return _split(poly, plaq)


def global_split(poly: Polygon, plaq: Plaquette) -> tuple[Polygon, Polygon] | None:
    """Return (left part, right part) when ``plaq`` is a global join
    plaquette, otherwise None."""
    a, b = _split(poly, plaq)
    if poly.ne in b.vertices:
        a, b = b, a
    xmax = poly.xmax
    if all(p in b.vertices for p in poly.tour if p[0] == xmax):
        return a, b
    return None


def global_join_plaquettes(poly: Polygon) -> list[Plaquette]:
    """Global join plaquettes sorted by anchor (x, then y)."""
    return [p for p in join_plaquettes(poly) if global_split(poly, p) is not None]


# -- walks ----------------------------------------------------------------

class Walk:
    """A nearest-neighbour walk gamma_0..gamma_n."""

    __slots__ = ("vertices", "strict")

    def __init__(self, vertices: Sequence[Point], check: bool = True):
        vs = tuple(tuple(p) for p in vertices)
        if check:
            for a, b in zip(vs, vs[1:]):
                if not is_adjacent(a, b):
                    raise PolygonError("bad-edge", f"{a} -> {b} is not a unit step")
        self.vertices = vs
        self.strict = len(set(vs)) == len(vs)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i):
        return self.vertices[i]

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Walk) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"Walk({list(self.vertices)})"

    @property
    def is_self_avoiding(self) -> bool:
        return self.strict

    def edge_multiplicity(self) -> Counter:
        return Counter(edge(a, b) for a, b in zip(self.vertices, self.vertices[1:]))

    def transformed(self, motion: Motion) -> "Walk":
        return Walk([apply_motion(motion, p) for p in self.vertices], check=False)

    def translated_to_origin(self) -> "Walk":
        o = self.vertices[0]
        return Walk([tuple(a - b for a, b in zip(p, o)) for p in self.vertices], check=False)
