"""Integer geometry on Z^d.

Points are plain tuples of ints. Edges are stored as a sorted pair of
points so that equality ignores orientation. Plaquettes (unit squares in
the first two coordinates) are identified by their lower-left corner.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

Point = tuple[int, ...]
Edge = tuple[Point, Point]

COORD_LIMIT = 10**6

CORNER_LABELS = ("NE", "EN", "ES", "SE", "SW", "WS", "WN", "NW")


class LatticeError(ValueError):
    """Raised on malformed geometric input."""


def point(*coords: int) -> Point:
    if len(coords) < 2:
        raise LatticeError("points need at least two coordinates")
    for c in coords:
        if not isinstance(c, int) or isinstance(c, bool):
            raise LatticeError(f"coordinate {c!r} is not an integer")
        if abs(c) > COORD_LIMIT:
            raise LatticeError(f"coordinate {c} outside +-{COORD_LIMIT}")
    return tuple(coords)


def add(u: Point, v: Point) -> Point:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Point, v: Point) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def unit(axis: int, d: int, sign: int = 1) -> Point:
    """The vector sign * e_{axis+1} in Z^d (axis is zero-based)."""
    return tuple(sign if k == axis else 0 for k in range(d))


def neighbours(u: Point) -> list[Point]:
    out = []
    for k in range(len(u)):
        for s in (1, -1):
            v = list(u)
            v[k] += s
            out.append(tuple(v))
    return out


def is_adjacent(u: Point, v: Point) -> bool:
    if len(u) != len(v):
        return False
    return sum(abs(a - b) for a, b in zip(u, v)) == 1


def edge(u: Point, v: Point) -> Edge:
    """Unordered nearest-neighbour edge between u and v."""
    if not is_adjacent(u, v):
        raise LatticeError(f"{u} and {v} are not nearest neighbours")
    return (u, v) if u < v else (v, u)


def edge_axis(e: Edge) -> int:
    u, v = e
    for k, (a, b) in enumerate(zip(u, v)):
        if a != b:
            return k
    raise LatticeError("degenerate edge")


def is_horizontal(e: Edge) -> bool:
    return edge_axis(e) == 0


class Plaquette(NamedTuple):
    """Unit square in the e1-e2 plane with lower-left corner ``anchor``."""

    anchor: Point

    def corners(self) -> tuple[Point, Point, Point, Point]:
        x, y = self.anchor[0], self.anchor[1]
        rest = self.anchor[2:]
        return (
            (x, y, *rest),
            (x + 1, y, *rest),
            (x + 1, y + 1, *rest),
            (x, y + 1, *rest),
        )

    def horizontal_edges(self) -> tuple[Edge, Edge]:
        ll, lr, ur, ul = self.corners()
        return (edge(ll, lr), edge(ul, ur))

    def vertical_edges(self) -> tuple[Edge, Edge]:
        ll, lr, ur, ul = self.corners()
        return (edge(ll, ul), edge(lr, ur))

    def edges(self) -> frozenset[Edge]:
        return frozenset(self.horizontal_edges() + self.vertical_edges())

    def bottom(self) -> Edge:
        return self.horizontal_edges()[0]

    def top(self) -> Edge:
        return self.horizontal_edges()[1]

    def left(self) -> Edge:
        return self.vertical_edges()[0]

    def right(self) -> Edge:
        return self.vertical_edges()[1]


def plaquettes_of_edge(e: Edge) -> list[Plaquette]:
    """The two plaquettes in the e1-e2 plane that contain a planar edge."""
    u, v = e
    axis = edge_axis(e)
    if axis == 0:
        return [Plaquette(u), Plaquette((u[0], u[1] - 1, *u[2:]))]
    if axis == 1:
        return [Plaquette(u), Plaquette((u[0] - 1, u[1], *u[2:]))]
    return []


# Compass corners.  The first letter is the coordinate that is optimised
# first, the second letter breaks ties.
_CORNER_KEYS = {
    "NE": lambda p: (p[1], p[0]),
    "EN": lambda p: (p[0], p[1]),
    "ES": lambda p: (p[0], -p[1]),
    "SE": lambda p: (-p[1], p[0]),
    "SW": lambda p: (-p[1], -p[0]),
    "WS": lambda p: (-p[0], -p[1]),
    "WN": lambda p: (-p[0], p[1]),
    "NW": lambda p: (p[1], -p[0]),
}


def corner_vertex(vertices: Iterable[Point], label: str) -> Point:
    pts = list(vertices)
    if not pts:
        raise LatticeError("corner of an empty vertex set")
    if label not in _CORNER_KEYS:
        raise LatticeError(f"unknown compass label {label!r}")
    if any(len(p) != 2 for p in pts):
        raise LatticeError("compass corners are defined for d = 2 only")
    return max(pts, key=_CORNER_KEYS[label])


# Rigid motions -------------------------------------------------------------

class Motion(NamedTuple):
    """An isometry of Z^d: ``kind`` plus a centre point where relevant."""

    kind: str
    centre: Point | None = None

    def __call__(self, p: Point) -> Point:
        return apply_motion(self, p)


def reflect_vertical_line(z: Point) -> Motion:
    """Reflection in the e2-directed line through z (x -> 2 z_x - x)."""
    return Motion("reflect_vertical_line", z)


def reflect_e1_hyperplane(z: Point) -> Motion:
    """Reflection in the hyperplane {x_1 = z_1}; same formula in any d."""
    return Motion("reflect_e1_hyperplane", z)


def reflect_horizontal_line(z: Point) -> Motion:
    """Reflection in the e1-directed line through z (y -> 2 z_y - y)."""
    return Motion("reflect_horizontal_line", z)


def rotate_quarter(z: Point | None = None) -> Motion:
    """Counter-clockwise quarter turn in the e1-e2 plane about z."""
    return Motion("rotate_quarter", z)


def rotate_pi_about(z: Point) -> Motion:
    return Motion("rotate_pi_about", z)


def translation(v: Point) -> Motion:
    return Motion("translate", v)


def apply_motion(m: Motion, p: Point) -> Point:
    c = m.centre
    if c is not None and len(c) != len(p):
        raise LatticeError("dimension mismatch between motion and point")
    if m.kind in ("reflect_vertical_line", "reflect_e1_hyperplane"):
        return (2 * c[0] - p[0], *p[1:])
    if m.kind == "reflect_horizontal_line":
        return (p[0], 2 * c[1] - p[1], *p[2:])
    if m.kind == "rotate_pi_about":
        return (2 * c[0] - p[0], 2 * c[1] - p[1], *p[2:])
    if m.kind == "rotate_quarter":
        cx, cy = (0, 0) if c is None else (c[0], c[1])
        x, y = p[0] - cx, p[1] - cy
        return (cx - y, cy + x, *p[2:])
    if m.kind == "translate":
        return add(p, c)
    raise LatticeError(f"unknown motion {m.kind!r}")


def transform(obj, motion: Motion):
    """Apply ``motion`` to a point, edge, vertex sequence, or anything
    exposing ``transformed(motion)`` (walks and polygons)."""
    if hasattr(obj, "transformed"):
        return obj.transformed(motion)
    if isinstance(obj, tuple) and obj and isinstance(obj[0], int):
        return apply_motion(motion, obj)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], tuple):
        return edge(apply_motion(motion, obj[0]), apply_motion(motion, obj[1]))
    if isinstance(obj, (list, Sequence)):
        return [apply_motion(motion, p) for p in obj]
    raise LatticeError(f"cannot transform {type(obj).__name__}")


# Projections ---------------------------------------------------------------

def project_axial(points: Iterable[Point], axes: Sequence[int] | None = None,
                  d: int | None = None) -> set[Point]:
    """Project onto the coordinate plane spanned by ``axes`` (one-based).

    The default keeps axes 2..d, i.e. drops the e1 coordinate.
    """
    pts = list(points)
    if d is None:
        d = len(pts[0]) if pts else 2
    if axes is None:
        axes = tuple(range(2, d + 1))
    axes = tuple(axes)
    if len(axes) != d - 1 or len(set(axes)) != len(axes):
        raise LatticeError(f"need {d - 1} distinct axes, got {axes}")
    if any(a < 1 or a > d for a in axes):
        raise LatticeError(f"axes {axes} out of range for d = {d}")
    return {tuple(p[a - 1] for a in axes) for p in pts}


def max_axial_projection(points: Iterable[Point], d: int) -> int:
    pts = list(points)
    return max(len(project_axial(pts, axes, d))
               for axes in combinations(range(1, d + 1), d - 1))


def loomis_whitney_holds(points: Iterable[Point], d: int) -> bool:
    """max_I |Proj_I(A)| >= |A|^(1 - 1/d), compared in integers."""
    pts = set(points)
    return max_axial_projection(pts, d) ** d >= len(pts) ** (d - 1)
