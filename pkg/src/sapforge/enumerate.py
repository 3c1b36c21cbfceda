"""Exact enumeration engine for walks and polygons.

Square-lattice walks and polygons are counted by a compiled depth-first
search on an occupancy grid.  Work is split into independent prefixes of a
fixed depth, so any number of worker processes gives the same totals.
Smaller censuses that need the actual objects (bridges, half-space walks,
polygon streams) use the pure Python generators further down.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import get_context
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from .lattice import Point, neighbours
from .polygon import Polygon, Walk

MODELS = ("saw", "sap", "bridge", "rhssaw", "closing", "threedge-sap")
DEFAULT_SPLIT_DEPTH = 6
DEFAULT_MAX_STATES = 10**12
# int64 counters stay exact while 4 * 3^(n-1) < 2^63.
INT64_LENGTH_LIMIT = 38


class EnumerationError(ValueError):
    pass


@dataclass
class CountTable:
    model: str
    dim: int
    counts: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, n: int) -> int:
        return self.counts[n]

    def get(self, n: int, default: int = 0) -> int:
        return self.counts.get(n, default)

    def lengths(self) -> list[int]:
        return sorted(self.counts)

    def csv_rows(self) -> list[tuple[str, int, int, int]]:
        return [(self.model, self.dim, n, self.counts[n]) for n in self.lengths()]

    def csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["model", "dim", "n", "count"])
        out.writerows(self.csv_rows())
        return buf.getvalue()


@dataclass(frozen=True)
class EnumerationPlan:
    model: str
    dim: int
    max_length: int
    thread_count: int = 1
    stream: bool = False
    split_depth: int = DEFAULT_SPLIT_DEPTH


def max_states() -> int:
    raw = os.environ.get("SAPFORGE_MAX_STATES")
    return int(raw) if raw else DEFAULT_MAX_STATES


def estimated_states(model: str, dim: int, max_length: int) -> int:
    """Upper bound on search-tree nodes: non-reversing walks up to max_length."""
    branch = 2 * dim - 1
    return sum(2 * dim * branch ** (k - 1) for k in range(1, max_length + 1))


def check_plan(plan: EnumerationPlan) -> None:
    if plan.model not in MODELS:
        raise EnumerationError(f"unknown model {plan.model!r}")
    if plan.dim < 2:
        raise EnumerationError("dimension must be at least 2")
    if plan.model in ("sap", "bridge", "rhssaw", "closing") and plan.dim != 2:
        raise EnumerationError(f"model {plan.model} is implemented for d = 2 only")
    if plan.max_length < 0:
        raise EnumerationError("max_length must be non-negative")
    if plan.thread_count < 1:
        raise EnumerationError("thread_count must be positive")
    if plan.max_length > INT64_LENGTH_LIMIT:
        raise EnumerationError(f"max_length above {INT64_LENGTH_LIMIT} is not supported")
    cap = max_states()
    est = estimated_states(plan.model, plan.dim, plan.max_length)
    if est > cap:
        raise EnumerationError(
            f"plan may visit {est} states, above the cap of {cap} (SAPFORGE_MAX_STATES)")


# -- compiled kernels -------------------------------------------------------

_DX = np.array([1, 0, -1, 0], dtype=np.int64)
_DY = np.array([0, 1, 0, -1], dtype=np.int64)


@njit(cache=True)
def _saw_kernel(px, py, max_len, count, sumsq, closing):
    """Extend the prefix walk (px, py) in every self-avoiding way.

    Adds, per length k >= len(prefix) - 1: walk counts, the sum of squared
    end-to-end distances, and closing walks (k > 1, ending next to the
    origin).
    """
    dx = np.array([1, 0, -1, 0])
    dy = np.array([0, 1, 0, -1])
    off = max_len + 1
    g = 2 * max_len + 3
    occ = np.zeros(g * g, dtype=np.uint8)
    xs = np.empty(max_len + 1, dtype=np.int64)
    ys = np.empty(max_len + 1, dtype=np.int64)
    nxt = np.zeros(max_len + 1, dtype=np.int64)
    base = len(px) - 1
    for i in range(base + 1):
        xs[i] = px[i]
        ys[i] = py[i]
        occ[(px[i] + off) * g + py[i] + off] = 1
    r2 = xs[base] * xs[base] + ys[base] * ys[base]
    count[base] += 1
    sumsq[base] += r2
    if r2 == 1 and base > 1:
        closing[base] += 1
    if base >= max_len:
        return
    depth = base
    nxt[depth] = 0
    while True:
        if nxt[depth] < 4:
            d = nxt[depth]
            nxt[depth] += 1
            x = xs[depth] + dx[d]
            y = ys[depth] + dy[d]
            idx = (x + off) * g + y + off
            if occ[idx]:
                continue
            r2 = x * x + y * y
            k = depth + 1
            count[k] += 1
            sumsq[k] += r2
            # a single step cannot close: its closing edge is the step itself
            if r2 == 1 and k > 1:
                closing[k] += 1
            if k == max_len:
                continue
            occ[idx] = 1
            depth = k
            xs[depth] = x
            ys[depth] = y
            nxt[depth] = 0
        else:
            if depth == base:
                break
            occ[(xs[depth] + off) * g + ys[depth] + off] = 0
            depth -= 1


@njit(cache=True)
def _sap_kernel(px, py, max_len, count):
    """Count NE-anchored polygons extending the prefix (px, py).

    The walk starts at the origin, its first step goes west, every vertex
    lies in {y < 0} or {y = 0, x <= 0}, and a polygon of length k + 1 is
    recorded when the walk reaches (0, -1) after k steps.
    """
    dx = np.array([1, 0, -1, 0])
    dy = np.array([0, 1, 0, -1])
    off = max_len + 1
    g = 2 * max_len + 3
    occ = np.zeros(g * g, dtype=np.uint8)
    xs = np.empty(max_len + 1, dtype=np.int64)
    ys = np.empty(max_len + 1, dtype=np.int64)
    nxt = np.zeros(max_len + 1, dtype=np.int64)
    base = len(px) - 1
    for i in range(base + 1):
        xs[i] = px[i]
        ys[i] = py[i]
        occ[(px[i] + off) * g + py[i] + off] = 1
    limit = max_len - 1  # walk length bound
    if base >= limit:
        return
    depth = base
    nxt[depth] = 0
    while True:
        if nxt[depth] < 4:
            d = nxt[depth]
            nxt[depth] += 1
            x = xs[depth] + dx[d]
            y = ys[depth] + dy[d]
            if y > 0 or (y == 0 and x > 0):
                continue
            idx = (x + off) * g + y + off
            if occ[idx]:
                continue
            k = depth + 1
            if x == 0 and y == -1:
                count[k + 1] += 1
                continue
            # Manhattan distance back to (0, -1) must fit in the budget.
            dist = abs(x) + abs(y + 1)
            if k + dist > limit:
                continue
            occ[idx] = 1
            depth = k
            xs[depth] = x
            ys[depth] = y
            nxt[depth] = 0
        else:
            if depth == base:
                break
            occ[(xs[depth] + off) * g + ys[depth] + off] = 0
            depth -= 1


# -- prefix splitting -------------------------------------------------------

def _saw_prefixes(depth: int) -> list[tuple[Point, ...]]:
    """All self-avoiding walks of exactly ``depth`` steps whose first step
    is +e1, in lexicographic order of their step sequence."""
    out: list[tuple[Point, ...]] = []

    def rec(path: list[Point], seen: set[Point]) -> None:
        if len(path) - 1 == depth:
            out.append(tuple(path))
            return
        x, y = path[-1]
        for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            q = (x + dx, y + dy)
            if q not in seen:
                seen.add(q)
                path.append(q)
                rec(path, seen)
                path.pop()
                seen.discard(q)

    if depth == 0:
        return [((0, 0),)]
    rec([(0, 0), (1, 0)], {(0, 0), (1, 0)})
    return out


def _sap_allowed(p: Point) -> bool:
    return p[1] < 0 or (p[1] == 0 and p[0] <= 0)


def _sap_prefixes(depth: int, max_len: int) -> tuple[list[tuple[Point, ...]], dict[int, int]]:
    """Prefixes of exactly ``depth`` steps (not yet closed) plus the polygon
    counts already completed at shorter depth."""
    out: list[tuple[Point, ...]] = []
    done: dict[int, int] = {}
    limit = max_len - 1

    def rec(path: list[Point], seen: set[Point]) -> None:
        k = len(path) - 1
        if k == depth:
            out.append(tuple(path))
            return
        x, y = path[-1]
        for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            q = (x + dx, y + dy)
            if not _sap_allowed(q) or q in seen:
                continue
            if q == (0, -1):
                if k + 2 <= max_len:
                    done[k + 2] = done.get(k + 2, 0) + 1
                continue
            if k + 1 + abs(q[0]) + abs(q[1] + 1) > limit:
                continue
            seen.add(q)
            path.append(q)
            rec(path, seen)
            path.pop()
            seen.discard(q)

    if max_len >= 2:
        rec([(0, 0), (-1, 0)], {(0, 0), (-1, 0)})
    return out, done


def _as_arrays(prefix):
    return (np.array([p[0] for p in prefix], dtype=np.int64),
            np.array([p[1] for p in prefix], dtype=np.int64))


def _saw_unit(args):
    prefixes, max_len = args
    count = np.zeros(max_len + 1, dtype=np.int64)
    sumsq = np.zeros(max_len + 1, dtype=np.int64)
    closing = np.zeros(max_len + 1, dtype=np.int64)
    for prefix in prefixes:
        px, py = _as_arrays(prefix)
        _saw_kernel(px, py, max_len, count, sumsq, closing)
    return count, sumsq, closing


def _sap_unit(args):
    prefixes, max_len = args
    count = np.zeros(max_len + 2, dtype=np.int64)
    for prefix in prefixes:
        px, py = _as_arrays(prefix)
        _sap_kernel(px, py, max_len, count)
    return count


def _chunks(items: list, parts: int) -> list[list]:
    """Round-robin split; order inside each chunk follows ``items``."""
    parts = max(1, min(parts, len(items)))
    return [items[i::parts] for i in range(parts)]


def _run_units(func, units, thread_count: int):
    if thread_count <= 1 or len(units) <= 1:
        return [func(u) for u in units]
    ctx = get_context("fork")
    with ctx.Pool(processes=thread_count) as pool:
        return pool.map(func, units)


class WalkStatistics(NamedTuple):
    count: dict[int, int]
    sum_sq: dict[int, int]
    closing: dict[int, int]


def saw_statistics(max_len: int, thread_count: int = 1,
                   split_depth: int = DEFAULT_SPLIT_DEPTH) -> WalkStatistics:
    """Exact c_n, sum of |gamma_n|^2, and closing-walk counts for d = 2."""
    check_plan(EnumerationPlan("saw", 2, max_len, thread_count))
    count = {0: 1}
    sum_sq = {0: 0}
    closing = {0: 0}
    if max_len == 0:
        return WalkStatistics(count, sum_sq, closing)
    depth = min(split_depth, max_len)
    small = {k: 0 for k in range(1, depth)}
    small_sq = {k: 0 for k in range(1, depth)}
    small_close = {k: 0 for k in range(1, depth)}
    for k in range(1, depth):
        for w in _saw_prefixes(k):
            r2 = w[-1][0] ** 2 + w[-1][1] ** 2
            small[k] += 1
            small_sq[k] += r2
            small_close[k] += r2 == 1 and k > 1
    prefixes = _saw_prefixes(depth)
    units = [(chunk, max_len) for chunk in _chunks(prefixes, thread_count * 4)]
    results = _run_units(_saw_unit, units, thread_count)
    tot_c = sum(r[0] for r in results)
    tot_s = sum(r[1] for r in results)
    tot_z = sum(r[2] for r in results)
    # The first step was fixed to +e1; rotations supply the other three.
    for k in range(1, max_len + 1):
        if k < depth:
            c, s, z = small[k], small_sq[k], small_close[k]
        else:
            c, s, z = int(tot_c[k]), int(tot_s[k]), int(tot_z[k])
        count[k] = 4 * c
        sum_sq[k] = 4 * s
        closing[k] = 4 * z
    return WalkStatistics(count, sum_sq, closing)


def sap_counts(max_len: int, thread_count: int = 1,
               split_depth: int = DEFAULT_SPLIT_DEPTH) -> dict[int, int]:
    """p_n for 1 <= n <= max_len (zero at odd n and n = 2)."""
    check_plan(EnumerationPlan("sap", 2, max_len, thread_count))
    depth = max(1, min(split_depth, max_len - 1))
    prefixes, done = _sap_prefixes(depth, max_len)
    units = [(chunk, max_len) for chunk in _chunks(prefixes, thread_count * 4)]
    results = _run_units(_sap_unit, units, thread_count) if prefixes else []
    total = {n: 0 for n in range(1, max_len + 1)}
    for n, c in done.items():
        total[n] += c
    for r in results:
        for n in range(1, max_len + 1):
            total[n] += int(r[n])
    return total


# -- Python generators ------------------------------------------------------

def iter_walks(n: int, dim: int = 2, half_space: bool = False) -> Iterator[tuple[Point, ...]]:
    """Self-avoiding walks of length n from the origin, in a fixed order.

    With ``half_space`` only walks staying in {y <= 0} are produced.
    """
    origin = (0,) * dim
    path = [origin]
    seen = {origin}

    def rec():
        if len(path) - 1 == n:
            yield tuple(path)
            return
        for q in neighbours(path[-1]):
            if q in seen or (half_space and q[1] > 0):
                continue
            seen.add(q)
            path.append(q)
            yield from rec()
            path.pop()
            seen.discard(q)

    yield from rec()


def iter_saps(n: int) -> Iterator[Polygon]:
    """Every polygon of length n with NE at the origin, each exactly once,
    in a stable order."""
    if n < 4 or n % 2:
        return
    target = (0, -1)
    path = [(0, 0), (-1, 0)]
    seen = set(path)
    limit = n - 1

    def rec():
        k = len(path) - 1
        x, y = path[-1]
        for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            q = (x + dx, y + dy)
            if not _sap_allowed(q) or q in seen:
                continue
            if q == target:
                if k + 1 == limit:
                    yield Polygon(path + [q])
                continue
            if k + 1 + abs(q[0]) + abs(q[1] + 1) > limit:
                continue
            seen.add(q)
            path.append(q)
            yield from rec()
            path.pop()
            seen.discard(q)

    yield from rec()


# -- predicates -------------------------------------------------------------

def _coords(walk) -> tuple[Point, ...]:
    return walk.vertices if isinstance(walk, Walk) else tuple(tuple(p) for p in walk)


def is_returning_half_space(walk) -> bool:
    """Start on the x-axis and stay in y <= 0; strictly after the last
    visit to the minimum height the walk meets the x-axis exactly once, at
    its endpoint."""
    vs = _coords(walk)
    if vs[0][1] != 0 or any(p[1] > 0 for p in vs):
        return False
    low = min(p[1] for p in vs)
    last = max(i for i, p in enumerate(vs) if p[1] == low)
    tail_hits = [i for i in range(last + 1, len(vs)) if vs[i][1] == 0]
    return tail_hits == [len(vs) - 1]


def is_bridge(walk, axis: int = 1) -> bool:
    """Start at the maximum of coordinate ``axis``; the end is the unique
    minimiser.  axis = 1 is the d = 2 vertical convention; axis = 0 the
    e1-oriented one."""
    vs = _coords(walk)
    vals = [p[axis] for p in vs]
    if vals[0] != max(vals):
        return False
    low = min(vals)
    return vals[-1] == low and vals.count(low) == 1


# -- derived quantities -----------------------------------------------------

class ClosingProbability(NamedTuple):
    direct: Fraction
    formula: Fraction

    @property
    def agrees(self) -> bool:
        return self.direct == self.formula


def closing_probability(n: int, thread_count: int = 1) -> ClosingProbability:
    if n % 2 == 0 or n < 1:
        raise EnumerationError("closing probability is defined for odd n")
    stats = saw_statistics(n, thread_count)
    p = sap_counts(n + 1, thread_count)
    c = stats.count[n]
    return ClosingProbability(Fraction(stats.closing[n], c),
                              Fraction(2 * (n + 1) * p.get(n + 1, 0), c))


def mean_square_displacement(n: int, thread_count: int = 1) -> Fraction:
    stats = saw_statistics(n, thread_count)
    return Fraction(stats.sum_sq[n], stats.count[n])


# -- public entry point ------------------------------------------------------

def count(plan: EnumerationPlan) -> CountTable:
    check_plan(plan)
    m, d, top = plan.model, plan.dim, plan.max_length
    if m == "saw":
        if d == 2:
            counts = saw_statistics(top, plan.thread_count, plan.split_depth).count
        else:
            counts = {k: sum(1 for _ in iter_walks(k, d)) for k in range(top + 1)}
    elif m == "closing":
        stats = saw_statistics(top, plan.thread_count, plan.split_depth)
        counts = {k: stats.closing[k] for k in range(1, top + 1)}
    elif m == "sap":
        counts = sap_counts(top, plan.thread_count, plan.split_depth)
    elif m == "bridge":
        counts = {k: sum(1 for w in iter_walks(k, 2, half_space=True) if is_bridge(w))
                  for k in range(top + 1)}
    elif m == "rhssaw":
        counts = {k: sum(1 for w in iter_walks(k, 2, half_space=True)
                         if is_returning_half_space(w))
                  for k in range(top + 1)}
    else:
        from .threedge import threedge_polygon_counts
        counts = threedge_polygon_counts(top, d)
    return CountTable(m, d, dict(sorted(counts.items())))


def stream(plan: EnumerationPlan) -> Iterator[Polygon]:
    """Yield every normalized polygon with length <= max_length (d = 2)."""
    check_plan(plan)
    if plan.model != "sap":
        raise EnumerationError("streaming is available for the sap model")
    for n in range(4, plan.max_length + 1, 2):
        yield from iter_saps(n)
