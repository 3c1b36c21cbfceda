"""Exponent and threshold analytics over exact count tables.

Every quantity that depends on the unknown connective constant takes an
explicit reference value ``mu_ref`` and records where it came from.
Inequalities are decided in exact arithmetic; logarithms only appear in
the exported exponent columns.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .enumerate import iter_saps
from .polygon import global_join_plaquettes

ROOT_DIGITS = 12


class AnalysisError(ValueError):
    pass


def _counts(table) -> dict[int, int]:
    return dict(table.counts) if hasattr(table, "counts") else dict(table)


def _root_floor(value: Fraction, n: int, digits: int = ROOT_DIGITS) -> Fraction:
    """Largest r = k / 10^digits with r^n <= value."""
    scale = 10 ** digits
    target = value * scale ** n
    lo, hi = 0, 1
    while Fraction(hi) ** n <= target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid) ** n <= target:
            lo = mid
        else:
            hi = mid
    return Fraction(lo, scale)


def mu_lower_bound(table, dim: int = 2) -> Fraction:
    """max over even n of (p_n / (d-1))^(1/n), rounded down to a rational."""
    counts = {n: c for n, c in _counts(table).items() if n > 0 and n % 2 == 0 and c > 0}
    if not counts:
        raise AnalysisError("count table has no positive even entries")
    return max(_root_floor(Fraction(c, dim - 1), n) for n, c in counts.items())


def running_mu_lower(table, dim: int = 2) -> dict[int, Fraction]:
    best = Fraction(0)
    out = {}
    for n, c in sorted(_counts(table).items()):
        if n > 0 and n % 2 == 0 and c > 0:
            best = max(best, _root_floor(Fraction(c, dim - 1), n))
            out[n] = best
    return out


def exponent(count: int, n: int, mu_ref: float) -> float:
    """x with count = n^x mu_ref^n."""
    return (math.log(count) - n * math.log(mu_ref)) / math.log(n)


@dataclass
class ExponentRow:
    n: int
    mu_lower: Fraction | None
    theta: float | None
    xi: float | None
    closing_prob: Fraction | None
    msd: Fraction | None
    theta_interval: tuple[float, float] | None = None


@dataclass
class ExponentTable:
    mu_ref: float
    provenance: str
    rows: dict[int, ExponentRow] = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["n", "mu_ref", "theta", "xi", "closing_prob", "msd"])
        fmt = lambda v: "" if v is None else str(v)
        for n, row in sorted(self.rows.items()):
            out.writerow([n, self.mu_ref, fmt(row.theta), fmt(row.xi),
                          fmt(row.closing_prob), fmt(row.msd)])
        return buf.getvalue()


def exponent_tables(p, c, mu_ref: float, *, provenance: str = "user-supplied",
                    mu_upper: float | None = None,
                    sum_sq: Mapping[int, int] | None = None, dim: int = 2) -> ExponentTable:
    """theta_n = -log(p_n mu^-n)/log n and xi_n = log(c_n mu^-n)/log n.

    With ``mu_upper`` the theta column also carries the interval between
    the two reference values.
    """
    if mu_ref <= 0 or (mu_upper is not None and mu_upper <= 0):
        raise AnalysisError("mu_ref must be positive")
    p, c = _counts(p), _counts(c)
    lowers = running_mu_lower(p, dim) if p else {}
    table = ExponentTable(mu_ref, provenance)
    for n in sorted(set(p) | set(c)):
        if n < 1:
            continue
        pn, cn = p.get(n, 0), c.get(n, 0)
        theta = -exponent(pn, n, mu_ref) if pn and n >= 4 else None
        xi = exponent(cn, n, mu_ref) if cn and n >= 2 else None
        closing = None
        if n % 2 and cn and (n + 1) in p:
            closing = Fraction(2 * (n + 1) * p[n + 1], cn)
        msd = Fraction(sum_sq[n], cn) if sum_sq and n in sum_sq and cn else None
        interval = None
        if mu_upper is not None and theta is not None:
            other = -exponent(pn, n, mu_upper)
            interval = (min(theta, other), max(theta, other))
        table.rows[n] = ExponentRow(n, lowers.get(n), theta, xi, closing, msd, interval)
    return table


def theta_values(counts, mu_ref: float) -> dict[int, float]:
    """Deficit exponents for any polygon table (strict or 3-edge)."""
    return {n: -exponent(v, n, mu_ref) for n, v in _counts(counts).items() if v and n >= 2}


def supermultiplicativity_constant(counts) -> Fraction | None:
    """Smallest ratio p_{n+m} / (p_n p_m) over the table, or None."""
    table = {n: v for n, v in _counts(counts).items() if v}
    ratios = [Fraction(table[a + b], table[a] * table[b])
              for a in table for b in table if a <= b and a + b in table]
    return min(ratios, default=None)


# -- global join plaquette statistics ---------------------------------------

def gj_histogram(n: int) -> Counter:
    return Counter(len(global_join_plaquettes(p)) for p in iter_saps(n))


def gj_frequency(n: int) -> dict[str, dict[int, object]]:
    """Exact histogram of |GJ| over SAP_n and the tail ratios."""
    hist = gj_histogram(n)
    total = sum(hist.values())
    tails = {}
    running = 0
    for k in sorted(hist, reverse=True):
        running += hist[k]
        tails[k] = Fraction(running, total) if total else Fraction(0)
    return {"histogram": dict(sorted(hist.items())), "tail": dict(sorted(tails.items()))}


# -- high polygon numbers ----------------------------------------------------

def is_high(count: int, n: int, zeta: Fraction, mu_ref: Fraction) -> bool:
    """count >= n^-zeta mu_ref^n, decided exactly for rational zeta and mu_ref."""
    zeta, mu_ref = Fraction(zeta), Fraction(mu_ref)
    # Raise both sides to the power of zeta's denominator.
    q = zeta.denominator
    lhs = Fraction(count) ** q * Fraction(n) ** zeta.numerator
    return lhs >= mu_ref ** (n * q)


@dataclass
class HpnReport:
    zeta: Fraction
    mu_ref: Fraction
    n_range: tuple[int, int]
    members: set[int]
    density: dict[int, Fraction]


def hpn_report(table, zeta, mu_ref) -> HpnReport:
    counts = {n: v for n, v in _counts(table).items() if n > 0 and n % 2 == 0}
    if not counts:
        raise AnalysisError("no even lengths in the table")
    members = {n for n, v in counts.items() if v and is_high(v, n, zeta, mu_ref)}
    density = {}
    for i in range(2, max(counts).bit_length() + 1):
        block = [n for n in range(2 ** (i - 1), 2 ** i + 1) if n % 2 == 0]
        if block and all(n in counts for n in block):
            density[i] = Fraction(sum(1 for n in block if n in members), len(block))
    return HpnReport(Fraction(zeta), Fraction(mu_ref), (min(counts), max(counts)), members, density)


# -- propagation arithmetic --------------------------------------------------

def h_cascade(a: Fraction, steps: int) -> list[Fraction]:
    """h_0 = a and h_{k+1} = h_k^2 / 8."""
    values = [Fraction(a)]
    for _ in range(steps):
        values.append(values[-1] ** 2 / 8)
    return values


def h_closed_form(a: Fraction, k: int) -> Fraction:
    return Fraction(8) ** (1 - 2 ** k) * Fraction(a) ** (2 ** k)


def i_zero(varphi: float, c1: float = 1.0) -> float:
    """Threshold index for the high-arrow propagation step.  ``c1`` stands
    in for an existential constant and defaults to 1."""
    log2 = math.log(2)
    inv = 1 / varphi
    return max(6.0,
               inv * (18 + 2 / log2 * math.log(c1)),
               math.log(2 * math.pi) / (2 * log2)
               + (4 * inv + 1.5) * math.log(4 * inv + 1) / log2)


def f_delta_a(delta: float, a: float) -> float:
    return (4 / math.log(2) * (6 / delta + 1) * delta ** (-math.log(2) / math.log(1.5))
            * math.log(8 / a))


def _log_h(a: float, k: int) -> float:
    # log h_k(a) without underflow.
    return (1 - 2 ** k) * math.log(8) + 2 ** k * math.log(a)


def first_violation(delta: float, a: float, limit: int = 64) -> int | None:
    """First k at which 2/log2 (6/delta + 1) log(1/h_k) exceeds
    f(delta, a) + 2/log2 (6/delta + 1) log(1/a)."""
    scale = 2 / math.log(2) * (6 / delta + 1)
    rhs = f_delta_a(delta, a) + scale * math.log(1 / a)
    for k in range(limit):
        if scale * -_log_h(a, k) > rhs:
            return k
    return None


def propagation_report(table, delta: float, a: float, i: int, *, c1: float = 1.0,
                       mu_ref: Fraction | None = None, cascade: int = 6) -> dict:
    counts = _counts(table)
    K = first_violation(delta, a)
    i0 = i_zero(delta / 2, c1)
    needed = i0 + f_delta_a(delta, a) + 2 / math.log(2) * (6 / delta + 1) * math.log(1 / a)
    top = max((n for n in counts if counts[n]), default=0)
    mu = Fraction(mu_ref) if mu_ref is not None else (mu_lower_bound(counts) if counts else None)
    densities = {}
    if mu is not None and counts:
        report = hpn_report(counts, Fraction(3, 2) - Fraction(delta).limit_denominator(10**6), mu)
        densities = {str(k): str(v) for k, v in report.density.items()}
    return {
        "delta": delta,
        "a": a,
        "i": i,
        "c1": c1,
        "i0_half_delta": i0,
        "f_delta_a": f_delta_a(delta, a),
        "index_needed": needed,
        "index_reachable": 2 ** i <= top,
        "h_cascade": [str(h) for h in h_cascade(Fraction(a).limit_denominator(10**6), cascade)],
        "K": K,
        "mu_ref": None if mu is None else str(mu),
        "hpn_density": densities,
        "out_of_reach": [
            "i must exceed index_needed, which needs lengths near 2^index_needed",
        ] if 2 ** min(needed, 60) > top else [],
    }


def gj_hist_csv(rows: Mapping[int, Mapping[int, int]]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["n", "k", "count"])
    for n in sorted(rows):
        for k, v in sorted(rows[n].items()):
            out.writerow([n, k, v])
    return buf.getvalue()


def propagation_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
