import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from sapforge import analysis

P = {n: oracle.polygon_count(n) for n in range(4, 13, 2)}


@given(st.fractions(Fraction(1, 10), 1000), st.integers(1, 20))
def test_root_floor_brackets_the_root(value, n):
    r = analysis._root_floor(value, n, digits=6)
    step = Fraction(1, 10 ** 6)
    assert r ** n <= value < (r + step) ** n


def test_mu_lower_bound_is_the_best_root():
    bound = analysis.mu_lower_bound(P)
    best = max(c ** (1 / n) for n, c in P.items())
    assert float(bound) == pytest.approx(best, abs=1e-11)
    assert float(bound) <= best


def test_running_bound_never_decreases():
    values = list(analysis.running_mu_lower(P).values())
    assert values == sorted(values)


def test_mu_lower_bound_needs_data():
    with pytest.raises(analysis.AnalysisError):
        analysis.mu_lower_bound({3: 5, 5: 0})


def test_exponent_table_columns():
    c = {n: len(oracle.self_avoiding_walks(n)) for n in range(1, 8)}
    sum_sq = {n: sum(w[-1][0] ** 2 + w[-1][1] ** 2 for w in oracle.self_avoiding_walks(n))
              for n in range(1, 8)}
    table = analysis.exponent_tables({**P, 8: 7}, c, 2.5, sum_sq=sum_sq)
    assert table.rows[3].closing_prob == Fraction(2, 9)
    assert table.rows[2].msd == Fraction(8, 3)
    assert table.rows[8].theta == pytest.approx(-(math.log(7) - 8 * math.log(2.5)) / math.log(8))
    assert table.csv_text().splitlines()[0] == "n,mu_ref,theta,xi,closing_prob,msd"


def test_theta_interval_between_two_references():
    table = analysis.exponent_tables(P, {}, 2.0, mu_upper=3.0)
    lo, hi = table.rows[8].theta_interval
    assert lo <= table.rows[8].theta <= hi


def test_exponent_table_rejects_nonpositive_reference():
    with pytest.raises(analysis.AnalysisError):
        analysis.exponent_tables(P, {}, 0.0)


def test_supermultiplicativity_constant():
    k = analysis.supermultiplicativity_constant(P)
    assert k == min(Fraction(P[a + b], P[a] * P[b]) for a in P for b in P if a + b in P)
    assert k >= 1


def test_gj_histogram_totals():
    for n in (4, 6, 8):
        assert sum(analysis.gj_histogram(n).values()) == P[n]
    freq = analysis.gj_frequency(8)
    assert freq["tail"][min(freq["tail"])] == 1


@given(st.integers(1, 10 ** 6), st.integers(2, 40),
       st.fractions(0, 3, max_denominator=20), st.fractions(1, 3, max_denominator=50))
def test_high_index_is_decided_exactly(count, n, zeta, mu):
    exact = analysis.is_high(count, n, zeta, mu)
    lhs = math.log(count)
    rhs = -float(zeta) * math.log(n) + n * math.log(float(mu))
    if abs(lhs - rhs) > 1e-9:
        assert exact == (lhs > rhs)


def test_hpn_density_blocks():
    report = analysis.hpn_report(P, Fraction(3, 2), Fraction(3, 2))
    assert report.members <= set(P)
    assert all(0 <= v <= 1 for v in report.density.values())


@given(st.fractions(Fraction(1, 100), 1), st.integers(0, 5))
def test_cascade_matches_closed_form(a, k):
    assert analysis.h_cascade(a, k)[k] == analysis.h_closed_form(a, k)


def test_first_violation_is_where_the_cascade_overshoots():
    k = analysis.first_violation(0.1, 0.5)
    scale = 2 / math.log(2) * (6 / 0.1 + 1)
    rhs = analysis.f_delta_a(0.1, 0.5) + scale * math.log(2)
    log_h = lambda j: math.log(float(analysis.h_closed_form(Fraction(1, 2), j)))
    assert scale * -log_h(k) > rhs
    assert all(scale * -log_h(j) <= rhs for j in range(k))


def test_propagation_report_records_its_constant():
    report = analysis.propagation_report(P, 0.1, 0.5, 3)
    assert report["c1"] == 1.0
    assert report["out_of_reach"]
    assert report["i0_half_delta"] >= 6
