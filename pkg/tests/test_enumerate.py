from fractions import Fraction

import pytest

import oracle
from sapforge.enumerate import (
    EnumerationError,
    EnumerationPlan,
    closing_probability,
    count,
    is_bridge,
    is_returning_half_space,
    iter_saps,
    iter_walks,
    mean_square_displacement,
    sap_counts,
    saw_statistics,
    stream,
)
from sapforge.threedge import threedge_polygon_counts


@pytest.fixture(scope="module")
def oracle_p():
    return {n: oracle.polygon_count(n) for n in range(4, 13, 2)}


def test_square_is_the_only_four_gon():
    assert sap_counts(4)[4] == 1


def test_polygon_counts_match_oracle(oracle_p):
    engine = sap_counts(12)
    for n, expected in oracle_p.items():
        assert engine[n] == expected
        assert sum(1 for _ in iter_saps(n)) == expected
    assert all(engine[n] == 0 for n in range(1, 13) if n % 2 or n == 2)


def test_walk_counts_match_oracle():
    stats = saw_statistics(9)
    for n in range(0, 10):
        assert stats.count[n] == len(oracle.self_avoiding_walks(n))
        assert stats.count[n] == sum(1 for _ in iter_walks(n))


@pytest.mark.parametrize("split_depth", [1, 3, 6])
def test_counts_do_not_depend_on_work_split(split_depth):
    base = saw_statistics(12)
    assert saw_statistics(12, 1, split_depth) == base
    assert sap_counts(12, 1, split_depth) == sap_counts(12)


def test_counts_are_identical_across_worker_counts():
    assert saw_statistics(13, 1) == saw_statistics(13, 3)
    assert sap_counts(14, 1) == sap_counts(14, 2)


def test_closing_fraction_at_three_steps():
    result = closing_probability(3)
    assert result.direct == Fraction(2, 9) == oracle.closing_fraction(3)
    assert result.agrees


def test_one_step_walks_never_close():
    result = closing_probability(1)
    assert result.direct == 0 == oracle.closing_fraction(1)
    assert result.agrees


@pytest.mark.parametrize("n", [5, 7, 9])
def test_closing_fraction_matches_oracle(n):
    assert closing_probability(n).direct == oracle.closing_fraction(n)


def test_closing_requires_odd_length():
    with pytest.raises(EnumerationError):
        closing_probability(4)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_mean_square_displacement_matches_oracle(n):
    assert mean_square_displacement(n) == oracle.mean_square_end(n)


def test_two_step_mean_square_displacement():
    assert mean_square_displacement(2) == Fraction(8, 3)


@pytest.mark.parametrize("n", range(0, 9))
def test_bridge_predicate_matches_oracle(n):
    ours = {w for w in iter_walks(n) if is_bridge(w)}
    assert ours == set(oracle.bridges(n))


@pytest.mark.parametrize("n", range(1, 9))
def test_returning_half_space_predicate_matches_oracle(n):
    ours = {w for w in iter_walks(n, 2, half_space=True) if is_returning_half_space(w)}
    assert ours == set(oracle.returning_half_space_walks(n))


def test_returning_half_space_examples():
    assert not is_returning_half_space([(0, 0), (1, 0)])
    assert is_returning_half_space([(0, 0), (0, -1), (1, -1), (1, 0)])
    # the walk must start on the axis
    assert not is_returning_half_space([(0, -1), (1, -1), (1, 0)])


@pytest.mark.parametrize("d, lengths", [(2, (2, 4, 6)), (3, (2, 4))])
def test_threedge_counts_match_closing_walk_oracle(d, lengths):
    counts = threedge_polygon_counts(max(lengths), d)
    for n in lengths:
        assert counts[n] == oracle.threedge_count(n, d)


def test_count_table_csv():
    table = count(EnumerationPlan("sap", 2, 8))
    lines = table.csv_text().splitlines()
    assert lines[0] == "model,dim,n,count"
    assert "sap,2,8,7" in lines


def test_bridge_and_half_space_tables():
    bridges = count(EnumerationPlan("bridge", 2, 6)).counts
    assert bridges == {n: len(oracle.bridges(n)) for n in range(7)}
    half = count(EnumerationPlan("rhssaw", 2, 6)).counts
    assert half == {n: len(oracle.returning_half_space_walks(n)) for n in range(7)}


def test_stream_yields_every_polygon_once():
    plan = EnumerationPlan("sap", 2, 10, stream=True)
    seen = list(stream(plan))
    assert len(seen) == len(set(seen)) == sum(sap_counts(10).values())


@pytest.mark.parametrize("plan", [
    EnumerationPlan("hexagon", 2, 4),
    EnumerationPlan("sap", 3, 4),
    EnumerationPlan("saw", 1, 4),
    EnumerationPlan("saw", 2, -1),
    EnumerationPlan("saw", 2, 4, thread_count=0),
])
def test_bad_plans_are_rejected(plan):
    with pytest.raises(EnumerationError):
        count(plan)


def test_state_cap(monkeypatch):
    monkeypatch.setenv("SAPFORGE_MAX_STATES", "1000")
    with pytest.raises(EnumerationError, match="cap"):
        count(EnumerationPlan("saw", 2, 20))
