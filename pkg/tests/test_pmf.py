"""Closed-form pmf tests.

The state-vector simulator is the oracle: every analytic route must
reproduce it (up to the documented axis reflection), the three routes
must agree with each other, and exact rational inputs must normalize
to exactly 1.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reluctant_walk.pmf import (
    CONVENTION_SIGMA,
    Pmf,
    pmf_point,
    pmf_point_cosine_form,
    pmf_even_closed,
    pmf_full,
    iter_pmf_full,
    reluctance_profile,
    pmf_to_csv,
    pmf_from_csv,
    pmf_to_json,
    pmf_from_json,
    format_float,
)
from reluctant_walk.walk import CoinParameter, WalkState, evolve, position_pmf

rational_lam = st.integers(-9, 9).map(lambda n: Fraction(n, 9))


def test_convention_constant():
    assert CONVENTION_SIGMA == -1


def test_one_step_row():
    lam = Fraction(2, 7)
    assert pmf_point(1, -1, lam) == lam * lam
    assert pmf_point(1, 1, lam) == 1 - lam * lam
    assert pmf_point(1, 0, lam) == 0
    assert pmf_point(1, 3, lam) == 0


def test_two_step_row_closed_values():
    # exact k = 2 table: {-2: lam^4, 0: 1 - lam^2, 2: lam^2 (1 - lam^2)}
    lam = Fraction(3, 5)
    assert pmf_point(2, -2, lam) == lam**4
    assert pmf_point(2, 0, lam) == 1 - lam * lam
    assert pmf_point(2, 2, lam) == lam * lam * (1 - lam * lam)


@given(lam=rational_lam, k=st.integers(1, 12))
@settings(max_examples=60, deadline=None)
def test_point_and_cosine_forms_agree_exactly(lam, k):
    for d in range(-k, k + 1, 2):
        assert pmf_point(k, d, lam) == pmf_point_cosine_form(k, d, lam)


@given(lam=rational_lam.filter(lambda q: q != 0), k2=st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_even_closed_agrees_exactly(lam, k2):
    k = 2 * k2
    for d in range(-k, k + 1, 2):
        assert pmf_even_closed(k, d, lam) == pmf_point(k, d, lam)


@pytest.mark.parametrize("k,d", [(4, 0), (4, 2), (8, 4), (12, -6)])
def test_even_closed_float_examples(k, d):
    assert pmf_even_closed(k, d, 0.6) == pytest.approx(pmf_point(k, d, 0.6), abs=1e-14)


def test_even_closed_small_lam_delegates():
    assert pmf_even_closed(4, 2, 0.0) == pmf_point(4, 2, 0.0)
    assert pmf_even_closed(60, 0, 1e-8) == pytest.approx(pmf_point(60, 0, 1e-8), abs=1e-15)


def test_even_closed_rejects_odd_arguments():
    with pytest.raises(ValueError):
        pmf_even_closed(3, 1, 0.5)
    with pytest.raises(ValueError):
        pmf_even_closed(4, 1, 0.5)


@pytest.mark.parametrize("theta", [0.2, 0.7, 1.2, 1.5])
@pytest.mark.parametrize("k", [1, 2, 3, 8, 12])
def test_matches_simulator_mirrored(theta, k):
    """pmf_point(k, d) is the simulated probability of position -d."""
    state = evolve(WalkState.origin(), CoinParameter(theta), k)
    sim = position_pmf(state)
    lam = math.cos(theta)
    for d in range(-k, k + 1):
        assert pmf_point(k, d, lam) == pytest.approx(
            sim.probability(CONVENTION_SIGMA * d), abs=1e-12
        )


def test_extreme_site_at_unit_lam():
    # lam = 1 sends all mass to d = -k on the analytic axis
    assert pmf_point(6, -6, Fraction(1)) == 1
    assert pmf_point_cosine_form(6, -6, Fraction(1)) == 1
    full = pmf_full(6, 1.0)
    assert full.probability(-6) == 1.0
    assert full.total() == pytest.approx(1.0, abs=0)


@given(lam=rational_lam, k=st.integers(1, 25))
@settings(max_examples=40, deadline=None)
def test_exact_normalization(lam, k):
    total = sum(pmf_point(k, d, lam) for d in range(-k, k + 1, 2))
    assert total == 1


def test_float_normalization_large_k():
    pmf = pmf_full(200, 0.95)
    assert pmf.total() == pytest.approx(1.0, abs=1e-10)
    assert all(0.0 <= p <= 1.0 for p in pmf.table.values())


@given(lam=st.floats(0.0, 1.0), k=st.integers(1, 20))
@settings(max_examples=30, deadline=None)
def test_sign_of_lam_is_irrelevant(lam, k):
    assert pmf_full(k, lam).table == pmf_full(k, -lam).table


def test_parity_and_range_zeros():
    assert pmf_point(5, 2, 0.4) == 0.0
    assert pmf_point(5, 7, 0.4) == 0.0
    assert pmf_point_cosine_form(5, 2, 0.4) == 0.0
    full = pmf_full(5, 0.4)
    assert set(full.table) == set(range(-5, 6, 2))
    assert full.probability(2) == 0.0  # off support -> default


def test_argument_validation():
    with pytest.raises(ValueError):
        pmf_point(0, 0, 0.5)
    with pytest.raises(ValueError):
        pmf_point(3, 1, 1.5)
    with pytest.raises(ValueError):
        pmf_full(3, -1.2)
    with pytest.raises(ValueError):
        list(iter_pmf_full(0.5, 0))


def test_moment_helpers():
    pmf = pmf_full(1, 0.5)
    assert pmf.mean() == pytest.approx(1 - 2 * 0.25)
    assert pmf.variance() == pytest.approx(1 - (1 - 2 * 0.25) ** 2)
    assert pmf.std() == pytest.approx(math.sqrt(pmf.variance()))
    assert pmf.support == [-1, 1]


def test_iter_matches_single_calls():
    singles = [pmf_full(k, 0.41) for k in range(1, 9)]
    for got, want in zip(iter_pmf_full(0.41, 8), singles):
        assert got.k == want.k
        assert got.table == want.table


def test_float_rows_track_exact_rows():
    fast = pmf_full(60, 0.9, exact=False)
    slow = pmf_full(60, 0.9, exact=True)
    for d in fast.table:
        assert fast.probability(d) == pytest.approx(slow.probability(d), abs=1e-12)


def test_reluctance_profile():
    prof = reluctance_profile(4, 0.6)
    assert [r for r, _ in prof] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert prof[0][1] == pmf_full(4, 0.6).probability(-4)


def test_csv_round_trip():
    pmf = pmf_full(5, 0.31)
    text = pmf_to_csv(pmf, meta={"command": "pmf", "convention_sigma": CONVENTION_SIGMA})
    assert text.startswith("# command: pmf\n")
    assert "k,d,r,lambda,p" in text
    back = pmf_from_csv(text)
    assert back.k == pmf.k
    assert back.lam == pmf.lam
    assert back.table == pmf.table


def test_csv_round_trip_without_lam():
    pmf = position_pmf(evolve(WalkState.origin(), CoinParameter(0.8), 3))
    back = pmf_from_csv(pmf_to_csv(pmf))
    assert back.lam is None
    assert back.table == pmf.table


def test_csv_rejects_garbage():
    with pytest.raises(ValueError):
        pmf_from_csv("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        pmf_from_csv("k,d,r,lambda,p\n")


def test_json_round_trip():
    pmf = pmf_full(7, -0.64)
    obj = pmf_to_json(pmf, meta={"seed": 5})
    assert obj["meta"] == {"seed": 5}
    back = pmf_from_json(obj)
    assert back.k == pmf.k and back.lam == pmf.lam and back.table == pmf.table


def test_format_float_round_trips():
    for x in (0.1, 1 / 3, 1e-17, 123456.789):
        assert float(format_float(x)) == x


def test_table_sorted_on_construction():
    pmf = Pmf(2, {2: 0.3, -2: 0.4, 0: 0.3}, lam=None)
    assert pmf.support == [-2, 0, 2]
