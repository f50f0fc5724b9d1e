import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kifermarkov import walks, words
from kifermarkov._rng import generator
from kifermarkov.sl2 import classify_word

# Reference rows, i = -(n-1) .. n
TABLE_ROWS = {
    1: [1, 1],
    2: [1, 1, 1, 1],
    3: [1, 1, 2, 2, 1, 1],
    4: [1, 1, 3, 3, 3, 3, 1, 1],
    5: [1, 1, 4, 4, 6, 6, 4, 4, 1, 1],
}
NARAYANA = [1, 1, 1, 2, 3, 4, 6, 9, 13]

# Independent oracles (mpmath, 30 digits)
F_TENTH = 0.539827837277028983668933907702
PISOT = 1.4655712318767682
PISOT_INV4 = 0.2167565719512512


@pytest.fixture(scope="module")
def table():
    return walks.pascal_table(40)


def test_reference_rows(table):
    for n, row in TABLE_ROWS.items():
        assert table.row(n) == row


def test_row_sums_and_symmetry(table):
    for n in range(1, 41):
        assert sum(table.row(n)) == 2**n
        for i in range(-(n - 1), n + 1):
            assert table.a(n, i) == table.a(n, 1 - i)
            assert table.a_plus(n, i) + table.a_minus(n, i) == table.a(n, i)


def test_closed_forms(table):
    for n in range(1, 41):
        for i in range(-(n - 1), n + 1):
            assert walks.explicit_a(n, i) == table.a(n, i)


def test_table_out_of_range(table):
    assert table.a(3, 4) == 0 and table.a(3, -3) == 0 and table.a(0, 0) == 0


@pytest.mark.parametrize("n", [1, 2, 5, 9, 14])
def test_histogram_matches_table(table, n):
    hist = walks.kappa_histogram(n)
    for i in range(-(n - 1), n + 1):
        assert hist.get((True, i), 0) == table.a_plus(n, i)
        assert hist.get((False, i), 0) == table.a_minus(n, i)


def test_histogram_matches_classifier():
    import itertools

    n = 8
    brute = {}
    for w in itertools.product("CD", repeat=n):
        f = classify_word(w)
        key = (f.is_diagonal, f.kappa)
        brute[key] = brute.get(key, 0) + 1
    assert walks.kappa_histogram(n) == brute


def test_pascal_csv(tmp_path, table):
    p = tmp_path / "t.csv"
    walks.pascal_table(3).to_csv(str(p))
    lines = p.read_text().splitlines()
    assert lines[0] == "n,i,a,a_plus,a_minus"
    assert lines[1:3] == ["1,0,1,0,1", "1,1,1,1,0"]
    assert len(lines) == 1 + 2 + 4 + 6


def test_event_table_vs_enumeration():
    for n in range(1, 19):
        assert walks.event_probability_En(n) == walks.event_probability_En(n, "enumerate")


def test_event_values():
    # n = 1: only D has kappa 1 and is diagonal
    assert walks.event_probability_En(1) == Fraction(1, 2)
    assert walks.event_probability_En(4) == Fraction(3 + 1, 16)  # i = 2, 4
    with pytest.raises(ValueError):
        walks.event_probability_En(3, rule="nope")


def test_doubled_rule_is_twice_the_count():
    # a 2^(n-1) denominator counts the diagonal class against half the words
    for n in range(1, 401):
        assert walks.event_probability_En(n, "doubled") == 2 * walks.event_probability_En(n)


def test_normal_cdf_oracle():
    assert walks.normal_cdf(0.1) == pytest.approx(F_TENTH, abs=1e-15)
    assert walks.normal_cdf(0.0) == 0.5


def test_limit_report_half():
    rep = walks.En_limit_report(n_values=range(1, 201), large_n=(10**6,))
    assert rep["verdict"] == "half"
    assert rep["reference_full"] == pytest.approx(1 - F_TENTH, abs=1e-15)
    # far out the threshold is nearly continuous and the limit is plain
    assert rep["large_n"][0]["enumerated_normalization"] == pytest.approx((1 - F_TENTH) / 2, abs=1e-3)


def test_float_event_matches_exact():
    for n in (50, 51, 400, 401):
        assert walks.event_probability_En_float(n) == pytest.approx(
            float(walks.event_probability_En(n)), rel=1e-12)


def test_berry_esseen():
    assert walks.berry_esseen_gap(4) * 2 == pytest.approx(0.375, abs=1e-9)
    for n in (9, 16, 25, 36):
        assert walks.berry_esseen_gap(n) * math.sqrt(n) <= 0.4


@given(st.integers(1, 10**8))
def test_tenth_threshold_minimal(n):
    t = walks.tenth_sqrt_threshold(n)
    assert t >= 1 and 100 * t * t >= n
    assert t == 1 or 100 * (t - 1) ** 2 < n


@given(st.integers(1, 10**8))
def test_block_threshold_minimal(l):
    t = walks.block_threshold(l)
    assert t >= 1 and t >= walks.K_l(l) - 1e-12
    assert t == 1 or 300 * (t - 1) ** 2 < l


def test_narayana_initial_terms():
    seq = walks.narayana_counts(40)
    assert list(seq.a_seq[:9]) == NARAYANA
    assert seq.b_seq[:4] == (1, 4, 6, 9)


def test_b_matches_enumeration():
    seq = walks.narayana_counts(14)
    for n in range(1, 15):
        assert len(words.enumerate_words(n)) == seq.b(n)
        assert len(words.enumerate_words(n, "admissible")) == seq.a(n)


def test_b_shift_relation():
    seq = walks.narayana_counts(40)
    assert all(seq.b(n) == seq.a(n + 4) for n in range(1, 41))
    assert seq.b(0) == 1 and seq.a(4) == 3  # the shift does not extend to the empty word


def test_pisot():
    lam = walks.pisot_root()
    assert abs(lam**3 - lam**2 - 1) < 1e-14
    assert lam == pytest.approx(PISOT, abs=1e-15)
    ratio, _ = walks.pisot_ratio(100)
    assert ratio == pytest.approx(PISOT_INV4, abs=1e-12)
    assert abs(ratio - 0.216757) < 1e-5


def test_admissible_probability():
    for n in range(0, 13):
        brute = sum((words.exact_cylinder_probability(w) for w in words.enumerate_words(n, "admissible")),
                    Fraction(0))
        assert walks.admissible_probability(n) == brute
    assert walks.admissible_probability(6) == Fraction(33, 128)
    assert walks.admissible_probability(9) == Fraction(253, 1024)
    assert float(walks.admissible_probability(60)) == pytest.approx(0.25, abs=1e-9)


@pytest.mark.parametrize("l", [12, 15, 20])
def test_B_exact_vs_enumeration(l):
    assert walks.event_Bl(l).exact == walks.event_Bl(l, "enumerate").exact


def test_C_is_square_of_B():
    l = 7  # halves of length 8
    e = walks.event_Cl(l, "enumerate").exact
    assert e == walks.event_Bl(l).exact ** 2 == walks.event_Cl(l).exact


def test_decomposition_sums():
    l = 90
    rows = walks.bl_decomposition(l)
    total = sum(p * c for _, p, c in rows)
    assert total == walks.prob_B_exact(l + 1, l)
    assert sum(p for _, p, _ in rows) == walks.admissible_probability(l + 1)


@pytest.mark.parametrize("l,length", [(90, 91), (300, 300), (300, 301), (1200, 1200)])
def test_float_quadrature(l, length):
    assert walks.prob_B_float(length, l) == pytest.approx(float(walks.prob_B_exact(length, l)),
                                                          rel=1e-11)


def test_B_montecarlo():
    est = walks.event_Bl(60, "montecarlo", rng=generator(1), samples=200_000)
    assert abs(est.value - walks.event_Bl(60).value) <= 4 * est.stderr


def test_C_montecarlo():
    est = walks.event_Cl(27, "montecarlo", rng=generator(2), samples=400_000)
    assert abs(est.value - walks.event_Cl(27).value) <= 4 * est.stderr


def test_modes_validate():
    with pytest.raises(ValueError):
        walks.event_Bl(30, "montecarlo")
    with pytest.raises(ValueError):
        walks.event_Bl(30, "enumerate")
    with pytest.raises(ValueError):
        walks.event_Bl(30, "nope")
    with pytest.raises(ValueError):
        walks.kappa_histogram(31)
