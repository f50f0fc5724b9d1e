import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kifermarkov import quasimodes as qm
from kifermarkov import words
from kifermarkov._rng import generator
from kifermarkov.sl2 import classify_word
from kifermarkov.spectra import build_truncation, count_in


def random_half(rng, min_kappa=1, max_units=30):
    """Admissible word with diagonal product and exponent >= min_kappa."""
    while True:
        n = int(rng.integers(1, max_units + 1))
        letters = list(rng.choice(["C", "D"], n, p=[0.3, 0.7]))
        f = classify_word(letters)
        if f.is_diagonal and f.kappa >= min_kappa:
            return "".join("0" if x == "C" else "abc" for x in letters)


def embed(w1, w2, pad=3):
    word = "0" * pad + w1 + "0" + w2 + "0" * pad
    T = build_truncation(word)
    mode = qm.build_quasimode(w1, w2, start=pad)
    return T, mode


def test_hand_example():
    T, mode = embed("abc" * 3, "00abc00abc")
    assert (mode.k1, mode.k2) == (3, 2)
    assert mode.residual == pytest.approx(math.hypot(math.exp(-3), math.exp(-2)), rel=1e-15)
    r = np.linalg.norm(T.apply(mode.values, mode.start))
    assert abs(r - mode.residual) < 1e-12
    assert mode.norm >= mode.norm_lb == 1.0
    # the middle site carries the unit value
    assert abs(mode.values[9]) == 1.0


def test_residual_certified_random():
    rng = generator(17)
    for _ in range(100):
        w1, w2 = random_half(rng), random_half(rng)
        T, mode = embed(w1, w2)
        r = np.linalg.norm(T.apply(mode.values, mode.start))
        assert abs(r - mode.residual) <= 1e-12
        assert mode.norm >= 1.0


def test_rejects_bad_halves():
    with pytest.raises(ValueError):
        qm.build_quasimode("0", "abc")  # antidiagonal
    with pytest.raises(ValueError):
        qm.build_quasimode("00", "abc")  # kappa 0
    with pytest.raises(ValueError):
        qm.build_quasimode("0abc0", "abc")  # C D C has kappa -1
    with pytest.raises(ValueError):
        qm.build_quasimode("ab", "abc")
    with pytest.raises(ValueError):
        qm.build_quasimode_from_word("abcaabc", 3)


def test_from_word_split():
    m = qm.build_quasimode_from_word("abc0abcabc", 3, start=5)
    assert (m.k1, m.k2, m.start, m.end) == (1, 2, 5, 14)


def test_from_vector_bounds_true_residual():
    T = build_truncation("00abc0abcabc00")
    mode = qm.build_quasimode("abc", "abcabc", start=2)
    fv = qm.QuasiMode.from_vector(T, 2, mode.values)
    assert fv.residual >= np.linalg.norm(T.apply(mode.values, 2))
    assert fv.residual == pytest.approx(mode.residual, rel=1e-9)
    with pytest.raises(ValueError):
        qm.QuasiMode.from_vector(T, 10, mode.values)


def test_temple_rules():
    T = build_truncation("0" * 200)
    base = qm.build_quasimode("abc" * 4, "abc" * 4)  # length 25
    far = [base.shifted(0), base.shifted(27), base.shifted(60)]
    assert qm.temple_count(T, far, 0.0, 1.0).count == 3
    close = [base.shifted(0), base.shifted(26)]  # one empty site only
    res = qm.temple_count(T, close, 0.0, 1.0)
    assert res.count == 1 and "too close" in res.rejected[0][1]
    assert qm.temple_count(T, [base.shifted(190)], 0.0, 1.0).count == 0
    assert qm.temple_count(T, [base], 0.0, base.residual / 2).count == 0
    assert qm.temple_count(T, [base], 0.3, base.residual + 0.29).count == 0
    assert qm.temple_count(T, [base], 0.3, base.residual + 0.31).count == 1


def _random_instance(rng):
    units = []
    modes = []
    pos = 0
    while pos < 400:
        if rng.random() < 0.3:
            w1, w2 = random_half(rng, max_units=12), random_half(rng, max_units=12)
            modes.append(qm.build_quasimode(w1, w2, start=pos))
            units.append(w1 + "0" + w2)
            pos += len(w1) + 1 + len(w2)
        else:
            u = "0" if rng.random() < 0.5 else "abc"
            units.append(u)
            pos += len(u)
    word = "".join(units)
    return build_truncation(word), modes


def test_temple_never_exceeds_sturm():
    rng = generator(23)
    for _ in range(100):
        T, modes = _random_instance(rng)
        eps = float(rng.choice([0.05, 0.2, 0.5]))
        tc = qm.temple_count(T, modes, 0.0, eps)
        assert tc.count <= count_in(T, -eps, eps, closed=True).count


def test_layout():
    lay = qm.BlockLayout(27, 5)
    assert lay.L == 5 * 57
    assert lay.blocks[0] == (0, 56) and lay.blocks[-1][1] == lay.L - 1
    for (a, b), (c, d) in zip(lay.blocks, lay.blocks[1:]):
        assert c == b + 1
    assert all(d - c + 1 == 55 for c, d in lay.inner)
    assert list(lay.inner_starts()) == [c for c, _ in lay.inner]
    with pytest.raises(ValueError):
        qm.BlockLayout(0, 3)


def test_hand_built_good_block():
    l, m = 27, 20
    word = "0" + "abc" * 9 + "0" + "abc" * 9 + "0" + "0" * (57 * (m - 1)) + "0"
    lay = qm.BlockLayout(l, m)
    assert list(qm.good_blocks(word, lay)) == [0]
    modes = qm.block_modes(word, lay, verify=True)
    assert len(modes) == 1 and (modes[0].k1, modes[0].k2) == (9, 9)
    T = build_truncation(word)
    eps = qm.epsilon_l(l)
    assert modes[0].residual <= eps
    assert count_in(T, -eps, eps, closed=True).count >= 1
    assert qm.temple_count(T, modes, 0.0, eps).count == 1


def test_block_counts_match_scalar_check():
    rng = generator(5)
    lay = qm.BlockLayout(30, 400)
    w = words.sample_stationary(lay.L + 1, rng)
    t = qm.block_threshold(30)
    brute = []
    for j, (s, _) in enumerate(lay.inner):
        h1, h2 = words.decode(w[s:s + 30]), words.decode(w[s + 31:s + 61])
        f1, f2 = words.form_of(h1), words.form_of(h2)
        if (w[s + 30] == 0 and f1 is not None and f2 is not None and f1.is_diagonal
                and f2.is_diagonal and f1.kappa >= t and f2.kappa >= t):
            brute.append(j)
    assert list(qm.good_blocks(w, lay)) == brute
    with pytest.raises(ValueError):
        qm.good_blocks(w[:100], lay)


def test_constants():
    assert qm.epsilon_l(300) == pytest.approx(math.sqrt(2) / math.e, rel=1e-15)
    l, r, lb = qm.lower_bound_record(300)
    assert (l, r) == (300, qm.epsilon_l(300))
    assert lb == pytest.approx(qm.p_Cl(300) / 603, rel=1e-15)
    assert qm.p_Cl(300) == pytest.approx(float(qm.prob_B_float(300, 300)) ** 2)


def test_block_constant():
    rows = qm.block_constant_report()
    # the chain sits between 2/625 and 4/625 at every scale
    assert all(not above and above_half for _, _, _, above, above_half in rows)
    assert 0.5 < rows[-1][2] < 0.55


def test_gap_experiment_small():
    rec = qm.gap_experiment(48, 300, 4, seed=1)
    assert rec.violations == 0
    assert all(c.count >= c.n_lm and c.temple == c.n_lm for c in rec.checks)
    assert rec.L == 300 * 99 and rec.gap_estimate == rec.count_mean / rec.L
    again = qm.gap_experiment(48, 300, 4, seed=1, threads=2)
    assert again == rec


def test_gap_validation():
    with pytest.raises(ValueError):
        qm.gap_experiment(26, 10, 1, seed=0)
    with pytest.raises(ValueError):
        qm.gap_experiment(300, 20_000, 1, seed=0)


def test_good_block_frequency():
    rec = qm.gap_experiment(48, 10_000, 2, seed=8, temple=False)
    p = qm.p_Cl(48)
    n = rec.m * rec.replicas
    assert abs(rec.p_Cl_empirical - p) <= 5 * math.sqrt(p * (1 - p) / n)


def test_gap_csv():
    rec = qm.gap_experiment(48, 50, 2, seed=1)
    fh = io.StringIO()
    qm.write_gap_csv([rec], fh)
    header, row = fh.getvalue().splitlines()
    assert header.split(",") == list(qm.GapRecord.CSV_FIELDS)
    assert row.split(",")[0] == "48"


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 20))
def test_quasimode_residual_property(k1, k2, start):
    w1, w2 = "abc" * k1, "abc" * k2
    T, mode = embed(w1, w2, pad=start + 1)
    assert abs(np.linalg.norm(T.apply(mode.values, mode.start)) - mode.residual) <= 1e-12
