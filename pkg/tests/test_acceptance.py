"""Acceptance criteria, one test each, at the stated tolerances and time limits.

Each test prints a single PASS/FAIL line; the lines are repeated together in
the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from kifermarkov import lyapunov as ly
from kifermarkov import modulus as md
from kifermarkov import quasimodes as qm
from kifermarkov import walks, words
from kifermarkov._rng import generator
from kifermarkov.sl2 import (ANTIDIAGONAL, DIAGONAL, ProductForm, classify_word, classify_words_batch,
                             kifer_pair, relative_error)
from kifermarkov.spectra import build_truncation, count_below, count_in, free_operator

TABLE_ROWS = {
    1: [1, 1],
    2: [1, 1, 1, 1],
    3: [1, 1, 2, 2, 1, 1],
    4: [1, 1, 3, 3, 3, 3, 1, 1],
    5: [1, 1, 4, 4, 6, 6, 4, 4, 1, 1],
}
NARAYANA = [1, 1, 1, 2, 3, 4, 6, 9, 13]
ACOSH_1_5 = 0.9624236501192069
GAP_SCALES = (300, 1200, 2700)


def test_01_exact_combinatorics(acceptance):
    t0 = time.perf_counter()
    tab = walks.pascal_table(20)
    rows_ok = all(tab.row(n) == TABLE_ROWS[n] for n in TABLE_ROWS)
    closed_ok = all(walks.explicit_a(n, i) == tab.a(n, i)
                    for n in range(1, 21) for i in range(-(n - 1), n + 1))
    sums_ok = all(sum(tab.row(n)) == 2**n for n in range(1, 21))
    ok = acceptance(1, "exact combinatorics", rows_ok and closed_ok and sums_ok,
                    f"rows 1-5 {rows_ok}, closed forms n<=20 {closed_ok}, row sums {sums_ok}",
                    time.perf_counter() - t0, 1)
    assert ok


def test_02_narayana(acceptance):
    t0 = time.perf_counter()
    seq = walks.narayana_counts(100)
    a_ok = list(seq.a_seq[:9]) == NARAYANA
    enum = [len(words.enumerate_words(n)) for n in range(1, 19)]
    b_ok = enum == [seq.b(n) for n in range(1, 19)]
    b_ok &= all(seq.b(n) == seq.b(n - 1) + seq.b(n - 3) for n in range(4, 19))
    # b counts nonempty allowable words; the shift holds from n = 1
    shift_ok = all(seq.b(n) == seq.a(n + 4) for n in range(1, 41))
    ratio = seq.a(100) / seq.b(100)
    ratio_ok = abs(ratio - 0.216757) <= 1e-5
    ok = acceptance(2, "Narayana counts", a_ok and b_ok and shift_ok and ratio_ok,
                    f"a(n) table {a_ok}, b(n) enumeration n<=18 {b_ok}, "
                    f"b(n)=a(n+4) 1<=n<=40 {shift_ok}, a(100)/b(100)={ratio:.7f}",
                    time.perf_counter() - t0, 5)
    assert ok


def test_03_product_algebra(acceptance):
    t0 = time.perf_counter()
    n = 16
    masks = np.arange(2**n)
    letters = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)  # 1 = D
    sign, diag, kappa = classify_words_batch(letters)
    C, D = kifer_pair()
    G = np.stack([C, D])
    M = np.broadcast_to(np.eye(2), (masks.size, 2, 2)).copy()
    for j in range(n):
        M = G[letters[:, j]] @ M
    worst = 0.0
    for k in range(masks.size):
        form = ProductForm(int(sign[k]), DIAGONAL if diag[k] else ANTIDIAGONAL, int(kappa[k]))
        worst = max(worst, relative_error(form.matrix(), M[k]))
    n_c = n - letters.sum(axis=1)
    parity_exceptions = int((diag != (n_c % 2 == 0)).sum())
    ok = acceptance(3, "product algebra", worst < 1e-9 and parity_exceptions == 0,
                    f"max relative error {worst:.2e} over 2^16 words, "
                    f"parity exceptions {parity_exceptions}", time.perf_counter() - t0, 10)
    assert ok


def test_04_event_probabilities(acceptance):
    t0 = time.perf_counter()
    tab = walks.pascal_table(24)
    mismatches = [n for n in range(1, 25)
                  if walks.event_probability_En(n, table=tab)
                  != walks.event_probability_En(n, "enumerate")]
    rep = walks.En_limit_report(n_values=range(1, 401))
    positive = all(r["enumerated_normalization"] > 0 for r in rep["rows"])
    ok = not mismatches and positive and rep["verdict"] == "half"
    ok = acceptance(4, "event probabilities", ok,
                    f"table vs enumeration n<=24 mismatches {mismatches}, "
                    f"limit {rep['limit_estimate']:.4f} matches {rep['verdict']} "
                    f"(1-F(0.1) = {rep['reference_full']:.6f}, half = {rep['reference_half']:.6f})",
                    time.perf_counter() - t0, 30)
    assert ok


def test_05_lyapunov(acceptance):
    t0 = time.perf_counter()
    kif = ly.le_estimate(ly.CocycleSpec.kifer(0.5), 10**6, 32, seed=2024)
    zero = ly.le_estimate(ly.CocycleSpec.kifer(0.0), 10**6, 4, seed=2025)
    free = ly.le_estimate(ly.CocycleSpec.free(3.0), 10**6, 4, seed=2026)
    ok = (abs(kif.value) <= 5e-3 and abs(zero.value - 1) <= 1e-12
          and abs(free.value - ACOSH_1_5) <= 1e-3)
    ok = acceptance(5, "Lyapunov", ok,
                    f"Kifer {kif.value:.2e}, p=0 error {abs(zero.value - 1):.1e}, "
                    f"free E=3 error {abs(free.value - ACOSH_1_5):.1e}",
                    time.perf_counter() - t0, 120)
    assert ok


def _agree(x, y):
    return abs(x[0] - y[0]) <= 3 * math.hypot(x[1], y[1])


def test_06_induced_cocycle(acceptance):
    t0 = time.perf_counter()
    details, ok = [], True
    rts = []
    for k, E in enumerate((0.5, 1.0)):
        res = ly.induced_le(E, 10**6, 16, seed=[600, k])
        conj = ly.bernoulli_conjugate_le(E, 10**6, 16, seed=[601, k])
        rts.append((res.mean_return_time, res.return_time_stderr))
        ind = (res.L_induced.value, res.L_induced.std_error)
        hat = (conj.value, conj.std_error)
        scaled = (1.5 * res.L_base.value, 1.5 * res.L_base.std_error)
        agree = _agree(ind, hat) and _agree(ind, scaled) and _agree(hat, scaled)
        ok &= agree
        details.append(f"E={E}: induced {ind[0]:.4f}, conjugate {hat[0]:.4f}, "
                       f"1.5*base {scaled[0]:.4f} (2*base {2 * res.L_base.value:.4f})")
    rt = float(np.mean([r for r, _ in rts]))
    rt_ok = abs(rt - 1.5) <= 0.01
    ok = acceptance(6, "induced/conjugate cocycle", ok and rt_ok,
                    f"mean return time {rt:.4f} (target 1.5; stationary value 1/q(0,a) = 2); "
                    + "; ".join(details), time.perf_counter() - t0, 180)
    assert ok


def test_07_spectra(acceptance):
    t0 = time.perf_counter()
    rng = generator(707)
    mismatches = 0
    for _ in range(200):
        dim = int(rng.integers(1, 51))
        T = build_truncation(words.sample_stationary(dim, rng))
        ev = np.linalg.eigvalsh(T.dense())
        probes = np.concatenate([[ev[0] - 1, ev[-1] + 1], (ev[1:] + ev[:-1]) / 2])
        for x in probes:
            mismatches += count_below(T, x).count != int((ev < x).sum())
    N0 = count_below(free_operator(10**4), 0.0).count / 10**4
    ok = acceptance(7, "spectra", mismatches == 0 and abs(N0 - 0.5) <= 1e-3,
                    f"Sturm vs dense mismatches {mismatches} over 200 instances, free N(0) = {N0}",
                    time.perf_counter() - t0, 60)
    assert ok


def _half(rng, max_units):
    while True:
        n = int(rng.integers(1, max_units + 1))
        letters = list(rng.choice(["C", "D"], n, p=[0.3, 0.7]))
        f = classify_word(letters)
        if f.is_diagonal and f.kappa >= 1:
            return "".join("0" if x == "C" else "abc" for x in letters)


def test_08_quasimodes(acceptance):
    t0 = time.perf_counter()
    rng = generator(808)
    worst = 0.0
    for _ in range(100):
        w1, w2 = _half(rng, 40), _half(rng, 40)
        T = build_truncation("00" + w1 + "0" + w2 + "00")
        mode = qm.build_quasimode(w1, w2, start=2)
        worst = max(worst, abs(np.linalg.norm(T.apply(mode.values, mode.start)) - mode.residual))
    violations = 0
    for _ in range(500):
        units, modes, pos = [], [], 0
        while pos < 300:
            if rng.random() < 0.3:
                w1, w2 = _half(rng, 12), _half(rng, 12)
                modes.append(qm.build_quasimode(w1, w2, start=pos))
                units.append(w1 + "0" + w2)
            else:
                units.append("0" if rng.random() < 0.5 else "abc")
            pos += len(units[-1])
        T = build_truncation("".join(units))
        eps = float(rng.choice([0.02, 0.1, 0.3, 0.6]))
        tc = qm.temple_count(T, modes, 0.0, eps).count
        violations += tc > count_in(T, -eps, eps, closed=True).count
    ok = acceptance(8, "quasimodes", worst <= 1e-12 and violations == 0,
                    f"max |certified - recomputed residual| {worst:.1e} over 100 instances, "
                    f"Temple > Sturm in {violations} of 500", time.perf_counter() - t0, 60)
    assert ok


@pytest.fixture(scope="module")
def gap_run():
    t0 = time.perf_counter()
    recs = [qm.gap_experiment(l, (5 * 10**6) // (2 * l + 3), 16, seed=[900, l])
            for l in GAP_SCALES]
    return recs, time.perf_counter() - t0


def test_09_gap_engine(acceptance, gap_run):
    recs, elapsed = gap_run
    ok, details = True, []
    for r in recs:
        p_hat = max(r.p_Cl_hat, r.p_Cl_empirical)
        bound = 0.9 * p_hat / (2 * r.l + 3)
        ok &= r.violations == 0 and r.replicas >= 16 and r.L <= 5 * 10**6
        ok &= r.gap_estimate >= bound
        details.append(f"l={r.l}: L={r.L}, violations {r.violations}/{r.replicas}, "
                       f"gap {r.gap_estimate:.4g} >= {bound:.3g}")
    ok = acceptance(9, "gap engine", ok, "; ".join(details), elapsed, 900)
    assert ok


def test_10_breakdown(acceptance, gap_run):
    recs, _ = gap_run
    series = md.lower_bound_series(recs)
    t0 = time.perf_counter()
    gb25 = md.fit_breakdown(series, md.ModulusFamily.gamma_beta(1, 2.5))
    hold = md.fit_breakdown(series, md.ModulusFamily.holder(0.5))
    gb2 = md.fit_breakdown(series, md.ModulusFamily.gamma_beta(1, 2))
    controls = {}
    for fam in (md.ModulusFamily.holder(0.5), md.ModulusFamily.weak_holder(0.5, 0.5),
                md.ModulusFamily.gamma_beta(1, 2.5), md.ModulusFamily.gamma_beta(1, 2),
                md.ModulusFamily.log_holder()):
        ctl = md.GapSeries.from_K(md.DEFAULT_EXTENSION_K,
                                  lambda l, u, f=fam: math.exp(f.log_omega(u)) if f.in_domain(u) else 1.0)
        controls[fam.label()] = md.fit_breakdown(ctl, fam).verdict
    elapsed = time.perf_counter() - t0
    measured_holder = md.fit_breakdown(md.measured_series(recs), md.ModulusFamily.holder(0.5))
    ok = (gb25.verdict == "breakdown" and hold.verdict == "breakdown"
          and gb2.verdict == "inconclusive" and all(v == "bounded" for v in controls.values()))
    ok = acceptance(10, "breakdown analysis", ok,
                    f"certified series at l={','.join(str(r.l) for r in recs)} plus extension: "
                    f"(1,2.5) {gb25.verdict} x{gb25.growth:.2f}, holder(0.5) {hold.verdict}, "
                    f"(1,2) {gb2.verdict} x{gb2.growth:.2f}; controls "
                    f"{sorted(set(controls.values()))}; raw measured holder(0.5) "
                    f"{measured_holder.verdict}", elapsed, 1)
    assert ok


def test_11_thouless(acceptance):
    t0 = time.perf_counter()
    free = md.ids_vs_le_consistency([2.5, 3.0, 4.0], 10**4, 1, seed=1100,
                                    potential=md.FREE_POTENTIAL)
    model = md.ids_vs_le_consistency([5.0], 10**4, 8, seed=1101)
    worst_free = max(r.discrepancy for r in free)
    ok = worst_free <= 5e-3 and model[0].discrepancy <= 2e-2
    ok = acceptance(11, "Thouless consistency", ok,
                    f"free max discrepancy {worst_free:.1e}, model E=5 {model[0].discrepancy:.1e}",
                    time.perf_counter() - t0, 120)
    assert ok


def test_12_lipschitz(acceptance):
    t0 = time.perf_counter()
    reps = [ly.lipschitz_check(thetas=th, trials=50, seed=1200 + k)
            for k, th in enumerate([(1.0, math.sqrt(2)), (0.3, 2.0)])]
    constants = {r.constant for r in reps}
    ok = all(r.bounded for r in reps) and len(constants) == 1
    worst = max(row.max_ratio for r in reps for row in r.rows)
    ok = acceptance(12, "Lipschitz probe", ok,
                    f"constant {constants}, largest L(B)/||A-B|| {worst:.3f}, "
                    f"violations {sum(row.violations for r in reps for row in r.rows)}",
                    time.perf_counter() - t0, 120)
    assert ok
