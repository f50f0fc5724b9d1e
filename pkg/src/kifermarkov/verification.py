"""Fast invariant checks behind ``kifermarkov verify``.

Each check returns ``(name, passed, detail)``.  Sizes are chosen so the
whole suite runs in a few seconds.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from . import lyapunov as lyap
from . import modulus as mod
from . import quasimodes as qm
from . import spectra, walks
from . import words as _words
from ._rng import generator
from .sl2 import classify_word, relative_error, word_product


def _pascal():
    t = walks.pascal_table(20)
    ok = t.row(5) == [1, 1, 4, 4, 6, 6, 4, 4, 1, 1]
    ok &= all(sum(t.row(n)) == 2**n for n in range(1, 21))
    ok &= all(t.a(n, i) == walks.explicit_a(n, i)
              for n in range(1, 21) for i in range(-(n - 1), n + 1))
    return "pascal_table", ok, "rows, sums and closed forms to n = 20"


def _narayana():
    c = walks.narayana_counts(14)
    ok = all(len(_words.enumerate_words(n, "allowable")) == c.b(n) for n in range(1, 15))
    ok &= all(len(_words.enumerate_words(n, "admissible")) == c.a(n) for n in range(0, 15))
    ok &= all(c.b(n) == c.a(n + 4) for n in range(1, 15))
    return "narayana_counts", ok, "enumeration vs recursion to n = 14"


def _products():
    worst = 0.0
    for bits in itertools.product("CD", repeat=10):
        f = classify_word(bits)
        worst = max(worst, relative_error(f.matrix(), word_product(bits)))
    return "product_forms", worst < 1e-9, f"max relative error {worst:.2e} over 2^10 words"


def _sturm(rng):
    bad = 0
    v = _words.potential_vector()
    for _ in range(60):
        dim = int(rng.integers(1, 40))
        T = spectra.TridiagonalOperator(v[rng.integers(0, 4, dim)])
        ev = np.linalg.eigvalsh(T.dense())
        x = float(rng.uniform(-5, 3))
        bad += spectra.count_below(T, x).count != int((ev < x).sum())
    return "sturm_vs_dense", bad == 0, f"{bad} mismatches in 60 trials"


def _quasimodes():
    w1, w2 = "abc" * 3, "00abc00abc"
    md = qm.build_quasimode(w1, w2, start=1)
    T = spectra.build_truncation("0" + w1 + "0" + w2 + "0")
    err = abs(np.linalg.norm(T.apply(md.values, 1)) - md.residual)
    return "quasimode_residual", err < 1e-12, f"|recomputed - certified| = {err:.1e}"


def _gap(rng):
    rec = qm.gap_experiment(48, 300, 3, rng)
    return "gap_inequality", rec.violations == 0, f"{rec.violations} violations in 3 replicas"


def _lyapunov(rng):
    est = lyap.le_estimate(lyap.CocycleSpec.free(3.0), 20000, 2, rng)
    err = abs(est.value - math.acosh(1.5))
    return "free_le", err < 1e-3, f"|L - acosh(1.5)| = {err:.1e}"


def _fit():
    syn = mod.GapSeries.from_K(mod.DEFAULT_EXTENSION_K, lambda l, u: 1 / (2 * l + 3))
    a = mod.fit_breakdown(syn, mod.ModulusFamily.gamma_beta(1, 2.5)).verdict
    b = mod.fit_breakdown(syn, mod.ModulusFamily.gamma_beta(1, 2)).verdict
    return "fit_breakdown", (a, b) == ("breakdown", "bounded"), f"beta 2.5: {a}, beta 2: {b}"


def run_checks(seed=0):
    rng = generator(seed)
    return [_pascal(), _narayana(), _products(), _sturm(rng), _quasimodes(), _gap(rng),
            _lyapunov(rng), _fit()]
