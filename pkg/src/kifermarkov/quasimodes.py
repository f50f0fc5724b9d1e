"""Quasi-eigenfunctions at ``E = 0`` and the eigenvalue lower bound they give.

A word ``w1 0 w2`` whose halves have products ``+-diag(e^k, e^-k)`` with
``k >= 1`` carries a vector that solves ``H psi = 0`` on the word and leaves
residual only at the two sites just outside it.  Disjoint copies of such
vectors certify eigenvalues near zero through Temple's inequality.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import words as _words
from ._rng import map_replicas, spawn_generators
from .sl2 import relative_error
from .spectra import TridiagonalOperator, build_truncation, count_in
from .walks import K_l, block_threshold, prob_B_float


@dataclass(frozen=True)
class QuasiMode:
    start: int
    values: np.ndarray
    residual: float
    norm_lb: float
    energy: float = 0.0
    k1: int | None = None
    k2: int | None = None

    @property
    def end(self):
        return self.start + len(self.values) - 1

    @property
    def norm(self):
        return float(np.linalg.norm(self.values))

    def shifted(self, start):
        return QuasiMode(start, self.values, self.residual, self.norm_lb, self.energy,
                         self.k1, self.k2)

    @classmethod
    def from_vector(cls, T: TridiagonalOperator, start, values, energy=0.0):
        """Wrap an arbitrary vector, measuring its residual on ``T``.

        The measured residual is padded by a rounding allowance so it stays
        an upper bound.
        """
        values = np.asarray(values, dtype=float)
        if start < 0 or start + values.size > T.dim:
            raise ValueError("support does not fit in the operator")
        r = T.apply(values, start) - energy * _placed(values, start, T.dim)
        nrm = float(np.linalg.norm(values))
        scale = (np.abs(T.diag).max() + 2 + abs(energy)) * nrm
        residual = float(np.linalg.norm(r)) * (1 + 1e-12) + 1e-14 * scale
        return cls(int(start), values, residual, nrm * (1 - 1e-14), float(energy))


def _placed(values, start, dim):
    x = np.zeros(dim)
    x[start:start + values.size] = values
    return x


def _half_kappa(word):
    form = _words.form_of(word)
    if form is None:
        raise ValueError(f"sub-word {_words.decode(_words.encode(word))!r} is not admissible")
    if not form.is_diagonal:
        raise ValueError("sub-word product is antidiagonal")
    if form.kappa < 1:
        raise ValueError(f"sub-word exponent {form.kappa} is below 1")
    return form


def build_quasimode(w1, w2, start=0, potential=None, verify=True) -> QuasiMode:
    """Quasi-eigenfunction at ``E = 0`` supported on ``w1 0 w2``.

    Values at unit boundaries come from the exact ``C``/``D`` action on axis
    vectors; only the two interior values of each ``abc`` block are computed
    in floating point, so errors never accumulate along the word.
    """
    f1, f2 = _half_kappa(w1), _half_kappa(w2)
    if verify:
        for w, f in ((w1, f1), (w2, f2)):
            M = _words.word_to_product(w, 0.0, potential)
            if relative_error(M, f.matrix()) > 1e-9:
                raise ValueError("floating product disagrees with the exact form")
    codes = np.concatenate([_words.encode(w1), [0], _words.encode(w2)]).astype(np.uint8)
    v = _words.potential_vector(potential)
    n = codes.size - 1
    psi = np.empty(n + 1)
    # state (psi_j, psi_{j-1}) = sign * e^x * e_axis
    sign, axis, x = 1, 0, -f1.kappa
    j = 0
    while j <= n:
        cur = sign * math.exp(x) if axis == 0 else 0.0
        prev = sign * math.exp(x) if axis == 1 else 0.0
        psi[j] = cur
        if codes[j] == 0:
            # C e1 = e2, C e2 = -e1
            if axis == 0:
                axis = 1
            else:
                axis, sign = 0, -sign
            j += 1
        else:
            p1 = v[codes[j]] * cur - prev
            p2 = v[codes[j + 1]] * p1 - cur
            psi[j + 1] = p1
            psi[j + 2] = p2
            x += 1 if axis == 0 else -1
            j += 3
    if axis != 1 or x != -f2.kappa:
        raise ValueError("construction did not close; halves are inconsistent")
    residual = math.hypot(math.exp(-f1.kappa), math.exp(-f2.kappa))
    return QuasiMode(int(start), psi, residual, 1.0, 0.0, f1.kappa, f2.kappa)


def build_quasimode_from_word(w_star, split, start=0, potential=None) -> QuasiMode:
    """Same as :func:`build_quasimode` with ``w1 = w_star[:split]``."""
    s = _words.decode(_words.encode(w_star))
    if s[split] != "0":
        raise ValueError("the split letter must be '0'")
    return build_quasimode(s[:split], s[split + 1:], start, potential)


@dataclass(frozen=True)
class TempleResult:
    count: int
    epsilon: float
    admitted: tuple
    rejected: tuple
    max_ratio: float


def temple_count(T: TridiagonalOperator, modes, E0, eps) -> TempleResult:
    """Number of modes admitted as ``(eps, E0)`` quasi-eigenfunctions.

    A mode needs ``residual / norm_lb + |energy - E0| <= eps``, a support
    inside the operator, and two empty sites between it and the previously
    admitted mode, so both ``<f_i, H f_j>`` and ``<H f_i, H f_j>`` vanish.
    ``T`` then has at least ``count`` eigenvalues in ``[E0 - eps, E0 + eps]``.
    """
    order = sorted(range(len(modes)), key=lambda i: modes[i].start)
    admitted, rejected = [], []
    last_end = -10
    worst = 0.0
    for i in order:
        md = modes[i]
        ratio = md.residual / md.norm_lb + abs(md.energy - E0)
        if md.start < 0 or md.end >= T.dim:
            rejected.append((i, "support outside operator"))
        elif ratio > eps:
            rejected.append((i, f"residual ratio {ratio:.3e} exceeds {eps:.3e}"))
        elif md.start - last_end < 3:
            rejected.append((i, "support too close to an admitted mode"))
        else:
            admitted.append(i)
            last_end = md.end
            worst = max(worst, ratio)
    return TempleResult(len(admitted), float(eps), tuple(admitted), tuple(rejected), worst)


@dataclass(frozen=True)
class BlockLayout:
    l: int
    m: int
    L: int = field(init=False)
    blocks: tuple = field(init=False, repr=False)
    inner: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.l < 1 or self.m < 1:
            raise ValueError("l and m must be positive")
        l, m = self.l, self.m
        blocks = tuple((2 * (j - 1) * l + 3 * (j - 1), 2 * j * l + 3 * j - 1) for j in range(1, m + 1))
        object.__setattr__(self, "L", m * (2 * l + 3))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "inner", tuple((a + 1, b - 1) for a, b in blocks))

    def inner_starts(self):
        return np.arange(self.m, dtype=np.int64) * (2 * self.l + 3) + 1


def good_blocks(word, layout: BlockLayout) -> np.ndarray:
    """Indices ``j`` (0-based) whose inner block is ``w1 0 w2`` with good halves."""
    codes = _words.encode(word)
    if codes.size < layout.L:
        raise ValueError(f"word of length {codes.size} is shorter than L = {layout.L}")
    l = layout.l
    t = block_threshold(l)
    s = layout.inner_starts()
    ok1, d1, k1, _ = _words.segment_forms(codes, s, l)
    ok2, d2, k2, _ = _words.segment_forms(codes, s + l + 1, l)
    mid = codes[s + l] == 0
    good = ok1 & d1 & (k1 >= t) & ok2 & d2 & (k2 >= t) & mid
    return np.flatnonzero(good)


def count_good_blocks(word, layout: BlockLayout) -> int:
    return int(good_blocks(word, layout).size)


def block_modes(word, layout: BlockLayout, potential=None, verify=False):
    """Quasi-modes placed on every good inner block."""
    codes = _words.encode(word)
    l = layout.l
    out = []
    for j in good_blocks(codes, layout):
        s = layout.inner[j][0]
        out.append(build_quasimode(codes[s:s + l], codes[s + l + 1:s + 2 * l + 1], s,
                                   potential, verify))
    return out


def epsilon_l(l):
    return math.sqrt(2) * math.exp(-K_l(l))


def p_Cl(l):
    """Probability that a stationary window of ``2l + 1`` symbols is a good inner block."""
    return prob_B_float(l, l) ** 2


@dataclass(frozen=True)
class ReplicaCheck:
    replica: int
    n_lm: int
    count: int
    temple: int
    inequality_ok: bool
    temple_ok: bool


@dataclass(frozen=True)
class GapRecord:
    l: int
    K_l: float
    epsilon: float
    L: int
    m: int
    replicas: int
    n_lm_mean: float
    count_mean: float
    gap_estimate: float
    p_Cl_hat: float
    lower_bound: float
    checks: tuple = field(default=(), repr=False)

    CSV_FIELDS = ("l", "K_l", "epsilon", "L", "m", "replicas", "n_lm_mean", "count_mean",
                  "gap_estimate", "p_Cl_hat", "lower_bound")

    def row(self):
        return {k: getattr(self, k) for k in self.CSV_FIELDS}

    @property
    def violations(self):
        return sum(not (c.inequality_ok and c.temple_ok) for c in self.checks)

    @property
    def p_Cl_empirical(self):
        return self.n_lm_mean / self.m


def gap_experiment(l, m, replicas, seed, threads=1, spec=None, temple=True) -> GapRecord:
    """Eigenvalues of ``H^(L)`` in ``[-eps_l, eps_l]`` against good-block counts.

    Each replica samples a stationary word on ``[0, L]`` and checks
    ``count >= n_lm`` and, with ``temple``, that the Temple count of the
    block modes equals ``n_lm`` and does not exceed the Sturm count.
    """
    layout = BlockLayout(l, m)
    if l < 27:
        raise ValueError("l must be >= 27")
    if layout.L > 10**7:
        raise ValueError(f"L = {layout.L} exceeds 10^7")
    eps = epsilon_l(l)

    def one(i, rng):
        codes = _words.sample_stationary(layout.L + 1, rng, spec)
        T = build_truncation(codes)
        n_lm = count_good_blocks(codes, layout)
        count = count_in(T, -eps, eps, closed=True).count
        if temple:
            tc = temple_count(T, block_modes(codes, layout), 0.0, eps).count
        else:
            tc = n_lm
        return ReplicaCheck(i, n_lm, count, tc, count >= n_lm, tc == n_lm and tc <= count)

    checks = map_replicas(one, spawn_generators(seed, replicas), threads)
    n_lm_mean = float(np.mean([c.n_lm for c in checks]))
    count_mean = float(np.mean([c.count for c in checks]))
    p = p_Cl(l)
    return GapRecord(int(l), K_l(l), eps, layout.L, int(m), int(replicas), n_lm_mean,
                     count_mean, count_mean / layout.L, p, p / (2 * l + 3), tuple(checks))


BLOCK_CONSTANT = 4 / 625


def block_constant_report(l_values=(300, 1200, 2700, 30_000, 300_000, 3_000_000)):
    """``P(C_l)`` next to the constant ``4/625`` and its half.

    Rows are ``(l, P(C_l), P(C_l) / (4/625), above 4/625, above 2/625)``.
    """
    rows = []
    for l in l_values:
        p = p_Cl(l)
        rows.append((int(l), p, p / BLOCK_CONSTANT, p > BLOCK_CONSTANT, p > BLOCK_CONSTANT / 2))
    return rows


def lower_bound_record(l):
    """``(l, r_l, P(C_l) / (2l + 3))``: the certified gap lower bound at scale ``l``."""
    return int(l), epsilon_l(l), p_Cl(l) / (2 * l + 3)


def write_gap_csv(records, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(GapRecord.CSV_FIELDS)
    for r in records:
        w.writerow([_fmt(v) for v in r.row().values()])


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)
