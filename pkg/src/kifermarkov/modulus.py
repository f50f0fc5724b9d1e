"""Moduli of continuity, the Thouless transform, and the breakdown fit.

Moduli are evaluated through ``u = log(1/r)`` so that scales far below the
smallest double (``r = e^{-10^4}``, say) remain usable.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import words as _words
from ._rng import map_replicas, spawn_generators
from .lyapunov import CocycleSpec, le_estimate
from .quasimodes import lower_bound_record
from .spectra import build_truncation

HOLDER = "holder"
WEAK_HOLDER = "weak_holder"
GAMMA_BETA = "gamma_beta_log_holder"
LOG_HOLDER = "log_holder"

LOGLOG_U_MIN = math.e  # r < e^{-e}


@dataclass(frozen=True)
class ModulusFamily:
    kind: str
    C: float = 1.0
    alpha: float = 1.0
    theta: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in (HOLDER, WEAK_HOLDER, GAMMA_BETA, LOG_HOLDER):
            raise ValueError(f"unknown family {self.kind!r}")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kind in (HOLDER, WEAK_HOLDER) and not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.kind == WEAK_HOLDER and not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        if self.kind == GAMMA_BETA and (self.gamma < 1 or self.beta < 1):
            raise ValueError("gamma and beta must be >= 1")

    @classmethod
    def holder(cls, alpha, C=1.0):
        return cls(HOLDER, C, alpha=alpha)

    @classmethod
    def weak_holder(cls, alpha, theta, C=1.0):
        return cls(WEAK_HOLDER, C, alpha=alpha, theta=theta)

    @classmethod
    def gamma_beta(cls, gamma, beta, C=1.0):
        return cls(GAMMA_BETA, C, gamma=gamma, beta=beta)

    @classmethod
    def log_holder(cls, C=1.0):
        return cls(LOG_HOLDER, C)

    def with_C(self, C):
        return ModulusFamily(self.kind, C, self.alpha, self.theta, self.gamma, self.beta)

    @property
    def u_min(self):
        return LOGLOG_U_MIN if self.kind == GAMMA_BETA else 0.0

    @property
    def r0(self):
        return math.exp(-self.u_min)

    def in_domain(self, u):
        return u > self.u_min

    def log_omega(self, u):
        """``log omega(r)`` for ``u = log(1/r)``."""
        if not self.in_domain(u):
            raise ValueError(f"r = exp(-{u}) is outside the domain r < {self.r0}")
        lc = math.log(self.C)
        if self.kind == HOLDER:
            return lc - self.alpha * u
        if self.kind == WEAK_HOLDER:
            return lc - self.alpha * u**self.theta
        if self.kind == GAMMA_BETA:
            return lc - self.beta * math.log(u) ** self.gamma
        return lc - math.log(u)

    def label(self):
        if self.kind == HOLDER:
            return f"holder(alpha={self.alpha})"
        if self.kind == WEAK_HOLDER:
            return f"weak_holder(alpha={self.alpha},theta={self.theta})"
        if self.kind == GAMMA_BETA:
            return f"gamma_beta(gamma={self.gamma},beta={self.beta})"
        return "log_holder"


def modulus_eval(fam: ModulusFamily, r):
    """``omega(r)``; raises for ``r`` outside ``(0, r0)``."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    return math.exp(fam.log_omega(-math.log(r)))


# ------------------------------------------------------------------ Thouless

def thouless_le(E, eigenvalues, detail=False):
    """``(1/dim) sum log |E - E_j|`` over a finite spectrum sample.

    Eigenvalues equal to ``E`` are dropped; with ``detail`` the number dropped
    is returned too (each costs at most ``log(spread) / dim`` in absolute
    value when the singularity is integrated against a smoothed measure).
    """
    ev = np.asarray(eigenvalues, dtype=float)
    diff = np.abs(E - ev)
    hit = diff == 0
    val = float(np.log(diff[~hit]).sum() / ev.size)
    if detail:
        return val, int(hit.sum())
    return val


# -------------------------------------------------------------- gap series

@dataclass(frozen=True)
class GapPoint:
    l: int
    r: float
    gap: float
    u: float  # log(1/r)


@dataclass(frozen=True)
class GapSeries:
    points: tuple
    is_lower_bound: bool
    source: str = ""

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: p.l))
        if any(p.gap <= 0 for p in pts):
            raise ValueError("gaps must be positive")
        if any(b.u <= a.u for a, b in zip(pts, pts[1:])):
            raise ValueError("r must decrease strictly along l")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_triples(cls, triples, is_lower_bound, source=""):
        """Build from ``(l, r, gap)`` triples."""
        return cls(tuple(GapPoint(int(l), float(r), float(g), -math.log(r)) for l, r, g in triples),
                   is_lower_bound, source)

    @classmethod
    def from_K(cls, K_values, gap_fn, is_lower_bound=False, source="synthetic"):
        """Points at ``l = 300 K^2``, where ``r = sqrt(2) e^{-K}`` exactly."""
        pts = []
        for K in K_values:
            l = 300 * int(K) ** 2
            u = K - 0.5 * math.log(2)
            pts.append(GapPoint(l, math.exp(-u), float(gap_fn(l, u)), u))
        return cls(tuple(pts), is_lower_bound, source)


DEFAULT_EXTENSION_K = (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100, 150, 200)


def lower_bound_series(records=(), extension_K=DEFAULT_EXTENSION_K):
    """Certified gap lower bounds ``P(C_l) / (2l + 3)``.

    Measured :class:`GapRecord` scales are included (their lower bound is the
    quantity the experiment certifies), then the series is extended to
    ``l = 300 K^2`` for ``K`` in ``extension_K``.
    """
    ls = {int(r.l) for r in records} | {300 * int(K) ** 2 for K in extension_K}
    return GapSeries.from_triples([lower_bound_record(l) for l in sorted(ls)], True,
                                  "lower_bound")


def measured_series(records):
    """The raw measured ``count / L`` values (not certified bounds)."""
    return GapSeries.from_triples([(r.l, r.epsilon, r.gap_estimate) for r in records], False,
                                  "measured")


@dataclass(frozen=True)
class FitRow:
    l: int
    r: float
    gap: float
    required_C: float | None
    in_domain: bool


@dataclass(frozen=True)
class FitReport:
    family: ModulusFamily
    rows: tuple
    growth: float
    factor: float
    verdict: str

    CSV_FIELDS = ("l", "r", "gap", "family", "gamma", "beta", "required_C", "verdict")

    def table(self):
        rows = [[row.l, row.r, row.gap, self.family.label(), float(self.family.gamma),
                 float(self.family.beta), row.required_C,
                 self.verdict if row.in_domain else "out_of_domain"] for row in self.rows]
        return list(self.CSV_FIELDS), rows

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        cols, rows = self.table()
        w.writerow(cols)
        for r in rows:
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in r])


def fit_breakdown(series: GapSeries, fam: ModulusFamily, factor=5.0) -> FitReport:
    """Constant needed at each scale for ``gap_l <= C omega(r_l)``.

    Verdicts: ``breakdown`` when the required constant grows by more than
    ``factor`` from the smallest to the largest in-domain scale; otherwise
    ``bounded`` for an exact series and ``inconclusive`` for a lower-bound
    series (bounded requirements from lower bounds prove nothing).
    """
    shape = fam.with_C(1.0)
    rows = []
    for p in series.points:
        if shape.in_domain(p.u):
            # exp of a difference of logs; stays finite even where omega underflows
            logc = math.log(p.gap) - shape.log_omega(p.u)
            rows.append(FitRow(p.l, p.r, p.gap, math.exp(min(logc, 700.0)), True))
        else:
            rows.append(FitRow(p.l, p.r, p.gap, None, False))
    used = [r for r in rows if r.in_domain]
    if len(used) < 3:
        raise ValueError(f"need at least 3 in-domain records, have {len(used)}")
    growth = used[-1].required_C / used[0].required_C
    if growth > factor:
        verdict = "breakdown"
    else:
        verdict = "inconclusive" if series.is_lower_bound else "bounded"
    return FitReport(fam, tuple(rows), float(growth), float(factor), verdict)


# --------------------------------------------------- Thouless vs cocycle LE

FREE_POTENTIAL = {ch: 0.0 for ch in _words.ALPHABET}


@dataclass(frozen=True)
class ConsistencyRow:
    E: float
    thouless: float
    thouless_se: float
    le: float
    le_se: float
    discrepancy: float


def ids_vs_le_consistency(E_grid, dim, replicas, seed, potential=None, n_steps=None,
                          threads=1, margin=0.5):
    """Thouless transform of truncation spectra against the cocycle LE."""
    v = _words.potential_vector(potential)
    lo, hi = v.min() - 2, v.max() + 2
    n_steps = n_steps or 10 * dim
    ss = spawn_generators(seed, 2)
    rows = []
    for E in E_grid:
        if lo - margin < E < hi + margin:
            raise ValueError(f"E = {E} is within {margin} of the spectrum hull [{lo}, {hi}]")

    def spectra(_, rng):
        T = build_truncation(_words.sample_stationary(dim, rng), potential=potential)
        ev = T.eigenvalues()
        return [thouless_le(E, ev) for E in E_grid]

    th = np.array(map_replicas(spectra, spawn_generators(ss[0], replicas), threads))
    le_seeds = spawn_generators(ss[1], len(E_grid))
    for k, E in enumerate(E_grid):
        col = th[:, k]
        th_se = float(col.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
        est = le_estimate(CocycleSpec.schrodinger(E, potential), n_steps, replicas,
                          le_seeds[k], threads)
        rows.append(ConsistencyRow(float(E), float(col.mean()), th_se, est.value, est.std_error,
                                   abs(float(col.mean()) - est.value)))
    return rows
