"""Lyapunov exponents of locally constant SL(2, R) cocycles.

Estimates follow a unit vector along the orbit and renormalize at every
step, so products of any length stay in range.  Each replica draws its own
random initial direction and its own path.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import words as _words
from ._rng import map_replicas, spawn_generators
from .sl2 import energy_pair, kifer_pair, rotation, transfer_matrix

DEFAULT_BURN_IN = 200


@dataclass(frozen=True)
class CocycleSpec:
    """Generators indexed by symbol over a Bernoulli or Markov base."""

    generators: np.ndarray
    probs: np.ndarray | None = None
    markov: _words.MarkovSpec | None = None
    energy: float | None = None
    label: str = ""
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        G = np.ascontiguousarray(self.generators, dtype=float)
        if G.ndim != 3 or G.shape[1:] != (2, 2):
            raise ValueError("generators must have shape (k, 2, 2)")
        dets = G[:, 0, 0] * G[:, 1, 1] - G[:, 0, 1] * G[:, 1, 0]
        if np.abs(dets - 1).max() > 1e-10:
            raise ValueError("generators must be unimodular")
        if (self.probs is None) == (self.markov is None):
            raise ValueError("give exactly one of probs (Bernoulli) or markov")
        object.__setattr__(self, "generators", G)
        if self.probs is not None:
            p = np.asarray(self.probs, dtype=float)
            if p.shape != (G.shape[0],) or (p < 0).any() or abs(p.sum() - 1) > 1e-12:
                raise ValueError("probs must be a probability vector, one entry per generator")
            object.__setattr__(self, "probs", p)
            cum = np.cumsum(p)
            cum[-1] = 1.0
            object.__setattr__(self, "_cum", cum)
        else:
            if self.markov.size != G.shape[0]:
                raise ValueError("Markov base and generators disagree on the alphabet size")
            object.__setattr__(self, "_cum", None)

    def sample(self, n, rng) -> np.ndarray:
        if self.markov is not None:
            return _words.sample_stationary(n, rng, self.markov)
        out = np.empty(n, dtype=np.uint8)
        _kernels.sample_iid(self._cum, rng.random(n), out)
        return out

    def spec_hash(self) -> str:
        payload = {
            "generators": [repr(float(x)) for x in self.generators.ravel()],
            "probs": None if self.probs is None else [repr(float(x)) for x in self.probs],
            "P": None if self.markov is None else [repr(float(x)) for x in self.markov.P.ravel()],
            "energy": None if self.energy is None else repr(float(self.energy)),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # constructors

    @classmethod
    def bernoulli(cls, generators, probs, energy=None, label="bernoulli"):
        return cls(np.asarray(generators, dtype=float), probs=probs, energy=energy, label=label)

    @classmethod
    def kifer(cls, p=0.5):
        """``(C, D)`` with ``C`` drawn with probability ``p``."""
        C, D = kifer_pair()
        return cls.bernoulli([C, D], [p, 1 - p], energy=0.0, label=f"kifer(p={p})")

    @classmethod
    def schrodinger(cls, energy, potential=None, spec=None):
        """Transfer matrices of the four-letter Markov model at energy ``E``."""
        v = _words.potential_vector(potential)
        G = np.stack([transfer_matrix(x, energy) for x in v])
        return cls(G, markov=spec or _words.default_spec(), energy=float(energy),
                   label="schrodinger")

    @classmethod
    def free(cls, energy):
        return cls.bernoulli([transfer_matrix(0.0, energy)], [1.0], energy=float(energy),
                             label="free")

    @classmethod
    def conjugate(cls, energy, probs=(0.5, 0.5)):
        """Bernoulli cocycle ``(C(E), D(E))`` conjugate to the return map."""
        C, D = energy_pair(energy)
        return cls.bernoulli([C, D], probs, energy=float(energy), label="conjugate")


@dataclass(frozen=True)
class LEEstimate:
    value: float
    n_steps: int
    replicas: int
    std_error: float
    per_replica: tuple = ()

    def record(self, spec: CocycleSpec | None = None):
        return {
            "spec_hash": spec.spec_hash() if spec is not None else None,
            "E": spec.energy if spec is not None else None,
            "n": self.n_steps,
            "replicas": self.replicas,
            "value": self.value,
            "std_error": self.std_error,
        }


def _summarize(values, n_steps):
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return LEEstimate(float(v.mean()), int(n_steps), int(v.size), se, tuple(v.tolist()))


def _random_direction(rng):
    t = rng.uniform(0, 2 * math.pi)
    return np.array([math.cos(t), math.sin(t)])


def le_estimate(spec: CocycleSpec, n_steps, replicas, seed, threads=1, burn_in=DEFAULT_BURN_IN):
    """Replica mean of ``(1/n) sum log |A(x_k) u_k|``."""
    if n_steps < 1000:
        raise ValueError("n_steps must be >= 1000")

    def one(_, rng):
        u = _random_direction(rng)
        sym = spec.sample(n_steps + burn_in, rng)
        return _kernels.vector_log_growth(spec.generators, sym, u, burn_in) / n_steps

    vals = map_replicas(one, spawn_generators(seed, replicas), threads)
    return _summarize(vals, n_steps)


def le_exact_kifer(n_steps, replicas, seed, p=0.5, threads=1):
    """``|kappa_n| / n`` from the exact integer walk of the Kifer product."""

    def one(_, rng):
        letters = (rng.random(n_steps) >= p).astype(np.uint8)
        _, _, kappa = _kernels.kifer_walk(letters)
        return abs(kappa) / n_steps

    vals = map_replicas(one, spawn_generators(seed, replicas), threads)
    return _summarize(vals, n_steps)


def kifer_kappa_samples(n, samples, seed, p=0.5):
    """Exact ``(sign, diagonal, kappa, n_D)`` of ``samples`` random Kifer words."""
    from .sl2 import classify_words_batch

    rng = spawn_generators(seed, 1)[0]
    letters = (rng.random((samples, n)) >= p).astype(np.int8)
    sign, diag, kappa = classify_words_batch(letters)
    return sign, diag, kappa, letters.sum(axis=1)


def kac_return_time(spec=None, subset=(0, 1)):
    """Mean first return time to a set of symbols, ``1 / q(subset)``."""
    spec = spec or _words.default_spec()
    return 1.0 / float(spec.q[list(subset)].sum())


@dataclass(frozen=True)
class InducedResult:
    L_induced: LEEstimate
    L_base: LEEstimate
    ratio: float
    ratio_stderr: float
    mean_return_time: float
    return_time_stderr: float


def induced_le(energy, n_steps, replicas, seed, threads=1, spec=None, potential=None,
               burn_in=DEFAULT_BURN_IN):
    """LE of the return map to ``{0, a}`` next to the base LE.

    The base and induced estimates use independent paths, so their errors
    combine in quadrature.
    """
    base = CocycleSpec.schrodinger(energy, potential, spec)
    G = base.generators

    def one(_, rng):
        u = _random_direction(rng)
        sym = base.sample(n_steps + burn_in, rng)
        l_base = _kernels.vector_log_growth(G, sym, u, burn_in) / n_steps
        u = _random_direction(rng)
        sym = base.sample(n_steps + 3 * burn_in, rng)
        total, returns, steps = _kernels.induced_log_growth(G, sym, u, burn_in)
        return l_base, total / returns, steps / returns

    rows = np.array(map_replicas(one, spawn_generators(seed, replicas), threads))
    lb = _summarize(rows[:, 0], n_steps)
    li = _summarize(rows[:, 1], n_steps)
    rt = _summarize(rows[:, 2], n_steps)
    ratio = li.value / lb.value if lb.value != 0 else math.nan
    if lb.value != 0:
        rel = math.hypot(li.std_error / li.value if li.value else 0.0, lb.std_error / lb.value)
        ratio_se = abs(ratio) * rel
    else:
        ratio_se = math.nan
    return InducedResult(li, lb, ratio, ratio_se, rt.value, rt.std_error)


def bernoulli_conjugate_le(energy, n_steps, replicas, seed, threads=1, probs=(0.5, 0.5),
                           burn_in=DEFAULT_BURN_IN):
    return le_estimate(CocycleSpec.conjugate(energy, probs), n_steps, replicas, seed,
                       threads, burn_in)


def norm_growth(spec: CocycleSpec, checkpoints, replicas, seed, threads=1):
    """Replica means of ``(1/n) log ||A^(n)||`` at each checkpoint ``n``."""
    cps = np.array(sorted(int(c) for c in checkpoints), dtype=np.int64)

    def one(_, rng):
        sym = spec.sample(int(cps[-1]), rng)
        return _kernels.matrix_log_norms(spec.generators, sym, cps) / cps

    rows = np.array(map_replicas(one, spawn_generators(seed, replicas), threads))
    return [(int(n), _summarize(rows[:, k], n)) for k, n in enumerate(cps)]


def _sl2_perturb(A, eps, rng):
    """A unimodular matrix at operator-norm distance about ``eps`` from ``A``."""
    X = rng.standard_normal((2, 2))
    B = A + eps * X / np.linalg.norm(X, 2)
    det = np.linalg.det(B)
    if det <= 0:
        raise ValueError("perturbation too large to stay in SL(2, R)")
    return B / math.sqrt(det)


@dataclass(frozen=True)
class LipschitzRow:
    epsilon: float
    trials: int
    max_ratio: float
    mean_ratio: float
    violations: int


@dataclass(frozen=True)
class LipschitzReport:
    thetas: tuple
    base_le: LEEstimate
    constant: float
    rows: list
    bounded: bool


def lipschitz_check(thetas=(1.0, math.sqrt(2)), eps_grid=(1e-1, 1e-2, 1e-3), trials=50,
                    seed=0, n_steps=5000, replicas=4, probs=None, threads=1):
    """Probe ``L(B) <= C ||A - B||`` around a cocycle of rotations.

    ``A`` is orthogonal, so the standard norm is invariant and ``C = 1``:
    ``L(B) <= log max ||B_i|| <= ||A - B||``.  The distance is the largest
    operator-norm distance over the generators, measured after the
    perturbation has been rescaled back to determinant one.
    """
    A = np.stack([rotation(t) for t in thetas])
    probs = np.full(len(thetas), 1 / len(thetas)) if probs is None else probs
    streams = spawn_generators(seed, 1 + len(eps_grid))
    base = le_estimate(CocycleSpec.bernoulli(A, probs), n_steps, replicas, streams[0], threads)
    constant = 1.0
    rows = []
    for eps, ss in zip(eps_grid, streams[1:]):
        rng = ss
        ratios = []
        violations = 0
        for _ in range(trials):
            B = np.stack([_sl2_perturb(a, eps, rng) for a in A])
            dist = max(np.linalg.norm(a - b, 2) for a, b in zip(A, B))
            est = le_estimate(CocycleSpec.bernoulli(B, probs), n_steps, replicas,
                              int(rng.integers(2**63)), threads)
            ratios.append(est.value / dist)
            if est.value > constant * dist + 3 * est.std_error:
                violations += 1
        r = np.array(ratios)
        rows.append(LipschitzRow(float(eps), trials, float(r.max()), float(r.mean()), violations))
    bounded = all(row.violations == 0 and row.max_ratio <= constant for row in rows)
    return LipschitzReport(tuple(float(t) for t in thetas), base, constant, rows, bounded)
