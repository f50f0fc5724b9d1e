"""Finite truncations of the Schrodinger operator and eigenvalue counting.

A truncation on ``{0, ..., n}`` is the symmetric tridiagonal matrix with the
potential on the diagonal and ``-1`` off the diagonal (Dirichlet cut).
Counting uses the LDL^T pivot-sign (Sturm) recursion, O(dim) per shift.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import _kernels
from . import words as _words
from ._rng import map_replicas, spawn_generators


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "diag", d)

    @property
    def dim(self):
        return self.diag.shape[0]

    def gershgorin(self):
        return float(self.diag.min()) - 2.0, float(self.diag.max()) + 2.0

    def dense(self):
        n = self.dim
        return np.diag(self.diag) - np.eye(n, k=1) - np.eye(n, k=-1)

    def eigenvalues(self):
        if self.dim == 1:
            return self.diag.copy()
        return linalg.eigvalsh_tridiagonal(self.diag, -np.ones(self.dim - 1), lapack_driver="sterf")

    def apply(self, psi, start=0):
        """``H psi`` for ``psi`` placed at ``start``; returns the full vector."""
        x = np.zeros(self.dim)
        x[start:start + len(psi)] = psi
        y = self.diag * x
        y[:-1] -= x[1:]
        y[1:] -= x[:-1]
        return y

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["index", "diag"])
            for i, v in enumerate(self.diag):
                w.writerow([i, repr(float(v))])
        finally:
            if own:
                fh.close()


def build_truncation(word, n=None, potential=None) -> TridiagonalOperator:
    """Truncation of ``H_w`` to ``{0, ..., n}`` (``dim = n + 1``).

    ``n`` defaults to ``len(word) - 1``.
    """
    codes = _words.encode(word)
    if n is None:
        n = codes.size - 1
    if codes.size < n + 1:
        raise ValueError(f"word of length {codes.size} is too short for range [0, {n}]")
    v = _words.potential_vector(potential)
    return TridiagonalOperator(v[codes[: n + 1]])


def free_operator(dim) -> TridiagonalOperator:
    return TridiagonalOperator(np.zeros(dim))


@dataclass(frozen=True)
class SpectralCount:
    lower: float | None
    upper: float
    count: int
    dim: int


def count_below(T: TridiagonalOperator, x) -> SpectralCount:
    """Number of eigenvalues strictly below ``x``."""
    return SpectralCount(None, float(x), int(_kernels.sturm_count(T.diag, float(x), True)), T.dim)


def count_at_most(T: TridiagonalOperator, x) -> int:
    """Number of eigenvalues ``<= x``."""
    return int(_kernels.sturm_count(T.diag, float(x), False))


def count_in(T: TridiagonalOperator, lo, hi, closed=False) -> SpectralCount:
    """Eigenvalues in ``(lo, hi]``, or in ``[lo, hi]`` when ``closed``."""
    if lo > hi:
        raise ValueError("need lo <= hi")
    upper = count_at_most(T, hi)
    lower = count_below(T, lo).count if closed else count_at_most(T, lo)
    return SpectralCount(float(lo), float(hi), upper - lower, T.dim)


@dataclass(frozen=True)
class IDSEstimate:
    energy: float
    value: float
    stderr: float
    dim: int
    replicas: int
    per_replica: tuple


def ids_estimate(energy, dim, replicas, seed, spec=None, potential=None, threads=1,
                 energies=None):
    """Replica mean of ``#{eigenvalues < E} / dim`` on stationary words.

    With ``energies`` given, every replica is counted at all of them (same
    operator) and a list of estimates is returned.
    """
    if dim < 100:
        raise ValueError("dim must be >= 100")
    grid = [energy] if energies is None else list(energies)

    def one(_, rng):
        T = build_truncation(_words.sample_stationary(dim, rng, spec), potential=potential)
        return [count_below(T, e).count / dim for e in grid]

    vals = np.array(map_replicas(one, spawn_generators(seed, replicas), threads))
    out = []
    for k, e in enumerate(grid):
        col = vals[:, k]
        se = float(col.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
        out.append(IDSEstimate(float(e), float(col.mean()), se, dim, replicas, tuple(col.tolist())))
    return out[0] if energies is None else out
