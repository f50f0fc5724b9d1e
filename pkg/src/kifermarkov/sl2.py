"""Algebra of the Kifer pair and of the Schrodinger transfer matrices.

Matrices are plain ``(2, 2)`` float arrays.  Products of the rotation ``C`` and
the hyperbolic diagonal ``D`` are tracked exactly by :class:`ProductForm`,
which stores only a sign, a class (diagonal or antidiagonal) and an integer
exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

E = math.e

DIAGONAL = "diagonal"
ANTIDIAGONAL = "antidiagonal"


def kifer_pair():
    """Return ``(C, D)`` with ``C`` the rotation by pi/2 and ``D = diag(e, 1/e)``."""
    C = np.array([[0.0, -1.0], [1.0, 0.0]])
    D = np.array([[E, 0.0], [0.0, 1.0 / E]])
    return C, D


def transfer_matrix(v, energy=0.0):
    """Schrodinger transfer matrix ``[[v - E, -1], [1, 0]]``."""
    return np.array([[v - energy, -1.0], [1.0, 0.0]])


def energy_polynomials(energy):
    """The polynomials ``p(E)`` and ``q(E)`` entering the closed form of ``D(E)``."""
    p = energy**2 + (2 * E + 1 / E) * energy + E**2
    q = energy + E + 1 / E
    return p, q


def energy_pair(energy):
    """Return ``(C(E), D(E))``, the return-map generators at energy ``E``.

    ``D(E)`` is assembled from its closed form; :func:`energy_pair_product`
    gives the same matrix as a product of three transfer matrices.
    """
    p, q = energy_polynomials(energy)
    C = transfer_matrix(0.0, energy)
    D = np.array([[E - energy * p, -energy * q],
                  [energy * q, 1 / E + energy]])
    return C, D


def energy_pair_product(energy):
    """``D(E)`` as ``A(c) A(b) A(a)`` with potential ``-e, -1/e, -e``."""
    va, vb, vc = -E, -1 / E, -E
    return (transfer_matrix(vc, energy) @ transfer_matrix(vb, energy)
            @ transfer_matrix(va, energy))


def letter_matrix(letter):
    C, D = kifer_pair()
    if letter == "C":
        return C
    if letter == "D":
        return D
    raise ValueError(f"letter must be 'C' or 'D', got {letter!r}")


def word_product(letters: Iterable[str]):
    """Floating-point product ``A_{n-1} ... A_1 A_0`` (first letter acts first)."""
    M = np.eye(2)
    for letter in letters:
        M = letter_matrix(letter) @ M
    return M


@dataclass(frozen=True)
class ProductForm:
    """Exact state of a product of ``C`` and ``D`` factors.

    Realizes ``sign * diag(e^k, e^-k)`` when diagonal and
    ``sign * [[0, -e^k], [e^-k, 0]]`` when antidiagonal, ``k = kappa``.
    ``kappa`` is an unbounded Python int; :meth:`matrix` overflows for
    ``|kappa|`` beyond roughly 700.
    """

    sign: int = 1
    klass: str = DIAGONAL
    kappa: int = 0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.klass not in (DIAGONAL, ANTIDIAGONAL):
            raise ValueError(f"unknown class {self.klass!r}")

    @property
    def is_diagonal(self):
        return self.klass == DIAGONAL

    def matrix(self):
        big, small = math.exp(self.kappa), math.exp(-self.kappa)
        if self.is_diagonal:
            M = np.array([[big, 0.0], [0.0, small]])
        else:
            M = np.array([[0.0, -big], [small, 0.0]])
        return self.sign * M


IDENTITY = ProductForm()


def step_form(state: ProductForm, letter: str) -> ProductForm:
    """Multiply ``state`` on the right by one letter.

    A ``D`` raises the exponent of a diagonal state and lowers that of an
    antidiagonal one; a ``C`` swaps the class and keeps the exponent.
    """
    if letter == "D":
        step = 1 if state.is_diagonal else -1
        return ProductForm(state.sign, state.klass, state.kappa + step)
    if letter == "C":
        if state.is_diagonal:
            return ProductForm(state.sign, ANTIDIAGONAL, state.kappa)
        # [[0, -e^k], [e^-k, 0]] C = -diag(e^k, e^-k)
        return ProductForm(-state.sign, DIAGONAL, state.kappa)
    raise ValueError(f"letter must be 'C' or 'D', got {letter!r}")


def classify_word(letters) -> ProductForm:
    """Exact form of ``A_{n-1} ... A_0`` for the letters ``A_0, ..., A_{n-1}``.

    Right multiplication is what :func:`step_form` implements, so the fold
    runs over the letters from last to first.
    """
    letters = list(letters)
    if not letters:
        raise ValueError("empty word")
    state = IDENTITY
    for letter in reversed(letters):
        state = step_form(state, letter)
    return state


def classify_words_batch(letters):
    """Vectorized :func:`classify_word` for an ``(n_words, length)`` 0/1 array.

    ``1`` encodes ``D`` and ``0`` encodes ``C``.  Returns ``(sign, diagonal,
    kappa)`` arrays.
    """
    letters = np.asarray(letters, dtype=np.int8)
    n_words, length = letters.shape
    sign = np.ones(n_words, dtype=np.int64)
    diag = np.ones(n_words, dtype=bool)
    kappa = np.zeros(n_words, dtype=np.int64)
    for j in range(length - 1, -1, -1):
        is_d = letters[:, j] == 1
        kappa += np.where(is_d, np.where(diag, 1, -1), 0)
        is_c = ~is_d
        sign = np.where(is_c & ~diag, -sign, sign)
        diag = np.where(is_c, ~diag, diag)
    return sign, diag, kappa


def relative_error(A, B):
    """Max entrywise difference scaled by the largest entry magnitude."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    scale = max(np.abs(A).max(), np.abs(B).max(), 1e-300)
    return float(np.abs(A - B).max() / scale)


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])
