"""The four-letter Markov subshift and its words.

Words are ASCII strings over ``0abc`` at the API boundary and ``uint8`` code
arrays (``0, a, b, c -> 0, 1, 2, 3``) internally.

The transition matrix is **column-stochastic**: ``P[i, j]`` is the
probability of moving *to* ``i`` *from* ``j``, so columns sum to one and the
stationary vector satisfies ``P @ q = q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction

import numpy as np

from . import _kernels
from .sl2 import ProductForm, classify_word, transfer_matrix, DIAGONAL, ANTIDIAGONAL

ALPHABET = "0abc"


class Symbol(IntEnum):
    Z = 0
    A = 1
    B = 2
    C3 = 3


# allowed successors of each symbol (edges of the transition graph)
SUCCESSORS = {0: (0, 1), 1: (2,), 2: (3,), 3: (0, 1)}

POTENTIAL = {"0": 0.0, "a": -math.e, "b": -1 / math.e, "c": -math.e}


def potential_vector(potential=None):
    potential = POTENTIAL if potential is None else potential
    return np.array([potential[ch] for ch in ALPHABET], dtype=float)


def encode(word) -> np.ndarray:
    """ASCII word (or code array) to a ``uint8`` code array."""
    if isinstance(word, np.ndarray):
        return word.astype(np.uint8, copy=False)
    try:
        return np.array([ALPHABET.index(ch) for ch in word], dtype=np.uint8)
    except ValueError:
        raise ValueError(f"word {word!r} has letters outside {ALPHABET!r}") from None


def decode(codes) -> str:
    return "".join(ALPHABET[int(x)] for x in codes)


@dataclass(frozen=True)
class MarkovSpec:
    P: np.ndarray
    q: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False, compare=False)
    _q_cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        q = np.array(self.q, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or q.shape != (P.shape[0],):
            raise ValueError("P must be square and q a matching vector")
        if (P < 0).any() or not np.allclose(P.sum(axis=0), 1.0, atol=1e-12, rtol=0):
            raise ValueError("P must be column-stochastic")
        if (q < 0).any() or abs(q.sum() - 1.0) > 1e-12:
            raise ValueError("q must be a probability vector")
        if not np.allclose(P @ q, q, atol=1e-12, rtol=0):
            raise ValueError("q is not P-stationary")
        P.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "q", q)
        cum = np.cumsum(P, axis=0)
        cum[-1, :] = 1.0
        q_cum = np.cumsum(q)
        q_cum[-1] = 1.0
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_q_cum", q_cum)

    @property
    def size(self):
        return self.P.shape[0]

    def is_primitive(self, max_power=None):
        s = self.size
        max_power = max_power or (s - 1) ** 2 + 1
        M = np.eye(s)
        for _ in range(max_power):
            M = self.P @ M
            if (M > 0).all():
                return True
        return False

    def cylinder_probability(self, word) -> float:
        """Stationary probability of the cylinder ``[w_0 ... w_{n-1}]``."""
        codes = encode(word)
        if codes.size == 0:
            return 1.0
        p = self.q[codes[0]]
        for prev, nxt in zip(codes[:-1], codes[1:]):
            p *= self.P[nxt, prev]
        return float(p)


def default_spec() -> MarkovSpec:
    P = np.array([[0.5, 0.0, 0.0, 0.5],
                  [0.5, 0.0, 0.0, 0.5],
                  [0.0, 1.0, 0.0, 0.0],
                  [0.0, 0.0, 1.0, 0.0]])
    return MarkovSpec(P, np.full(4, 0.25))


def exact_cylinder_probability(word) -> Fraction:
    """Cylinder probability for the default chain in exact arithmetic."""
    codes = encode(word)
    if codes.size == 0:
        return Fraction(1)
    p = Fraction(1, 4)
    for prev, nxt in zip(codes[:-1], codes[1:]):
        if nxt not in SUCCESSORS[int(prev)]:
            return Fraction(0)
        if len(SUCCESSORS[int(prev)]) == 2:
            p /= 2
    return p


def is_allowable(word) -> bool:
    codes = encode(word)
    return all(int(b) in SUCCESSORS[int(a)] for a, b in zip(codes[:-1], codes[1:]))


def is_admissible(word) -> bool:
    """Concatenation of ``0`` letters and complete ``abc`` blocks."""
    codes = encode(word)
    j, n = 0, codes.size
    while j < n:
        if codes[j] == 0:
            j += 1
        elif codes[j] == 1 and j + 2 < n and codes[j + 1] == 2 and codes[j + 2] == 3:
            j += 3
        else:
            return False
    return True


ENUMERATION_CAPS = {"allowable": 30, "admissible": 60}


def enumerate_words(n, kind="allowable"):
    """All allowable (graph paths) or admissible words of length ``n``."""
    if kind not in ENUMERATION_CAPS:
        raise ValueError(f"kind must be one of {sorted(ENUMERATION_CAPS)}")
    if n > ENUMERATION_CAPS[kind]:
        raise ValueError(f"n={n} exceeds the {kind} enumeration cap {ENUMERATION_CAPS[kind]}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if kind == "admissible":
        return _admissible(n)
    if n == 0:
        return [""]
    out = []
    stack = [(ch,) for ch in (3, 2, 1, 0)]
    while stack:
        path = stack.pop()
        if len(path) == n:
            out.append("".join(ALPHABET[x] for x in path))
            continue
        for nxt in reversed(SUCCESSORS[path[-1]]):
            stack.append(path + (nxt,))
    return out


def _admissible(n):
    table = [[""]]
    for k in range(1, n + 1):
        words = [w + "0" for w in table[k - 1]]
        if k >= 3:
            words += [w + "abc" for w in table[k - 3]]
        table.append(words)
    return sorted(table[n])


def sample_stationary(n, rng, spec: MarkovSpec | None = None) -> np.ndarray:
    """A stationary path of length ``n`` as a code array."""
    spec = spec or default_spec()
    out = np.empty(n, dtype=np.uint8)
    if n == 0:
        return out
    u = rng.random(n)
    _kernels.sample_chain(spec._cum, spec._q_cum, u, out)
    return out


def sample_many(n_words, n, rng, spec: MarkovSpec | None = None) -> np.ndarray:
    """``(n_words, n)`` array of independent stationary paths."""
    spec = spec or default_spec()
    out = np.empty((n_words, n), dtype=np.uint8)
    for r in range(n_words):
        _kernels.sample_chain(spec._cum, spec._q_cum, rng.random(n), out[r])
    return out


def to_letters(word):
    """{C, D} letters of an admissible word: ``0 -> C``, ``abc -> D``."""
    s = decode(encode(word)) if not isinstance(word, str) else word
    if not is_admissible(s):
        raise ValueError(f"word {s!r} is not admissible")
    return list(s.replace("abc", "D").replace("0", "C"))


def word_to_product(word, energy=0.0, potential=None):
    """``M_w = T(w_{n-1}) ... T(w_0)`` at energy ``E``."""
    v = potential_vector(potential)
    M = np.eye(2)
    for x in encode(word):
        M = transfer_matrix(v[x], energy) @ M
    return M


def word_to_form(word) -> ProductForm:
    """Exact :class:`ProductForm` of an admissible word at ``E = 0``."""
    letters = to_letters(word)
    if not letters:
        return ProductForm()
    return classify_word(letters)


def segment_forms(codes, starts, length):
    """Batch form of ``codes[s:s+length]`` for every ``s`` in ``starts``.

    Returns ``(admissible, diagonal, kappa, sign)`` arrays.
    """
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    k = starts.shape[0]
    ok = np.empty(k, dtype=np.bool_)
    diag = np.empty(k, dtype=np.bool_)
    kappa = np.empty(k, dtype=np.int64)
    sign = np.empty(k, dtype=np.int64)
    _kernels.segment_forms(encode(codes), starts, int(length), ok, diag, kappa, sign)
    return ok, diag, kappa, sign


def form_of(codes) -> ProductForm | None:
    """Form of a whole code array, ``None`` when it is not admissible."""
    codes = encode(codes)
    ok, diag, kappa, sign = segment_forms(codes, [0], codes.size)
    if not ok[0]:
        return None
    return ProductForm(int(sign[0]), DIAGONAL if diag[0] else ANTIDIAGONAL, int(kappa[0]))
