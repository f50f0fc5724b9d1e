"""
Words of the four-letter chain
==============================

The chain on {0, a, b, c} always reads a, b, c in a row and otherwise tosses a
fair coin after 0 and after c.  Words that start and end on unit boundaries
(admissible words) are exactly the C/D words with C -> 0 and D -> abc.
"""

# %%
from fractions import Fraction

import numpy as np

from kifermarkov import walks, words
from kifermarkov._rng import generator

spec = words.default_spec()
print("column-stochastic P:\n", spec.P)
print("stationary q:", spec.q)

# %% A sample path
x = words.sample_stationary(60, generator(0))
print(words.decode(x))

# %% Counting words: admissible a(n) and allowable b(n)
seq = walks.narayana_counts(20)
print("a:", seq.a_seq[:21])
print("b:", seq.b_seq[1:21])
print("b(n) = a(n+4):", all(seq.b(n) == seq.a(n + 4) for n in range(1, 21)))

# %% Growth rate
lam = walks.pisot_root()
ratio, _ = walks.pisot_ratio(100)
print(f"lambda = {lam:.15f}, lambda^-4 = {lam**-4:.10f}, a(100)/b(100) = {ratio:.10f}")

# %% Probability that a stationary window is admissible
for n in (3, 6, 9, 12, 30):
    p = walks.admissible_probability(n)
    print(n, p, float(p))
# It starts on {0, a} and ends on {0, c}: both halves of the alphabet, so 1/4.

# %% Cylinder check by simulation
W = words.sample_many(200_000, 6, generator(1))
hits = (W == words.encode("abcabc")).all(axis=1).mean()
print("P[abcabc] exact", words.exact_cylinder_probability("abcabc"), "sampled", hits)
