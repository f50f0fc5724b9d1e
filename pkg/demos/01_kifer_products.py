"""
Products of the Kifer pair
==========================

Every word in C and D multiplies out to +-diag(e^k, e^-k) or to an
antidiagonal matrix of the same size, so a product of any length is three
integers.  This script walks through that bookkeeping, the Pascal-type table
counting exponents, and the probability that a long random word ends up
diagonal with a large exponent.
"""

# %%
import math

import numpy as np

from kifermarkov import walks
from kifermarkov.sl2 import classify_word, kifer_pair, relative_error, word_product

C, D = kifer_pair()
print("C =\n", C)
print("D =\n", np.round(D, 4))

# %% A short word, both ways
w = list("DDCDCDDD")
form = classify_word(w)
print(form)
print("relative error against the floating product:",
      relative_error(form.matrix(), word_product(w)))

# %% Long words stay exact; floating products overflow long before kappa does
rng = np.random.default_rng(1)
long_word = list(rng.choice(["C", "D"], 5000, p=[0.1, 0.9]))
print("5000 letters:", classify_word(long_word))

# %% How exponents spread: a(n, i) words of length n have exponent i
tab = walks.pascal_table(8)
for n in range(1, 9):
    print(f"n={n}:", tab.row(n))

# %% P(diagonal and kappa >= sqrt(n)/10)
for n in (10, 100, 1000, 10**5, 10**7):
    p = walks.event_probability_En_float(n)
    print(f"n={n:>8}: {p:.6f}")
full = 1 - walks.normal_cdf(0.1)
print(f"1 - F(0.1) = {full:.6f}, half of it = {full / 2:.6f}")
# Half the words are antidiagonal, so the limit is the half value.
