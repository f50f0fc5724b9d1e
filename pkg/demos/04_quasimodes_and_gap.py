"""
Eigenvalues near zero from quasi-modes
======================================

A block w1 0 w2 whose halves multiply to diagonal matrices with exponent at
least k carries a vector with residual about e^-k.  Separate copies certify as
many eigenvalues of the truncated operator in [-eps, eps].
"""

# %%
import numpy as np

from kifermarkov import quasimodes as qm
from kifermarkov.spectra import build_truncation, count_in

# %% One mode by hand
w1, w2 = "abc" * 4, "abc0abc0abcabc"
mode = qm.build_quasimode(w1, w2, start=2)
T = build_truncation("00" + w1 + "0" + w2 + "00")
print("exponents", mode.k1, mode.k2, "certified residual", mode.residual)
print("recomputed", np.linalg.norm(T.apply(mode.values, mode.start)))
print(np.round(mode.values, 3))

# %% Temple: well separated modes each give one eigenvalue
word = ("0" + w1 + "0" + w2 + "0") * 6
T = build_truncation(word)
span = len(w1) + len(w2) + 3
modes = [mode.shifted(1 + j * span) for j in range(6)]
for eps in (0.1, 0.2):
    # the residual is about 0.137, so only the wider window admits the modes
    print(f"eps={eps}: Temple count", qm.temple_count(T, modes, 0.0, eps).count,
          "Sturm count", count_in(T, -eps, eps, closed=True).count)

# %% The random experiment at l = 300
rec = qm.gap_experiment(300, 2000, 4, seed=7)
print(f"L = {rec.L}, eps = {rec.epsilon:.4f}")
for c in rec.checks:
    print(f"  replica {c.replica}: good blocks {c.n_lm}, eigenvalues {c.count}")
print(f"gap estimate {rec.gap_estimate:.4f}, certified lower bound {rec.lower_bound:.3e}")
print(f"good-block frequency {rec.p_Cl_empirical:.5f} vs P(C_l) = {rec.p_Cl_hat:.5f}")
