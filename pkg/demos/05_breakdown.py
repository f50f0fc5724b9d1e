"""
How regular can the density of states be?
==========================================

The eigenvalue counts give N(eps) - N(-eps) >= P(C_l) / (2l + 3) with
eps = sqrt(2) exp(-sqrt(l/3)/10).  Asking a modulus omega to dominate this for
every l pins down which moduli are ruled out.
"""

# %%
from kifermarkov import modulus as md
from kifermarkov.spectra import free_operator

series = md.lower_bound_series()
for p in series.points[::3]:
    print(f"l={p.l:>9}  log(1/r)={p.u:8.2f}  lower bound {p.gap:.3e}")

# %%
for fam in (md.ModulusFamily.holder(0.5), md.ModulusFamily.weak_holder(0.5, 0.5),
            md.ModulusFamily.gamma_beta(1, 2.5), md.ModulusFamily.gamma_beta(1, 2),
            md.ModulusFamily.log_holder()):
    rep = md.fit_breakdown(series, fam)
    print(f"{fam.label():40s} growth {rep.growth:10.3g}  {rep.verdict}")
# Bounded requirements coming from a lower bound are reported as inconclusive.

# %% Thouless: the exponent is the log-potential of the density of states
ev = free_operator(4000).eigenvalues()
print("free, E=3:", md.thouless_le(3.0, ev))
rows = md.ids_vs_le_consistency([5.0], 2000, 4, seed=1)
print(f"model, E=5: Thouless {rows[0].thouless:.5f}, cocycle {rows[0].le:.5f}")
