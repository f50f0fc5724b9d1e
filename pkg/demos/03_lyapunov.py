"""
Lyapunov exponents near the Kifer example
=========================================

The Bernoulli (1/2, 1/2) cocycle on (C, D) has zero exponent although D
alone grows like e^n.  The Schrodinger cocycle of the four-letter model is
the same object at E = 0, and it picks up a positive exponent as soon as E
moves away from zero.
"""

# %%
import math

import numpy as np

from kifermarkov import lyapunov as ly

# %% Kifer: the exact walk and the floating estimate agree on zero
exact = ly.le_exact_kifer(10**6, 8, seed=1)
est = ly.le_estimate(ly.CocycleSpec.kifer(), 10**6, 8, seed=2)
print(f"|kappa_n|/n = {exact.value:.2e}, floating estimate = {est.value:.2e} +- {est.std_error:.1e}")

# %% The model cocycle across energies
for E in (-3.0, -1.0, -0.2, 0.0, 0.2, 0.5, 1.0, 2.0, 3.0):
    r = ly.le_estimate(ly.CocycleSpec.schrodinger(E), 2 * 10**5, 4, seed=3)
    print(f"E={E:+.1f}: L = {r.value:.4f} +- {r.std_error:.1e}")

# %% Inducing on {0, a}
print("mean return time (Kac):", ly.kac_return_time())
res = ly.induced_le(0.5, 5 * 10**5, 8, seed=4)
conj = ly.bernoulli_conjugate_le(0.5, 5 * 10**5, 8, seed=5)
print(f"simulated return time {res.mean_return_time:.4f}")
print(f"induced {res.L_induced.value:.4f}, Bernoulli (C(E), D(E)) {conj.value:.4f}, "
      f"base x return time {res.L_base.value * res.mean_return_time:.4f}")

# %% Near rotations the exponent is Lipschitz with constant one
rep = ly.lipschitz_check(trials=20, seed=6)
for row in rep.rows:
    print(f"eps={row.epsilon:g}: max L(B)/||A-B|| = {row.max_ratio:.3f}")
