# Equivalence constants between crossnorms
#
# In finite dimensions all crossnorms are equivalent.  The best constant
# sup ||F||_a / ||F||_b is the induced norm of the identity from b to a,
# and the optimizer returns the matrix that attains it.

# %%
import numpy as np

from crossnorm import HILBERTIAN, INJECTIVE, PROJECTIVE, LpSpace, equivalence_ratio, equivalence_ratio_inf, gamma_constant
from crossnorm.oracle import svd_nuclear, svd_spectral

X = LpSpace(2, 2.0)
sup = equivalence_ratio(PROJECTIVE, HILBERTIAN, X, X)
inf = equivalence_ratio_inf(INJECTIVE, HILBERTIAN, X, X)
print("nuclear / frobenius  sup", sup.value, "vs", np.sqrt(2))
print("spectral / frobenius inf", inf.value, "vs", 1 / np.sqrt(2))
print("witness", np.round(sup.witness, 4).tolist())

# %%
# Projective over injective on l2^n (x) l2^n is n, attained by the identity.

for n in (2, 3, 4):
    Xn = LpSpace(n, 2.0)
    g = gamma_constant(Xn, Xn)
    W = g.witness
    print(n, round(g.value, 6), g.direction.value, round(svd_nuclear(W) / svd_spectral(W), 6))

# %%
# The same questions can be asked from the shell.  Reports are seeded and
# reproducible:
#
#     python -m crossnorm --suite gamma --dims 2x2,3x3,4x4
#     python -m crossnorm --suite all --seed 42 --out report.json
