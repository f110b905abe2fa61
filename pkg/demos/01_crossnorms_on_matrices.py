# Crossnorms on small matrices
#
# A tensor in X (x) Y is stored as an n x m matrix.  The injective norm is
# the largest value of f(F)g over unit dual functionals and the projective
# norm is the cheapest way to write F as a sum of rank-one pieces.  On
# l2 (x) l2 they are the spectral and nuclear norms.

# %%
import numpy as np

from crossnorm import LpSpace, Tensor, alpha_norm, entrywise, injective_norm, projective_norm, single_tensor
from crossnorm.oracle import grid_injective, svd_nuclear, svd_spectral

rng = np.random.default_rng(0)
X, Y = LpSpace(3, 2.0), LpSpace(3, 2.0)
F = Tensor(rng.standard_normal((3, 3)), X, Y)

inj, proj = injective_norm(F), projective_norm(F)
print("injective ", inj.value, inj.direction.value, " spectral", svd_spectral(F.entries))
print("projective", proj.value, proj.direction.value, " nuclear ", svd_nuclear(F.entries))

# %%
# Away from l2 the values are estimates.  The injective estimate is a
# certified lower bound (a witness pair attains it) and the projective one
# a certified upper bound (a decomposition costs it).

X, Y = LpSpace(3, 1.5), LpSpace(2, 3.0)
F = Tensor(rng.standard_normal((3, 2)), X, Y)
inj, proj = injective_norm(F), projective_norm(F)
f, g = inj.witness
print("injective ", inj.value, inj.direction.value, " witness value", abs(f @ F.entries @ g))
print("grid check", grid_injective(F, 400).value)
print("projective", proj.value, proj.direction.value, " bracket", (proj.lo, proj.hi))
print("decomposition cost", proj.witness.cost(X, Y), "terms", len(proj.witness.terms))

# %%
# A reasonable crossnorm sits between the two.  The entrywise p-norm on
# lp (x) lp is one example; a single tensor x (x) y has all three equal to
# ||x|| ||y||.

p = 3.0
X, Y = LpSpace(3, p), LpSpace(3, p)
F = Tensor(rng.standard_normal((3, 3)), X, Y)
alpha = entrywise(p)
print([round(v, 6) for v in (injective_norm(F).value, alpha_norm(F, alpha).value, projective_norm(F).value)])

x, y = rng.standard_normal(3), rng.standard_normal(3)
S = single_tensor(x, y, X, Y)
print([round(v, 6) for v in (injective_norm(S).value, alpha_norm(S, alpha).value, projective_norm(S).value)],
      round(X.norm(x) * Y.norm(y), 6))
