# Operator tensors and induced norms
#
# L = sum_j A_j (x) B_j acts on matrices by F -> sum_j A_j F B_j^T.  Giving
# the domain and codomain a crossnorm each turns L into an operator with an
# induced norm ||L||_[beta, gamma].

# %%
import numpy as np

from crossnorm import (
    HILBERTIAN,
    INJECTIVE,
    LpSpace,
    InducedNormSpec,
    OperatorTensor,
    check_question4,
    check_theorem_41,
    check_uniform_identity,
    induced_crossnorm,
)
from crossnorm.oracle import kron_spectral, svd_spectral

rng = np.random.default_rng(1)
X = LpSpace(3, 2.0)
A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))

# A uniform crossnorm satisfies ||A (x) B|| = ||A|| ||B||.
rec = check_uniform_identity(A, B, HILBERTIAN, X, X)
print(rec.verdict.value, rec.side("induced").value, svd_spectral(A) * svd_spectral(B))

# %%
# The Frobenius-induced norm of a sum of terms is the spectral norm of the
# Kronecker matrix sum_j B_j kron A_j.  Its operator-injective and
# operator-projective neighbours bracket it.

L = OperatorTensor([(rng.standard_normal((3, 3)), rng.standard_normal((3, 3))) for _ in range(3)], X, X)
print("kron oracle", kron_spectral(L).value)
rec = check_theorem_41(L, HILBERTIAN)
for label, est in rec.sides:
    print(f"{label:24s} {est.value:.6f} {est.direction.value}")
print(rec.verdict.value)

# %%
# Between induced norms themselves the ordering can fail.  The trace map
# F -> tr(F) E_11 has injective-induced norm n but Frobenius-induced norm
# sqrt(n), and both numbers are certified.

n = 3
E = np.eye(n)
trace = OperatorTensor([(np.outer(E[0], E[i]), np.outer(E[0], E[i])) for i in range(n)], X, X)
rec = check_question4(trace, HILBERTIAN)
for label, est in rec.sides:
    print(f"{label:24s} {est.value:.6f} {est.direction.value}")
print(rec.verdict.value, "(exploratory record, not counted as a failure)")
print(induced_crossnorm(trace, InducedNormSpec.same(INJECTIVE)).value)
