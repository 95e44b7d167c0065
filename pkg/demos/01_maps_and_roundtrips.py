"""Tour of the retraction/lifting maps on St(p, n).

Builds a random orthonormal frame, moves it around with both map families,
and checks the round-trip identities numerically.
"""
import numpy as np

from stiefelmean import (
    Dims,
    discrepancy,
    generate_center,
    generate_samples,
    orthographic_lifting,
    orthographic_retraction,
    orthonormality_defect,
    polar_lifting,
    polar_retraction,
    project_to_tangent,
    tangency_defect,
)

rng = np.random.default_rng(0)

p, n = 20, 4
x = generate_center(Dims(p, n), seed=1)
print(f"random point on St({p},{n}): orthonormality defect "
      f"{orthonormality_defect(x.X):.2e}")

# a tangent direction, obtained by projecting an arbitrary ambient matrix
v = project_to_tangent(x, rng.standard_normal((p, n)))
v = type(v)(x, 0.2 * v.V / np.linalg.norm(v.V))
print(f"tangent vector with |V| = {v.norm():.2f}, tangency defect "
      f"{tangency_defect(x.X, v.V):.2e}")

# both retractions land on the manifold and agree to high order at small V
q_polar = polar_retraction(x, v)
q_ortho = orthographic_retraction(x, v)
print(f"polar retraction defect {orthonormality_defect(q_polar.X):.2e}, "
      f"orthographic {orthonormality_defect(q_ortho.X):.2e}")
print(f"discrepancy between the two retracted points: "
      f"{discrepancy(q_polar, q_ortho):.2e}")

# each lifting inverts its own retraction
back_polar = polar_lifting(x, q_polar)
back_ortho = orthographic_lifting(x, q_ortho)
print(f"polar round trip |lift(retract(V)) - V| = "
      f"{np.linalg.norm(back_polar.V - v.V):.2e}")
print(f"orthographic round trip                 = "
      f"{np.linalg.norm(back_ortho.V - v.V):.2e}")

# liftings are local: a faraway argument pair is rejected
cloud = generate_samples(x, sigma=0.05, n_samples=3, seed=2)
for k, sample in enumerate(cloud.samples):
    w = orthographic_lifting(x, sample)
    print(f"sample {k}: delta(X, X_k) = {discrepancy(x, sample):.3f}, "
          f"lifted norm {w.norm():.3f}")
