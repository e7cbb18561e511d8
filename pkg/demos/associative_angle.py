"""The 3-form phi tells apart 3-spheres that share slope and curvature.

V_theta and V'_theta inside the maximal sphere of the octonionic 15-sphere
are both round of curvature 4 - 4 tau, yet |phi| traces sin and cos of
pi theta / 2; they are congruent only where the curves cross.
"""

import numpy as np

from hopfberger.catalog import v_theta, v_theta_prime
from hopfberger.curvature import CurvatureModel
from hopfberger.liealg import build_presentation
from hopfberger.subspace import phi_invariant

pres = build_presentation("O", None, 0.2)
model = CurvatureModel(pres)
print(" theta   |phi(V)|  |phi(V')|   sec(V)")
for theta in np.linspace(0, 1, 11):
    V, W = v_theta(pres, theta), v_theta_prime(pres, theta)
    sec = model.sectional(V.frame[:, 0], V.frame[:, 2])
    print(f"{theta:6.2f}  {phi_invariant(V):9.6f}  {phi_invariant(W):9.6f}  {sec:7.4f}")
