"""Geodesics through the base point of the Berger 3-sphere.

The closed-form curve is checked against the orbit exp(sX) o and the closing
relation between j, k and the fiber component alpha3 is turned into a list
of slopes whose geodesics return to their starting point.
"""

import numpy as np

from hopfberger.geodesics import (
    GeodesicParams, berger_geodesic_point, closed_geodesic_solutions, closure_residual,
    orbit_oracle,
)

tau = 0.3
params = GeodesicParams(0.6, 0.0, 0.8, tau)
s = np.linspace(0, 20, 2001)
print("closed form vs orbit:", np.abs(berger_geodesic_point(params, s) - orbit_oracle(params, s)).max())

print("\nshortest closed geodesics (slope, alpha3, period, closure residual):")
# different (j, k) can describe the same curve
distinct = {(round(a3, 12), round(period, 12)): (slope, a3, period)
            for slope, a3, period in closed_geodesic_solutions(tau, 4, 4)}
for slope, a3, period in sorted(distinct.values(), key=lambda r: (r[2], r[1]))[:8]:
    p = GeodesicParams(np.sqrt(1 - a3 ** 2), 0.0, a3, tau)
    print(f"  {slope:8.5f} {a3:+8.5f} {period:8.4f}  {closure_residual(p, period):.1e}")
