"""Certify every known totally geodesic subspace of one quaternionic sphere.

Split subspaces need D- and R-invariance (with a nabla^k R audit when D fails
but the subspace is still geodesic, as for great spheres of a fiber); the ones
that do not split must be alpha-isotropic and curvature invariant, which
forces tau < 1/2 and the isotropic slope.
"""

import sys

from hopfberger.catalog import catalog_entries
from hopfberger.curvature import CurvatureModel
from hopfberger.liealg import build_presentation
from hopfberger.subspace import subspace_slope, tg_certificate

tau = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
pres = build_presentation("H", 2, tau)
model = CurvatureModel(pres)
print(f"S^11 over H with tau = {tau}: {len(catalog_entries(pres))} catalog subspaces\n")
for rec, V in catalog_entries(pres):
    cert = tg_certificate(V, model)
    F = V.frame
    sec = model.sectional(F[:, 0], F[:, 1])
    sl = subspace_slope(V)
    sl = "mixed" if sl is None else f"{sl:.4g}"
    route = cert.diagnostics.get("route", "isotropy + R")
    print(f"{rec.tag:18} dim {rec.dimension:2}  {cert.verdict:20} sec(e1,e2)={sec:7.4f} "
          f"slope={sl:7}  via {route}")
