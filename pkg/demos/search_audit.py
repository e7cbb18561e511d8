"""Random-restart hunt for curvature-invariant isotropic planes.

At tau = 1/3 the quaternionic 7-sphere carries exactly two kinds of non-split
totally geodesic surfaces: planes inside the maximal sphere (curvature 8/3)
and projective planes of curvature 2/3.  The search should find nothing else.
"""

from hopfberger.liealg import build_presentation
from hopfberger.search import SearchConfig, search_planes

pres = build_presentation("H", 1, 1 / 3)
result = search_planes(pres, SearchConfig(restarts=200, seed=42, isotropy_weight=1.0))
print(result.summary())
for h in result.hits[:3] + result.hits[-3:]:
    print(f"  restart {h.restart:3}: sec={h.sectional:.10f} slope={h.slope:.6f} "
          f"-> {h.matched_family} ({h.verdict})")
