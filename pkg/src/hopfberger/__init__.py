"""Curvature and totally geodesic subspaces of Hopf-Berger spheres."""
