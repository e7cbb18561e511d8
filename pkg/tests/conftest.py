from functools import lru_cache

import numpy as np
from hypothesis import settings

from hopfberger.curvature import CurvatureModel
from hopfberger.liealg import build_presentation

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@lru_cache(maxsize=None)
def pres(family, n=None, tau=1.0):
    return build_presentation(family, n, tau)


@lru_cache(maxsize=None)
def model(family, n=None, tau=1.0):
    return CurvatureModel(pres(family, n, tau))


def unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def horizontal(rng, p):
    v = np.zeros(p.dim)
    v[p.horizontal] = rng.standard_normal(p.dim_p2)
    return v / np.linalg.norm(v)


PRESENTATIONS = [("C", 1), ("C", 2), ("H", 1), ("H", 2), ("O", None)]
