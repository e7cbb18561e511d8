import json
import math

import numpy as np
import pytest

from conftest import model, pres
from hopfberger.catalog import catalog_entries
from hopfberger.search import (
    UNCLASSIFIED, SearchConfig, finite_difference_gradient, hits_jsonl,
    largest_principal_angle_sin, objective, refine_phi, search_planes,
)
from hopfberger.subspace import NOT_WELL_POSITIONED, WELL_POSITIONED, tg_certificate


@pytest.mark.parametrize("family,n,tau,w", [("C", 2, 0.3, 0.0), ("H", 1, 0.3, 1.0),
                                            ("O", None, 0.25, 0.5)])
def test_gradient_matches_finite_differences(family, n, tau, w):
    m = model(family, n, tau)
    rng = np.random.default_rng(0)
    for _ in range(10):
        U, _ = np.linalg.qr(rng.standard_normal((m.dim, 2)))
        _, g = objective(U, m, w)
        fd = finite_difference_gradient(U, m, w)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_objective_on_catalog_and_random_planes():
    p, m = pres("H", 1, 0.3), model("H", 1, 0.3)
    for rec, V in catalog_entries(p):
        if rec.dimension == 2:
            f, _ = objective(V.frame, m, 1.0 if not rec.well_positioned else 0.0)
            assert f <= 1e-20
    for seed in range(100):
        U, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((p.dim, 2)))
        assert objective(U, m)[0] > 1e-6


def test_objective_rejects_bad_frames():
    m = model("C", 1, 0.5)
    with pytest.raises(ValueError):
        objective(np.zeros((m.dim, 2)), m)
    with pytest.raises(ValueError):
        objective(np.ones((m.dim, 3)), m)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(restarts=-1)
    with pytest.raises(ValueError):
        SearchConfig(isotropy_weight=-0.1)


def test_search_is_reproducible_and_sound():
    p = pres("H", 1, 1 / 3)
    cfg = SearchConfig(restarts=30, seed=7, isotropy_weight=1.0)
    a, b = search_planes(p, cfg), search_planes(p, cfg)
    assert hits_jsonl(a) == hits_jsonl(b)
    assert a.hits
    m = model("H", 1, 1 / 3)
    for h in a.hits:
        assert h.residual <= cfg.objective_tol
        assert h.matched_family != UNCLASSIFIED
        assert tg_certificate(h.plane, m, tol=1e-5).verdict == NOT_WELL_POSITIONED
        assert min(abs(h.sectional - 8 / 3), abs(h.sectional - 2 / 3)) < 1e-6
    keys = [h.sort_key() for h in a.hits]
    assert keys == sorted(keys)
    for i, h in enumerate(a.hits):
        for k in a.hits[i + 1:]:
            assert largest_principal_angle_sin(h.plane.frame, k.plane.frame) >= 1e-4


def test_search_without_isotropy_splits_verdicts():
    p = pres("C", 2, 0.3)
    res = search_planes(p, SearchConfig(restarts=20, seed=1))
    assert res.converged > 0
    assert all(h.matched_family == "WP_real_sphere" for h in res.hits)
    assert all(h.verdict == WELL_POSITIONED for h in res.hits)
    # the rejected planes are curvature invariant but fail the derivative audit
    assert all(h.verdict == "NotTG" for h in res.rejected)


def test_search_at_one_half_finds_only_vertical_planes():
    p = pres("H", 1, 0.5)
    res = search_planes(p, SearchConfig(restarts=30, seed=3, isotropy_weight=1.0))
    assert res.hits
    for h in res.hits:
        assert h.verdict == WELL_POSITIONED and h.matched_family == "WP_inverse_sphere"
        assert h.slope == math.inf


def test_empty_search_and_jsonl():
    res = search_planes(pres("C", 1, 0.3), SearchConfig(restarts=0))
    assert res.hits == [] and res.summary()["distinct_hits"] == 0
    lines = hits_jsonl(res).splitlines()
    assert json.loads(lines[-1])["summary"]["restarts"] == 0


def test_phi_refinement_spans_unit_interval():
    p = pres("O", None, 0.25)
    res = search_planes(p, SearchConfig(restarts=6, seed=0, isotropy_weight=1.0))
    values, verdicts = refine_phi(res.hits, 11, model=res.model)
    assert values and min(values) <= 0.05 and max(values) >= 0.95
    assert all(0 <= v <= 1 + 1e-8 for v in values)
    assert set(verdicts) == {NOT_WELL_POSITIONED}
