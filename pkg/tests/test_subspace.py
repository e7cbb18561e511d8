import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import model, pres, unit
from hopfberger.catalog import a2_vectors, a3_vectors, v_theta, v_theta_prime
from hopfberger.subspace import (
    NOT_TG, NOT_WELL_POSITIONED, WELL_POSITIONED, Subspace, alpha, alpha_coefficients,
    alpha_gram, alpha_matrix, is_D_invariant, is_isotropic, is_nablaR_invariant,
    is_R_invariant, is_well_positioned, isotropic_slope, phi, phi_invariant,
    shape_invariance_residual, sigma_hat_container, sigma_hat_through, sigma_hat_vectors, slope,
    subspace_json, subspace_slope, tg_certificate,
)


def test_slope_examples():
    p = pres("H", 1, 0.3)
    assert slope(p.unit(0), p) == math.inf
    assert slope(p.y(1), p) == 0
    for v in sigma_hat_vectors(p):
        assert abs(slope(v, p) - math.sqrt(0.3 / 0.4)) < 1e-14
    with pytest.raises(ValueError):
        slope(np.zeros(p.dim), p)


def test_alpha_coefficients():
    a1, a2 = alpha_coefficients(0.25)
    assert abs(a1 + 2 / math.sqrt(3)) < 1e-14 and abs(a2 - 1 / math.sqrt(3)) < 1e-14
    p = pres("C", 2, 0.25)
    assert alpha(p.unit(0), p.unit(0), p) < 0 < alpha(p.y(1), p.y(1), p)
    with pytest.raises(ValueError):
        alpha_matrix(pres("C", 1, 1.0))


def test_alpha_degeneracy_and_definiteness():
    assert np.abs(np.diag(alpha_matrix(pres("H", 1, 0.5)))).min() < 1e-12
    assert np.diag(alpha_matrix(pres("H", 1, 0.75))).min() > 0
    assert np.diag(alpha_matrix(pres("H", 1, 2.0))).min() > 0


@pytest.mark.parametrize("tau", [0.1, 0.25, 0.4])
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_isotropic_vectors_have_fixed_slope(tau, seed):
    p = pres("O", None, tau)
    rng = np.random.default_rng(seed)
    v = np.zeros(p.dim)
    v[p.vertical] = unit(rng, p.dim_p1) * isotropic_slope(tau)
    v[p.horizontal] = unit(rng, p.dim_p2)
    assert abs(alpha(v, v, p)) < 1e-12
    assert abs(slope(v, p) ** 2 - tau / (1 - 2 * tau)) < 1e-12


def test_isotropic_slope_domain():
    with pytest.raises(ValueError):
        isotropic_slope(0.5)


def test_split_and_sphere_frames():
    p = pres("H", 1, 0.3)
    V = Subspace.from_vectors([p.unit(0), p.y(1)], p)
    assert is_well_positioned(V) and not is_isotropic(V)
    S = Subspace.from_vectors(sigma_hat_vectors(p), p)
    assert is_isotropic(S) and not is_well_positioned(S)
    assert subspace_slope(S) == pytest.approx(isotropic_slope(0.3), abs=1e-12)
    assert subspace_slope(V) is None


def _random_subspace(rng, p):
    k = int(rng.integers(1, 5))
    if rng.random() < 0.5:
        kv = int(rng.integers(0, min(k, p.dim_p1) + 1))
        vecs = []
        for _ in range(kv):
            v = np.zeros(p.dim)
            v[p.vertical] = rng.standard_normal(p.dim_p1)
            vecs.append(v)
        for _ in range(k - kv):
            v = np.zeros(p.dim)
            v[p.horizontal] = rng.standard_normal(p.dim_p2)
            vecs.append(v)
        return Subspace.from_vectors(vecs, p)
    return Subspace.from_vectors([rng.standard_normal(p.dim) for _ in range(k)], p)


def test_well_positioned_iff_shape_invariant():
    p = pres("H", 1, 0.3)
    rng = np.random.default_rng(7)
    agree = both = 0
    for _ in range(500):
        V = _random_subspace(rng, p)
        wp = is_well_positioned(V)
        assert wp == (shape_invariance_residual(V) <= 1e-9)
        both += wp
    assert 0 < both < 500


def test_invariance_of_vertical_space():
    p, m = pres("O", None, 0.3), model("O", None, 0.3)
    V = Subspace(np.eye(p.dim)[:, p.vertical], p)
    assert is_R_invariant(V, model=m)[0] and is_D_invariant(V, model=m)[0]


def test_projective_plane_is_not_D_invariant():
    p, m = pres("H", 2, 0.2), model("H", 2, 0.2)
    V = Subspace.from_vectors(a2_vectors(p), p)
    assert is_R_invariant(V, model=m)[0]
    ok, res = is_D_invariant(V, model=m)
    assert not ok and res > 1e-3
    assert is_nablaR_invariant(V, 1, model=m)[0]
    assert is_nablaR_invariant(V, 2, model=m)[0]


def test_random_planes_are_not_invariant():
    p, m = pres("H", 1, 0.3), model("H", 1, 0.3)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        V = Subspace(rng.standard_normal((p.dim, 2)), p)
        ok, res = is_R_invariant(V, model=m)
        assert not ok and res > 1e-3


def test_certificates():
    p, m = pres("H", 1, 0.3), model("H", 1, 0.3)
    S = Subspace.from_vectors(sigma_hat_vectors(p), p)
    cert = tg_certificate(S, m)
    assert cert.verdict == NOT_WELL_POSITIONED and cert.witness is None
    assert m.sectional(S.frame[:, 0], S.frame[:, 1]) == pytest.approx(2.8, abs=1e-12)

    p2, m2 = pres("H", 2, 0.25), model("H", 2, 0.25)
    A3 = Subspace.from_vectors(a3_vectors(p2), p2)
    assert tg_certificate(A3, m2).verdict == NOT_WELL_POSITIONED
    F = A3.frame
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert abs(m2.sectional(F[:, i], F[:, j]) - 0.75) < 1e-12

    for eps in (1e-2, 0.3):
        V = Subspace.from_vectors([p.unit(0), p.y(1) + eps * p.jy(1, 1)], p)
        cert = tg_certificate(V, m)
        assert cert.verdict == NOT_TG and cert.witness["residual"] > 1e-9


def test_split_plane_needs_the_derivative_audit():
    p, m = pres("H", 1, 0.3), model("H", 1, 0.3)
    V = Subspace.from_vectors([p.unit(0), p.y(1)], p)
    cert = tg_certificate(V, m)
    assert is_R_invariant(V, model=m)[0]
    assert cert.verdict == NOT_TG and cert.witness["check"].startswith("nabla")
    fiber = Subspace.from_vectors([p.unit(0), p.unit(1)], p)
    assert tg_certificate(fiber, m).verdict == WELL_POSITIONED


def test_certificate_domain():
    p = pres("H", 1, 1.0)
    with pytest.raises(ValueError):
        tg_certificate(Subspace.from_vectors([p.unit(0), p.y(1)], p))
    p = pres("H", 1, 0.3)
    with pytest.raises(ValueError):
        tg_certificate(Subspace.from_vectors([p.unit(0)], p))


def test_above_one_half_only_split_subspaces_certify():
    p = pres("H", 1, 0.6)
    V = Subspace.from_vectors([p.unit(0) + p.y(1), p.unit(1) + p.jy(3, 1)], p)
    cert = tg_certificate(V)
    assert cert.verdict == NOT_TG and cert.witness["check"] == "well-positioned"


def test_noncompact_branch_is_marked():
    p = pres("H", 1, 1.5)
    V = Subspace.from_vectors([p.unit(0) + p.y(1), p.unit(1) + p.jy(3, 1)], p)
    assert tg_certificate(V).diagnostics["note"] == "non-compact branch"


@given(seed=st.integers(0, 2 ** 32 - 1))
def test_phi_is_alternating(seed):
    p = pres("O", None, 0.3)
    rng = np.random.default_rng(seed)
    S = sigma_hat_vectors(p)
    a, b, c = (sum(rng.standard_normal() * v for v in S) for _ in range(3))
    assert abs(phi(a, a, b, p)) < 1e-12
    assert abs(phi(a, b, a, p)) < 1e-12
    assert abs(phi(b, a, a, p)) < 1e-12
    assert abs(phi(a, b, c, p) + phi(b, a, c, p)) < 1e-12
    assert abs(phi(a, b, c, p) - phi(b, c, a, p)) < 1e-12


@pytest.mark.parametrize("theta", [0, 0.25, 0.5, 0.75, 1])
def test_phi_on_families(theta):
    p = pres("O", None, 0.3)
    a = math.pi * theta / 2
    assert abs(phi_invariant(v_theta(p, theta)) - math.sin(a)) < 1e-12
    assert abs(phi_invariant(v_theta_prime(p, theta)) - math.cos(a)) < 1e-12


def test_phi_invariant_is_frame_independent():
    p = pres("O", None, 0.2)
    V = v_theta(p, 0.3)
    rng = np.random.default_rng(1)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    W = Subspace(V.frame @ Q, p)
    assert abs(phi_invariant(W) - phi_invariant(V)) < 1e-12


def test_phi_errors():
    p = pres("O", None, 0.3)
    with pytest.raises(ValueError):
        phi_invariant(Subspace(np.eye(p.dim)[:, :3], p))
    with pytest.raises(ValueError):
        phi_invariant(Subspace.from_vectors(sigma_hat_vectors(p)[:2], p))
    with pytest.raises(ValueError):
        phi(p.y(1), p.y(1), p.y(1), pres("H", 1, 0.3))
    with pytest.raises(ValueError):
        phi(p.y(1), p.y(1), p.y(1), pres("O", None, 0.6))


def test_sphere_through_a_vector():
    p = pres("O", None, 0.3)
    rng = np.random.default_rng(2)
    y = unit(rng, p.dim_p2)
    yv = np.zeros(p.dim)
    yv[p.horizontal] = y
    S = sigma_hat_vectors(p, yv)
    v = sum(rng.standard_normal() * s for s in S)
    y2 = sigma_hat_through(v, p)
    assert min(np.abs(y2 - yv).max(), np.abs(y2 + yv).max()) < 1e-12
    C = sigma_hat_container(Subspace.from_vectors([v], p))
    assert np.abs(C.off(np.array(S))).max() < 1e-12


def test_subspace_json_roundtrip():
    p = pres("H", 1, 0.3)
    V = Subspace.from_vectors(sigma_hat_vectors(p), p)
    W = Subspace.from_json(json.loads(subspace_json(V)), p)
    assert np.array_equal(W.frame, V.frame)
    with pytest.raises(ValueError):
        Subspace.from_json(json.loads(subspace_json(V)), pres("H", 1, 0.4))
    assert np.abs(V.frame.T @ V.frame - np.eye(3)).max() < 1e-12
    assert np.allclose(alpha_gram(V), 0, atol=1e-12)
