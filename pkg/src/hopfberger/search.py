"""Random-restart search for curvature-invariant 2-planes.

A plane spanned by the orthonormal frame (u, v) is R-invariant iff R(u,v)v and
R(v,u)u lie in it, so the residual vector

    r = [N R(u,v)v,  N R(v,u)u,  sqrt(w) (alpha(u,u), alpha(v,v), sqrt2 alpha(u,v))]

with N = I - UU^T vanishes exactly on R-invariant (and, for w > 0,
alpha-isotropic) planes.  Every block is invariant under rotations of the
frame inside the plane, so f = |r|^2 is a function on the Grassmannian.  It
is minimised by Levenberg-Marquardt steps in the horizontal tangent space
followed by a QR retraction.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .catalog import catalog_entries
from .curvature import CurvatureModel
from .subspace import (
    NOT_WELL_POSITIONED, Subspace, alpha_matrix, is_well_positioned, phi,
    sigma_hat_container, subspace_slope, tg_certificate,
)

UNCLASSIFIED = "UNCLASSIFIED"
ROUND = "RoundSphere"


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 100
    seed: int = 0
    objective_tol: float = 1e-18
    classify_tol: float = 1e-6
    isotropy_weight: float = 0.0
    max_iterations: int = 300

    def __post_init__(self):
        if self.restarts < 0 or self.max_iterations < 1:
            raise ValueError("restarts must be >= 0 and max_iterations >= 1")
        if self.isotropy_weight < 0:
            raise ValueError("isotropy weight must be non-negative")


@dataclass
class SearchHit:
    plane: Subspace
    residual: float
    slope: float | None
    sectional: float
    matched_family: str
    restart: int
    verdict: str
    phi: float | None = None

    def sort_key(self):
        slope = math.inf if self.slope is None else self.slope
        return (self.sectional, slope, -1.0 if self.phi is None else self.phi, self.residual)

    def to_json(self):
        return {
            "restart": self.restart,
            "residual": self.residual,
            "slope": "inf" if self.slope == math.inf else self.slope,
            "sectional": self.sectional,
            "phi": self.phi,
            "matched_family": self.matched_family,
            "verdict": self.verdict,
            "frame": [[float(x) for x in col] for col in self.plane.frame.T],
        }


@dataclass
class SearchResult:
    hits: list
    rejected: list = field(default_factory=list)
    converged: int = 0
    restarts: int = 0
    model: CurvatureModel | None = None

    def histogram(self):
        return dict(sorted(Counter(h.matched_family for h in self.hits).items()))

    def summary(self):
        return {
            "restarts": self.restarts,
            "converged": self.converged,
            "distinct_hits": len(self.hits),
            "rejected_not_tg": len(self.rejected),
            "families": self.histogram(),
            "unclassified": sum(h.matched_family == UNCLASSIFIED for h in self.hits),
        }


class PlaneObjective:
    """Residuals, objective and Jacobian on frames of 2-planes."""

    def __init__(self, model, isotropy_weight=0.0):
        self.model = model
        self.T = model.R_tensor
        self.w = float(isotropy_weight)
        self.A = alpha_matrix(model.pres) if self.w > 0 else None

    def residuals(self, U):
        u, v = U[:, 0], U[:, 1]
        N = np.eye(len(u)) - U @ U.T
        g1 = np.einsum("a,b,c,abco->o", u, v, v, self.T)
        g2 = np.einsum("a,b,c,abco->o", v, u, u, self.T)
        r = [N @ g1, N @ g2]
        if self.w > 0:
            sw = np.sqrt(self.w)
            A = self.A
            r.append(sw * np.array([u @ A @ u, v @ A @ v, np.sqrt(2) * (u @ A @ v)]))
        return np.concatenate(r)

    def jacobian(self, U):
        """d r / d[u; v] as an (m, 2d) matrix."""
        u, v = U[:, 0], U[:, 1]
        T = self.T
        d = len(u)
        N = np.eye(d) - U @ U.T
        g1 = np.einsum("a,b,c,abco->o", u, v, v, T)
        g2 = np.einsum("a,b,c,abco->o", v, u, u, T)
        dg1_du = np.einsum("b,c,abco->oa", v, v, T)
        dg1_dv = np.einsum("a,c,abco->ob", u, v, T) + np.einsum("a,b,abco->oc", u, v, T)
        dg2_dv = np.einsum("b,c,abco->oa", u, u, T)
        dg2_du = np.einsum("a,c,abco->ob", v, u, T) + np.einsum("a,b,abco->oc", v, u, T)
        eye = np.eye(d)

        def proj_term(g, x):
            # derivative of -(U U^T) g with respect to the column x
            return -((x @ g) * eye + np.outer(x, g))

        rows = [
            np.hstack([N @ dg1_du + proj_term(g1, u), N @ dg1_dv + proj_term(g1, v)]),
            np.hstack([N @ dg2_du + proj_term(g2, u), N @ dg2_dv + proj_term(g2, v)]),
        ]
        if self.w > 0:
            sw = np.sqrt(self.w)
            A = self.A
            z = np.zeros(d)
            rows.append(sw * np.array([
                np.r_[2 * A @ u, z],
                np.r_[z, 2 * A @ v],
                np.sqrt(2) * np.r_[A @ v, A @ u],
            ]))
        return np.vstack(rows)

    def value(self, U):
        r = self.residuals(U)
        return float(r @ r)

    def gradient(self, U):
        """Euclidean gradient of f with respect to the frame entries (d, 2)."""
        g = 2 * self.jacobian(U).T @ self.residuals(U)
        return np.column_stack([g[: U.shape[0]], g[U.shape[0]:]])


def _check_frame(U):
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[1] != 2:
        raise ValueError("a 2-plane frame must have shape (d, 2)")
    s = np.linalg.svd(U, compute_uv=False)
    if s[-1] < 1e-8 * max(1.0, s[0]):
        raise ValueError("degenerate frame")
    return U


def objective(U, model, isotropy_weight=0.0):
    """(f, gradient) at the frame U."""
    U = _check_frame(U)
    obj = PlaneObjective(model, isotropy_weight)
    return obj.value(U), obj.gradient(U)


def finite_difference_gradient(U, model, isotropy_weight=0.0, step=1e-6):
    U = _check_frame(U)
    obj = PlaneObjective(model, isotropy_weight)
    G = np.zeros_like(U)
    for idx in np.ndindex(*U.shape):
        E = np.zeros_like(U)
        E[idx] = step
        G[idx] = (obj.value(U + E) - obj.value(U - E)) / (2 * step)
    return G


def _retract(U):
    q, r = np.linalg.qr(U)
    return q * np.sign(np.diag(r))


def minimize_plane(obj, U, cfg):
    """Levenberg-Marquardt on the Grassmannian of 2-planes."""
    d = U.shape[0]
    r = obj.residuals(U)
    f = float(r @ r)
    mu = None
    # keep polishing below the acceptance threshold: near degenerate minima
    # (alpha is quadratic at tau = 1/2) f only decreases linearly
    target = cfg.objective_tol * 1e-6
    for _ in range(cfg.max_iterations):
        if f <= target:
            break
        q, _ = np.linalg.qr(U, mode="complete")
        Qp = q[:, 2:]
        J = obj.jacobian(U)
        Jz = np.hstack([J[:, :d] @ Qp, J[:, d:] @ Qp])
        H = Jz.T @ Jz
        g = Jz.T @ r
        if mu is None:
            mu = 1e-3 * max(np.diag(H).max(), 1e-12)
        improved = False
        for _ in range(30):
            z = np.linalg.solve(H + mu * np.eye(len(g)), -g)
            k = Qp.shape[1]
            step = np.column_stack([Qp @ z[:k], Qp @ z[k:]])
            Un = _retract(U + step)
            rn = obj.residuals(Un)
            fn = float(rn @ rn)
            if fn < f:
                U, r, f = Un, rn, fn
                mu = max(mu / 3, 1e-15)
                improved = True
                break
            mu *= 4
        if not improved:
            break
    return U, f


def largest_principal_angle_sin(U1, U2):
    return float(np.linalg.norm(U2 - U1 @ (U1.T @ U2), 2))


def _classify(V, sec, model, cfg, anchors):
    tol = cfg.classify_tol
    wp = is_well_positioned(V, tol)
    sl = subspace_slope(V, tol)
    for rec in anchors:
        if rec.well_positioned != wp or rec.curvature is None:
            continue
        if abs(sec - rec.curvature) > tol:
            continue
        if rec.slope is not None:
            if sl is None:
                continue
            if math.isinf(rec.slope) != math.isinf(sl):
                continue
            if not math.isinf(sl) and abs(sl - rec.slope) > tol:
                continue
        return rec.tag, sl
    return UNCLASSIFIED, sl


def search_planes(pres, cfg=SearchConfig(), model=None):
    model = CurvatureModel(pres) if model is None else model
    obj = PlaneObjective(model, cfg.isotropy_weight)
    anchors = [rec for rec, V in catalog_entries(pres) if rec.dimension == 2]
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    found = []
    rejected = []
    converged = 0
    for idx, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        U0 = _retract(rng.standard_normal((pres.dim, 2)))
        U, f = minimize_plane(obj, U0, cfg)
        if f > cfg.objective_tol:
            continue
        converged += 1
        if any(largest_principal_angle_sin(h.plane.frame, U) < 1e-4 for h in found + rejected):
            continue
        V = Subspace(U, pres, orthonormalize=False)
        sec = float(model.sectional(U[:, 0], U[:, 1]))
        tag, sl = _classify(V, sec, model, cfg, anchors)
        if pres.tau == 1:
            # every plane of the round sphere is totally geodesic
            found.append(SearchHit(V, f, sl, sec, tag, idx, ROUND))
            continue
        cert = tg_certificate(V, model, tol=10 * cfg.classify_tol)
        hit = SearchHit(V, f, sl, sec, tag, idx, cert.verdict)
        (found if cert.totally_geodesic else rejected).append(hit)

    found.sort(key=SearchHit.sort_key)
    rejected.sort(key=SearchHit.sort_key)
    return SearchResult(found, rejected, converged, cfg.restarts, model)


def refine_phi(hits, samples_per_hit=11, seed=0, model=None):
    """Extend each non-split plane of the octonionic sphere to 3-planes inside
    its maximal sphere and record |phi|.

    The completions interpolate between a direction killing phi(e1, e2, .)
    and the one maximising it.  Returns (phi values, worst certificate verdicts).
    """
    rng = np.random.default_rng(seed)
    if model is None and hits:
        model = CurvatureModel(hits[0].plane.pres)
    values = []
    verdicts = []
    for h in hits:
        V = h.plane
        pres = V.pres
        if pres.family != "O" or h.verdict != NOT_WELL_POSITIONED:
            continue
        S = sigma_hat_container(V)
        if np.linalg.norm(S.off(V.frame.T), axis=-1).max() > 1e-8:
            continue
        # orthonormal complement of the plane inside the sphere
        W = S.frame - V.frame @ (V.frame.T @ S.frame)
        u, s, _ = np.linalg.svd(W, full_matrices=False)
        W = u[:, s > 1e-8]
        e1, e2 = V.frame.T
        g = np.array([phi(e1, e2, w, pres) for w in W.T])
        cmax = W @ (g / np.linalg.norm(g))
        z = rng.standard_normal(W.shape[1])
        z -= (z @ g) / (g @ g) * g
        cmin = W @ (z / np.linalg.norm(z))
        for theta in np.linspace(0, 1, samples_per_hit):
            a = np.pi * theta / 2
            c = np.sin(a) * cmax + np.cos(a) * cmin
            V3 = Subspace(np.column_stack([e1, e2, c]), pres)
            values.append(abs(float(phi(*V3.frame.T, pres))))
            verdicts.append(tg_certificate(V3, model, audit_order=0).verdict)
    return values, verdicts


def hits_jsonl(result):
    lines = [json.dumps(h.to_json()) for h in result.hits]
    lines.append(json.dumps({"summary": result.summary()}))
    return "\n".join(lines) + "\n"
