"""Linear subspaces of p: splitting, the alpha form, invariance and certificates.

The alpha form is the second fundamental form of the geodesic-sphere picture
paired with the outer normal, expressed in tau-metric units.  With the
principal curvatures (beta1, beta2) of the shape operator,

    alpha(v, w) = -beta1 <P1 v, P1 w> - beta2 <P2 v, P2 w>,

which is positive definite exactly when tau > 1/2 (compact branch).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .curvature import CurvatureModel, restrict_tensor
from .geodesics import shape_eigs
from .liealg import apply_J

WELL_POSITIONED = "WellPositionedTG"
NOT_WELL_POSITIONED = "NotWellPositionedTG"
NOT_TG = "NotTG"


class Subspace:
    """Orthonormal frame (columns) of a subspace of p."""

    def __init__(self, frame, pres, orthonormalize=True):
        F = np.asarray(frame, dtype=float)
        if F.ndim == 1:
            F = F[:, None]
        if F.shape[0] != pres.dim:
            raise ValueError(f"frame has {F.shape[0]} rows, expected {pres.dim}")
        if orthonormalize:
            q, r = np.linalg.qr(F)
            if np.any(np.abs(np.diag(r)) < 1e-12 * max(1.0, np.abs(r).max())):
                raise ValueError("frame vectors are linearly dependent")
            # keep the orientation of the input vectors
            F = q * np.sign(np.diag(r))
        elif np.abs(F.T @ F - np.eye(F.shape[1])).max() > 1e-12:
            raise ValueError("frame is not orthonormal")
        self.frame = F
        self.pres = pres

    @classmethod
    def from_vectors(cls, vectors, pres):
        return cls(np.column_stack([np.asarray(v, dtype=float) for v in vectors]), pres)

    @property
    def dim(self):
        return self.frame.shape[1]

    @cached_property
    def projector(self):
        return self.frame @ self.frame.T

    @cached_property
    def p1_part(self):
        P = self.frame.copy()
        P[self.pres.horizontal] = 0.0
        return P

    @cached_property
    def p2_part(self):
        P = self.frame.copy()
        P[self.pres.vertical] = 0.0
        return P

    def off(self, w):
        """Component of w (last axis) orthogonal to the subspace."""
        w = np.asarray(w, dtype=float)
        return w - (w @ self.frame) @ self.frame.T

    def to_json(self):
        p = self.pres
        return {"family": p.family, "n": p.n, "tau": p.tau,
                "vectors": [[float(x) for x in col] for col in self.frame.T]}

    @classmethod
    def from_json(cls, data, pres):
        if (data["family"], data["n"], data["tau"]) != (pres.family, pres.n, pres.tau):
            raise ValueError("subspace was recorded for a different presentation")
        frame = np.array(data["vectors"], dtype=float).T
        ortho = np.abs(frame.T @ frame - np.eye(frame.shape[1])).max() <= 1e-12
        return cls(frame, pres, orthonormalize=not ortho)


def slope(v, pres, tol=1e-12):
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v[pres.vertical])
    nh = np.linalg.norm(v[pres.horizontal])
    if nv == 0 and nh == 0:
        raise ValueError("slope of the zero vector")
    if nh <= tol * max(nv, 1.0):
        return np.inf
    return nv / nh


def subspace_slope(V, tol=1e-9):
    """Common slope of all unit vectors of V, or None if it varies."""
    G = V.p1_part.T @ V.p1_part
    lam = np.trace(G) / V.dim
    if np.abs(G - lam * np.eye(V.dim)).max() > tol:
        return None
    if abs(1 - lam) <= tol:
        return np.inf
    return float(np.sqrt(max(lam, 0.0) / (1 - lam)))


def alpha_coefficients(tau):
    b1, b2 = shape_eigs(tau)
    return -b1, -b2


def alpha_matrix(pres):
    """Matrix of alpha in the orthonormal p-basis."""
    if pres.tau == 1:
        raise ValueError("alpha is undefined for the round sphere")
    a1, a2 = alpha_coefficients(pres.tau)
    return np.diag(np.r_[np.full(pres.dim_p1, a1), np.full(pres.dim_p2, a2)])


def alpha(v, w, pres):
    a1, a2 = alpha_coefficients(pres.tau)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    vs, hs = pres.vertical, pres.horizontal
    return a1 * (v[..., vs] * w[..., vs]).sum(-1) + a2 * (v[..., hs] * w[..., hs]).sum(-1)


def alpha_gram(V):
    return V.frame.T @ alpha_matrix(V.pres) @ V.frame


def isotropic_slope(tau):
    """Slope shared by every alpha-isotropic vector (tau < 1/2)."""
    if not 0 < tau < 0.5:
        raise ValueError("a finite isotropic slope needs 0 < tau < 1/2")
    return float(np.sqrt(tau / (1 - 2 * tau)))


def isotropy_residual(V):
    return float(np.abs(alpha_gram(V)).max())


def is_isotropic(V, tol=1e-9):
    return isotropy_residual(V) <= tol


def well_positioned_residual(V):
    return float(max(np.linalg.norm(V.off(V.p1_part.T), axis=-1).max(),
                     np.linalg.norm(V.off(V.p2_part.T), axis=-1).max()))


def is_well_positioned(V, tol=1e-9):
    return well_positioned_residual(V) <= tol


def shape_invariance_residual(V):
    b1, b2 = shape_eigs(V.pres.tau)
    S = b1 * V.p1_part + b2 * V.p2_part
    return float(np.linalg.norm(V.off(S.T), axis=-1).max())


@dataclass
class Invariance:
    """Largest off-subspace component over all frame tuples."""

    name: str
    residual: float
    tuple: tuple
    vector: np.ndarray = field(repr=False)

    def ok(self, tol):
        return self.residual <= tol


def _worst(name, values, V):
    off = V.off(values)
    norms = np.linalg.norm(off, axis=-1)
    idx = np.unravel_index(int(np.argmax(norms)), norms.shape)
    return Invariance(name, float(norms[idx]), tuple(int(i) for i in idx), off[idx])


def _model(V, model):
    if model is None:
        return CurvatureModel(V.pres)
    if model.pres is not V.pres:
        raise ValueError("curvature model belongs to another presentation")
    return model


def _lazy_values(model, F, k):
    m = F.shape[1]
    idx = np.array(list(itertools.product(range(m), repeat=k + 3)))
    args = [F.T[idx[:, a]] for a in range(k + 3)]
    if k == 0:
        vals = model.R(*args)
    else:
        vals = model.nabla_k_R(args[:k], *args[k:])
    return vals.reshape((m,) * (k + 3) + (F.shape[0],))


def D_invariance(V, model=None):
    model = _model(V, model)
    F = V.frame
    vals = np.einsum("aw,bx,abo->wxo", F, F, model.D_tensor)
    return _worst("D", vals, V)


def R_invariance(V, model=None):
    return nablaR_invariance(V, 0, model)


def nablaR_invariance(V, k, model=None):
    """Invariance of V under nabla^k R (k = 0 is R itself).

    Tuples are ordered (v_1..v_k, x, y, z) as in ``nabla_k_R``.
    """
    model = _model(V, model)
    F = V.frame
    name = "R" if k == 0 else f"nabla^{k} R"
    if not model.memoize or k > 2:
        return _worst(name, _lazy_values(model, F, k), V)
    if k == 0:
        vals = restrict_tensor(model.R_tensor, F)
    elif k == 1:
        vals = restrict_tensor(model.nabla_R_tensor, F)
    else:
        vals = _restricted_nabla(model.nabla_R_tensor, model.D_tensor, F)
    if k == 2:
        # the tensor puts the newest direction first; nabla_k_R puts it last
        vals = np.moveaxis(vals, 0, 1)
    return _worst(name, vals, V)


def _restricted_nabla(T, Dt, F):
    """nabla T with every input slot restricted to span(F)."""
    s = T.ndim - 1
    TV = restrict_tensor(T, F)
    Dw = np.tensordot(F, Dt, axes=([0], [0]))          # (w, e, o)
    DV = np.tensordot(F, Dw, axes=([0], [1])).swapaxes(0, 1)  # (w, x, o)
    out = np.moveaxis(np.tensordot(TV, Dw, axes=([s], [1])), s, 0)
    for i in range(s):
        Ti = T
        for j in range(s):
            if j != i:
                Ti = np.moveaxis(np.tensordot(Ti, F, axes=([j], [0])), -1, j)
        term = np.tensordot(DV, Ti, axes=([2], [i]))
        out = out - np.moveaxis(term, 1, i + 1)
    return out


def is_R_invariant(V, tol=1e-9, model=None):
    inv = R_invariance(V, model)
    return inv.ok(tol), inv.residual


def is_D_invariant(V, tol=1e-9, model=None):
    inv = D_invariance(V, model)
    return inv.ok(tol), inv.residual


def is_nablaR_invariant(V, k, tol=1e-9, model=None):
    inv = nablaR_invariance(V, k, model)
    return inv.ok(tol), inv.residual


@dataclass
class CertResult:
    verdict: str
    witness: dict | None
    diagnostics: dict

    @property
    def totally_geodesic(self):
        return self.verdict != NOT_TG


def tg_certificate(V, model=None, tol=1e-9, audit_order=2):
    """Decide whether V is tangent to a totally geodesic submanifold.

    Well-positioned subspaces need D- and R-invariance (plus the nabla^k R
    audit up to ``audit_order``); subspaces that do not split need tau < 1/2,
    alpha-isotropy and R-invariance.
    """
    pres = V.pres
    if V.dim < 2:
        raise ValueError("certificates need a subspace of dimension at least 2")
    if pres.tau == 1:
        raise ValueError("every subspace is totally geodesic in the round sphere")
    model = _model(V, model)

    checks = {"R": R_invariance(V, model), "D": D_invariance(V, model)}
    for k in range(1, audit_order + 1):
        checks[f"nabla^{k} R"] = nablaR_invariance(V, k, model)
    wp_res = well_positioned_residual(V)
    iso_res = isotropy_residual(V)
    diag = {
        "slope": subspace_slope(V),
        "well_positioned_residual": wp_res,
        "isotropy_residual": iso_res,
        "invariance": {name: c.residual for name, c in checks.items()},
    }

    def witness(check):
        return {"check": check.name, "tuple": list(check.tuple),
                "residual": check.residual, "vector": [float(x) for x in check.vector]}

    if wp_res <= tol:
        # D and R invariance is sufficient; split subspaces that are not
        # D-invariant (great spheres of a fiber, say) fall back on the audit
        audit = [f"nabla^{k} R" for k in range(1, audit_order + 1)]
        route = ["R", "D"] if checks["D"].ok(tol) else ["R"] + audit
        diag["route"] = "D and R invariance" if route[1] == "D" else "nabla^k R audit"
        worst = max((checks[n] for n in route), key=lambda c: c.residual)
        if worst.ok(tol) and (route[1] == "D" or audit):
            return CertResult(WELL_POSITIONED, None, diag)
        if worst.ok(tol):
            worst = checks["D"]
        return CertResult(NOT_TG, witness(worst), diag)

    if pres.tau > 1:
        diag["note"] = "non-compact branch"
    if pres.tau < 0.5 or pres.tau > 1:
        iso = Invariance("alpha-isotropy", iso_res, (), alpha_gram(V).ravel())
        worst = max(iso, checks["R"], key=lambda c: c.residual)
        if worst.ok(tol):
            return CertResult(NOT_WELL_POSITIONED, None, diag)
        return CertResult(NOT_TG, witness(worst), diag)
    # for 1/2 <= tau < 1 every totally geodesic subspace splits
    split = Invariance("well-positioned", wp_res, (), np.zeros(0))
    return CertResult(NOT_TG, witness(split), diag)


def sigma_hat_vectors(pres, y=None):
    """Frame {sqrt(tau/(1-tau)) e_i - sqrt((1-2tau)/(1-tau)) J_i y} of the
    maximal sphere that is not well-positioned, through the unit horizontal y."""
    tau = pres.tau
    if not 0 < tau < 0.5:
        raise ValueError("the sphere only exists for 0 < tau < 1/2")
    y = pres.y(1) if y is None else np.asarray(y, dtype=float)
    a = np.sqrt(tau / (1 - tau))
    b = np.sqrt((1 - 2 * tau) / (1 - tau))
    return [a * pres.unit(i - 1) - b * apply_J(i, y, pres) for i in range(1, pres.dim_p1 + 1)]


def sigma_hat_through(v, pres):
    """Horizontal unit y such that v lies in the sphere frame through y."""
    v = np.asarray(v, dtype=float)
    tau = pres.tau
    c = v[pres.vertical] / np.sqrt(tau / (1 - tau))
    h = v.copy()
    h[pres.vertical] = 0.0
    if np.linalg.norm(c) < 1e-12 or np.linalg.norm(h) < 1e-12:
        raise ValueError("vector is not of the mixed type spanned by the sphere")
    Jh = sum(ci * apply_J(i + 1, h, pres) for i, ci in enumerate(c))
    return Jh / np.linalg.norm(Jh)


def sigma_hat_container(V):
    y = sigma_hat_through(V.frame[:, 0], V.pres)
    return Subspace.from_vectors(sigma_hat_vectors(V.pres, y), V.pres)


def phi(x, y, z, pres):
    """The G2-invariant 3-form on the maximal non-split sphere (family O)."""
    if pres.family != "O":
        raise ValueError("phi is only defined for the octonionic family")
    tau = pres.tau
    if not 0 < tau < 0.5:
        raise ValueError("phi needs 0 < tau < 1/2")
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    vs, hs = pres.vertical, pres.horizontal
    y1 = np.zeros_like(y)
    y1[..., vs] = y[..., vs]
    z2 = np.zeros_like(z)
    z2[..., hs] = z[..., hs]
    br = np.einsum("...a,...b,abc->...c", y1, z2, pres.structure)
    pref = 2 * (1 - tau) ** 1.5 / (1 - 2 * tau)
    return pref * (x[..., hs] * br[..., hs]).sum(-1)


def phi_invariant(V, tol=1e-10, container=None):
    """|phi| on an orthonormal frame of a 3-dimensional V inside the sphere."""
    if V.dim != 3:
        raise ValueError("phi_invariant needs a 3-dimensional subspace")
    S = sigma_hat_container(V) if container is None else container
    res = float(np.linalg.norm(S.off(V.frame.T), axis=-1).max())
    if not res <= tol:
        raise ValueError(f"subspace is not contained in the sphere (residual {res:.3g})")
    e = V.frame.T
    return float(abs(phi(e[0], e[1], e[2], V.pres)))


def subspace_json(V):
    return json.dumps(V.to_json())
