"""Known totally geodesic tangent subspaces with their expected invariants."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .curvature import CurvatureModel
from .liealg import build_presentation, derive_fano_table
from .subspace import Subspace, isotropic_slope, sigma_hat_vectors

TAGS = (
    "WP_real_sphere", "WP_complex_berger", "WP_quat_berger", "WP_berger_in_H",
    "WP_inverse_sphere", "NWP_sphere_hat", "NWP_RP2", "NWP_RP3",
    "NWP_Vtheta", "NWP_VthetaPrime",
)


def _close(a, b):
    return abs(a - b) < 1e-12


@dataclass(frozen=True)
class ClassificationRecord:
    """A catalog row.

    ``curvature`` is the constant sectional curvature when there is one;
    otherwise ``model`` names the Hopf-Berger sphere (family, n) with the same
    tau that the subspace is isometric to.  ``slope`` is the common slope of
    all unit vectors (None when it varies).
    """

    tag: str
    dimension: int
    params: dict = field(default_factory=dict)
    curvature: float | None = None
    model: tuple | None = None
    slope: float | None = None
    phi: float | None = None
    tau_range: str = "tau > 0"

    @property
    def well_positioned(self):
        return self.tag.startswith("WP_")

    def to_json(self):
        d = asdict(self)
        if d["slope"] is not None and np.isinf(d["slope"]):
            d["slope"] = "inf"
        d["model"] = list(self.model) if self.model else None
        return d


def _span(pres, vectors):
    return Subspace.from_vectors(vectors, pres)


def a2_vectors(pres):
    """Basis of the projective plane (tau <= 1/3) in the quaternionic or
    octonionic family, built on the quaternionic line through 1, 2, 3."""
    tau = pres.tau
    c1, c2, c3 = 1 - tau, 1 - 2 * tau, 1 - 3 * tau
    e = pres.unit
    u = e(1) + np.sqrt(c2 / tau) * pres.y(1)
    v = e(2) + np.sqrt(tau / c2) * pres.jy(1, 1)
    if not _close(tau, 1 / 3):
        v = v + np.sqrt(c1 * c3 / (tau * c2)) * pres.y(2)
    return [u, v]


def a3_vectors(pres):
    """Basis of the projective 3-space (tau <= 1/4, quaternionic family)."""
    tau = pres.tau
    c1, c2, c3, c4 = (1 - m * tau for m in (1, 2, 3, 4))
    w = (pres.unit(0) - np.sqrt(tau / c2) * pres.jy(3, 1)
         + tau * np.sqrt(c1) / np.sqrt(tau * c2 * c3) * pres.jy(2, 2))
    if not _close(tau, 0.25):
        w = w - np.sqrt(c1 * c4 / (c3 * tau)) * pres.y(3)
    return a2_vectors(pres) + [w]


def v_theta(pres, theta):
    _check_theta(pres, theta)
    v = sigma_hat_vectors(pres)
    a = np.pi * theta / 2
    return _span(pres, [np.sin(a) * v[0] + np.cos(a) * v[3], v[1], v[2]])


def v_theta_prime(pres, theta):
    _check_theta(pres, theta)
    v = sigma_hat_vectors(pres)
    a = np.pi * theta / 2
    return _span(pres, [np.sin(a) * v[0] + np.cos(a) * v[1], v[4], v[5]])


def _check_theta(pres, theta):
    if pres.family != "O":
        raise ValueError("V_theta families live in the octonionic sphere")
    if not 0 <= theta <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")


def _well_positioned(pres):
    tau, n, fam = pres.tau, pres.n, pres.family
    e, y, jy = pres.unit, pres.y, pres.jy
    m = pres.dim_p1
    vertical = [e(i) for i in range(m)]
    out = []

    if fam in ("C", "H"):
        for k in range(2, n + 1):
            rec = ClassificationRecord("WP_real_sphere", k, {"k": k}, curvature=1.0, slope=0.0)
            out.append((rec, _span(pres, [y(j) for j in range(1, k + 1)])))
        for k in range(1, n + (fam == "H")):
            vecs = [e(0)] + [v for j in range(1, k + 1) for v in (y(j), jy(1, j))]
            rec = ClassificationRecord("WP_complex_berger", 2 * k + 1, {"k": k}, model=("C", k))
            out.append((rec, _span(pres, vecs)))
    if fam == "H":
        for k in range(1, n):
            vecs = vertical + [v for j in range(1, k + 1)
                               for v in [y(j)] + [jy(i, j) for i in (1, 2, 3)]]
            rec = ClassificationRecord("WP_quat_berger", 4 * k + 3, {"k": k}, model=("H", k))
            out.append((rec, _span(pres, vecs)))
    if fam == "O":
        for idx, line in enumerate(derive_fano_table(pres)):
            vecs = [e(i - 1) for i in line] + [y(1)] + [jy(i, 1) for i in line]
            rec = ClassificationRecord("WP_berger_in_H", 7, {"line": list(line)}, model=("H", 1))
            out.append((rec, _span(pres, vecs)))
        rec = ClassificationRecord("WP_complex_berger", 3, {"k": 1}, model=("C", 1))
        out.append((rec, _span(pres, [e(0), y(1), jy(1, 1)])))
    if fam in ("H", "O"):
        for k in range(2, m + 1):
            rec = ClassificationRecord("WP_inverse_sphere", k, {"k": k},
                                       curvature=1 / tau, slope=np.inf)
            out.append((rec, _span(pres, vertical[:k])))
    return out


def _not_well_positioned(pres, thetas):
    tau, n, fam = pres.tau, pres.n, pres.family
    if fam == "C" or not tau < 0.5:
        return []
    s = isotropic_slope(tau)
    hat = sigma_hat_vectors(pres)
    out = []
    for k in range(2, pres.dim_p1 + 1):
        rec = ClassificationRecord("NWP_sphere_hat", k, {"k": k}, curvature=4 * (1 - tau),
                                   slope=s, tau_range="tau < 1/2")
        out.append((rec, _span(pres, hat[:k])))

    if _close(tau, 1 / 3) or (tau < 1 / 3 and fam == "H" and n >= 2):
        rec = ClassificationRecord("NWP_RP2", 2, {"tau": tau}, curvature=1 - tau, slope=s,
                                   tau_range="tau = 1/3, or tau < 1/3 with n >= 2")
        out.append((rec, _span(pres, a2_vectors(pres))))
    if fam == "H" and ((_close(tau, 0.25) and n >= 2) or (tau < 0.25 and n >= 3)):
        rec = ClassificationRecord("NWP_RP3", 3, {"tau": tau}, curvature=1 - tau, slope=s,
                                   tau_range="tau = 1/4 with n >= 2, or tau < 1/4 with n >= 3")
        out.append((rec, _span(pres, a3_vectors(pres))))

    if fam == "O":
        for theta in thetas:
            a = np.pi * theta / 2
            for tag, make, ph in (("NWP_Vtheta", v_theta, np.sin(a)),
                                  ("NWP_VthetaPrime", v_theta_prime, np.cos(a))):
                rec = ClassificationRecord(tag, 3, {"theta": theta}, curvature=4 * (1 - tau),
                                           slope=s, phi=float(ph), tau_range="tau < 1/2")
                out.append((rec, make(pres, theta)))
    return out


def catalog_entries(pres, thetas=(0.0, 0.5, 1.0)):
    """Every classified totally geodesic subspace valid for this presentation."""
    entries = _well_positioned(pres)
    if pres.tau != 1:
        entries += _not_well_positioned(pres, thetas)
    return entries


def model_presentation(record, tau):
    fam, k = record.model
    return build_presentation(fam, k, tau)


def _unit_direction(P):
    u, s, _ = np.linalg.svd(P, full_matrices=False)
    if s[0] < 0.5:
        raise ValueError("subspace has no component of the requested type")
    return u[:, 0]


def model_spectrum_mismatch(record, V, model=None):
    """Compare the intrinsic Jacobi spectra of V with those of its model sphere.

    Three test directions are used on each side: vertical, horizontal and
    their normalised sum.  Returns the largest eigenvalue discrepancy, or inf
    when the multiplicity patterns disagree.
    """
    if record.model is None:
        raise ValueError(f"{record.tag} has no model sphere")
    model = CurvatureModel(V.pres) if model is None else model
    sub = model_presentation(record, V.pres.tau)
    submodel = CurvatureModel(sub)
    v, h = _unit_direction(V.p1_part), _unit_direction(V.p2_part)
    ev, eh = sub.unit(0), sub.y(1)
    worst = 0.0
    for x, x_sub in ((v, ev), (h, eh), ((v + h) / np.sqrt(2), (ev + eh) / np.sqrt(2))):
        ours = model.jacobi_spectrum(x, restrict=V.frame)
        theirs = submodel.jacobi_spectrum(x_sub)
        if [m for _, m in ours] != [m for _, m in theirs]:
            return float("inf")
        worst = max(worst, max(abs(a - b) for (a, _), (b, _) in zip(ours, theirs)))
    return worst


def catalog_json(pres, thetas=(0.0, 0.5, 1.0)):
    rows = []
    for rec, V in catalog_entries(pres, thetas):
        row = rec.to_json()
        row["frame"] = V.to_json()["vectors"]
        rows.append(row)
    return json.dumps(rows)
