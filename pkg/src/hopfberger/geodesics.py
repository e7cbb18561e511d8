"""Geodesic-sphere parameters and explicit geodesics of the Berger 3-sphere."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm


def tau_to_radius(tau):
    """Radius t of the geodesic sphere and the homothety factor for tau."""
    tau = float(tau)
    if tau <= 0 or tau == 1:
        raise ValueError(f"tau must be positive and different from 1, got {tau}")
    if tau < 1:
        return float(np.arccos(np.sqrt(tau))), float(np.sqrt(1 - tau))
    return float(np.arccosh(np.sqrt(tau))), float(np.sqrt(tau - 1))


def radius_to_tau(t, compact=True):
    t = float(t)
    if t <= 0 or (compact and t >= np.pi / 2):
        raise ValueError(f"radius {t} outside the admissible range")
    return float(np.cos(t) ** 2 if compact else np.cosh(t) ** 2)


def shape_eigs(tau):
    """Principal curvatures (beta1, beta2) on the vertical and horizontal spaces."""
    t, _ = tau_to_radius(tau)
    if tau < 1:
        return -2.0 / np.tan(2 * t), -1.0 / np.tan(t)
    return -2.0 / np.tanh(2 * t), -1.0 / np.tanh(t)


@dataclass(frozen=True)
class GeodesicParams:
    """Unit coefficients of the initial velocity on Y1, J1Y1 and X^tau."""

    alpha1: float
    alpha2: float
    alpha3: float
    tau: float

    def __post_init__(self):
        norm = self.alpha1 ** 2 + self.alpha2 ** 2 + self.alpha3 ** 2
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"coefficients must have unit norm, got |alpha|^2 = {norm}")
        if self.tau <= 0 or self.tau == 1:
            raise ValueError("tau must be positive and different from 1")

    @property
    def slope(self):
        h = np.hypot(self.alpha1, self.alpha2)
        return np.inf if h == 0 else abs(self.alpha3) / h


# u(2) elements of the base point o = (0, 1)
Y1 = np.array([[0, 1], [-1, 0]], dtype=complex)
JY1 = np.array([[0, 1j], [1j, 0]])
X1 = np.diag([0, 1j])
Z = np.diag([1j, 0])


def x_tau(tau):
    """The vertical direction of the naturally reductive complement."""
    return (X1 + (1 - 2 * tau) * Z) / np.sqrt(tau)


def _as_points(z):
    z = np.asarray(z)
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag], axis=-1)


def berger_geodesic_point(params, s):
    """Point of the unit-speed geodesic from o at parameter s, as
    (re z1, im z1, re z2, im z2); ``s`` may be an array."""
    a1, a2, a3, tau = params.alpha1, params.alpha2, params.alpha3, params.tau
    s = np.asarray(s, dtype=float)
    rt = np.sqrt(tau)
    P = np.sqrt(a1 ** 2 + a2 ** 2 + tau * a3 ** 2)
    Q = np.exp(-1j * s * (P * rt + (tau - 1) * a3) / rt) / (2 * P)
    e = np.exp(2j * P * s)
    z1 = Q * (e - 1) * (-1j * a1 + a2)
    z2 = Q * ((1 + e) * P + (e - 1) * rt * a3)
    return _as_points(np.stack([z1, z2], axis=-1))


def orbit_oracle(params, s):
    """Same geodesic as the orbit exp(sX) o of the u(2) element X."""
    X = _u2_element(params)
    o = np.array([0, 1], dtype=complex)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    pts = np.array([expm(si * X) @ o for si in s])
    return _as_points(pts)


def _u2_element(params):
    return params.alpha1 * Y1 + params.alpha2 * JY1 + params.alpha3 * x_tau(params.tau)


def closure_residual(params, period):
    """max(|gamma(T) - gamma(0)|, |gamma'(T) - gamma'(0)|) with the velocity
    transported by the orbit exp(sX) o."""
    X = _u2_element(params)
    o = np.array([0, 1], dtype=complex)
    g = expm(period * X)
    pos = np.abs(berger_geodesic_point(params, period) - _as_points(o)).max()
    vel = np.abs(g @ (X @ o) - X @ o).max()
    return float(max(pos, vel))


def berger_speed(point, velocity, tau):
    """tau-metric length of ``velocity`` at ``point`` (both as 4 reals)."""
    z = np.asarray(point)[..., 0::2] + 1j * np.asarray(point)[..., 1::2]
    w = np.asarray(velocity)[..., 0::2] + 1j * np.asarray(velocity)[..., 1::2]
    iz = 1j * z
    vert = np.real(np.sum(w * np.conj(iz), axis=-1))
    sq = np.sum(np.abs(w) ** 2, axis=-1) - (1 - tau) * vert ** 2
    return np.sqrt(sq)


def closed_geodesic_solutions(tau, jmax, kmax):
    """(slope, alpha3, period) for every solution of the closing relation
    alpha3 = P sqrt(tau) (j + 2k) / (j (1 - tau)),  P^2 = 1 - (1 - tau) alpha3^2.

    The period of a solution is pi |j| / P.
    """
    tau = float(tau)
    if tau <= 0 or tau == 1:
        raise ValueError("tau must be positive and different from 1")
    if jmax < 1 or kmax < 1:
        raise ValueError("jmax and kmax must be at least 1")
    out = []
    for j in range(-jmax, jmax + 1):
        if j == 0:
            continue
        for k in range(-kmax, kmax + 1):
            r = np.sqrt(tau) * (j + 2 * k) / (j * (1 - tau))
            den = 1 + r * r * (1 - tau)
            if den <= 0:
                continue
            a3sq = r * r / den
            if a3sq >= 1:
                continue
            a3 = np.copysign(np.sqrt(a3sq), r)
            P = np.sqrt(1 - (1 - tau) * a3sq)
            out.append((float(np.sqrt(a3sq / (1 - a3sq))), float(a3), float(np.pi * abs(j) / P)))
    out.sort()
    return out


def closed_geodesic_slopes(tau, jmax, kmax, tol=1e-12):
    slopes = []
    for slope, _, _ in closed_geodesic_solutions(tau, jmax, kmax):
        if not slopes or slope - slopes[-1] > tol:
            slopes.append(slope)
    return slopes


def geodesic_csv(params, s_values):
    pts = berger_geodesic_point(params, s_values)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "re_z1", "im_z1", "re_z2", "im_z2"])
    for s, p in zip(np.asarray(s_values, dtype=float), pts):
        w.writerow([format(float(s), ".17g")] + [format(float(x), ".17g") for x in p])
    return buf.getvalue()
