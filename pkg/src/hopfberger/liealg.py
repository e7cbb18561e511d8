"""Matrix presentations of the Hopf-Berger spheres.

Every Lie algebra element is a real skew-symmetric matrix.  Complex and
quaternionic matrices are realified blockwise (a complex number becomes a
2x2 block, a quaternion its 4x4 left-multiplication matrix), so the bracket
is always the plain matrix commutator.

Tangent vectors at the base point are coordinate arrays in the orthonormal
basis of ``p = p1 + p2`` stored on the presentation.  Basis order:

* C, H: ``X_i/sqrt(tau)`` for the imaginary units, then for each ``j``:
  ``Y_j, J_1 Y_j, ..., J_m Y_j``.
* O: ``X_1/(2 sqrt(tau)), ..., X_7/(2 sqrt(tau)), Y_1, ..., Y_8``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

FAMILIES = ("C", "H", "O")
FIELD_DIM = {"C": 2, "H": 4, "O": 8}

# left multiplication by 1, i, j, k on H = R^4 with basis (1, i, j, k)
_QUAT_LEFT = np.array([
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
], dtype=float)

# right multiplication by i, j, k; commutes with every left multiplication
_QUAT_RIGHT = np.array([
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
    [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
], dtype=float)

_COMPLEX_UNIT = np.array([[0.0, -1.0], [1.0, 0.0]])


def realify_complex(z):
    """Real 2N x 2N matrix of a complex N x N matrix."""
    z = np.asarray(z, dtype=complex)
    return np.kron(z.real, np.eye(2)) + np.kron(z.imag, _COMPLEX_UNIT)


def realify_quaternion(parts):
    """Real 4N x 4N matrix of ``A0 + A1 i + A2 j + A3 k`` (real N x N parts)."""
    return sum(np.kron(np.asarray(a, dtype=float), _QUAT_LEFT[q])
               for q, a in enumerate(parts))


def elementary(N, i, j):
    """E_ij = e_i e_j^T - e_j e_i^T with 1-based indices."""
    e = np.zeros((N, N))
    e[i - 1, j - 1] += 1.0
    e[j - 1, i - 1] -= 1.0
    return e


def bracket(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"bracket of incompatible matrices {a.shape} and {b.shape}")
    return a @ b - b @ a


def trace_form(a, b):
    """The ad-invariant form <a, b> = -tr(ab)."""
    return -float(np.trace(np.asarray(a) @ np.asarray(b)))


# spin(9) generators of p1; the sign pattern fixes the octonion structure
_SPIN9_X = (
    ((1, 5, 1), (2, 6, 1), (3, 7, 1), (4, 8, 1)),
    ((1, 7, 1), (2, 8, 1), (3, 5, -1), (4, 6, -1)),
    ((1, 3, 1), (2, 4, -1), (5, 7, -1), (6, 8, 1)),
    ((1, 6, 1), (2, 5, -1), (3, 8, -1), (4, 7, 1)),
    ((1, 8, 1), (2, 7, -1), (3, 6, 1), (4, 5, -1)),
    ((1, 2, 1), (3, 4, 1), (5, 6, -1), (7, 8, -1)),
    ((1, 4, 1), (2, 3, 1), (5, 8, -1), (6, 7, -1)),
)


def _generators(family, n):
    """Unscaled X_i, Y_j, the full algebra basis, and the commutant used to
    test membership in the realified algebra."""
    if family == "O":
        X = [sum(s * elementary(9, i, j) for i, j, s in terms) for terms in _SPIN9_X]
        Y = [2.0 * elementary(9, j, 9) for j in range(1, 9)]
        alg = [elementary(9, i, j) for i, j in itertools.combinations(range(1, 10), 2)]
        return X, Y, alg, []

    N = n + 1
    if family == "C":
        def unit(r, c, val):
            z = np.zeros((N, N), dtype=complex)
            z[r, c] = val
            return z

        X = [realify_complex(unit(n, n, 1j))]
        Y = [realify_complex(unit(j, n, 1.0) - unit(n, j, 1.0)) for j in range(n)]
        alg = [realify_complex(unit(r, r, 1j)) for r in range(N)]
        for r, c in itertools.combinations(range(N), 2):
            alg.append(realify_complex(unit(r, c, 1.0) - unit(c, r, 1.0)))
            alg.append(realify_complex(unit(r, c, 1j) + unit(c, r, 1j)))
        commutant = [np.kron(np.eye(N), _COMPLEX_UNIT)]
        return X, Y, alg, commutant

    def quat(r, c, q, sym):
        # q e_rc + q e_cr (sym) or e_rc - e_cr; a single entry when r == c
        parts = [np.zeros((N, N)) for _ in range(4)]
        parts[q][r, c] = 1.0
        if r != c:
            parts[q][c, r] = 1.0 if sym else -1.0
        return realify_quaternion(parts)

    X = [quat(n, n, q, True) for q in (1, 2, 3)]
    Y = [quat(j, n, 0, False) for j in range(n)]
    alg = [quat(r, r, q, True) for r in range(N) for q in (1, 2, 3)]
    for r, c in itertools.combinations(range(N), 2):
        alg.append(quat(r, c, 0, False))
        alg.extend(quat(r, c, q, True) for q in (1, 2, 3))
    commutant = [np.kron(np.eye(N), R) for R in _QUAT_RIGHT]
    return X, Y, alg, commutant


@dataclass(frozen=True, eq=False)
class Presentation:
    """A Hopf-Berger sphere S^n_{F,tau} as a reductive homogeneous space.

    ``basis`` holds the tau-orthonormal p-basis as matrices, ``scale`` the
    factor each basis vector was divided by relative to its generator, and
    ``X``/``Y`` the unscaled generators of p1 and p2.
    """

    family: str
    n: int
    tau: float
    X: np.ndarray
    Y: np.ndarray
    basis: np.ndarray
    scale: np.ndarray
    algebra: np.ndarray
    commutant: tuple

    @property
    def dim_p1(self):
        return len(self.X)

    @property
    def dim_p2(self):
        return self.dim - self.dim_p1

    @property
    def dim(self):
        return len(self.basis)

    @property
    def sphere_dim(self):
        return self.dim

    @property
    def matrix_size(self):
        return self.basis.shape[1]

    @property
    def vertical(self):
        return slice(0, self.dim_p1)

    @property
    def horizontal(self):
        return slice(self.dim_p1, self.dim)

    def describe(self):
        return {"family": self.family, "n": self.n, "tau": self.tau,
                "dim_p1": self.dim_p1, "dim_p2": self.dim_p2}

    @cached_property
    def _flat(self):
        return self.basis.reshape(self.dim, -1)

    @cached_property
    def gram(self):
        """Trace-form Gram matrix of the scaled p-basis."""
        return self._flat @ self._flat.T

    @cached_property
    def _gram_inv(self):
        return np.linalg.inv(self.gram)

    @cached_property
    def metric_weights(self):
        """Multipliers turning the trace form into the tau-metric on p1 and p2.

        Calibrated on the first vector of each block only, so that the
        identity ``metric_gram == I`` is a genuine check of the basis.
        """
        w1 = 1.0 / trace_form(self.basis[0], self.basis[0])
        k = self.dim_p1
        w2 = 1.0 / trace_form(self.basis[k], self.basis[k])
        return w1, w2

    @cached_property
    def metric_gram(self):
        w1, w2 = self.metric_weights
        w = np.r_[np.full(self.dim_p1, w1), np.full(self.dim_p2, w2)]
        sw = np.sqrt(w)
        return sw[:, None] * self.gram * sw[None, :]

    @cached_property
    def structure(self):
        """C[a, b, :] = p-coordinates of [e_a, e_b]."""
        B = self.basis
        prods = np.einsum("aij,bjk->abik", B, B)
        comm = prods - prods.transpose(1, 0, 2, 3)
        return self.coords_unchecked(comm)

    def coords_unchecked(self, mats):
        """p-coordinates of matrices (leading axes allowed) via the Gram solve."""
        mats = np.asarray(mats)
        lead = mats.shape[:-2]
        flat = mats.reshape(-1, self.matrix_size ** 2)
        coeffs = (flat @ self._flat.T) @ self._gram_inv
        return coeffs.reshape(*lead, self.dim)

    def embed(self, v):
        """Matrix of the p-vector with coordinates ``v``."""
        return np.tensordot(np.asarray(v, dtype=float), self.basis, axes=(-1, 0))

    def algebra_residual(self, a):
        a = np.asarray(a, dtype=float)
        res = np.linalg.norm(a + a.T)
        for c in self.commutant:
            res = max(res, np.linalg.norm(a @ c - c @ a))
        return res

    def unit(self, index):
        e = np.zeros(self.dim)
        e[index] = 1.0
        return e

    def x(self, i):
        """Coordinates of the unscaled generator X_i (1-based)."""
        return self.scale[i - 1] * self.unit(i - 1)

    def y(self, j):
        """Coordinates of Y_j (1-based)."""
        if self.family == "O":
            return self.unit(self.dim_p1 + j - 1)
        return self.unit(self.dim_p1 + (j - 1) * (self.dim_p1 + 1))

    def jy(self, i, j):
        """Coordinates of J_i Y_j."""
        return apply_J(i, self.y(j), self)

    def to_json(self):
        return {
            "family": self.family,
            "n": self.n,
            "tau": self.tau,
            "basis": [[[float(x) for x in row] for row in m] for m in self.basis],
        }


def build_presentation(family, n=None, tau=1.0):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    tau = float(tau)
    if not np.isfinite(tau) or tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if family == "O":
        if n not in (None, 1):
            raise ValueError("the octonionic family only has the 15-dimensional model (n=1)")
        n = 1
    elif n is None or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)

    X, Y, alg, commutant = _generators(family, n)
    sx = 2.0 * np.sqrt(tau) if family == "O" else np.sqrt(tau)
    basis = [x / sx for x in X]
    scale = [sx] * len(X)
    if family == "O":
        basis.extend(Y)
        scale.extend([1.0] * len(Y))
    else:
        for y in Y:
            basis.append(y)
            basis.extend(bracket(y, x) for x in X)
            scale.extend([1.0] * (len(X) + 1))

    return Presentation(
        family=family, n=n, tau=tau,
        X=np.array(X), Y=np.array(Y),
        basis=np.array(basis), scale=np.array(scale),
        algebra=np.array(alg), commutant=tuple(commutant),
    )


def project_p(a, pres, tol=1e-10):
    """p-coordinates of an algebra element (projection along k)."""
    a = np.asarray(a, dtype=float)
    if a.shape != (pres.matrix_size,) * 2:
        raise ValueError(f"expected a {pres.matrix_size}x{pres.matrix_size} matrix")
    scale = max(1.0, np.linalg.norm(a))
    if pres.algebra_residual(a) > tol * scale:
        raise ValueError("matrix is not an element of the presentation's Lie algebra")
    return pres.coords_unchecked(a)


def project_k(a, pres, tol=1e-10):
    a = np.asarray(a, dtype=float)
    return a - pres.embed(project_p(a, pres, tol))


def k_basis(pres):
    """Orthonormal (trace form) basis of k, computed on demand."""
    A = pres.algebra.reshape(len(pres.algebra), -1)
    P = pres.basis.reshape(pres.dim, -1)
    q, _ = np.linalg.qr(P.T)
    rest = A.T - q @ (q.T @ A.T)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * s.max()))
    k = u[:, :rank].T
    return k.reshape(rank, pres.matrix_size, pres.matrix_size)


def apply_J(i, v, pres, tol=1e-10):
    """J_i v = [v, X_i] for a horizontal vector v."""
    v = np.asarray(v, dtype=float)
    if not 1 <= i <= pres.dim_p1:
        raise ValueError(f"J index must lie in 1..{pres.dim_p1}, got {i}")
    if np.linalg.norm(v[pres.vertical]) > tol * max(1.0, np.linalg.norm(v)):
        raise ValueError("J is only defined on horizontal vectors")
    return pres.coords_unchecked(bracket(pres.embed(v), pres.X[i - 1]))


def derive_fano_table(pres, tol=1e-10):
    """Oriented lines (i, j, k) with J_j J_i = J_k on span{Y1, J_l Y1 : l in line}.

    Each triple is rotated to start at its smallest index and the list is
    sorted, so the result depends on nothing but the matrices.
    """
    if pres.family != "O":
        raise ValueError("the Fano table only exists for the octonionic family")
    m = pres.dim_p1
    y1 = pres.y(1)
    jy = [apply_J(i, y1, pres) for i in range(1, m + 1)]

    def J(i, v):
        return apply_J(i, v, pres)

    lines = set()
    for i, j in itertools.permutations(range(1, m + 1), 2):
        w = J(j, J(i, y1))
        matches = [k for k in range(1, m + 1) if np.linalg.norm(w - jy[k - 1]) < tol]
        if not matches:
            if not any(np.linalg.norm(w + jy[k - 1]) < tol for k in range(1, m + 1)):
                raise RuntimeError(f"J_{j} J_{i} Y1 is not +-J_k Y1 for any k")
            continue
        k = matches[0]
        quat_span = [y1] + [jy[l - 1] for l in (i, j, k)]
        for v in quat_span:
            if np.linalg.norm(J(j, J(i, v)) - J(k, v)) > tol:
                raise RuntimeError(f"J_{j} J_{i} != J_{k} on the quaternionic span")
        r = (i, j, k).index(min(i, j, k))
        lines.add((i, j, k)[r:] + (i, j, k)[:r])
    if len(lines) != 7:
        raise RuntimeError(f"expected 7 oriented Fano lines, found {len(lines)}")
    return sorted(lines)


def presentation_json(pres):
    return json.dumps(pres.to_json())
