"""Levi-Civita data of a Hopf-Berger sphere at the base point.

All vector arguments are p-coordinates and may carry leading batch axes;
operations broadcast over them.  Sign convention: R(X,Y) = [D_X, D_Y] - D_[X,Y],
so that <R(x,y)y, x> is the sectional curvature.
"""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

MEMO_MAX_DIM = 16


def _commute(a, b):
    return a @ b - b @ a


class CurvatureModel:
    def __init__(self, pres, memoize=None, group_tol=1e-9):
        self.pres = pres
        self.group_tol = group_tol
        self.memoize = pres.dim <= MEMO_MAX_DIM if memoize is None else memoize
        C = pres.structure
        self._C = C
        # 2<U(e_a, e_b), e_c> = <[e_c, e_a]_p, e_b> + <e_a, [e_c, e_b]_p>
        self._U = 0.5 * (np.einsum("cab->abc", C) + np.einsum("cba->abc", C))

    @property
    def dim(self):
        return self.pres.dim

    def bracket_p(self, x, y):
        return np.einsum("...a,...b,abc->...c", x, y, self._C)

    def U(self, x, y):
        return np.einsum("...a,...b,abc->...c", x, y, self._U)

    def D(self, x, y):
        """Difference tensor D_x y."""
        return 0.5 * self.bracket_p(x, y) + self.U(x, y)

    def _kterm(self, x, y, z):
        # [[x, y]_k, z]_p using the matrix realisation
        pres = self.pres
        mx, my, mz = pres.embed(x), pres.embed(y), pres.embed(z)
        wk = _commute(mx, my) - pres.embed(self.bracket_p(x, y))
        return pres.coords_unchecked(_commute(wk, mz))

    def _R_lazy(self, x, y, z):
        bp, U = self.bracket_p, self.U
        xy = bp(x, y)
        zy = bp(z, y)
        zx = bp(z, x)
        uzy = U(z, y)
        uzx = U(z, x)
        return (0.5 * bp(z, xy) - self._kterm(x, y, z) - U(z, xy)
                + 0.25 * bp(zy, x) - 0.5 * U(zy, x) - 0.5 * bp(uzy, x) + U(uzy, x)
                - 0.25 * bp(zx, y) + 0.5 * U(zx, y) + 0.5 * bp(uzx, y) - U(uzx, y))

    @cached_property
    def R_tensor(self):
        """T[a, b, c, :] = R(e_a, e_b) e_c."""
        d = self.dim
        eye = np.eye(d)
        a, b, c = np.meshgrid(np.arange(d), np.arange(d), np.arange(d), indexing="ij")
        vals = self._R_lazy(eye[a.ravel()], eye[b.ravel()], eye[c.ravel()])
        return vals.reshape(d, d, d, d)

    def R(self, x, y, z):
        x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
        if self.memoize:
            return np.einsum("...a,...b,...c,abce->...e", x, y, z, self.R_tensor, optimize=True)
        return self._R_lazy(x, y, z)

    def nabla_k_R(self, vs, x, y, z):
        """(nabla^k R)(v_1, ..., v_k; x, y, z) with nabla_{v_k} applied last.

        Each covariant derivative is the derivation D_v acting on the
        previous tensor, since every nabla^k R is invariant under the group.
        """
        def T(args):
            k = len(args) - 3
            if k == 0:
                return self.R(*args)
            v, rest = args[k - 1], args[:k - 1] + args[k:]
            out = self.D(v, T(rest))
            for i in range(len(rest)):
                moved = list(rest)
                moved[i] = self.D(v, rest[i])
                out = out - T(moved)
            return out

        args = [np.asarray(a, dtype=float) for a in (*vs, x, y, z)]
        return T(args)

    def nabla_R(self, v, x, y, z):
        return self.nabla_k_R([v], x, y, z)

    @cached_property
    def D_tensor(self):
        return 0.5 * self._C + self._U

    @cached_property
    def nabla_R_tensor(self):
        """N[v, x, y, z, :] = (nabla_v R)(x, y, z)."""
        return nabla_tensor(self.R_tensor, self.D_tensor)

    def jacobi(self, x):
        """Matrix of y -> R(y, x) x."""
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(x) < 1e-12:
            raise ValueError("Jacobi operator of the zero vector")
        eye = np.eye(self.dim)
        xs = np.broadcast_to(x, eye.shape)
        return self.R(eye, xs, xs).T

    def jacobi_spectrum(self, x, restrict=None):
        """Grouped eigenvalues of the Jacobi operator, optionally restricted to
        the span of the orthonormal columns ``restrict``."""
        J = self.jacobi(x)
        J = 0.5 * (J + J.T)
        if restrict is not None:
            J = restrict.T @ J @ restrict
        return group_eigenvalues(np.linalg.eigvalsh(J), self.group_tol)

    def sectional(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        den = (x * x).sum(-1) * (y * y).sum(-1) - (x * y).sum(-1) ** 2
        if np.any(den < 1e-12):
            raise ValueError("sectional curvature of a degenerate plane")
        return (self.R(x, y, y) * x).sum(-1) / den


def nabla_tensor(T, Dt):
    """Full tensor of nabla T for a G-invariant multilinear map T.

    ``T`` has shape (d,)*s + (d,) (s inputs, then the output index);
    the result has the direction v as a new leading input slot.
    """
    s = T.ndim - 1
    out = np.moveaxis(np.tensordot(T, Dt, axes=([s], [1])), s, 0)
    for i in range(s):
        term = np.tensordot(Dt, T, axes=([2], [i]))
        out = out - np.moveaxis(term, 1, i + 1)
    return out


def restrict_tensor(T, F):
    """Contract every input slot of T with the columns of F."""
    out = T
    for i in range(T.ndim - 1):
        out = np.moveaxis(np.tensordot(out, F, axes=([i], [0])), -1, i)
    return out


def group_eigenvalues(values, tol=1e-9):
    """Sorted (eigenvalue, multiplicity) pairs; neighbours within tol merge."""
    values = np.sort(np.asarray(values, dtype=float))
    groups = []
    for v in values:
        if groups and abs(v - groups[-1][-1]) <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def _merge(pairs, tol):
    return group_eigenvalues([lam for lam, m in pairs for _ in range(m)], tol)


def expected_jacobi_spectrum(pres, vector_class, tol=1e-9):
    """Closed-form Jacobi spectra for a unit vertical or horizontal vector.

    Returns (pairs on p, pairs on p1, pairs on p2); zero multiplicities are
    dropped and coincident eigenvalues merged.
    """
    from .liealg import FIELD_DIM

    tau = pres.tau
    f, n = FIELD_DIM[pres.family], pres.sphere_dim
    if vector_class == "vertical":
        p1 = [(0.0, 1), (1 / tau, f - 2)]
        p2 = [(tau, n - f + 1)]
    elif vector_class == "horizontal":
        p1 = [(tau, f - 1)]
        p2 = [(0.0, 1), (4 - 3 * tau, f - 1), (1.0, n - 2 * f + 1)]
    else:
        raise ValueError(f"vector_class must be 'vertical' or 'horizontal', got {vector_class!r}")
    p1 = [(lam, m) for lam, m in p1 if m > 0]
    p2 = [(lam, m) for lam, m in p2 if m > 0]
    return _merge(p1 + p2, tol), _merge(p1, tol), _merge(p2, tol)


def spectrum_report(model, x, vector_class):
    pres = model.pres
    v = slice(0, pres.dim_p1)
    h = slice(pres.dim_p1, pres.dim)
    eye = np.eye(pres.dim)
    return {
        "tau": pres.tau,
        "family": pres.family,
        "vector_class": vector_class,
        "pairs": [[lam, m] for lam, m in model.jacobi_spectrum(x)],
        "p1_pairs": [[lam, m] for lam, m in model.jacobi_spectrum(x, eye[:, v])],
        "p2_pairs": [[lam, m] for lam, m in model.jacobi_spectrum(x, eye[:, h])],
    }


def spectrum_json(model, x, vector_class):
    return json.dumps(spectrum_report(model, x, vector_class))


def _cyclic(triple):
    i, j, k = triple
    return [(i, j, k), (j, k, i), (k, i, j)]


def table_identities(model):
    """Named identities (name, actual, expected) for the D and R tables.

    For C and H: Y = Y_1, Z = Y_2, W = Y_3 span a totally real subspace and
    (i, j, k) runs over cyclic permutations of (1, 2, 3).  For O the triples
    are the oriented Fano lines derived from the matrices and Y = Y_1.
    Identities whose vectors do not exist in the given dimension are skipped.
    """
    from .liealg import derive_fano_table

    pres = model.pres
    t = pres.tau
    D, R = model.D, model.R
    X, Y, JY = pres.x, pres.y, pres.jy
    zero = np.zeros(pres.dim)
    out = []

    def add(name, actual, expected):
        out.append((name, np.asarray(actual), np.asarray(expected)))

    m = pres.dim_p1
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            add(f"U(X{a},X{b}) = 0", model.U(X(a), X(b)), zero)
            if pres.family != "H":
                add(f"D_X{a} X{b} = 0", D(X(a), X(b)), zero)
    h = range(pres.dim_p1, pres.dim)
    for a in h:
        for b in h:
            ea, eb = pres.unit(a), pres.unit(b)
            add(f"D_e{a} e{b} = -D_e{b} e{a} on p2", D(ea, eb), -D(eb, ea))

    if pres.family in ("C", "H"):
        y = Y(1)
        extra = [Y(j) for j in range(2, pres.n + 1)]
        triples = _cyclic((1, 2, 3)) if pres.family == "H" else []
        for i in range(1, m + 1):
            jy = JY(i, 1)
            add(f"D_Y X{i} = tau J{i}Y", D(y, X(i)), t * jy)
            add(f"D_X{i} Y = (tau-1) J{i}Y", D(X(i), y), (t - 1) * jy)
            add(f"D_Y J{i}Y = -X{i}", D(y, jy), -X(i))
            add(f"R(X{i},Y)X{i} = -tau^2 Y", R(X(i), y, X(i)), -t * t * y)
            add(f"R(X{i},Y)Y = tau X{i}", R(X(i), y, y), t * X(i))
            add(f"R(Y,J{i}Y)Y = (-4+3tau) J{i}Y", R(y, jy, y), (-4 + 3 * t) * jy)
            add(f"R(Y,J{i}Y)J{i}Y = (4-3tau) Y", R(y, jy, jy), (4 - 3 * t) * y)
            add(f"R(X{i},Y)J{i}Y = 0", R(X(i), y, jy), zero)
            add(f"R(Y,J{i}Y)X{i} = 0", R(y, jy, X(i)), zero)
            if extra:
                z = extra[0]
                add(f"R(Y,J{i}Y)Z = 2(-1+tau) J{i}Z", R(y, jy, z), 2 * (t - 1) * JY(i, 2))
                add(f"R(Y,Z)J{i}Y = (-1+tau) J{i}Z", R(y, z, jy), (t - 1) * JY(i, 2))
                add(f"R(X{i},Y)Z = 0", R(X(i), y, z), zero)
                add(f"R(Y,Z)X{i} = 0", R(y, z, X(i)), zero)
        if extra:
            z = extra[0]
            add("D_Y Z = 0", D(y, z), zero)
            add("R(Y,Z)Y = -Z", R(y, z, y), -z)
            if len(extra) > 1:
                add("R(Y,Z)W = 0", R(y, z, extra[1]), zero)
        for i, j, k in triples:
            jyi, jyj, jyk = JY(i, 1), JY(j, 1), JY(k, 1)
            add(f"D_J{i}Y J{j}Y = X{k}", D(jyi, jyj), X(k))
            add(f"R(X{i},X{j})Y = 2tau(1-tau) J{k}Y", R(X(i), X(j), y), 2 * t * (1 - t) * jyk)
            add(f"R(X{i},X{j})X{i} = -X{j}", R(X(i), X(j), X(i)), -X(j))
            add(f"R(X{i},Y)J{j}Y = (1-tau) X{k}", R(X(i), y, jyj), (1 - t) * X(k))
            add(f"R(X{i},Y)X{j} = tau(1-tau) J{k}Y", R(X(i), y, X(j)), t * (1 - t) * jyk)
            add(f"R(Y,J{i}Y)X{j} = 2(1-tau) X{k}", R(y, jyi, X(j)), 2 * (1 - t) * X(k))
            add(f"R(X{i},X{j})X{k} = 0", R(X(i), X(j), X(k)), zero)
            add(f"R(Y,J{i}Y)J{j}Y = 0", R(y, jyi, jyj), zero)
        return out

    y = Y(1)
    for i in range(1, m + 1):
        jy = JY(i, 1)
        add(f"D_Y1 X{i} = 2tau J{i}Y1", D(y, X(i)), 2 * t * jy)
        add(f"D_X{i} Y1 = (2tau-1) J{i}Y1", D(X(i), y), (2 * t - 1) * jy)
        add(f"D_Y1 J{i}Y1 = -X{i}/2", D(y, jy), -X(i) / 2)
        add(f"R(X{i},Y1)Y1 = tau X{i}", R(X(i), y, y), t * X(i))
        add(f"R(X{i},Y1)X{i} = -4tau^2 Y1", R(X(i), y, X(i)), -4 * t * t * y)
        add(f"R(Y1,J{i}Y1)Y1 = (-4+3tau) J{i}Y1", R(y, jy, y), (-4 + 3 * t) * jy)
        add(f"R(Y1,J{i}Y1)J{i}Y1 = (4-3tau) Y1", R(y, jy, jy), (4 - 3 * t) * y)
        add(f"R(X{i},Y1)J{i}Y1 = 0", R(X(i), y, jy), zero)
        add(f"R(Y1,J{i}Y1)X{i} = 0", R(y, jy, X(i)), zero)
    for line in derive_fano_table(pres):
        for i, j, k in _cyclic(line):
            jyi, jyj, jyk = JY(i, 1), JY(j, 1), JY(k, 1)
            add(f"D_J{i}Y1 J{j}Y1 = -X{k}/2", D(jyi, jyj), -X(k) / 2)
            add(f"R(X{i},X{j})Y1 = 8(tau-tau^2) J{k}Y1", R(X(i), X(j), y), 8 * (t - t * t) * jyk)
            add(f"R(X{i},X{j})X{i} = -4X{j}", R(X(i), X(j), X(i)), -4 * X(j))
            add(f"R(X{i},Y1)X{j} = 4(tau-tau^2) J{k}Y1", R(X(i), y, X(j)), 4 * (t - t * t) * jyk)
            add(f"R(X{i},Y1)J{j}Y1 = (1-tau) X{k}", R(X(i), y, jyj), (1 - t) * X(k))
            add(f"R(Y1,J{i}Y1)X{j} = 2(1-tau) X{k}", R(y, jyi, X(j)), 2 * (1 - t) * X(k))
            add(f"R(X{i},X{j})X{k} = 0", R(X(i), X(j), X(k)), zero)
            add(f"R(Y1,J{i}Y1)J{j}Y1 = 0", R(y, jyi, jyj), zero)
    return out
