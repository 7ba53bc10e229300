"""Normal forms of tangent vectors, the curvature form H_eta and its null space,
and the subspaces W and V attached to a tangent vector.

Everything is computed at the origin; vectors at another base point are first
carried there by the differential of the transvection, and subspaces are
carried back by its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .automorphisms import transvection
from .domains import DomainError, DomainSpec, TangentVector, from_matrix, spectral_values, split, to_matrix
from .metrics import curvature_origin, ke_metric

__all__ = [
    "RANK_TOL",
    "NormalForm",
    "HEtaForm",
    "Subspace",
    "takagi",
    "normal_form",
    "vector_rank",
    "normal_form_vector",
    "h_eta",
    "null_space",
    "w_space",
    "v_space",
    "coordinate_block",
    "characteristic_subdomain",
    "subspace_angle",
]

RANK_TOL = 1e-7
NULL_TOL = 1e-7


@dataclass(frozen=True)
class NormalForm:
    values: tuple[float, ...]
    rank: int
    generic: bool = False
    ambiguous: bool = False  # some value/norm lies in [tol, 10 tol]


@dataclass(frozen=True)
class HEtaForm:
    """``H[i, j] = R(eta, eta, e_i, e_j)`` with its spectrum relative to the metric.

    ``eigenvectors`` has g-orthonormal columns (``v^t G conj(v) = 1``).
    """

    eta: TangentVector
    matrix: np.ndarray
    metric: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray  # N x d, orthonormal columns
    ambiguous: bool = False

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=complex)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        resid = v - self.basis @ (self.basis.conj().T @ v)
        return bool(np.linalg.norm(resid) <= tol * nv)


def _orthonormal(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the columns of ``vectors``."""
    n = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((n, 0), dtype=complex)
    return u[:, s > tol * s[0]]


def subspace_angle(a: Subspace, b: Subspace) -> float:
    """Largest principal angle between two subspaces (``pi/2`` if dimensions differ)."""
    if a.dim != b.dim:
        return float(np.pi / 2)
    if a.dim == 0:
        return 0.0
    return float(np.max(linalg.subspace_angles(a.basis, b.basis)))


def takagi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization ``a = U diag(s) U^t`` of a complex symmetric matrix.

    Uses the real symmetric embedding ``[[Re a, Im a], [Im a, -Re a]]``, whose
    eigenvectors ``(x, y)`` for eigenvalue ``s > 0`` give ``a conj(w) = s w``
    with ``w = x + iy``.  Columns for zero values span the complement.
    """
    a = np.asarray(a, dtype=complex)
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("takagi needs a symmetric matrix")
    n = a.shape[0]
    emb = np.block([[a.real, a.imag], [a.imag, -a.real]])
    w, vec = np.linalg.eigh(emb)
    order = np.argsort(w)[::-1][:n]
    s = np.maximum(w[order], 0.0)
    u = vec[:n, order] + 1j * vec[n:, order]
    pos = s > 1e-13 * max(s[0], 1.0) if n else s > 0
    keep = u[:, pos] / np.linalg.norm(u[:, pos], axis=0)
    if keep.shape[1] < n:
        # kernel directions: any orthonormal completion works
        q, _ = np.linalg.qr(np.hstack([keep, np.eye(n)]))
        keep = np.hstack([keep, q[:, keep.shape[1] : n]])
        s = np.concatenate([s[pos], np.zeros(n - int(pos.sum()))])
    u = keep
    return s, u


def _to_origin(d: DomainSpec, v) -> tuple[np.ndarray, np.ndarray | None]:
    """Direction at the origin and the transport Jacobian (``None`` at the origin)."""
    if isinstance(v, TangentVector):
        base, direction = np.asarray(v.base, dtype=complex), np.asarray(v.dir, dtype=complex)
    else:
        base, direction = np.zeros(d.dim, dtype=complex), np.asarray(v, dtype=complex).ravel()
    if direction.shape[0] != d.dim:
        raise DomainError(f"{d} has dimension {d.dim}, got a vector of length {direction.shape[0]}")
    if not np.any(base):
        return direction, None
    jac = transvection(d, base).jacobian(base)
    return jac @ direction, jac


def _as_tangent(d: DomainSpec, v) -> TangentVector:
    if isinstance(v, TangentVector):
        return v
    return TangentVector.at_origin(d, v)


def normal_form(d: DomainSpec, v, tol: float = RANK_TOL) -> NormalForm:
    """Normal form ``(eta_1 >= ... >= eta_r >= 0)`` and rank of a tangent vector.

    Values are singular values (type I), Takagi values (type III), paired
    antisymmetric values (type II), the two Lie-ball invariants (type IV) and
    moduli (disk factors), concatenated over factors and sorted.  They satisfy
    ``sum eta_j^2 = g(v, v)``.  The rank threshold ``tol`` is applied to the
    values divided by the length of the vector.
    """
    v0, _ = _to_origin(d, v)
    vals = []
    for f, vf in split(d, v0):
        if f.kind == "III":
            vals.append(takagi(to_matrix(f, vf))[0])
        else:
            vals.append(np.atleast_1d(spectral_values(f, vf)))
    values = np.sort(np.concatenate(vals))[::-1]
    total = float(np.sqrt(np.sum(values**2)))
    if total == 0:
        return NormalForm(tuple(0.0 for _ in values), 0)
    rel = values / total
    rank = int(np.sum(rel > tol))
    ambiguous = bool(np.any((rel >= tol) & (rel <= 10 * tol)))
    return NormalForm(tuple(float(x) for x in values), rank, rank == d.rank, ambiguous)


def vector_rank(d: DomainSpec, v, tol: float = RANK_TOL) -> int:
    return normal_form(d, v, tol).rank


def normal_form_vector(d: DomainSpec, values: Sequence[float]) -> np.ndarray:
    """A representative vector at the origin with the given normal-form values.

    Values are assigned to factors in order, ``rank(factor)`` at a time.
    """
    values = list(values)
    if len(values) != d.rank:
        raise DomainError(f"{d} has rank {d.rank}, got {len(values)} values")
    out = np.zeros(d.dim, dtype=complex)
    pos = 0
    for f, sl in d.factor_slices():
        a = values[pos : pos + f.rank]
        pos += f.rank
        if f.kind == "IV":
            vf = np.zeros(f.dim, dtype=complex)
            vf[0] = (a[0] + a[1]) / 2.0
            vf[1] = 1j * (a[0] - a[1]) / 2.0
        elif f.kind == "II":
            m = np.zeros((f.n, f.n), dtype=complex)
            for j, x in enumerate(a):
                m[2 * j, 2 * j + 1] = x
                m[2 * j + 1, 2 * j] = -x
            vf = from_matrix(f, m)
        else:
            m = np.zeros(to_matrix(f, np.zeros(f.dim)).shape, dtype=complex)
            for j, x in enumerate(a):
                m[j, j] = x
            vf = from_matrix(f, m)
        out[sl] = vf
    return out


def _metric0(d: DomainSpec) -> np.ndarray:
    return ke_metric(d, np.zeros(d.dim)).g


def _h_matrix0(d: DomainSpec, eta0: np.ndarray) -> np.ndarray:
    n = d.dim
    e = np.eye(n, dtype=complex)
    ee = np.broadcast_to(eta0, (n, n, n))
    return np.asarray(curvature_origin(d, ee, ee, e[:, None, :], e[None, :, :]))


def h_eta(d: DomainSpec, eta, normalize: bool = True) -> HEtaForm:
    """The Hermitian form ``alpha -> R(eta, eta, alpha, alpha)`` and its g-spectrum.

    ``eta`` is scaled to g-unit length unless ``normalize=False``.
    Eigenvalues are sorted ascending.
    """
    tv = _as_tangent(d, eta)
    eta0, jac = _to_origin(d, tv)
    g0 = _metric0(d)
    if normalize:
        nrm = np.sqrt(max((eta0 @ g0 @ np.conj(eta0)).real, 0.0))
        if nrm > 0:
            eta0 = eta0 / nrm
    H = _h_matrix0(d, eta0)
    G = g0
    if jac is not None:
        H = jac.T @ H @ np.conj(jac)
        G = jac.T @ g0 @ np.conj(jac)
    H = 0.5 * (H + H.conj().T)
    # H(a, a) = a^t H conj(a) = a^* H^t a
    w, vec = linalg.eigh(H.T, G.T)
    return HEtaForm(tv, H, G, w, vec)


def _from_origin(vectors0: np.ndarray, jac: np.ndarray | None) -> np.ndarray:
    if jac is None:
        return vectors0
    return np.linalg.solve(jac, vectors0)


def _null0(d: DomainSpec, eta0: np.ndarray, tol: float) -> tuple[np.ndarray, bool]:
    g0 = _metric0(d)
    nrm = np.sqrt(max((eta0 @ g0 @ np.conj(eta0)).real, 0.0))
    if nrm == 0:
        raise DomainError("the null space is defined for a nonzero vector")
    H = _h_matrix0(d, eta0 / nrm)
    H = 0.5 * (H + H.conj().T)
    w, vec = linalg.eigh(H.T, g0.T)
    small = np.abs(w) < tol
    ambiguous = bool(np.any((np.abs(w) >= tol / 10) & (np.abs(w) <= 10 * tol)))
    return vec[:, small], ambiguous


def null_space(d: DomainSpec, eta, tol: float = NULL_TOL) -> Subspace:
    """Null space of ``H_eta`` (eigenvalues below ``tol`` for unit ``eta``)."""
    eta0, jac = _to_origin(d, eta)
    vec, amb = _null0(d, eta0, tol)
    return Subspace(_orthonormal(_from_origin(vec, jac)), amb)


def w_space(d: DomainSpec, eta, tol: float = NULL_TOL) -> Subspace:
    """``{v : R(v, z, a, b) = 0 for all z in N_eta and all a, b}``.

    Computed as the kernel of the stacked linear system over coordinate
    vectors ``a, b`` and a basis of ``N_eta``; a trivial null space gives the
    whole tangent space.
    """
    eta0, jac = _to_origin(d, eta)
    null, amb = _null0(d, eta0, tol)
    n = d.dim
    if null.shape[1] == 0:
        return Subspace(np.eye(n, dtype=complex), amb)
    e = np.eye(n, dtype=complex)
    m = null.shape[1]
    # rows indexed by (zeta, a, b); columns by the coordinate of v
    shape = (n, m, n, n)
    vi = np.broadcast_to(e[:, None, None, None, :], shape + (n,))
    zj = np.broadcast_to(null.T[None, :, None, None, :], shape + (n,))
    aa = np.broadcast_to(e[None, None, :, None, :], shape + (n,))
    bb = np.broadcast_to(e[None, None, None, :, :], shape + (n,))
    coef = np.asarray(curvature_origin(d, vi, zj, aa, bb)).reshape(n, -1).T
    _, s, vh = np.linalg.svd(coef)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > tol * scale))
    amb = amb or bool(np.any((s >= tol * scale / 10) & (s <= 10 * tol * scale)))
    kernel = vh[rank:].conj().T
    return Subspace(_orthonormal(_from_origin(kernel, jac)), amb)


def v_space(d: DomainSpec, eta, method: str = "curvature") -> Subspace:
    """Span of the vectors ``R(eta, e_j) eta`` over coordinate vectors ``e_j``.

    The vector ``R(eta, e_j) eta`` is defined by ``g(R(eta, e_j) eta, e_i) =
    R(eta, e_j, eta, e_i)``.  ``method="matrix"`` instead spans the matrices
    ``eta B eta`` with ``B`` running over conjugate-transposed coordinate
    matrices (types I-III only); the two agree up to the constant factor.
    """
    eta0, jac = _to_origin(d, eta)
    if not np.any(eta0):
        raise DomainError("V is defined for a nonzero vector")
    n = d.dim
    e = np.eye(n, dtype=complex)
    if method == "curvature":
        ee = np.broadcast_to(eta0, (n, n, n))
        # r[j, i] = R(eta, e_j, eta, e_i)
        r = np.asarray(curvature_origin(d, ee, e[:, None, :], ee, e[None, :, :]))
        g0 = _metric0(d)
        vecs = np.linalg.solve(g0.T, r.T)  # columns v_j with v_j^t g0 = r[j]
    elif method == "matrix":
        vecs = np.zeros((n, n), dtype=complex)
        for f, sl in d.factor_slices():
            if f.kind == "IV":
                raise DomainError("the matrix form of V is only defined for types I-III")
            eta_m = to_matrix(f, eta0[sl])
            basis = to_matrix(f, e[sl][:, sl])
            imgs = eta_m[None] @ np.conj(np.swapaxes(basis, -1, -2)) @ eta_m[None]
            vecs[sl, sl] = from_matrix(f, imgs).T
    else:
        raise ValueError(f"unknown method {method!r}")
    return Subspace(_orthonormal(_from_origin(vecs, jac)))


def coordinate_block(d: DomainSpec, rows: int, cols: int | None = None) -> Subspace:
    """Span of the coordinate matrices supported in the upper-left ``rows x cols`` block.

    For types II/III the block is square and taken inside the (anti)symmetric
    model; type IV returns the span of the first ``rows`` coordinates.
    """
    if not d.irreducible:
        raise DomainError("coordinate blocks are defined for irreducible domains")
    cols = rows if cols is None else cols
    mats = to_matrix(d, np.eye(d.dim, dtype=complex))
    if d.kind == "IV":
        keep = np.arange(d.dim) < rows
    else:
        inside = np.zeros(mats.shape[1:], dtype=bool)
        inside[:rows, :cols] = True
        keep = np.array([np.all(np.abs(m[~inside]) == 0) for m in mats])
    return Subspace(np.eye(d.dim, dtype=complex)[:, keep])


def characteristic_subdomain(d: DomainSpec, k: int | Sequence[int]) -> DomainSpec:
    """Type of the characteristic subdomain for rank-``k`` vectors.

    For products pass one rank per irreducible factor (polydisks count as
    a product of disks, so ``Polydisk(r)`` also accepts a single ``k``).
    """
    if d.irreducible:
        if isinstance(k, (list, tuple)):
            raise DomainError("pass a single rank for an irreducible domain")
        k = int(k)
        if not 1 <= k <= d.rank:
            raise DomainError(f"rank {k} out of range 1..{d.rank} for {d}")
        if d.kind == "I":
            return DomainSpec.type_i(k, k)
        if d.kind == "II":
            return DomainSpec.type_ii(2 * k)
        if d.kind == "III":
            return DomainSpec.type_iii(k)
        return DomainSpec.disk() if k == 1 else d
    if d.kind == "polydisk" and not isinstance(k, (list, tuple)):
        k = int(k)
        if not 1 <= k <= d.r:
            raise DomainError(f"rank {k} out of range 1..{d.r} for {d}")
        return DomainSpec.disk() if k == 1 else DomainSpec.polydisk(k)
    ks = list(k) if isinstance(k, (list, tuple)) else [k]
    factors = d.factors if d.kind == "product" else tuple(DomainSpec.disk() for _ in range(d.r))
    if len(ks) != len(factors):
        raise DomainError(f"{d} needs one rank per factor ({len(factors)}), got {len(ks)}")
    subs = [characteristic_subdomain(f, kk) for f, kk in zip(factors, ks) if kk > 0]
    if not subs:
        raise DomainError("at least one factor rank must be positive")
    return subs[0] if len(subs) == 1 else DomainSpec.product(subs)
