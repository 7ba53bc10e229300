"""Automorphisms: disk Moebius maps and transvections moving a point to the origin."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._numdiff import holomorphic_derivative
from .domains import DomainError, DomainSpec, boundary_distance, contains, from_matrix, split, to_matrix

__all__ = [
    "DiskMobius",
    "disk_mobius",
    "Transvection",
    "transvection",
    "pullback_isometry_defect",
    "hermitian_power",
]


def hermitian_power(a: np.ndarray, power: float) -> np.ndarray:
    """``a**power`` for a Hermitian positive definite matrix, via its eigen-decomposition."""
    w, u = np.linalg.eigh(a)
    if np.any(w <= 0):
        raise DomainError("matrix is not positive definite (point on or outside the boundary)")
    return (u * w**power) @ u.conj().T


@dataclass(frozen=True)
class DiskMobius:
    """The disk automorphism ``zeta -> (zeta + w0) / (1 + conj(w0) zeta)``."""

    w0: complex

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return (zeta + self.w0) / (1.0 + np.conj(self.w0) * zeta)

    def derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return (1.0 - abs(self.w0) ** 2) / (1.0 + np.conj(self.w0) * zeta) ** 2

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        return (w - self.w0) / (1.0 - np.conj(self.w0) * w)


def disk_mobius(w0: complex) -> DiskMobius:
    w0 = complex(w0)
    if not abs(w0) < 1.0:
        raise DomainError(f"Moebius center must lie in the unit disk, got {w0}")
    return DiskMobius(w0)


# type IV Jordan triple data: {x y z} = 2[(x|y) z + (z|y) x - (x.z) conj(y)]


def _spin_d(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    yc = np.conj(y)
    return 2.0 * (np.dot(x, yc) * np.eye(n) + np.outer(x, yc) - np.outer(yc, x))


def _spin_m(x: np.ndarray) -> np.ndarray:
    # Q(x) w = M_x conj(w)
    return 2.0 * np.outer(x, x) - np.dot(x, x) * np.eye(x.shape[0])


def _spin_bergman(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.eye(x.shape[0]) - _spin_d(x, y) + _spin_m(x) @ np.conj(_spin_m(y))


@dataclass(frozen=True)
class _FactorMap:
    domain: DomainSpec
    center: np.ndarray
    left: np.ndarray  # I-III: (I - Z0 Z0*)^(-1/2); IV: B(z0, z0)^(1/2)
    right: np.ndarray  # I-III: (I - Z0* Z0)^(1/2)

    def apply(self, z: np.ndarray) -> np.ndarray:
        f = self.domain
        if f.kind == "IV":
            z0 = self.center
            quasi = np.linalg.solve(_spin_bergman(z, z0), z - _spin_m(z) @ np.conj(z0))
            return -z0 + self.left @ quasi
        Z = to_matrix(f, z)
        Z0 = to_matrix(f, self.center)
        inner = np.eye(Z.shape[1]) - Z0.conj().T @ Z
        W = self.left @ np.linalg.solve(inner.T, (Z - Z0).T).T @ self.right
        return from_matrix(f, W)

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        f = self.domain
        if f.kind == "IV":
            radius = 0.05 * max(boundary_distance(f, z), 1e-12)
            cols = [holomorphic_derivative(self.apply, z, e, radius) for e in np.eye(f.dim)]
            return np.array(cols).T
        Z = to_matrix(f, z)
        Z0 = to_matrix(f, self.center)
        inv = np.linalg.inv(np.eye(Z.shape[1]) - Z0.conj().T @ Z)
        pre = self.left @ (np.eye(Z.shape[0]) + (Z - Z0) @ inv @ Z0.conj().T)
        post = inv @ self.right
        basis = to_matrix(f, np.eye(f.dim, dtype=complex))
        return from_matrix(f, pre @ basis @ post).T


def _factor_map(f: DomainSpec, z0: np.ndarray) -> _FactorMap:
    if f.kind == "IV":
        left = hermitian_power(_spin_bergman(z0, z0), 0.5)
        return _FactorMap(f, z0, left, np.eye(1))
    Z0 = to_matrix(f, z0)
    p, q = Z0.shape
    left = hermitian_power(np.eye(p) - Z0 @ Z0.conj().T, -0.5)
    right = hermitian_power(np.eye(q) - Z0.conj().T @ Z0, 0.5)
    return _FactorMap(f, z0.copy(), left, right)


@dataclass(frozen=True)
class Transvection:
    """Holomorphic isometry of ``domain`` sending ``center`` to the origin.

    For types I-III this is
    ``Z -> (I - Z0 Z0*)^(-1/2) (Z - Z0) (I - Z0* Z)^(-1) (I - Z0* Z0)^(1/2)``;
    for type IV the Jordan-triple Moebius map ``z -> -z0 + B(z0,z0)^(1/2) z^(z0)``
    (``z^(z0)`` the quasi-inverse); products act factor-wise.
    """

    domain: DomainSpec
    center: np.ndarray
    _maps: tuple[_FactorMap, ...] = field(repr=False, default=())

    def apply(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.empty(self.domain.dim, dtype=complex)
        for m, (f, sl) in zip(self._maps, self.domain.factor_slices()):
            out[sl] = m.apply(z[sl])
        return out

    __call__ = apply

    def jacobian(self, z) -> np.ndarray:
        """Complex Jacobian ``dT_z`` in packed coordinates (``N x N``)."""
        z = np.asarray(z, dtype=complex)
        n = self.domain.dim
        jac = np.zeros((n, n), dtype=complex)
        for m, (f, sl) in zip(self._maps, self.domain.factor_slices()):
            jac[sl, sl] = m.jacobian(z[sl])
        return jac

    def differential(self, z, v) -> np.ndarray:
        return self.jacobian(z) @ np.asarray(v, dtype=complex)


def transvection(d: DomainSpec, z0) -> Transvection:
    z0 = np.asarray(z0, dtype=complex).ravel()
    if z0.shape[0] != d.dim:
        raise DomainError(f"{d} has dimension {d.dim}, got {z0.shape[0]}")
    if not contains(d, z0):
        raise DomainError(f"transvection center is not inside {d}")
    maps = tuple(_factor_map(f, zf) for f, zf in split(d, z0))
    return Transvection(d, z0.copy(), maps)


def pullback_isometry_defect(d: DomainSpec, T: Transvection, z) -> float:
    """Frobenius norm of ``(dT_z)^* g(T(z)) dT_z - g(z)`` for the KE metric."""
    from .metrics import ke_metric

    z = np.asarray(z, dtype=complex)
    jac = T.jacobian(z)
    g_img = ke_metric(d, T.apply(z), allow_near_boundary=True).g
    g_src = ke_metric(d, z, allow_near_boundary=True).g
    # g(u, v) = u^t G conj(v)
    pulled = jac.T @ g_img @ np.conj(jac)
    return float(np.linalg.norm(pulled - g_src))
