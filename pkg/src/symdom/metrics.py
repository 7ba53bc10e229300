"""Kaehler-Einstein and Bergman metrics, Christoffel symbols and curvature.

Conventions: a metric sample stores the Hermitian matrix ``G`` with
``g(u, v) = u^t G conj(v)``.  The curvature tensor is
``R(a, b, c, d) = R_{a bbar c dbar} = -d_c dbar_d g(a, b) + g(Gamma(a, c), Gamma(b, d))``,
so minimal disks of every irreducible factor have holomorphic sectional
curvature -2 under the KE metric ``-d dbar log h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numdiff import wirtinger_mixed
from .automorphisms import transvection
from .domains import (
    DomainError,
    DomainSpec,
    basis_matrices,
    boundary_distance,
    contains,
    log_generic_norm,
    split,
    to_matrix,
)

__all__ = [
    "NEAR_BOUNDARY",
    "MetricSample",
    "CurvatureValue",
    "ke_metric",
    "bergman_metric",
    "curvature",
    "curvature_origin",
    "curvature_fd",
    "curvature_tensor_origin",
    "holomorphic_sectional_curvature",
    "christoffel",
    "metric_norm",
    "metric_quadratic",
]

NEAR_BOUNDARY = 1e-3
STEP_METRIC = 1e-3
STEP_CURVATURE = 3e-2
CURVATURE_LEVELS = 2
CHRISTOFFEL_BOUND = 1e8


@dataclass(frozen=True)
class MetricSample:
    base: np.ndarray
    g: np.ndarray
    which: str  # "KE" or "Bergman"

    def inner(self, u, v) -> complex:
        return complex(np.asarray(u) @ self.g @ np.conj(np.asarray(v)))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u).real, 0.0)))


@dataclass(frozen=True)
class CurvatureValue:
    value: complex
    method: str  # "closed" or "fd"
    fallback: bool = False


def _check_point(d: DomainSpec, z, allow_near_boundary: bool) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    if z.shape[0] != d.dim:
        raise DomainError(f"{d} has dimension {d.dim}, got {z.shape[0]}")
    if not contains(d, z):
        raise DomainError(f"point is not inside {d}")
    if not allow_near_boundary and boundary_distance(d, z) < NEAR_BOUNDARY:
        raise DomainError(
            f"point is within {NEAR_BOUNDARY} of the boundary; pass allow_near_boundary=True"
        )
    return z


def _factor_metric(f: DomainSpec, z: np.ndarray) -> np.ndarray:
    if f.kind == "IV":
        zc = np.conj(z)
        s = np.sum(z * z)
        h = 1.0 - 2.0 * np.vdot(z, z).real + abs(s) ** 2
        dh = -2.0 * zc + 2.0 * z * np.conj(s)  # d h / d z_i
        ddh = -2.0 * np.eye(f.dim) + 4.0 * np.outer(z, zc)
        return -ddh / h + np.outer(dh, np.conj(dh)) / h**2
    Z = to_matrix(f, z)
    a_inv = np.linalg.inv(np.eye(Z.shape[0]) - Z @ Z.conj().T)
    b_inv = np.linalg.inv(np.eye(Z.shape[1]) - Z.conj().T @ Z)
    E = basis_matrices(f)
    M = a_inv[None] @ E @ b_inv[None]
    g = np.einsum("iab,jab->ij", M, np.conj(E))
    return 0.5 * g if f.kind == "II" else g


def _neg_log_h(d: DomainSpec):
    return lambda pts: -log_generic_norm(d, pts)


def ke_metric(d: DomainSpec, z, method: str = "analytic", allow_near_boundary: bool = False) -> MetricSample:
    """The KE metric ``g = d dbar (-log h)`` at ``z``.

    ``method="analytic"`` uses the closed-form Hessians of ``-log h``;
    ``method="fd"`` takes Richardson-extrapolated central differences of
    ``-log h`` (step ``1e-3`` scaled by the boundary distance).
    """
    z = _check_point(d, z, allow_near_boundary)
    n = d.dim
    if method == "analytic":
        g = np.zeros((n, n), dtype=complex)
        for f, sl in d.factor_slices():
            g[sl, sl] = _factor_metric(f, z[sl])
    elif method == "fd":
        h = STEP_METRIC * min(1.0, boundary_distance(d, z))
        e = np.eye(n, dtype=complex)
        phi = _neg_log_h(d)
        g = np.array([[wirtinger_mixed(phi, z, [e[i]], [e[j]], h) for j in range(n)] for i in range(n)])
        g = 0.5 * (g + g.conj().T)
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.min(np.linalg.eigvalsh(g)) <= 0:
        raise DomainError("metric lost positive definiteness (step or conditioning failure)")
    return MetricSample(z, g, "KE")


def bergman_metric(d: DomainSpec, z, method: str = "analytic", allow_near_boundary: bool = False) -> MetricSample:
    """Bergman metric: each factor's KE block scaled by that factor's genus."""
    ke = ke_metric(d, z, method=method, allow_near_boundary=allow_near_boundary)
    g = ke.g.copy()
    for f, sl in d.factor_slices():
        g[sl, sl] *= f.genus
    return MetricSample(ke.base, g, "Bergman")


def metric_norm(d: DomainSpec, z, v, which: str = "KE") -> float:
    sample = (ke_metric if which == "KE" else bergman_metric)(d, z, allow_near_boundary=True)
    return sample.norm(v)


def _factor_quadratic(f: DomainSpec, z: np.ndarray, v: np.ndarray) -> np.ndarray:
    if f.kind == "IV":
        s = np.sum(z * z, axis=-1)
        h = 1.0 - 2.0 * np.sum(np.abs(z) ** 2, axis=-1) + np.abs(s) ** 2
        dh_v = np.sum((-2.0 * np.conj(z) + 2.0 * z * np.conj(s)[..., None]) * v, axis=-1)
        ddh_vv = -2.0 * np.sum(np.abs(v) ** 2, axis=-1) + 4.0 * np.abs(np.sum(z * v, axis=-1)) ** 2
        return -ddh_vv / h + np.abs(dh_v) ** 2 / h**2
    Z = to_matrix(f, z)
    V = to_matrix(f, v)
    H = lambda X: np.conj(np.swapaxes(X, -1, -2))  # noqa: E731
    eye_p = np.eye(Z.shape[-2])
    eye_q = np.eye(Z.shape[-1])
    left = np.linalg.solve(eye_p - Z @ H(Z), V)  # A^-1 V
    right = np.linalg.solve(eye_q - H(Z) @ Z, H(V))  # B^-1 V*
    val = np.trace(left @ right, axis1=-2, axis2=-1).real
    return 0.5 * val if f.kind == "II" else val


def metric_quadratic(d: DomainSpec, z, v, which: str = "KE") -> np.ndarray:
    """``g_z(v, v)`` batched over leading axes of ``z`` and ``v`` (no boundary checks)."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z, v = np.broadcast_arrays(z, v)
    total = np.zeros(z.shape[:-1])
    for f, sl in d.factor_slices():
        w = f.genus if which == "Bergman" else 1.0
        total = total + w * _factor_quadratic(f, z[..., sl], v[..., sl])
    return total


# curvature


def _factor_curvature0(f: DomainSpec, a, b, c, e):
    """Closed-form ``R(a, b, c, e)`` at the origin of an irreducible factor.

    Broadcasts over leading axes of the coordinate arrays.
    """
    if f.kind == "IV":
        dot = lambda x, y: np.sum(x * np.conj(y), axis=-1)  # noqa: E731
        bil = lambda x, y: np.sum(x * y, axis=-1)  # noqa: E731
        return -4.0 * (dot(a, b) * dot(c, e) + dot(a, e) * dot(c, b)) + 4.0 * bil(a, c) * np.conj(bil(b, e))
    A, B, C, D = (to_matrix(f, x) for x in (a, b, c, e))
    H = lambda X: np.conj(np.swapaxes(X, -1, -2))  # noqa: E731
    t1 = np.trace(A @ H(B) @ C @ H(D), axis1=-2, axis2=-1)
    t2 = np.trace(C @ H(B) @ A @ H(D), axis1=-2, axis2=-1)
    scale = 0.5 if f.kind == "II" else 1.0
    return -scale * (t1 + t2)


def curvature_origin(d: DomainSpec, a, b, c, e):
    """Closed-form curvature at the origin (sum over irreducible factors)."""
    vecs = [np.asarray(x, dtype=complex) for x in (a, b, c, e)]
    total = 0.0
    for f, sl in d.factor_slices():
        total = total + _factor_curvature0(f, *(x[..., sl] for x in vecs))
    return total


def curvature_tensor_origin(d: DomainSpec) -> np.ndarray:
    """Full array ``R[i, j, k, l] = R(e_i, e_j, e_k, e_l)`` at the origin (dim <= 16)."""
    n = d.dim
    if n > 16:
        raise DomainError("full curvature arrays are only built for dim <= 16; evaluate per quadruple")
    e = np.eye(n, dtype=complex)
    idx = np.indices((n, n, n, n)).reshape(4, -1)
    vals = curvature_origin(d, e[idx[0]], e[idx[1]], e[idx[2]], e[idx[3]])
    return np.asarray(vals).reshape(n, n, n, n)


def _unit(v):
    nv = np.linalg.norm(v)
    return (v / nv, nv) if nv > 0 else (v, 0.0)


def curvature_fd(d: DomainSpec, base, a, b, c, e, step: float = STEP_CURVATURE,
                 allow_near_boundary: bool = False) -> complex:
    """Curvature from finite differences of ``-log h`` only.

    At the origin this is the fourth mixed Wirtinger derivative of ``-log h``;
    elsewhere the connection term built from third derivatives is added.
    """
    base = _check_point(d, base, allow_near_boundary)
    (a, na), (b, nb), (c, nc), (e, ne) = (_unit(np.asarray(x, dtype=complex)) for x in (a, b, c, e))
    scale = na * nb * nc * ne
    if scale == 0:
        return 0j
    h = step * min(1.0, boundary_distance(d, base))
    phi = _neg_log_h(d)
    fourth = wirtinger_mixed(phi, base, [a, c], [b, e], h, CURVATURE_LEVELS)
    if np.allclose(base, 0):
        return complex(-fourth * scale)
    n = d.dim
    basis = np.eye(n, dtype=complex)
    G = np.array([[wirtinger_mixed(phi, base, [basis[i]], [basis[j]], h, CURVATURE_LEVELS) for j in range(n)] for i in range(n)])
    u_ac = np.array([wirtinger_mixed(phi, base, [a, c], [basis[q]], h, CURVATURE_LEVELS) for q in range(n)])
    u_bd = np.array([wirtinger_mixed(phi, base, [b, e], [basis[q]], h, CURVATURE_LEVELS) for q in range(n)])
    gam_ac = np.linalg.solve(G.T, u_ac)
    gam_bd = np.linalg.solve(G.T, u_bd)
    conn = gam_ac @ G @ np.conj(gam_bd)
    return complex((-fourth + conn) * scale)


def curvature(d: DomainSpec, base, a, b, c, e, method: str = "closed",
              allow_near_boundary: bool = False) -> CurvatureValue:
    """``R_{a bbar c ebar}`` of the KE metric at ``base``.

    The closed path transports all four vectors to the origin with the
    differential of the transvection at ``base`` and evaluates the closed form
    there; ``method="fd"`` uses :func:`curvature_fd` instead.
    """
    base = _check_point(d, base, allow_near_boundary)
    vecs = [np.asarray(x, dtype=complex).ravel() for x in (a, b, c, e)]
    for v in vecs:
        if v.shape[0] != d.dim:
            raise DomainError(f"{d} has dimension {d.dim}, got a vector of length {v.shape[0]}")
    if method == "fd":
        return CurvatureValue(curvature_fd(d, base, *vecs, allow_near_boundary=True), "fd")
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if np.any(base != 0):
        jac = transvection(d, base).jacobian(base)
        vecs = [jac @ v for v in vecs]
    return CurvatureValue(complex(curvature_origin(d, *vecs)), "closed")


def holomorphic_sectional_curvature(d: DomainSpec, base, v, allow_near_boundary: bool = False) -> float:
    """``R(v, v, v, v) / g(v, v)^2``."""
    r = curvature(d, base, v, v, v, v, allow_near_boundary=allow_near_boundary).value
    nv = ke_metric(d, base, allow_near_boundary=allow_near_boundary).inner(v, v).real
    return float(r.real / nv**2)


def christoffel(d: DomainSpec, z, allow_near_boundary: bool = False) -> np.ndarray:
    """``Gamma[k, i, j]`` with ``Gamma(e_i, e_j) = sum_k Gamma[k, i, j] e_k``.

    Obtained from central differences of the analytic metric:
    ``g(Gamma(e_i, e_j), e_q) = d_i g(e_j, e_q)``.
    """
    z = _check_point(d, z, allow_near_boundary)
    n = d.dim
    h = STEP_METRIC * min(1.0, boundary_distance(d, z))
    G = ke_metric(d, z, allow_near_boundary=True).g

    def metric_stack(pts):
        return np.array([ke_metric(d, p, allow_near_boundary=True).g for p in pts])

    basis = np.eye(n, dtype=complex)
    gam = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        dG = wirtinger_mixed(metric_stack, z, [basis[i]], [], h)  # dG[j, q] = d_i G_{j q}
        gam[:, i, :] = np.linalg.solve(G.T, dG.T)
    if np.max(np.abs(gam)) > CHRISTOFFEL_BOUND:
        raise DomainError("Christoffel symbols exceed the conditioning bound")
    return gam
