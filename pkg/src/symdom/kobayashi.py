"""Kobayashi distances, the boundary-distance lower bound, and the coordinate
frame-norm bound ``|d/dz_j| <= C / delta``.

The disk distance is normalized as ``d(0, z) = log((1 + |z|) / (1 - |z|))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .automorphisms import transvection
from .domains import DomainError, DomainSpec, boundary_distance, contains, spectral_values, split
from .metrics import ke_metric

__all__ = [
    "BoundCheck",
    "disk_distance",
    "domain_distance_from_origin",
    "distance",
    "exact_kind",
    "boundary_bound_check",
    "frame_norm",
    "frame_norm_bound_check",
    "calibrate_frame_constant",
    "ray_points",
]

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    ok: bool


def _log_ratio(s):
    """``log((1 + s) / (1 - s))`` without cancellation."""
    s = np.asarray(s, dtype=float)
    return np.log1p(s) - np.log1p(-s)


def disk_distance(z1: complex, z2: complex) -> float:
    z1, z2 = complex(z1), complex(z2)
    if abs(z1) >= 1 or abs(z2) >= 1:
        raise DomainError("both points must lie in the unit disk")
    s = abs((z2 - z1) / (1.0 - np.conj(z1) * z2))
    return float(_log_ratio(min(s, 1.0)))


def exact_kind(d: DomainSpec) -> bool:
    """True for type I, polydisks and their products, where the max formula is exact."""
    if d.kind in ("I", "polydisk"):
        return True
    if d.kind == "product":
        return all(exact_kind(f) for f in d.factors)
    return False


def domain_distance_from_origin(d: DomainSpec, z, allow_bound: bool = False) -> float:
    """``d(0, z)`` as the max of ``log((1+s)/(1-s))`` over the polydisk coordinates ``s`` of ``z``.

    Exact for type I, polydisks and products of these.  Other kinds raise
    unless ``allow_bound=True``, in which case the same polydisk value is
    returned as a lower bound.
    """
    if not exact_kind(d) and not allow_bound:
        raise DomainError(f"only a polydisk lower bound is available for {d}; pass allow_bound=True")
    z = np.asarray(z, dtype=complex).ravel()
    if not contains(d, z):
        raise DomainError(f"point is not inside {d}")
    s = max(float(np.max(spectral_values(f, zf), initial=0.0)) for f, zf in split(d, z))
    return float(_log_ratio(s))


def distance(d: DomainSpec, z1, z2, allow_bound: bool = False) -> float:
    """Two-point distance ``d(z1, z2) = d(0, Phi_{z1}(z2))``."""
    t = transvection(d, z1)
    return domain_distance_from_origin(d, t(np.asarray(z2, dtype=complex)), allow_bound)


def boundary_bound_check(d: DomainSpec, z) -> BoundCheck:
    """Compare ``d(0, z)`` with ``-log delta(z)``."""
    if not exact_kind(d):
        raise DomainError(f"the boundary bound check needs an exact distance and boundary distance; {d} is not supported")
    lhs = domain_distance_from_origin(d, z)
    rhs = float(-np.log(boundary_distance(d, z)))
    return BoundCheck(lhs, rhs, lhs >= rhs - BOUND_SLACK)


def frame_norm(d: DomainSpec, z) -> float:
    """``max_j |d/dz_j|`` in the KE metric at ``z``."""
    g = ke_metric(d, z, allow_near_boundary=True).g
    return float(np.sqrt(np.max(np.diag(g).real)))


def _ray_directions(d: DomainSpec, n_random: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    dirs = list(np.eye(d.dim, dtype=complex))
    for _ in range(n_random):
        dirs.append(rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim))
    out = []
    for u in dirs:
        reach = max(float(np.max(spectral_values(f, uf))) for f, uf in split(d, u))
        out.append(u / reach)  # t * u reaches the boundary at t = 1
    return out


def ray_points(d: DomainSpec, deltas: Sequence[float], n_random: int = 4, seed: int = 0) -> np.ndarray:
    """Points ``(1 - delta) u`` on rays whose boundary crossing is at ``t = 1``."""
    dirs = _ray_directions(d, n_random, seed)
    return np.array([(1.0 - dl) * u for u in dirs for dl in deltas])


@lru_cache(maxsize=None)
def calibrate_frame_constant(d: DomainSpec, n_deltas: int = 12) -> float:
    """``1.05`` times the largest ``frame_norm * delta`` over a coarse ray grid."""
    deltas = np.linspace(1.0, 1e-2, n_deltas)
    best = max(frame_norm(d, z) * boundary_distance(d, z) for z in ray_points(d, deltas))
    return 1.05 * best


def frame_norm_bound_check(d: DomainSpec, z, C: float | None = None) -> BoundCheck:
    """``lhs = max_j |d/dz_j|``, ``rhs = C / delta(z)``; ok when ``lhs <= rhs``."""
    delta = boundary_distance(d, z)
    if delta < 1e-4:
        raise DomainError("frame-norm checks need boundary distance >= 1e-4")
    C = calibrate_frame_constant(d) if C is None else C
    lhs = frame_norm(d, z)
    rhs = C / delta
    return BoundCheck(lhs, rhs, lhs <= rhs)
