"""Holomorphic curves into a domain: pullback metric, Gaussian curvature,
second fundamental form by the Gauss equation, and boundary asymptotics.

Any object with ``domain``, ``__call__(w)`` and ``derivative(w)`` (both
vectorized over complex ``w``, returning ``(..., N)``) can be used as a curve;
:class:`CurveSpec` is the polynomial model read from JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Protocol, Sequence

import numpy as np

from ._numdiff import ddbar_circle
from .domains import DomainError, DomainSpec, TangentVector, boundary_distance, contains, log_generic_norm, split
from .metrics import holomorphic_sectional_curvature, metric_quadratic
from .normal_forms import NormalForm, normal_form

__all__ = [
    "Curve",
    "CurveSpec",
    "CurveProfileRow",
    "VanishingFit",
    "CurvatureFit",
    "pullback_coefficient",
    "gaussian_curvature",
    "ambient_curvature",
    "second_fundamental_norm2",
    "vanishing_order",
    "asymptotic_curvature_fit",
    "tangent_rank_profile",
    "profile",
    "general_boundary_points",
    "PROFILE_HEADER",
    "DEFAULT_RADII",
]

DEFAULT_RADII = 1.0 - np.logspace(-1, -3, 9)
PROFILE_HEADER = ("w_re", "w_im", "delta", "lambda", "kappa", "sigma2", "rank")


class Curve(Protocol):
    domain: DomainSpec

    def __call__(self, w) -> np.ndarray: ...

    def derivative(self, w) -> np.ndarray: ...


def _pair(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


@dataclass(frozen=True)
class CurveSpec:
    """Polynomial curve ``mu(w) = sum_j coeffs[:, j] w^j`` into ``domain``.

    ``b0`` marks a boundary point the curve exits through; ``exceptional``
    lists boundary points known not to be general (excluded from sweeps).
    """

    domain: DomainSpec
    coeffs: np.ndarray  # (N, degree + 1), complex
    b0: complex = 1.0 + 0j
    valid_radius: float = 0.2
    exceptional: tuple[complex, ...] = field(default=())

    def __post_init__(self) -> None:
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if c.shape[0] != self.domain.dim:
            raise DomainError(f"{self.domain} has dimension {self.domain.dim}, got {c.shape[0]} coordinate polynomials")
        object.__setattr__(self, "coeffs", c)
        if not np.isclose(abs(self.b0), 1.0):
            raise ValueError("b0 must lie on the unit circle")

    @classmethod
    def from_coordinates(cls, domain: DomainSpec, polys: Sequence[Sequence[complex]], **kw) -> "CurveSpec":
        deg = max(len(p) for p in polys)
        c = np.zeros((len(polys), deg), dtype=complex)
        for i, p in enumerate(polys):
            c[i, : len(p)] = p
        return cls(domain, c, **kw)

    def __call__(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        powers = w[..., None] ** np.arange(self.coeffs.shape[1])
        return powers @ self.coeffs.T

    def derivative(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        j = np.arange(1, self.coeffs.shape[1])
        powers = w[..., None] ** (j - 1)
        return (powers * j) @ self.coeffs[:, 1:].T

    def check_exit(self, n: int = 16, margin: float = 1e-9) -> bool:
        """Sample the arc of the unit circle within ``valid_radius`` of ``b0``.

        Boundary samples must give ``h = 0`` within ``margin`` and the points
        ``0.99 b`` must lie inside the domain.
        """
        half = 2.0 * np.arcsin(min(self.valid_radius / 2.0, 1.0))
        ang = np.angle(self.b0) + np.linspace(-half, half, n)
        b = np.exp(1j * ang)
        h_edge = np.exp(log_generic_norm(self.domain, self(b)))
        on_edge = np.all(np.nan_to_num(h_edge, nan=0.0) <= margin)
        inside = all(contains(self.domain, self(0.99 * x)) for x in b)
        return bool(on_edge and inside)

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain.to_dict(),
            "coeffs": [[[c.real, c.imag] for c in row] for row in self.coeffs],
            "b0": [self.b0.real, self.b0.imag],
            "valid_radius": self.valid_radius,
            "exceptional": [[e.real, e.imag] for e in self.exceptional],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CurveSpec":
        allowed = {"domain", "coeffs", "b0", "valid_radius", "exceptional"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown curve fields: {sorted(extra)}")
        if "domain" not in data or "coeffs" not in data:
            raise ValueError("a curve needs 'domain' and 'coeffs'")
        domain = DomainSpec.from_dict(data["domain"])
        polys = [[_pair(c) for c in row] for row in data["coeffs"]]
        return cls.from_coordinates(
            domain,
            polys,
            b0=_pair(data.get("b0", [1.0, 0.0])),
            valid_radius=float(data.get("valid_radius", 0.2)),
            exceptional=tuple(_pair(e) for e in data.get("exceptional", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CurveSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CurveProfileRow:
    w: complex
    delta: float
    lam: float
    kappa: float
    sigma2: float
    rank: int
    normal_form: NormalForm

    def as_row(self) -> tuple:
        return (self.w.real, self.w.imag, self.delta, self.lam, self.kappa, self.sigma2, self.rank)


@dataclass(frozen=True)
class VanishingFit:
    m: int
    slope: float
    residual: float
    clean: bool  # |slope - m| <= 0.1


@dataclass(frozen=True)
class CurvatureFit:
    m: int
    C: float
    ratios: np.ndarray  # (kappa + 2/m) / delta^2 per radius
    deltas: np.ndarray
    stable: bool


def pullback_coefficient(c: Curve, w, which: str = "KE") -> np.ndarray | float:
    """``lambda(w) = g(mu'(w), mu'(w))``, vectorized over ``w``."""
    w = np.asarray(w, dtype=complex)
    lam = metric_quadratic(c.domain, c(w), c.derivative(w), which=which)
    return float(lam) if lam.ndim == 0 else lam


def gaussian_curvature(c: Curve, w: complex, radius: float | None = None, which: str = "KE") -> float:
    """``kappa = -lambda^-1 d dbar log lambda`` at ``w``.

    The Laplacian is taken from circle means of ``log lambda`` on radii up to
    ``radius`` (default ``delta(w) / 10``).
    """
    w = complex(w)
    if radius is None:
        delta = 1.0 - abs(w)
        if delta <= 0:
            raise DomainError(f"w = {w} is not inside the unit disk")
        radius = delta / 10.0
    lam = pullback_coefficient(c, w, which)
    if not lam > 0:
        raise DomainError(f"pullback metric is not positive at w = {w} (mu' vanishes or the point left the domain)")
    lap = ddbar_circle(lambda x: np.log(pullback_coefficient(c, x, which)), w, radius)
    return float(-lap / lam)


def ambient_curvature(c: Curve, w: complex) -> float:
    """Holomorphic sectional curvature of the domain along ``mu'(w)``."""
    w = complex(w)
    return holomorphic_sectional_curvature(c.domain, c(w), c.derivative(w), allow_near_boundary=True)


def second_fundamental_norm2(c: Curve, w: complex, radius: float | None = None) -> float:
    """``|sigma|^2 = R(eta, eta, eta, eta) - kappa`` for the unit tangent ``eta``."""
    return ambient_curvature(c, w) - gaussian_curvature(c, w, radius)


def _log_q(d: DomainSpec, z: np.ndarray, which: str) -> np.ndarray:
    if which == "generic":
        return log_generic_norm(d, z)
    if which == "bergman":
        total = 0.0
        for f, zf in split(d, z):
            total = total + f.genus * log_generic_norm(f, zf)
        return total
    raise ValueError(f"unknown kernel {which!r}")


def vanishing_order(c: Curve, b: complex, radii: Sequence[float], which: str = "generic") -> VanishingFit:
    """Order to which ``h(mu(w))`` (or ``Q`` for ``which="bergman"``) vanishes at ``b``.

    Least-squares slope of ``log h(mu(t b))`` against ``log(1 - t^2)``; the
    smooth positive factor left over is absorbed by a constant plus a term
    linear in ``1 - t``.
    """
    t = np.asarray(radii, dtype=float)
    if t.size < 2 or np.any((t <= 0) | (t >= 1)):
        raise ValueError("radii must be at least two values in (0, 1)")
    y = _log_q(c.domain, c(t * complex(b)), which)
    if np.any(~np.isfinite(y)):
        raise DomainError("the curve leaves the domain along the sampled ray")
    x = np.log1p(-(t**2))
    cols = [x, np.ones_like(x), 1.0 - t] if t.size >= 4 else [x, np.ones_like(x)]
    A = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = float(coef[0])
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    m = int(round(slope))
    return VanishingFit(m, slope, resid, abs(slope - m) <= 0.1 and m > 0)


def asymptotic_curvature_fit(c: Curve, b: complex, radii: Sequence[float]) -> CurvatureFit:
    """Fit ``|kappa(t b) + 2/m| <= C delta^2`` with ``m`` the vanishing order at ``b``.

    ``C`` is the largest ratio ``|kappa + 2/m| / delta^2`` over the outer half
    of the radii (larger ``delta``).  The fit is stable when that bound still
    holds on the inner half, i.e. the ratio stays bounded toward the boundary.
    """
    t = np.sort(np.asarray(radii, dtype=float))
    if t.size < 2:
        raise ValueError("need at least two radii")
    m = vanishing_order(c, b, t).m
    if m <= 0:
        raise DomainError(f"the curve does not exit the boundary at b = {b}")
    deltas = 1.0 - t
    kap = np.array([gaussian_curvature(c, x * complex(b)) for x in t])
    ratios = (kap + 2.0 / m) / deltas**2
    half = t.size // 2
    C = float(np.max(np.abs(ratios[:half])))
    stable = bool(np.all(np.abs(ratios[half:]) <= max(C, 1e-9 / deltas[-1] ** 2) * (1.0 + 1e-6)))
    return CurvatureFit(m, C, ratios, deltas, stable)


def _unit_tangent(c: Curve, w: complex) -> TangentVector:
    z = c(w)
    v = c.derivative(w)
    nrm = np.sqrt(metric_quadratic(c.domain, z, v))
    return TangentVector(z, v / nrm)


def tangent_rank_profile(c: Curve, samples: Sequence[complex], tol: float = 1e-7) -> list[tuple[complex, NormalForm]]:
    """Normal forms of the unit tangents ``mu'(w) / |mu'(w)|`` at the samples."""
    return [(complex(w), normal_form(c.domain, _unit_tangent(c, complex(w)), tol)) for w in samples]


def profile(c: Curve, samples: Sequence[complex]) -> list[CurveProfileRow]:
    rows = []
    for w in samples:
        w = complex(w)
        lam = pullback_coefficient(c, w)
        kap = gaussian_curvature(c, w)
        sig = ambient_curvature(c, w) - kap
        nf = normal_form(c.domain, _unit_tangent(c, w))
        rows.append(CurveProfileRow(w, 1.0 - abs(w), lam, kap, sig, nf.rank, nf))
    return rows


def general_boundary_points(c: CurveSpec, count: int = 8, tol: float = 1e-9) -> list[complex]:
    """``count``-th roots of unity, skipping the curve's declared exceptional points."""
    pts = np.exp(2j * np.pi * np.arange(count) / count)
    return [complex(b) for b in pts if all(abs(b - e) > tol for e in c.exceptional)]


def image_boundary_distance(c: Curve, w: complex) -> float:
    return boundary_distance(c.domain, c(complex(w)))
