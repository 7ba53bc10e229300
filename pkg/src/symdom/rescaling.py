"""Rescaling a curve along a sequence tending to a boundary point.

Step ``k`` recenters the curve with a disk Moebius map ``phi_k`` (``phi_k(0) =
w_k``) and a transvection ``Phi_k`` (``Phi_k(mu(w_k)) = 0``), giving the germ
``Phi_k o mu o phi_k`` near ``0``.  Grid quantities are extrapolated in ``k``
from the geometric decay of successive differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .automorphisms import Transvection, disk_mobius, transvection
from .curves import (
    DEFAULT_RADII,
    Curve,
    ambient_curvature,
    gaussian_curvature,
    pullback_coefficient,
    second_fundamental_norm2,
    tangent_rank_profile,
    vanishing_order,
)
from .domains import DomainError, contains

__all__ = [
    "RescaledGerm",
    "StepRecord",
    "RescaleReport",
    "default_grid",
    "default_schedule",
    "rescale_step",
    "rescale_sequence",
    "extrapolate",
    "RATIO_LIMIT",
]

RATIO_LIMIT = 0.7
GERM_CURVATURE_RADIUS = 0.02
NOISE_FLOOR = 1e-10


def default_grid(radii: Sequence[float] = (0.05, 0.1), per_circle: int = 12) -> np.ndarray:
    """``0`` followed by ``per_circle`` equally spaced points on each circle."""
    ang = np.exp(2j * np.pi * np.arange(per_circle) / per_circle)
    return np.concatenate([[0j], *[r * ang for r in radii]])


def default_schedule(b: complex, steps: int = 12) -> np.ndarray:
    k = np.arange(1, steps + 1)
    return (1.0 - 2.0 ** (-k)) * complex(b)


@dataclass(frozen=True)
class RescaledGerm:
    """The germ ``zeta -> Phi(mu(phi(zeta)))`` with ``phi(0) = w0`` and ``Phi(mu(w0)) = 0``."""

    curve: Curve
    w0: complex
    transvection: Transvection = field(repr=False)

    @classmethod
    def at(cls, curve: Curve, w0: complex) -> "RescaledGerm":
        w0 = complex(w0)
        disk_mobius(w0)  # validates |w0| < 1
        return cls(curve, w0, transvection(curve.domain, curve(w0)))

    @property
    def domain(self):
        return self.curve.domain

    def _phi(self, zeta):
        w0 = self.w0
        return (zeta + w0) / (1.0 + np.conj(w0) * zeta)

    def _dphi(self, zeta):
        w0 = self.w0
        return (1.0 - abs(w0) ** 2) / (1.0 + np.conj(w0) * zeta) ** 2

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        pts = self.curve(self._phi(zeta)).reshape(-1, self.domain.dim)
        out = np.array([self.transvection.apply(p) for p in pts])
        return out.reshape(*zeta.shape, self.domain.dim)

    def derivative(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        w = self._phi(zeta)
        pts = self.curve(w).reshape(-1, self.domain.dim)
        tan = (self.curve.derivative(w) * self._dphi(zeta)[..., None]).reshape(-1, self.domain.dim)
        out = np.array([self.transvection.jacobian(p) @ v for p, v in zip(pts, tan)])
        return out.reshape(*zeta.shape, self.domain.dim)


@dataclass(frozen=True)
class StepRecord:
    k: int
    w_k: complex
    samples: np.ndarray  # germ values on the grid, (G, N)
    origin_defect: float  # |germ(0)|
    normal_forms: np.ndarray  # (G, r) normal forms of unit tangents
    sigma2: np.ndarray  # (G,)
    lam: np.ndarray  # (G,) pullback coefficient

    @property
    def normal_form0(self) -> np.ndarray:
        return self.normal_forms[0]

    @property
    def sigma2_0(self) -> float:
        return float(self.sigma2[0])


def rescale_step(c: Curve, w_k: complex, grid: Sequence[complex], k: int = 0) -> StepRecord:
    """Sample the rescaled germ at ``w_k`` on ``grid`` with its normal forms, ``|sigma|^2`` and pullback metric."""
    germ = RescaledGerm.at(c, w_k)
    grid = np.asarray(grid, dtype=complex)
    samples = germ(grid)
    for z, s in zip(grid, samples):
        if not contains(c.domain, s):
            raise DomainError(f"grid point {z} leaves the domain after rescaling; use a smaller grid")
    nfs = np.array([nf.values for _, nf in tangent_rank_profile(germ, grid)])
    sig = np.array([second_fundamental_norm2(germ, z, GERM_CURVATURE_RADIUS) for z in grid])
    lam = np.asarray(pullback_coefficient(germ, grid))
    i0 = int(np.argmin(np.abs(grid)))
    return StepRecord(int(k), complex(w_k), samples, float(np.max(np.abs(samples[i0]))), nfs, sig, lam)


def _sup_diffs(values: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([np.max(np.abs(np.asarray(b) - np.asarray(a))) for a, b in zip(values[:-1], values[1:])])


def extrapolate(values: Sequence[np.ndarray]) -> tuple[np.ndarray, float]:
    """Limit of a geometrically converging sequence from its last two terms.

    Returns the Richardson estimate ``v_K + (v_K - v_{K-1}) r / (1 - r)`` and
    the ratio ``r`` of the last two sup-differences (clipped to ``[0, 0.9]``).
    """
    vals = [np.asarray(v, dtype=float) for v in values]
    if len(vals) < 3:
        return vals[-1], float("nan")
    d = _sup_diffs(vals)
    if d[-1] <= NOISE_FLOOR or d[-2] <= NOISE_FLOOR:
        return vals[-1], 0.0
    r = float(np.clip(d[-1] / d[-2], 0.0, 0.9))
    return vals[-1] + (vals[-1] - vals[-2]) * r / (1.0 - r), r


@dataclass
class RescaleReport:
    b: complex
    grid: np.ndarray
    steps: list[StepRecord]
    m0: int
    cauchy: np.ndarray  # sup-differences of grid samples between consecutive steps
    ratios: np.ndarray
    converged: bool
    limit: dict[str, np.ndarray]
    boundary_sigma2: float
    verdicts: dict[str, bool]
    diagnostics: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        def cplx(a):
            a = np.asarray(a)
            return np.stack([a.real, a.imag], axis=-1).tolist()

        return {
            "b": [self.b.real, self.b.imag],
            "m0": self.m0,
            "grid": cplx(self.grid),
            "steps": [
                {
                    "k": s.k,
                    "w_k": [s.w_k.real, s.w_k.imag],
                    "samples": cplx(s.samples),
                    "origin_defect": s.origin_defect,
                    "normal_form_0": s.normal_form0.tolist(),
                    "sigma2_0": s.sigma2_0,
                    "lambda_0": float(s.lam[0]),
                }
                for s in self.steps
            ],
            "cauchy": self.cauchy.tolist(),
            "ratios": self.ratios.tolist(),
            "converged": self.converged,
            "limit": {
                "samples": cplx(self.limit["samples"]),
                "normal_forms": self.limit["normal_forms"].tolist(),
                "sigma2": self.limit["sigma2"].tolist(),
                "lambda": self.limit["lam"].tolist(),
            },
            "boundary_sigma2": self.boundary_sigma2,
            "verdicts": dict(self.verdicts),
            "diagnostics": dict(self.diagnostics),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def step_rows(self) -> list[tuple]:
        """Per-step scalars ``k, wk_re, wk_im, sigma2_0, nf_1..nf_r, cauchy``."""
        rows = []
        for i, s in enumerate(self.steps):
            cauchy = float(self.cauchy[i - 1]) if i > 0 else float("nan")
            rows.append((s.k, s.w_k.real, s.w_k.imag, s.sigma2_0, *s.normal_form0.tolist(), cauchy))
        return rows


def rescale_sequence(
    c: Curve,
    b: complex,
    schedule: Sequence[complex] | None = None,
    grid: Sequence[complex] | None = None,
    tol: float = 1e-3,
    metric_tol: float = 0.02,
    window: int = 4,
) -> RescaleReport:
    """Run the rescaling along ``schedule`` (default ``(1 - 2^-k) b``) and judge the limit.

    Verdicts:

    * ``normal_form``: the normal form at ``0`` converges and the limit's
      normal form varies by at most ``tol`` over the grid;
    * ``sigma2``: ``|sigma|^2`` at ``0`` matches the boundary limit of
      ``|sigma|^2`` along the source curve within ``tol`` and is constant over
      the grid within ``tol``;
    * ``isometry``: the limit pullback coefficient is ``m0 / (1 - |zeta|^2)^2``
      within relative ``metric_tol``.
    """
    b = complex(b)
    schedule = default_schedule(b) if schedule is None else np.asarray(schedule, dtype=complex)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=complex)
    if len(schedule) < window + 1:
        raise ValueError(f"need at least {window + 1} steps")
    mods = np.abs(schedule)
    if np.any(np.diff(mods) <= 0) or np.any(mods >= 1):
        raise ValueError("schedule must move monotonically toward the boundary inside the disk")
    m0 = vanishing_order(c, b, DEFAULT_RADII).m
    steps = [rescale_step(c, w, grid, k) for k, w in enumerate(schedule, start=1)]

    cauchy = _sup_diffs([s.samples for s in steps])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(cauchy[:-1] > 0, cauchy[1:] / cauchy[:-1], 0.0)
    tiny = cauchy[-window:] < 1e-12
    converged = bool(np.all((ratios[-window:] <= RATIO_LIMIT) | tiny))

    lim_samples_re, _ = extrapolate([s.samples.real for s in steps])
    lim_samples_im, _ = extrapolate([s.samples.imag for s in steps])
    lim_nf, r_nf = extrapolate([s.normal_forms for s in steps])
    lim_sig, r_sig = extrapolate([s.sigma2 for s in steps])
    lim_lam, r_lam = extrapolate([s.lam for s in steps])
    lim_nf = np.maximum(lim_nf, 0.0)
    limit = {"samples": lim_samples_re + 1j * lim_samples_im, "normal_forms": lim_nf, "sigma2": lim_sig, "lam": lim_lam}

    source_sig = [ambient_curvature(c, w) - gaussian_curvature(c, w) for w in schedule]
    boundary_sigma2 = float(extrapolate(source_sig)[0])

    nf_diffs = _sup_diffs([s.normal_form0 for s in steps])
    nf_conv = bool(np.all(nf_diffs[-window:] < tol) or np.all(np.diff(nf_diffs[-window:]) <= 0))
    nf_spread = float(np.max(np.ptp(lim_nf, axis=0)))
    sig_spread = float(np.ptp(lim_sig))
    i0 = int(np.argmin(np.abs(grid)))
    sig_gap = abs(float(lim_sig[i0]) - boundary_sigma2)
    target = m0 / (1.0 - np.abs(grid) ** 2) ** 2
    metric_err = float(np.max(np.abs(lim_lam - target) / target))
    verdicts = {
        "converged": converged,
        "normal_form": nf_conv and nf_spread <= tol,
        "sigma2": sig_gap <= tol and sig_spread <= tol,
        "isometry": metric_err <= metric_tol,
    }
    diagnostics = {
        "normal_form_spread": nf_spread,
        "sigma2_spread": sig_spread,
        "sigma2_gap": sig_gap,
        "metric_error": metric_err,
        "max_origin_defect": float(max(s.origin_defect for s in steps)),
        "ratio_normal_form": r_nf,
        "ratio_sigma2": r_sig,
        "ratio_lambda": r_lam,
    }
    return RescaleReport(b, grid, steps, m0, cauchy, ratios, converged, limit, boundary_sigma2, verdicts, diagnostics)
