"""Self-test battery shared by the test suite and ``symdom selftest``.

Each check returns a :class:`CheckResult`; none of them raise on a failed
verdict.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .automorphisms import pullback_isometry_defect, transvection
from .curves import (
    DEFAULT_RADII,
    CurveSpec,
    asymptotic_curvature_fit,
    gaussian_curvature,
    second_fundamental_norm2,
)
from .domains import DomainSpec, boundary_distance, contains, spectral_values, split
from .kobayashi import boundary_bound_check, calibrate_frame_constant, frame_norm_bound_check, ray_points
from .metrics import curvature_fd, curvature_origin, holomorphic_sectional_curvature, ke_metric
from .normal_forms import coordinate_block, h_eta, normal_form_vector, subspace_angle, v_space, w_space
from .rescaling import rescale_sequence

__all__ = ["CheckResult", "CHECKS", "run_all", "exiting_curve", "random_point", "random_unit_vector"]

B_GENERAL = complex(np.exp(1j * np.pi / 3))


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    elapsed: float = 0.0
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.elapsed:.1f} s)"


def exiting_curve() -> CurveSpec:
    """``w -> (w, (w + w^2) / 2)`` into the bidisk; ``b = 1`` is not a general point."""
    return CurveSpec.from_coordinates(
        DomainSpec.polydisk(2), [[0, 1], [0, 0.5, 0.5]], b0=B_GENERAL, exceptional=(1 + 0j,)
    )


def diagonal_disk(k: int) -> CurveSpec:
    d = DomainSpec.disk() if k == 1 else DomainSpec.polydisk(k)
    return CurveSpec.from_coordinates(d, [[0, 1]] * k)


def random_point(d: DomainSpec, rng: np.random.Generator, max_delta: float = 1.0, min_delta: float = 0.0) -> np.ndarray:
    """A point on a random ray, at boundary parameter ``1 - delta`` with ``log10(delta)`` uniform."""
    while True:
        u = rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim)
        reach = max(float(np.max(spectral_values(f, uf))) for f, uf in split(d, u))
        lo = np.log10(max(min_delta, 1e-7))
        delta = 10.0 ** rng.uniform(lo, np.log10(max_delta))
        z = (1.0 - delta) * u / reach
        if contains(d, z) and boundary_distance(d, z) >= min_delta:
            return z


def random_unit_vector(d: DomainSpec, rng: np.random.Generator, base=None) -> np.ndarray:
    base = np.zeros(d.dim) if base is None else base
    v = rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim)
    g = ke_metric(d, base, allow_near_boundary=True).g
    return v / np.sqrt((v @ g @ np.conj(v)).real)


CLASSICAL = (
    DomainSpec.type_i(2, 2),
    DomainSpec.type_i(2, 3),
    DomainSpec.type_ii(4),
    DomainSpec.type_iii(2),
    DomainSpec.type_iv(3),
)


def check_curvature_normalization(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(1, "holomorphic sectional curvature -2 on characteristic vectors", True)
    for d in CLASSICAL:
        e = normal_form_vector(d, [1.0] + [0.0] * (d.rank - 1))
        worst = abs(holomorphic_sectional_curvature(d, np.zeros(d.dim), e) + 2.0)
        worst_fd = abs(curvature_fd(d, np.zeros(d.dim), e, e, e, e).real / np.abs(ke_metric(d, np.zeros(d.dim)).inner(e, e)) ** 2 + 2.0)
        # the same characteristic direction seen from random base points
        for _ in range(5):
            z = random_point(d, rng, max_delta=0.9, min_delta=0.05)
            jac = transvection(d, z).jacobian(z)
            v = np.linalg.solve(jac, e)
            worst = max(worst, abs(holomorphic_sectional_curvature(d, z, v) + 2.0))
        ok = worst <= 1e-6 and worst_fd <= 1e-6
        res.passed &= ok
        res.details.append(f"{d}: max |HSC + 2| = {worst:.2e}, finite differences {worst_fd:.2e}")
    return res


def check_heta_spectrum(rng: np.random.Generator, samples: int = 1000) -> CheckResult:
    res = CheckResult(2, "H_eta spectrum in [-2, 0] and the normal-form eigenvalue pattern", True)
    for d in CLASSICAL + (DomainSpec.type_ii(5), DomainSpec.type_iv(5)):
        lo, hi = np.inf, -np.inf
        for _ in range(samples):
            w = h_eta(d, random_unit_vector(d, rng), normalize=False).eigenvalues
            lo, hi = min(lo, w[0]), max(hi, w[-1])
        ok = lo >= -2 - 1e-8 and hi <= 1e-8
        res.passed &= ok
        res.details.append(f"{d}: eigenvalues within [{lo:.10f}, {hi:.2e}]")
    d = DomainSpec.type_i(2, 2)
    worst = 0.0
    for theta in np.linspace(0.0, np.pi / 4, 9):
        a1, a2 = np.cos(theta), np.sin(theta)
        w = np.sort(h_eta(d, normal_form_vector(d, [a1, a2])).eigenvalues)
        want = np.sort([-2 * a1**2, -2 * a2**2, -(a1**2 + a2**2), -(a1**2 + a2**2)])
        worst = max(worst, float(np.max(np.abs(w - want))))
    res.passed &= worst <= 1e-7
    res.details.append(f"I(2,2) normal-form pattern: max deviation {worst:.2e}")
    return res


def check_gauss_identity(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(3, "Gauss equation on diagonal disks of polydisks", True)
    pts = [0.0, 0.3, 0.5j, -0.6 + 0.2j, 0.85]
    for k in (1, 2, 3):
        c = diagonal_disk(k)
        sig = max(abs(second_fundamental_norm2(c, w)) for w in pts)
        kap = max(abs(gaussian_curvature(c, w) + 2.0 / k) for w in pts)
        ok = sig <= 1e-6 and kap <= 1e-5
        res.passed &= ok
        res.details.append(f"k={k}: max |sigma|^2 = {sig:.2e}, max |kappa + 2/k| = {kap:.2e}")
    return res


def check_curvature_law(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(4, "kappa = -2/m + O(delta^2) on the exiting curve", True)
    fit = asymptotic_curvature_fit(exiting_curve(), B_GENERAL, DEFAULT_RADII)
    ok = fit.m == 1 and fit.stable and bool(np.all(np.abs(fit.ratios) <= fit.C * (1 + 1e-6)))
    res.passed = ok
    res.details.append(
        f"m = {fit.m}, C = {fit.C:.4g}, ratios (kappa + 2)/delta^2 = "
        + ", ".join(f"{r:.3g}" for r in fit.ratios)
    )
    return res


def check_asymptotic_geodesy(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(5, "|sigma|^2 -> 0 toward general boundary points", True)
    c = exiting_curve()
    good = 0
    for b in np.exp(2j * np.pi * np.arange(8) / 8):
        b = complex(b)
        if any(abs(b - e) < 1e-9 for e in c.exceptional):
            res.details.append(f"b = {b:.3f}: declared exceptional, skipped")
            continue
        far = second_fundamental_norm2(c, 0.9 * b)
        near = second_fundamental_norm2(c, (1 - 1e-3) * b)
        ok = near < 0.05 and near < far
        good += ok
        res.details.append(f"b = {b:.3f}: |sigma|^2 = {far:.3e} at delta 0.1, {near:.3e} at delta 1e-3")
    res.passed = good >= 6
    res.details.append(f"{good} of 8 boundary points pass")
    return res


def check_rescaling(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(6, "rescaled germs converge to a constant-normal-form isometry", True)
    rep = rescale_sequence(exiting_curve(), B_GENERAL)
    last = rep.ratios[-4:]
    res.passed = bool(rep.converged and all(rep.verdicts.values()) and np.all(last <= 0.7))
    res.details.append(f"m0 = {rep.m0}, last Cauchy ratios = " + ", ".join(f"{r:.3f}" for r in last))
    res.details.append(", ".join(f"{k}={v}" for k, v in rep.verdicts.items()))
    res.details.append(", ".join(f"{k}={v:.3g}" for k, v in rep.diagnostics.items()))
    return res


def check_block_structure(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(7, "W equals the k x k block, V = W on tube type", True)
    for d in (DomainSpec.type_i(3, 3), DomainSpec.type_i(2, 3)):
        for k in (1, 2):
            vals = [1.0] if k == 1 else [0.8, 0.6]
            eta = normal_form_vector(d, vals + [0.0] * (d.rank - k))
            w = w_space(d, eta)
            ang = subspace_angle(w, coordinate_block(d, k))
            ok = ang < 1e-6
            line = f"{d}, k={k}: dim W = {w.dim}, angle to block = {ang:.2e}"
            if d.is_tube_type:
                va = subspace_angle(v_space(d, eta), w)
                ok &= va < 1e-6
                line += f", angle(V, W) = {va:.2e}"
            res.passed &= ok
            res.details.append(line + ("" if ok else "  <- mismatch"))
    return res


def check_boundary_inequality(rng: np.random.Generator, samples: int = 1000) -> CheckResult:
    res = CheckResult(8, "d(0, z) >= -log delta(z)", True)
    for d in (DomainSpec.disk(), DomainSpec.polydisk(2), DomainSpec.polydisk(3), DomainSpec.type_i(2, 2), DomainSpec.type_i(2, 3)):
        margin = np.inf
        bad = 0
        for _ in range(samples):
            chk = boundary_bound_check(d, random_point(d, rng))
            margin = min(margin, chk.lhs - chk.rhs)
            bad += not chk.ok
        res.passed &= bad == 0
        res.details.append(f"{d}: {bad} violations, smallest margin {margin:.3e}")
    return res


def check_frame_norm(rng: np.random.Generator) -> CheckResult:
    res = CheckResult(9, "coordinate frame norms bounded by C / delta", True)
    deltas = np.logspace(0, -3, 120)
    for d in (DomainSpec.disk(), DomainSpec.type_i(2, 2)):
        C = calibrate_frame_constant(d)
        checks = [frame_norm_bound_check(d, z, C) for z in ray_points(d, deltas, n_random=6, seed=1)]
        worst = max(c.lhs / c.rhs for c in checks)
        ok = all(c.ok for c in checks)
        res.passed &= ok
        res.details.append(f"{d}: C = {C:.4f}, worst frame/bound = {worst:.4f} over {len(checks)} points")
    return res


def check_oracles(rng: np.random.Generator, samples: int = 100) -> CheckResult:
    res = CheckResult(10, "closed-form vs finite-difference curvature, isometry defects", True)
    for d in CLASSICAL:
        g0 = ke_metric(d, np.zeros(d.dim)).g
        worst = 0.0
        for _ in range(samples):
            v = [rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim) for _ in range(4)]
            scale = np.prod([np.sqrt((x @ g0 @ np.conj(x)).real) for x in v])
            diff = abs(curvature_origin(d, *v) - curvature_fd(d, np.zeros(d.dim), *v))
            worst = max(worst, diff / scale)
        defect = 0.0
        for _ in range(samples):
            z0 = random_point(d, rng, max_delta=0.95, min_delta=0.05)
            z = random_point(d, rng, max_delta=0.95, min_delta=0.05)
            defect = max(defect, pullback_isometry_defect(d, transvection(d, z0), z))
        ok = worst <= 1e-5 and defect <= 1e-6
        res.passed &= ok
        res.details.append(f"{d}: curvature relative gap {worst:.2e}, isometry defect {defect:.2e}")
    return res


CHECKS: dict[int, tuple[Callable[[np.random.Generator], CheckResult], float]] = {
    1: (check_curvature_normalization, 10.0),
    2: (check_heta_spectrum, 60.0),
    3: (check_gauss_identity, 5.0),
    4: (check_curvature_law, 30.0),
    5: (check_asymptotic_geodesy, 60.0),
    6: (check_rescaling, 120.0),
    7: (check_block_structure, 30.0),
    8: (check_boundary_inequality, 30.0),
    9: (check_frame_norm, 30.0),
    10: (check_oracles, 120.0),
}


def run_check(number: int, seed: int = 7) -> CheckResult:
    fn, budget = CHECKS[number]
    rng = np.random.default_rng([seed, number])
    t0 = time.perf_counter()
    res = fn(rng)
    res.elapsed = time.perf_counter() - t0
    if res.elapsed > budget:
        res.passed = False
        res.details.append(f"runtime {res.elapsed:.1f} s exceeds the {budget:.0f} s budget")
    return res


def run_all(seed: int = 7, only: list[int] | None = None) -> list[CheckResult]:
    return [run_check(n, seed) for n in (only or sorted(CHECKS))]
