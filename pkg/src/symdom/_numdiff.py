"""Derivative stencils for real-analytic and holomorphic functions of complex variables."""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

# Each Wirtinger derivative along a complex line t -> base + t v uses the four
# points t in {h, -h, ih, -ih}; these are the weights times 4h.
_POINTS = np.array([1.0, -1.0, 1.0j, -1.0j])
_W_HOL = np.array([1.0, -1.0, -1.0j, 1.0j])
_W_ANTI = np.array([1.0, -1.0, 1.0j, -1.0j])


def _mixed_once(f, base, dirs, kinds, h):
    k = len(dirs)
    dirs = np.asarray(dirs, dtype=complex)
    combos = np.array(list(itertools.product(range(4), repeat=k)))
    offsets = h * _POINTS[combos]  # (4^k, k)
    pts = base[None, :] + offsets @ dirs
    weights = np.ones(len(combos), dtype=complex)
    for slot, kind in enumerate(kinds):
        w = _W_HOL if kind == "h" else _W_ANTI
        weights *= w[combos[:, slot]]
    vals = np.asarray(f(pts))
    return np.tensordot(weights, vals, axes=(0, 0)) / (4.0 * h) ** k


def wirtinger_mixed(
    f: Callable[[np.ndarray], np.ndarray],
    base: np.ndarray,
    hol: Sequence[np.ndarray],
    anti: Sequence[np.ndarray],
    h: float,
    levels: int = 1,
) -> complex | np.ndarray:
    """Mixed derivative ``d_{hol...} dbar_{anti...} f(base)`` by central differences.

    ``f`` maps a stack of points ``(m, N)`` to ``(m, ...)``.  Directions are
    used as given (derivatives are linear in ``hol``, conjugate-linear in
    ``anti``).  ``levels`` Richardson steps on the steps ``h, h/2, ...``
    cancel the error terms in ``h^2, h^4, ...``.
    """
    base = np.asarray(base, dtype=complex)
    dirs = list(hol) + list(anti)
    kinds = ["h"] * len(hol) + ["a"] * len(anti)
    table = [_mixed_once(f, base, dirs, kinds, h / 2.0**j) for j in range(levels + 1)]
    for lev in range(1, levels + 1):
        fac = 4.0**lev
        table = [(fac * fine - coarse) / (fac - 1.0) for coarse, fine in zip(table[:-1], table[1:])]
    return table[0]


def holomorphic_derivative(
    F: Callable[[np.ndarray], np.ndarray],
    z: np.ndarray,
    v: np.ndarray,
    radius: float,
    m: int = 16,
) -> np.ndarray:
    """Directional derivative of a holomorphic map by the Cauchy integral on a small circle.

    The trapezoid rule on ``m`` nodes is exact up to aliasing of order
    ``(radius / R)^m`` where ``R`` is the distance to the nearest singularity,
    so ``radius`` should be a small fraction of that distance.
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([np.asarray(F(z + radius * w * v), dtype=complex) for w in roots])
    return np.tensordot(np.conj(roots), vals, axes=(0, 0)) / (m * radius)


def ddbar_circle(
    f: Callable[[np.ndarray], np.ndarray],
    w: complex,
    radius: float,
    n_radii: int = 4,
    n_angle: int = 32,
) -> float:
    """``d^2 f / dw dwbar`` of a real-analytic scalar function via circle means.

    The mean of ``f`` over the circle of radius ``s`` is
    ``f(w) + s^2 f_{w wbar} + s^4 (...) + ...``; the means on ``n_radii``
    concentric circles are fitted by a polynomial in ``s^2`` whose linear
    coefficient is the answer.  ``f`` is vectorized over complex inputs.
    """
    theta = 2.0 * np.pi * (np.arange(n_angle) + 0.5) / n_angle
    ring = np.exp(1j * theta)
    fracs = np.arange(1, n_radii + 1) / n_radii
    pts = w + radius * fracs[:, None] * ring[None, :]
    vals = np.asarray(f(np.concatenate([[w], pts.ravel()])), dtype=float)
    f0 = vals[0]
    means = vals[1:].reshape(n_radii, n_angle).mean(axis=1) - f0
    x = fracs**2
    vander = np.stack([x**k for k in range(1, n_radii + 1)], axis=1)
    coef = np.linalg.solve(vander, means)
    return float(coef[0] / radius**2)
