"""Hot kernels for stacked generic-norm evaluations.

The compiled extension ``symdom._ckernels`` is used when it was built; the
numpy implementations below are the fallback and the reference the benchmark
compares against.  Set ``SYMDOM_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "logdet_unit_minus_gram", "log_lie_ball_norm",
           "py_logdet_unit_minus_gram", "py_log_lie_ball_norm"]


def py_logdet_unit_minus_gram(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    p = z.shape[-2]
    a = np.eye(p) - z @ np.conj(np.swapaxes(z, -1, -2))
    ev = np.linalg.eigvalsh(a)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sum(np.log(ev), axis=-1)
    out[np.any(ev <= 0.0, axis=-1)] = np.nan
    return out


def py_log_lie_ball_norm(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    nrm2 = np.sum(z.real**2 + z.imag**2, axis=-1)
    h = 1.0 - 2.0 * nrm2 + np.abs(np.sum(z * z, axis=-1)) ** 2
    ok = (nrm2 < 1.0) & (h > 0.0)
    out = np.full(h.shape, np.nan)
    out[ok] = np.log(h[ok])
    return out


_ext = None
if not os.environ.get("SYMDOM_PURE_PYTHON"):
    try:
        from . import _ckernels as _ext  # type: ignore[no-redef]
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "numpy"


def logdet_unit_minus_gram(z: np.ndarray) -> np.ndarray:
    """``log det(I - Z Z^*)`` over a stack of matrices, NaN where not positive definite."""
    if _ext is None:
        return py_logdet_unit_minus_gram(z)
    return _ext.logdet_unit_minus_gram(np.ascontiguousarray(z, dtype=np.complex128))


def log_lie_ball_norm(z: np.ndarray) -> np.ndarray:
    """``log(1 - 2|z|^2 + |z^t z|^2)`` over rows, NaN outside the Lie ball."""
    if _ext is None:
        return py_log_lie_ball_norm(z)
    return _ext.log_lie_ball_norm(np.ascontiguousarray(z, dtype=np.complex128))
