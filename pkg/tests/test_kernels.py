import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from symdom import kernels

cplx = st.complex_numbers(max_magnitude=0.6, allow_nan=False, allow_infinity=False)


def test_env_var_forces_numpy_fallback():
    env = dict(os.environ, SYMDOM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from symdom import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


@given(z=arrays(np.complex128, (6, 2, 3), elements=cplx))
def test_gram_kernel_matches_fallback(z):
    want = kernels.py_logdet_unit_minus_gram(z)
    got = kernels.logdet_unit_minus_gram(z)
    assert np.allclose(got, want, equal_nan=True, atol=1e-10)


@given(z=arrays(np.complex128, (6, 4), elements=cplx))
def test_lie_ball_kernel_matches_fallback(z):
    want = kernels.py_log_lie_ball_norm(z)
    got = kernels.log_lie_ball_norm(z)
    assert np.allclose(got, want, equal_nan=True, atol=1e-10)


def test_gram_kernel_values():
    z = np.zeros((2, 2, 2), dtype=complex)
    z[1] = np.diag([0.5, 0.3])
    assert kernels.logdet_unit_minus_gram(z) == pytest.approx([0.0, np.log(0.75 * 0.91)])
    z[0, 0, 0] = 1.0
    assert np.isnan(kernels.logdet_unit_minus_gram(z)[0])


def test_lie_ball_kernel_values():
    z = np.array([[0.5, 0, 0], [1.2, 0, 0]], dtype=complex)
    out = kernels.log_lie_ball_norm(z)
    assert out[0] == pytest.approx(np.log(0.5625)) and np.isnan(out[1])
