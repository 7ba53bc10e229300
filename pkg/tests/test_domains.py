import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdom import kernels
from symdom.domains import (
    DomainError,
    DomainSpec,
    bergman_kernel,
    boundary_distance,
    contains,
    from_matrix,
    generic_norm,
    log_generic_norm,
    spectral_values,
    to_matrix,
)

from conftest import ALL_KINDS, CLASSICAL, directions, ray_point, reach


@pytest.mark.parametrize(
    "d, dim, rank, genera, tube",
    [
        (DomainSpec.type_i(2, 3), 6, 2, (5,), False),
        (DomainSpec.type_ii(4), 6, 2, (6,), True),
        (DomainSpec.type_ii(5), 10, 2, (8,), False),
        (DomainSpec.type_iii(3), 6, 3, (4,), True),
        (DomainSpec.type_iv(5), 5, 2, (5,), True),
        (DomainSpec.polydisk(3), 3, 3, (2, 2, 2), True),
        (DomainSpec.product([DomainSpec.type_i(1, 2), DomainSpec.type_iv(3)]), 5, 3, (3, 3), False),
    ],
)
def test_derived_invariants(d, dim, rank, genera, tube):
    assert (d.dim, d.rank, d.genera, d.is_tube_type) == (dim, rank, genera, tube)


@pytest.mark.parametrize("bad", [dict(kind="I", p=3, q=2), dict(kind="IV", n=2), dict(kind="II", n=1), dict(kind="V", n=3)])
def test_invalid_specs_raise(bad):
    with pytest.raises(DomainError):
        DomainSpec.from_dict(bad)


def test_unknown_json_fields_rejected():
    with pytest.raises(DomainError, match="unknown fields"):
        DomainSpec.from_dict({"kind": "I", "p": 2, "q": 2, "r": 1})


@pytest.mark.parametrize("d", ALL_KINDS, ids=str)
def test_json_round_trip(d):
    assert DomainSpec.from_json(d.to_json()) == d
    assert json.loads(d.to_json())["kind"] == d.kind


def test_generic_norm_examples():
    assert generic_norm(DomainSpec.disk(), [0.5]) == pytest.approx(0.75)
    assert generic_norm(DomainSpec.type_iv(3), [0.5, 0, 0]) == pytest.approx(0.5625)
    for d in ALL_KINDS:
        assert generic_norm(d, np.zeros(d.dim)) == 1.0


def test_contains_examples():
    assert contains(DomainSpec.disk(), [0.5])
    assert not contains(DomainSpec.type_i(2, 2), [1.2, 0, 0, 0])
    assert not contains(DomainSpec.polydisk(2), [0.5, 0.99], margin=0.02)
    assert contains(DomainSpec.polydisk(2), [0.5, 0.99])


def test_bergman_kernel_examples():
    assert bergman_kernel(DomainSpec.disk(), [0.5]) == pytest.approx(0.75**-2)
    assert bergman_kernel(DomainSpec.polydisk(2), [0.5, 0.5]) == pytest.approx(0.75**-4)


def test_boundary_distance_examples():
    assert boundary_distance(DomainSpec.disk(), [0.5]) == pytest.approx(0.5)
    assert boundary_distance(DomainSpec.type_i(2, 2), [0.5, 0, 0, 0.3]) == pytest.approx(0.5)
    assert boundary_distance(DomainSpec.polydisk(2), [0.5, 0.9]) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        boundary_distance(DomainSpec.disk(), [1.5])


def test_type_i_singular_values_against_svd(rng):
    d = DomainSpec.type_i(2, 3)
    z = 0.3 * (rng.normal(size=6) + 1j * rng.normal(size=6))
    s = np.linalg.svd(z.reshape(2, 3), compute_uv=False)
    assert np.allclose(spectral_values(d, z), s)
    assert generic_norm(d, z) == pytest.approx(np.prod(1 - s**2))


def test_lie_ball_spectral_values_reproduce_norm(rng):
    d = DomainSpec.type_iv(4)
    for _ in range(20):
        z = 0.3 * (rng.normal(size=4) + 1j * rng.normal(size=4))
        s = spectral_values(d, z)
        assert generic_norm(d, z) == pytest.approx(np.prod(1 - s**2), abs=1e-12)


def test_lie_ball_boundary_distance_by_bisection(rng):
    # oracle: shrink a ball around z until it first touches the boundary
    d = DomainSpec.type_iv(3)
    z = ray_point(d, rng.normal(size=3) + 1j * rng.normal(size=3), 0.7)
    delta = boundary_distance(d, z)
    samples = rng.normal(size=(4000, 3)) + 1j * rng.normal(size=(4000, 3))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    inside = [contains(d, z + 0.999 * delta * u) for u in samples]
    assert all(inside)


@pytest.mark.parametrize("d", [DomainSpec.type_ii(4), DomainSpec.type_iii(3), DomainSpec.type_ii(5)], ids=str)
def test_matrix_packing_round_trip(d, rng):
    z = rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim)
    m = to_matrix(d, z)
    sign = -1 if d.kind == "II" else 1
    assert np.allclose(m.T, sign * m)
    assert np.allclose(from_matrix(d, m), z)


@pytest.mark.parametrize("d", ALL_KINDS, ids=str)
@given(data=st.data())
def test_generic_norm_positive_and_decreasing_on_rays(d, data):
    u = data.draw(directions(d.dim))
    ts = np.linspace(0, 0.999, 25)
    h = [generic_norm(d, ray_point(d, u, t)) for t in ts]
    assert all(x > 0 for x in h)
    assert np.all(np.diff(h) < 1e-14)


@pytest.mark.parametrize("d", ALL_KINDS, ids=str)
@given(data=st.data())
def test_boundary_distance_shrinks_to_zero(d, data):
    u = data.draw(directions(d.dim))
    assert boundary_distance(d, ray_point(d, u, 0.5)) > boundary_distance(d, ray_point(d, u, 0.999))
    assert boundary_distance(d, ray_point(d, u, 1 - 1e-9)) < 1e-6
    assert not contains(d, ray_point(d, u, 1.0 + 1e-9))


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_log_generic_norm_matches_polynomial_and_is_nan_outside(d, rng):
    pts = np.array([ray_point(d, rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim), t) for t in (0.2, 0.6, 0.95)])
    got = log_generic_norm(d, pts)
    assert np.allclose(got, [np.log(generic_norm(d, z)) for z in pts])
    assert np.isnan(log_generic_norm(d, 1.5 * pts[-1]))


def test_kernel_backends_agree(rng):
    z = 0.2 * (rng.normal(size=(50, 2, 3)) + 1j * rng.normal(size=(50, 2, 3)))
    assert np.allclose(kernels.logdet_unit_minus_gram(z), kernels.py_logdet_unit_minus_gram(z), equal_nan=True)
    w = 0.3 * (rng.normal(size=(50, 4)) + 1j * rng.normal(size=(50, 4)))
    assert np.allclose(kernels.log_lie_ball_norm(w), kernels.py_log_lie_ball_norm(w), equal_nan=True)
    assert kernels.BACKEND in ("cython", "numpy")


def test_dimension_mismatch_raises():
    with pytest.raises(DomainError, match="dimension"):
        generic_norm(DomainSpec.type_i(2, 2), [0.1, 0.2])
