import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdom.domains import DomainError, DomainSpec, boundary_distance
from symdom.kobayashi import (
    boundary_bound_check,
    calibrate_frame_constant,
    disk_distance,
    distance,
    domain_distance_from_origin,
    frame_norm,
    frame_norm_bound_check,
    ray_points,
)

from conftest import directions, ray_point

I22 = DomainSpec.type_i(2, 2)
EXACT = [DomainSpec.disk(), DomainSpec.polydisk(2), DomainSpec.polydisk(3), I22, DomainSpec.type_i(2, 3)]


def test_disk_distance_examples():
    assert disk_distance(0, 0.5) == pytest.approx(np.log(3))
    assert disk_distance(0, 0) == 0
    assert disk_distance(0.3, 0.3) == 0


def test_domain_distance_examples():
    assert domain_distance_from_origin(DomainSpec.polydisk(2), [0.5, 0.3]) == pytest.approx(np.log(3))
    assert domain_distance_from_origin(I22, [0.5, 0, 0, 0.3]) == pytest.approx(np.log(3))
    assert domain_distance_from_origin(I22, np.zeros(4)) == 0


def test_boundary_bound_examples():
    c = boundary_bound_check(DomainSpec.disk(), [0.5])
    assert (c.lhs, c.rhs, c.ok) == (pytest.approx(np.log(3)), pytest.approx(np.log(2)), True)
    c = boundary_bound_check(I22, [0.9, 0, 0, 0])
    assert c.lhs == pytest.approx(np.log(19)) and c.rhs == pytest.approx(-np.log(0.1)) and c.ok
    c = boundary_bound_check(I22, np.zeros(4))
    assert (c.lhs, c.rhs, c.ok) == (0, 0, True)


def test_bound_only_kinds_need_opt_in():
    d = DomainSpec.type_iv(3)
    with pytest.raises(DomainError, match="allow_bound"):
        domain_distance_from_origin(d, [0.1, 0, 0])
    assert domain_distance_from_origin(d, [0.1, 0, 0], allow_bound=True) == pytest.approx(np.log(1.1 / 0.9))
    with pytest.raises(DomainError):
        boundary_bound_check(d, [0.1, 0, 0])


@pytest.mark.parametrize("d", EXACT, ids=str)
@given(data=st.data())
def test_distance_is_symmetric_and_invariant(d, data):
    z1 = ray_point(d, data.draw(directions(d.dim)), data.draw(st.floats(0, 0.95)))
    z2 = ray_point(d, data.draw(directions(d.dim)), data.draw(st.floats(0, 0.95)))
    d12 = distance(d, z1, z2)
    assert d12 == pytest.approx(distance(d, z2, z1), rel=1e-8, abs=1e-10)
    assert distance(d, z1, z1) == pytest.approx(0, abs=1e-10)
    assert distance(d, np.zeros(d.dim), z2) == pytest.approx(domain_distance_from_origin(d, z2), rel=1e-10)


@pytest.mark.parametrize("d", EXACT, ids=str)
@given(data=st.data())
def test_boundary_inequality_property(d, data):
    t = 1 - 10 ** data.draw(st.floats(-7, 0))
    z = ray_point(d, data.draw(directions(d.dim)), t)
    assert boundary_bound_check(d, z).ok


def test_triangle_inequality_on_the_disk(rng):
    for _ in range(50):
        a, b, c = (0.95 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) for _ in range(3))
        assert disk_distance(a, c) <= disk_distance(a, b) + disk_distance(b, c) + 1e-12


def test_frame_norm_examples():
    disk = DomainSpec.disk()
    C = calibrate_frame_constant(disk)
    c = frame_norm_bound_check(disk, [0])
    assert (c.lhs, c.rhs, c.ok) == (pytest.approx(1.0), pytest.approx(C), True)
    assert frame_norm_bound_check(I22, [0.9, 0, 0, 0]).ok
    with pytest.raises(DomainError):
        frame_norm_bound_check(disk, [1 - 1e-5])


@pytest.mark.parametrize("d", [DomainSpec.disk(), I22, DomainSpec.type_iv(3)], ids=str)
def test_frame_norm_bound_on_radial_grid(d):
    C = calibrate_frame_constant(d)
    for z in ray_points(d, np.geomspace(1e-3, 0.5, 15), n_random=6, seed=3):
        assert frame_norm(d, z) <= C / boundary_distance(d, z)


def test_disk_frame_norm_is_exact():
    # |d/dz| = 1 / (1 - |z|^2) on the disk, so frame_norm * delta -> 1/2 at the boundary
    for r in (0, 0.5, 0.999):
        assert frame_norm(DomainSpec.disk(), [r]) == pytest.approx(1 / (1 - r**2))
