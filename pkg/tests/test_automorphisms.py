import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdom.automorphisms import disk_mobius, hermitian_power, pullback_isometry_defect, transvection
from symdom.domains import DomainError, DomainSpec, contains, spectral_values
from symdom.kobayashi import disk_distance
from symdom.metrics import ke_metric

from conftest import ALL_KINDS, CLASSICAL, directions, ray_point


def test_disk_mobius_identity_and_inverse():
    m = disk_mobius(0)
    assert m(0.3 + 0.2j) == pytest.approx(0.3 + 0.2j)
    m = disk_mobius(0.4 - 0.3j)
    assert m(0) == pytest.approx(0.4 - 0.3j)
    assert m.inverse(m(0.1 + 0.5j)) == pytest.approx(0.1 + 0.5j)
    with pytest.raises(DomainError):
        disk_mobius(1.0)


def test_disk_transvection_formula():
    t = transvection(DomainSpec.disk(), [0.5])
    for z in (0.5, 0.2, -0.3 + 0.4j):
        assert t([z])[0] == pytest.approx((z - 0.5) / (1 - 0.5 * z))


def test_isometry_defect_examples():
    disk = DomainSpec.disk()
    assert pullback_isometry_defect(disk, transvection(disk, [0]), [0.3]) == pytest.approx(0, abs=1e-15)
    assert pullback_isometry_defect(disk, transvection(disk, [0.5]), [0.2]) <= 1e-8


@pytest.mark.parametrize("d", ALL_KINDS, ids=str)
@given(data=st.data())
def test_transvection_is_an_isometry(d, data):
    z0 = ray_point(d, data.draw(directions(d.dim)), data.draw(st.floats(0, 0.9)))
    z = ray_point(d, data.draw(directions(d.dim)), data.draw(st.floats(0, 0.9)))
    t = transvection(d, z0)
    assert np.allclose(t(z0), 0, atol=1e-12)
    assert contains(d, t(z))
    assert pullback_isometry_defect(d, t, z) <= 1e-6 * np.linalg.norm(ke_metric(d, z).g)


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_jacobian_matches_finite_differences(d, rng):
    z0 = ray_point(d, rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim), 0.6)
    z = ray_point(d, rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim), 0.4)
    t = transvection(d, z0)
    v = rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim)
    h = 1e-6
    fd = (t(z + h * v) - t(z - h * v)) / (2 * h)
    assert np.allclose(t.differential(z, v), fd, atol=1e-7)
    # holomorphic: no dependence on conj directions
    fd_i = (t(z + 1j * h * v) - t(z - 1j * h * v)) / (2 * h)
    assert np.allclose(fd_i, 1j * fd, atol=1e-7)


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_transvection_preserves_distance_to_origin_swap(d, rng):
    # Phi_{z0} swaps z0 and 0 up to sign for symmetric domains: |Phi_{z0}(0)| has the spectrum of z0
    z0 = ray_point(d, rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim), 0.7)
    img = transvection(d, z0)(np.zeros(d.dim))
    assert spectral_values(d, img) == pytest.approx(spectral_values(d, z0), abs=1e-10)


def test_disk_transvection_preserves_poincare_distance(rng):
    disk = DomainSpec.disk()
    for _ in range(10):
        a, b, c = (0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) for _ in range(3))
        t = transvection(disk, [a])
        assert disk_distance(t([b])[0], t([c])[0]) == pytest.approx(disk_distance(b, c), rel=1e-10)


def test_exterior_center_rejected():
    with pytest.raises(DomainError):
        transvection(DomainSpec.type_i(2, 2), [1.1, 0, 0, 0])


def test_hermitian_power():
    a = np.array([[2.0, 0.5j], [-0.5j, 1.0]])
    r = hermitian_power(a, 0.5)
    assert np.allclose(r @ r, a)
    with pytest.raises(DomainError):
        hermitian_power(-a, 0.5)
