import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdom.domains import DomainError, DomainSpec, generic_norm
from symdom.metrics import (
    bergman_metric,
    christoffel,
    curvature,
    curvature_origin,
    curvature_tensor_origin,
    holomorphic_sectional_curvature,
    ke_metric,
    metric_quadratic,
)
from symdom.normal_forms import normal_form_vector

from conftest import CLASSICAL, directions, ray_point

I22 = DomainSpec.type_i(2, 2)
E11, E12, E22 = np.eye(4)[0], np.eye(4)[1], np.eye(4)[3]


def _cvec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_disk_metric_values():
    disk = DomainSpec.disk()
    assert ke_metric(disk, [0]).g[0, 0] == pytest.approx(1.0)
    assert ke_metric(disk, [0.5]).g[0, 0].real == pytest.approx(0.75**-2)
    assert ke_metric(disk, [0.5], method="fd").g[0, 0].real == pytest.approx(0.75**-2, rel=1e-7)


def test_bergman_metric_scales_by_genus():
    assert bergman_metric(DomainSpec.disk(), [0]).g[0, 0] == pytest.approx(2.0)
    assert np.allclose(bergman_metric(DomainSpec.polydisk(2), [0, 0]).g, 2 * np.eye(2))
    assert np.allclose(bergman_metric(I22, np.zeros(4)).g, 4 * np.eye(4))
    assert np.allclose(ke_metric(I22, np.zeros(4)).g, np.eye(4))


@pytest.mark.parametrize("d", CLASSICAL + [DomainSpec.product([DomainSpec.disk(), DomainSpec.type_iv(3)])], ids=str)
def test_analytic_metric_matches_finite_differences(d, rng):
    z = ray_point(d, _cvec(rng, d.dim), 0.7)
    g_a = ke_metric(d, z).g
    g_fd = ke_metric(d, z, method="fd").g
    assert np.allclose(g_a, g_a.conj().T)
    assert np.max(np.abs(g_a - g_fd)) <= 1e-6 * np.max(np.abs(g_a))
    v = _cvec(rng, d.dim)
    assert metric_quadratic(d, z, v) == pytest.approx((v @ g_a @ np.conj(v)).real)


def test_near_boundary_guard():
    with pytest.raises(DomainError, match="allow_near_boundary"):
        ke_metric(DomainSpec.disk(), [0.9999])
    assert ke_metric(DomainSpec.disk(), [0.9999], allow_near_boundary=True).g[0, 0].real > 1e7
    with pytest.raises(DomainError):
        ke_metric(DomainSpec.disk(), [1.0])


def test_type_i_curvature_examples():
    assert curvature(I22, np.zeros(4), E11, E11, E11, E11).value == pytest.approx(-2.0)
    eta = (E11 + E22) / np.sqrt(2)
    assert curvature(I22, np.zeros(4), eta, eta, eta, eta).value == pytest.approx(-1.0)
    assert curvature(I22, np.zeros(4), E11, E11, E12, E12).value == pytest.approx(-1.0)
    assert curvature(I22, np.zeros(4), E11, E11, E12, E12, method="fd").value == pytest.approx(-1.0, abs=1e-6)


def test_fourth_derivative_oracle_for_disk():
    # -log(1 - |z|^2) = sum |z|^{2n} / n, so the z z zbar zbar coefficient is 1/2 and R = -4 * 1/2 = -2
    disk = DomainSpec.disk()
    assert curvature(disk, [0], [1], [1], [1], [1], method="fd").value == pytest.approx(-2.0, abs=1e-7)


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_closed_form_matches_finite_differences_off_origin(d, rng):
    z = ray_point(d, _cvec(rng, d.dim), 0.5)
    vecs = [_cvec(rng, d.dim) for _ in range(4)]
    g = ke_metric(d, z)
    scale = np.prod([g.norm(v) for v in vecs])
    closed = curvature(d, z, *vecs).value
    fd = curvature(d, z, *vecs, method="fd").value
    assert abs(closed - fd) <= 1e-5 * scale


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_curvature_tensor_symmetries(d):
    R = curvature_tensor_origin(d)
    assert np.allclose(R, np.transpose(R, (2, 1, 0, 3)))  # swap holomorphic slots
    assert np.allclose(R, np.transpose(R, (0, 3, 2, 1)))  # swap antiholomorphic slots
    assert np.allclose(R, np.conj(np.transpose(R, (1, 0, 3, 2))))


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
def test_ricci_is_einstein(d):
    # Ric(a, b) = g^{i jbar} R(a, b, e_i, e_j) is a negative multiple of g
    R = curvature_tensor_origin(d)
    G = ke_metric(d, np.zeros(d.dim)).g
    ric = np.einsum("abij,ji->ab", R, np.linalg.inv(G.T))
    ratio = ric[0, 0] / G[0, 0]
    assert np.allclose(ric, ratio * G)
    assert ratio.real < 0


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
@given(data=st.data())
def test_holomorphic_sectional_curvature_range(d, data):
    v = data.draw(directions(d.dim))
    t = data.draw(st.floats(0.0, 0.9))
    z = ray_point(d, data.draw(directions(d.dim)), t)
    hsc = holomorphic_sectional_curvature(d, z, v)
    assert -2 - 1e-9 <= hsc <= -2 / d.rank + 1e-9


@pytest.mark.parametrize("d", CLASSICAL, ids=str)
@given(a=st.lists(st.floats(0.05, 1.0), min_size=2, max_size=2))
def test_hsc_of_normal_forms(d, a):
    eta = normal_form_vector(d, a)
    eta = eta / np.linalg.norm(eta)
    a = np.array(a) / np.linalg.norm(a)
    assert holomorphic_sectional_curvature(d, np.zeros(d.dim), eta) == pytest.approx(-2 * np.sum(a**4), abs=1e-10)


def test_product_curvature_adds_factors(rng):
    d = DomainSpec.product([I22, DomainSpec.type_iv(3)])
    a, b, c, e = (_cvec(rng, 7) for _ in range(4))
    want = curvature_origin(I22, a[:4], b[:4], c[:4], e[:4]) + curvature_origin(DomainSpec.type_iv(3), a[4:], b[4:], c[4:], e[4:])
    assert curvature_origin(d, a, b, c, e) == pytest.approx(want)


def test_christoffel_examples():
    disk = DomainSpec.disk()
    assert abs(christoffel(disk, [0])[0, 0, 0]) < 1e-12
    assert christoffel(disk, [0.5])[0, 0, 0] == pytest.approx(4 / 3, rel=1e-7)
    assert np.allclose(christoffel(I22, np.zeros(4)), 0, atol=1e-12)


def test_christoffel_disk_formula(rng):
    disk = DomainSpec.disk()
    for _ in range(5):
        z = 0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        assert christoffel(disk, [z])[0, 0, 0] == pytest.approx(2 * np.conj(z) / (1 - abs(z) ** 2), rel=1e-7)


def test_generic_norm_potential_is_used():
    # the KE metric at 0 is the quadratic part of -log h
    d = DomainSpec.type_iv(3)
    v = np.array([0.3, 0.1j, 0.2])
    t = 1e-4
    quad = -np.log(generic_norm(d, t * v)) / t**2
    assert quad == pytest.approx((v @ ke_metric(d, np.zeros(3)).g @ np.conj(v)).real, rel=1e-6)
