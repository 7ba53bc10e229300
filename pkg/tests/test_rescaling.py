import json

import numpy as np
import pytest

from symdom.curves import CurveSpec
from symdom.domains import DomainSpec
from symdom.rescaling import (
    RescaledGerm,
    default_grid,
    default_schedule,
    extrapolate,
    rescale_sequence,
    rescale_step,
)

BIDISK = DomainSpec.polydisk(2)
B_GENERAL = np.exp(1j * np.pi / 3)


@pytest.fixture(scope="module")
def exiting():
    return CurveSpec.from_coordinates(BIDISK, [[0, 1], [0, 0.5, 0.5]], exceptional=(1,))


@pytest.fixture(scope="module")
def exiting_report(exiting):
    return rescale_sequence(exiting, B_GENERAL)


def test_extrapolate_geometric_sequence():
    limit = np.array([1.0, -2.0])
    vals = [limit + 0.5**k * np.array([3.0, 1.0]) for k in range(6)]
    got, r = extrapolate(vals)
    assert r == pytest.approx(0.5)
    assert np.allclose(got, limit, atol=1e-12)


def test_extrapolate_constant_and_short_sequences():
    assert extrapolate([np.ones(2)] * 4) == (pytest.approx(np.ones(2)), 0.0)
    got, r = extrapolate([np.zeros(1), np.ones(1)])
    assert np.isnan(r) and got[0] == 1


def test_germ_is_centered(exiting):
    germ = RescaledGerm.at(exiting, 0.6 + 0.3j)
    assert np.allclose(germ(0), 0, atol=1e-14)
    h = 1e-6
    z = 0.05j
    assert np.allclose(germ.derivative(z), (germ(z + h) - germ(z - h)) / (2 * h), atol=1e-7)


def test_default_grid_and_schedule():
    g = default_grid()
    assert g[0] == 0 and len(g) == 25
    assert np.allclose(np.abs(g[1:13]), 0.05)
    s = default_schedule(1j, 3)
    assert np.allclose(s, [0.5j, 0.75j, 0.875j])


@pytest.mark.parametrize("k", [1, 2])
def test_totally_geodesic_input_is_a_fixed_point(k):
    d = DomainSpec.disk() if k == 1 else DomainSpec.polydisk(k)
    c = CurveSpec.from_coordinates(d, [[0, 1]] * k)
    rep = rescale_sequence(c, 1, default_schedule(1, 6))
    assert all(rep.verdicts.values())
    assert rep.m0 == k
    assert np.allclose(rep.limit["sigma2"], 0, atol=1e-6)
    first = rep.steps[0].normal_forms
    assert all(np.allclose(s.normal_forms, first, atol=1e-9) for s in rep.steps)
    assert np.allclose(first[0], np.full(k, 1 / np.sqrt(k)))


def test_exiting_curve_converges_to_isometry(exiting_report):
    rep = exiting_report
    assert rep.m0 == 1
    assert rep.verdicts == {"converged": True, "normal_form": True, "sigma2": True, "isometry": True}
    assert np.all(rep.ratios[-4:] <= 0.7)
    assert rep.limit["sigma2"][0] < 0.05
    assert rep.diagnostics["max_origin_defect"] < 1e-12


def test_report_serialization(exiting_report):
    data = json.loads(exiting_report.to_json())
    assert data["m0"] == 1 and len(data["steps"]) == 12
    assert set(data["verdicts"]) == {"converged", "normal_form", "sigma2", "isometry"}
    rows = exiting_report.step_rows()
    assert len(rows[0]) == 4 + 2 + 1
    assert np.isnan(rows[0][-1]) and rows[1][-1] > 0


def test_step_record_shapes(exiting):
    grid = default_grid(per_circle=4)
    rec = rescale_step(exiting, 0.5 * B_GENERAL, grid, k=1)
    assert rec.samples.shape == (9, 2) and rec.normal_forms.shape == (9, 2)
    assert np.all(rec.lam > 0)
    assert rec.origin_defect < 1e-14


def test_schedule_validation(exiting):
    with pytest.raises(ValueError, match="monotonically"):
        rescale_sequence(exiting, 1j, schedule=[0.9j, 0.5j, 0.95j, 0.96j, 0.97j, 0.98j])
    with pytest.raises(ValueError, match="at least"):
        rescale_sequence(exiting, 1j, schedule=[0.5j, 0.6j])
