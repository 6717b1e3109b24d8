import numpy as np
import pytest

from intern.catalog import build_example
from intern.cone import (
    ConeSpace, cone_horizontal_lift, j_squared_residual, jpotential_residual, metric_decomposition_residuals, metric_matrix,
    min_metric_eigenvalue, nijenhuis, nijenhuis_matrix, nijenhuis_mixed, omega_invariance_residual,
)
from intern.crweyl import NotHorizontalError, h_frame

SAMPLES = 8


@pytest.fixture(scope="module")
def kappa_cone():
    return ConeSpace(build_example("example1-kappa").structure)


def test_cone_chart(sasaki_cone, sasaki):
    assert sasaki_cone.coord == "sigma"
    assert sasaki_cone.chart.coords == sasaki.chart.coords + ("sigma",)
    p = sasaki_cone.point(np.ones(5), 2.0)
    x, t = sasaki_cone.split(p)
    assert t == 2.0 and x.shape == (5,)


@pytest.mark.parametrize("name", ["example2", "example1", "example2-broken", "sphere"])
def test_j_is_almost_complex_and_omega_invariant(name):
    c = ConeSpace(build_example(name).structure)
    for p in c.chart.sample(SAMPLES, seed=2):
        assert j_squared_residual(c, p) <= 1e-10
        assert omega_invariance_residual(c, p) <= 1e-10
        assert jpotential_residual(c, p) <= 1e-10


def test_metric_splits_orthogonally(sasaki_cone):
    for p in sasaki_cone.chart.sample(SAMPLES, seed=3):
        res = metric_decomposition_residuals(sasaki_cone, p)
        assert res["orthogonal"] <= 1e-10
        assert res["reeb_norm"] <= 1e-10
        assert res["vertical_norm"] <= 1e-10
        assert res["horizontal"] <= 1e-10
        G = metric_matrix(sasaki_cone, p)
        np.testing.assert_allclose(G, G.T, atol=1e-10)
        assert min_metric_eigenvalue(sasaki_cone, p) > 0


def test_negated_cone_has_negative_metric(sasaki_cone):
    negated = sasaki_cone.negated()
    for p in sasaki_cone.chart.sample(SAMPLES, seed=4):
        assert min_metric_eigenvalue(negated, p) < 0


def test_flipped_levi_form_gives_indefinite_metric():
    c = ConeSpace(build_example("example2-flipped").structure)
    assert min(min_metric_eigenvalue(c, p) for p in c.chart.sample(SAMPLES, seed=5)) < 0


@pytest.mark.parametrize("name", ["example2", "example1", "sphere"])
def test_nijenhuis_vanishes_on_sasaki_weyl_cones(name):
    c = ConeSpace(build_example(name).structure)
    for p in c.chart.sample(SAMPLES, seed=6):
        assert np.abs(nijenhuis_matrix(c, p)).max() <= 1e-8


@pytest.mark.parametrize("name", ["example2-broken", "example1-kappa"])
def test_nijenhuis_detects_non_integrable_cones(name):
    c = ConeSpace(build_example(name).structure)
    worst = max(np.abs(nijenhuis_matrix(c, p)).max() for p in c.chart.sample(SAMPLES, seed=6))
    assert worst > 1e-3


def test_nijenhuis_matrix_matches_brackets():
    c = ConeSpace(build_example("example2-broken").structure)
    p = c.chart.sample(1, seed=7)[0]
    N = nijenhuis_matrix(c, p)
    E = np.eye(c.dim)
    for i, j in [(0, 1), (1, 4), (2, 5), (3, 4)]:
        np.testing.assert_allclose(N[i, j], nijenhuis(c, p, E[i], E[j]), atol=1e-9)


def test_mixed_nijenhuis_matches_brackets(kappa_cone):
    c = kappa_cone
    rng = np.random.default_rng(0)
    for p in c.chart.sample(SAMPLES, seed=8):
        x, _ = c.split(p)
        frame = h_frame(c.base, x).vectors
        X = frame @ rng.normal(size=frame.shape[1])
        lhs = nijenhuis(c, p, c.horizontal_lift(p, X), c.reeb_lift(p))
        rhs = nijenhuis_mixed(c, p, X)
        assert np.abs(lhs - rhs).max() <= 1e-8 * max(1.0, np.abs(rhs).max())


def test_horizontal_lift_needs_horizontal_vector(sasaki_cone):
    p = sasaki_cone.chart.sample(1, seed=9)[0]
    with pytest.raises(NotHorizontalError):
        cone_horizontal_lift(sasaki_cone, p, np.eye(5)[4])
