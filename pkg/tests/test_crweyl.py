import numpy as np
import pytest

from intern.catalog import build_example
from intern.crweyl import (
    CRWeylError, CRWeylStructure, NotHorizontalError,
    gauge_transform, h_frame, i_on_frame, is_sasaki, levi_gram, levi_metric, max_defect, reeb_field,
    sasaki_weyl_defect, validate,
)
from intern.geometry import Chart, EndomorphismField, KForm

SAMPLES = 15


def _structure(theta, rows, coords=("x", "y", "t"), gamma=None):
    chart = Chart.build("R3", coords, [(-1, 1), (-1, 1), (0.5, 2)])
    parse = chart.parse
    theta0 = KForm.from_expressions(chart, [parse(c) for c in theta])
    g = KForm.from_expressions(chart, [parse(c) for c in gamma]) if gamma else KForm.zero(chart, 1)
    endo = EndomorphismField.from_expressions(chart, [[parse(c) for c in row] for row in rows])
    return CRWeylStructure(chart, theta0, endo, g, "test")


HEISENBERG_ENDO = [["0", "-1", "0"], ["1", "0", "0"], ["x", "y", "0"]]


def test_example2_validates(sasaki):
    report = validate(sasaki, SAMPLES)
    assert report.passed, report.failing()
    assert {"levi_positive", "reeb_solvable", "endo_preserves_h", "cr_integrability"} <= {c.name for c in report.checks}


def test_reeb_field_of_example2(sasaki):
    for p in sasaki.chart.sample(5, seed=1):
        T = reeb_field(sasaki, p)
        np.testing.assert_allclose(T, [0, 0, 0, 0, -1], atol=1e-12)
        assert sasaki.theta0(p, T) == pytest.approx(1.0)


def test_levi_metric_and_cr_on_frames(sasaki):
    p = sasaki.chart.sample(1, seed=3)[0]
    frame = h_frame(sasaki, p)
    assert frame.vectors.shape == (5, 4)
    np.testing.assert_allclose(sasaki.theta0.jet(p).value @ frame.vectors, 0.0, atol=1e-12)
    G = levi_gram(sasaki, p, frame)
    np.testing.assert_allclose(G, G.T, atol=1e-12)
    assert np.linalg.eigvalsh(G).min() > 0
    I = i_on_frame(sasaki, p)
    np.testing.assert_allclose(I @ I, -np.eye(4), atol=1e-10)


def test_sasaki_examples(sasaki, sphere, example1):
    assert is_sasaki(sasaki)
    assert is_sasaki(sphere)
    assert not is_sasaki(example1)


def test_defect_vanishes_on_sasaki_weyl_structures(sasaki, example1, sphere):
    for s in (sasaki, example1, sphere):
        assert max_defect(s, s.chart.sample(SAMPLES, seed=5)) <= 1e-9, s.name


def test_defect_detects_non_sasaki_weyl_connection(broken):
    assert validate(broken, SAMPLES).passed
    assert max_defect(broken, broken.chart.sample(SAMPLES, seed=5)) > 1e-3


def test_defect_does_not_depend_on_extension(broken):
    rng = np.random.default_rng(11)
    for p in broken.chart.sample(5, seed=6):
        for v in h_frame(broken, p).vectors.T:
            plain = sasaki_weyl_defect(broken, p, v)
            other = sasaki_weyl_defect(broken, p, v, linear=rng.normal(size=(5, 5)))
            np.testing.assert_allclose(plain, other, atol=1e-9)


def test_defect_needs_horizontal_vector(sasaki):
    p = sasaki.chart.sample(1, seed=0)[0]
    with pytest.raises(NotHorizontalError):
        sasaki_weyl_defect(sasaki, p, [0, 0, 0, 0, 1.0])


def test_gauge_change(sasaki):
    u = sasaki.chart.parse("0.3*x1 - 0.2*y2 + 0.1*t")
    gauged = gauge_transform(sasaki, u)
    assert validate(gauged, SAMPLES).passed
    assert not is_sasaki(gauged)
    for p in sasaki.chart.sample(5, seed=8):
        np.testing.assert_allclose(gauged.theta0.jet(p).value, np.exp(-u(p)) * sasaki.theta0.jet(p).value)
        np.testing.assert_allclose(gauged.gamma.jet(p).value, u.jet(p).grad, atol=1e-12)
        assert np.abs(gauged.faraday.jet(p).value).max() <= 1e-12


def test_heisenberg_structure_is_sasaki():
    s = _structure(["-y", "x", "-1"], HEISENBERG_ENDO)
    assert validate(s, SAMPLES).passed
    assert is_sasaki(s)


def test_degenerate_contact_form_fails_pseudoconvexity():
    s = _structure(["0", "0", "1"], [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]])
    report = validate(s, SAMPLES)
    assert not report.passed
    assert "levi_positive" in report.failing()


@pytest.mark.parametrize("name, failing", [
    ("example2-flipped", "levi_positive"),
    ("example2-twisted", "cr_integrability"),
])
def test_negative_controls_fail_validation(name, failing):
    report = validate(build_example(name).structure, SAMPLES)
    assert not report.passed
    assert failing in report.failing()
    assert report.check(failing).max_residual > 1e-3


def test_chart_dimension_must_be_odd():
    chart = Chart.build("R2", ("x", "y"), [(-1, 1), (-1, 1)])
    theta = KForm.from_expressions(chart, [chart.parse("1"), chart.parse("0")])
    endo = EndomorphismField.constant(chart, np.eye(2))
    with pytest.raises(CRWeylError):
        CRWeylStructure(chart, theta, endo, KForm.zero(chart, 1))


def test_constant_gauge_rescales_reeb_field(sasaki):
    doubled = gauge_transform(sasaki, sasaki.chart.parse("log(2)"))
    for p in sasaki.chart.sample(4, seed=12):
        np.testing.assert_allclose(reeb_field(doubled, p), 2.0 * reeb_field(sasaki, p), atol=1e-12)


def test_levi_metric_at_a_point(sasaki):
    p = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
    e = np.eye(5)
    assert levi_metric(sasaki, p, e[0], e[0]) == pytest.approx(1.0)
    v, w = e[0] + 0.5 * e[2], e[3]
    assert levi_metric(sasaki, p, v, w) == pytest.approx(levi_metric(sasaki, p, w, v), abs=1e-12)
    with pytest.raises(NotHorizontalError):
        levi_metric(sasaki, p, e[1], e[0])
