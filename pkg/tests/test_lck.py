import numpy as np
import pytest

from intern.catalog import build_example
from intern.cone import ConeSpace, LckForms, domega_identity_residual, kappa_form, lck_check, lee_form

SAMPLES = 6


@pytest.fixture(scope="module")
def example1_cone(example1):
    return ConeSpace(example1)


def test_example1_is_lck_with_unit_kappa(example1_cone):
    cert = lck_check(example1_cone, SAMPLES, seed=1)
    assert cert.passed, cert.report.failing()
    np.testing.assert_allclose(cert.kappa_values, 1.0, atol=1e-9)
    x = example1_cone.base.chart.sample(1, seed=2)[0]
    assert cert.in_global_kahler_locus(x)


def test_sasaki_cone_is_kahler(sasaki_cone):
    cert = lck_check(sasaki_cone, SAMPLES, seed=1)
    assert cert.passed, cert.report.failing()
    assert max(abs(k) for k in cert.kappa_values) <= 1e-12
    for p in sasaki_cone.chart.sample(3, seed=3):
        assert np.abs(lee_form(sasaki_cone).jet(p).value).max() <= 1e-12


@pytest.mark.parametrize("name", ["example2", "example1", "example1-kappa", "example2-broken"])
def test_domega_identity_holds_for_every_structure(name):
    c = ConeSpace(build_example(name).structure)
    forms = LckForms(c)
    for i, p in enumerate(c.chart.sample(SAMPLES, seed=4)):
        assert domega_identity_residual(c, p, seed=i, forms=forms) <= 1e-9


def test_non_constant_kappa_is_not_lck():
    c = ConeSpace(build_example("example1-kappa").structure)
    cert = lck_check(c, SAMPLES, seed=1)
    assert not cert.passed
    assert cert.residual("sasaki_weyl") <= 1e-8
    assert cert.residual("faraday_factorization") <= 1e-8
    assert {"bianchi", "reeb_faraday"} <= set(cert.report.failing())
    for x in c.base.chart.sample(4, seed=5):
        assert kappa_form(c.base).jet(x).value == pytest.approx(x[0], abs=1e-9)


def test_broken_connection_is_not_lck():
    c = ConeSpace(build_example("example2-broken").structure)
    cert = lck_check(c, SAMPLES, seed=1)
    assert not cert.passed
    assert "sasaki_weyl" in cert.report.failing()
