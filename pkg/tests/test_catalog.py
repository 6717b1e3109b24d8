import pytest

from intern.catalog import (
    ALL_SUITES, CATALOG, CatalogError, build_example, example_names, make_example3, make_sphere,
)
from intern.crweyl import is_sasaki, validate
from intern.reduction import moment_map, rho
from intern.suites import RunOptions, run_suites


def test_every_example_builds_and_lists_known_suites():
    assert example_names() == list(CATALOG)
    for name, d in CATALOG.items():
        bundle = build_example(name)
        assert bundle.name == name
        assert bundle.expected == d.expected
        assert set(d.expected) <= set(ALL_SUITES)


def test_unknown_example():
    with pytest.raises(CatalogError, match="unknown example 'nope'"):
        build_example("nope")


@pytest.mark.parametrize("n, weights, lam, message", [
    (1, (1,), 2.0, "n must be at least 2"),
    (2, (1, -1, 1), 2.0, "weights given"),
    (2, (1, 1), 2.0, "same sign"),
    (2, (1, 0), 2.0, "nonzero"),
    (2, (1, -1), 1.0, "lambda must be > 1"),
])
def test_invalid_example2_parameters(n, weights, lam, message):
    with pytest.raises(CatalogError, match=message):
        build_example("example2", n, weights, lam)


def test_higher_dimensional_example2_has_action_but_no_slice(quiet_logger):
    bundle = build_example("example2", 3, (1, 1, -2), 3.0)
    assert bundle.structure.chart.dim == 7
    assert bundle.slice is None
    x = [0.5, 0.1, -0.2, 0.3, 0.4, 0.0, 1.0]
    assert moment_map(bundle.action, x) == [pytest.approx(0.26 + 0.13 - 2 * 0.16)]
    assert rho(bundle.action, samples=5)["g"] == pytest.approx(9.0)
    reports = run_suites(bundle, ["reduction", "exactness"], RunOptions(samples=4), quiet_logger)
    assert [r.outcome for r in reports] == ["pass", "skip"]


def test_sphere_in_higher_dimension_is_sasaki():
    s = make_sphere(3)
    assert s.chart.dim == 5
    assert validate(s, 6).passed
    assert is_sasaki(s, samples=6)


def test_example3_rejects_clashing_chart(sasaki):
    with pytest.raises(CatalogError, match="already uses"):
        make_example3(sasaki)


def test_example3_rho_is_lambda_squared():
    bundle = build_example("example3", lam=3.0)
    assert bundle.action.rank == 0
    assert rho(bundle.action, samples=5)["g"] == pytest.approx(9.0)
