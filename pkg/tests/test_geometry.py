import numpy as np
import pytest

from intern.geometry import (
    Chart, DegreeError, DimensionMismatchError, DomainError, KForm, Map, VectorField,
    cartan_residual, d_squared_residual, exact_form, fd_form_residual, fd_hessian_residual, interior_product,
    jacobi_residual, lie_bracket, lie_derivative, random_one_form, random_vector_fields,
    pullback, weighted_d, wedge,
)

SAMPLES = 20


@pytest.fixture(scope="module")
def r3():
    return Chart.build("R3", ("x", "y", "z"), [(-1, 1), (-1, 1), (0.5, 2)], positive=["z"])


@pytest.fixture(scope="module")
def annulus():
    return Chart.build("annulus", ("x", "y"), {"x": (-2, 2), "y": (-2, 2)}, positive=["x^2 + y^2 - 1", "4 - x^2 - y^2"])


def test_sampling_is_seeded_and_inside_domain(annulus):
    a = annulus.sample(50, seed=7)
    b = annulus.sample(50, seed=7)
    np.testing.assert_array_equal(a, b)
    assert all(annulus.contains(p) for p in a)
    assert not np.array_equal(a, annulus.sample(50, seed=8))


def test_domain_checks(annulus):
    assert not annulus.contains([0.0, 0.0])
    with pytest.raises(DomainError):
        annulus.require([0.1, 0.1])
    empty = Chart.build("empty", ("x",), [(0, 1)], positive=["-1"])
    with pytest.raises(DomainError):
        empty.sample(3, seed=0)


def test_domain_expression_must_use_declared_coordinates():
    xy = Chart.build("xy", ("x", "y"), [(0, 1)] * 2)
    with pytest.raises(DimensionMismatchError):
        Chart("x-only", ("x",), ((0.0, 1.0),), (xy.parse("x + y"),))


def test_extend_appends_coordinate(r3):
    wide = r3.extend("t", (1, 2), positive_extra=("t - 1",))
    assert wide.coords == ("x", "y", "z", "t")
    assert wide.contains([0, 0, 1, 1.5])
    assert not wide.contains([0, 0, 1, 1.0])


def test_exterior_derivative_of_coordinate_form(r3):
    omega = KForm.from_expressions(r3, [r3.parse(c) for c in ("0", "x", "0")])   # x dy
    d = omega.d()
    e = np.eye(3)
    p = [0.2, 0.3, 1.0]
    assert d(p, e[0], e[1]) == pytest.approx(1.0)
    assert d(p, e[1], e[0]) == pytest.approx(-1.0)
    assert d(p, e[0], e[2]) == pytest.approx(0.0)


def test_calculus_identities_on_random_fields(r3):
    X, Y, Z = random_vector_fields(r3, 3, seed=3)
    omega = random_one_form(r3, seed=3)
    for p in r3.sample(SAMPLES, seed=1):
        assert jacobi_residual(X, Y, Z, p) <= 1e-9
        assert cartan_residual(X, omega, p) <= 1e-9
        assert d_squared_residual(omega, p) <= 1e-9
        assert fd_form_residual(omega, p) <= 1e-5
        assert fd_hessian_residual(omega, p) <= 1e-4


def test_lie_bracket_of_coordinate_fields(r3):
    dx = VectorField.coordinate(r3, 0)
    x_dy = VectorField.from_expressions(r3, [r3.parse(c) for c in ("0", "x", "0")])
    np.testing.assert_allclose(lie_bracket(dx, x_dy, [0.1, 0.2, 1.0]), [0.0, 1.0, 0.0])


def test_wedge_and_interior_product(r3):
    a = KForm.from_expressions(r3, [r3.parse(c) for c in ("y", "1", "0")])
    b = KForm.from_expressions(r3, [r3.parse(c) for c in ("0", "z", "x")])
    ab, ba = wedge(a, b), wedge(b, a)
    p = [0.4, -0.2, 1.3]
    u, v = np.array([1.0, 2.0, 0.5]), np.array([-0.3, 0.1, 1.0])
    assert ab(p, u, v) == pytest.approx(a(p, u) * b(p, v) - a(p, v) * b(p, u))
    assert ab(p, u, v) == pytest.approx(-ba(p, u, v))
    X = VectorField.constant(r3, u)
    assert interior_product(X, ab)(p, v) == pytest.approx(ab(p, u, v))


def test_wedge_of_three_forms_in_top_degree(r3):
    dx, dy, dz = (exact_form(KForm.coordinate_function(r3, i)) for i in range(3))
    vol = wedge(wedge(dx, dy), dz)
    e = np.eye(3)
    p = [0.0, 0.0, 1.0]
    assert vol(p, e[0], e[1], e[2]) == pytest.approx(1.0)
    assert vol(p, e[1], e[0], e[2]) == pytest.approx(-1.0)


def test_pullback_commutes_with_d(r3):
    square = Chart.build("square", ("u", "v"), [(-1, 1), (-1, 1)])
    F = Map.from_expressions(square, r3, [square.parse(c) for c in ("u*v", "sin(u)", "1 + v^2")])
    omega = KForm.from_expressions(r3, [r3.parse(c) for c in ("y*z", "x^2", "x - y")])
    pulled = pullback(F, omega)
    recomputed = KForm(square, 1, pulled.jet)   # no exterior override: d from jets
    for p in square.sample(10, seed=2):
        np.testing.assert_allclose(recomputed.d().jet(p).value, pullback(F, omega.d()).jet(p).value, atol=1e-12)


def test_map_differential_is_the_jacobian_jet(r3):
    square = Chart.build("square", ("u", "v"), [(-1, 1), (-1, 1)])
    F = Map.from_expressions(square, r3, [square.parse(c) for c in ("exp(u)*v", "u - v", "cos(u*v)")])
    for u, v in square.sample(5, seed=4):
        D = F.differential([u, v])
        assert D.order == 1
        expected = [[np.exp(u) * v, np.exp(u)], [1.0, -1.0], [-v * np.sin(u * v), -u * np.sin(u * v)]]
        np.testing.assert_allclose(D.value, expected, atol=1e-14)
        # d/du of the first row
        np.testing.assert_allclose(D.grad[0, :, 0], [np.exp(u) * v, np.exp(u)], atol=1e-14)


def test_pullback_of_a_curved_map_has_first_derivatives(r3):
    square = Chart.build("square", ("u", "v"), [(-1, 1), (-1, 1)])
    F = Map.from_expressions(square, r3, [square.parse(c) for c in ("u*v", "sin(u)", "1 + v^2")])
    omega = KForm.from_expressions(r3, [r3.parse(c) for c in ("y*z", "x^2", "x - y")])
    pulled = pullback(F, omega)
    for p in square.sample(5, seed=6):
        assert fd_form_residual(pulled, p) <= 1e-5
        with pytest.raises(ValueError, match="no second derivatives"):
            fd_hessian_residual(pulled, p)


def test_linear_maps_compose(r3):
    M = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    swap = Map.linear(r3, r3, M, name="swap")
    twice = swap.then(swap)
    np.testing.assert_allclose(twice([0.1, 0.2, 0.3]), [0.1, 0.2, 1.2])
    assert swap.jet([0.1, 0.2, 0.3]).order == 2


def test_lie_derivative_of_invariant_form(r3):
    # rotation in (x, y) preserves x dy - y dx
    rot = VectorField.from_expressions(r3, [r3.parse(c) for c in ("-y", "x", "0")])
    theta = KForm.from_expressions(r3, [r3.parse(c) for c in ("-y", "x", "0")])
    for p in r3.sample(5, seed=5):
        np.testing.assert_allclose(lie_derivative(rot, theta).jet(p).value, 0.0, atol=1e-14)


def test_weighted_d_adds_connection_term(r3):
    beta = KForm.from_expressions(r3, [r3.parse(c) for c in ("0", "0", "1")])
    gamma = KForm.from_expressions(r3, [r3.parse(c) for c in ("1", "0", "0")])
    e = np.eye(3)
    p = [0.0, 0.0, 1.0]
    assert weighted_d(beta, gamma, 2)(p, e[0], e[2]) == pytest.approx(2.0)
    assert weighted_d(beta, gamma, 0)(p, e[0], e[2]) == pytest.approx(0.0)


def test_degree_and_dimension_errors(r3):
    f = KForm.coordinate_function(r3, 0)
    omega = exact_form(f)
    with pytest.raises(DegreeError):
        omega([0, 0, 1])
    with pytest.raises(DimensionMismatchError):
        omega([0, 0, 1], [1.0, 0.0])
    with pytest.raises(DegreeError):
        interior_product(VectorField.coordinate(r3, 0), f)
    with pytest.raises(DimensionMismatchError):
        KForm.from_expressions(r3, [r3.parse("x")])
