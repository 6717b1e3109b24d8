import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intern.expr import Jet2, JetDomainError, SingularJetError, compose, matmul, outer, solve, stack
from intern.expr import jet as J
from intern.geometry import central_difference


def test_variable_and_constant_orders():
    X = Jet2.variable([1.0, 2.0])
    assert X.order == 2
    assert X.n == 2
    np.testing.assert_array_equal(X.grad, np.eye(2))
    assert Jet2.constant(3.0, 2, order=1).order == 1
    assert Jet2(3.0).order == 0


def test_product_rule_second_order():
    X = Jet2.variable([1.5, -0.5])
    x, y = X[0], X[1]
    f = x * y * y
    assert f.value == pytest.approx(1.5 * 0.25)
    np.testing.assert_allclose(f.grad, [0.25, 2 * 1.5 * -0.5])
    np.testing.assert_allclose(f.hess, [[0.0, 2 * -0.5], [2 * -0.5, 2 * 1.5]])


def test_order_is_the_minimum_of_operands():
    X = Jet2.variable([1.0, 2.0])
    assert (X[0] * X[1].truncate(1)).order == 1
    assert (X[0] + Jet2(4.0)).order == 0


def test_constant_matrix_product_keeps_full_order():
    X = Jet2.variable([0.3, 0.7])
    M = np.array([[1.0, 2.0], [-1.0, 0.5]])
    out = matmul(M, X * X)
    assert out.order == 2
    np.testing.assert_allclose(out.grad, M @ np.diag(2 * X.value))
    assert outer(X, np.ones(2)).order == 2
    assert stack([X[0], 1.0]).order == 2


@pytest.mark.parametrize("fn, exact", [
    (J.exp, lambda v: (np.exp(v), np.exp(v), np.exp(v))),
    (J.log, lambda v: (np.log(v), 1 / v, -1 / v ** 2)),
    (J.sin, lambda v: (np.sin(v), np.cos(v), -np.sin(v))),
    (J.sqrt, lambda v: (np.sqrt(v), 0.5 / np.sqrt(v), -0.25 * v ** -1.5)),
    (J.tan, lambda v: (np.tan(v), 1 / np.cos(v) ** 2, 2 * np.tan(v) / np.cos(v) ** 2)),
])
def test_elementary_functions_match_closed_form(fn, exact):
    v = 0.7
    out = fn(Jet2.variable([v])[0])
    f0, f1, f2 = exact(v)
    assert out.value == pytest.approx(f0)
    assert out.grad[0] == pytest.approx(f1)
    assert out.hess[0, 0] == pytest.approx(f2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 3.0), st.integers(-3, 4))
def test_integer_power(v, k):
    out = Jet2.variable([v])[0] ** k
    assert out.value == pytest.approx(v ** k)
    assert out.grad[0] == pytest.approx(k * v ** (k - 1) if k else 0.0)
    assert out.hess[0, 0] == pytest.approx(k * (k - 1) * v ** (k - 2) if k not in (0, 1) else 0.0)


def test_variable_exponent_goes_through_log():
    X = Jet2.variable([2.0, 3.0])
    out = X[0] ** X[1]
    assert out.value == pytest.approx(8.0)
    np.testing.assert_allclose(out.grad, [3 * 4.0, 8.0 * np.log(2.0)])


def test_solve_derivatives_match_finite_differences():
    def system(p):
        X = Jet2.variable(p)
        x, y = X[0], X[1]
        A = stack([stack([2.0 + x * x, y]), stack([y, 3.0 + J.sin(x)])])
        b = stack([1.0 + 0 * x, x * y])
        return A, b

    p = np.array([0.4, -0.3])
    A, b = system(p)
    out = solve(A, b)

    def plain(q):
        Aq, bq = system(q)
        return np.linalg.solve(Aq.value, bq.value)
    np.testing.assert_allclose(out.value, plain(p))
    np.testing.assert_allclose(out.grad, central_difference(plain, p), atol=1e-7)

    def gradient(q):
        Aq, bq = system(q)
        return solve(Aq, bq).grad
    np.testing.assert_allclose(out.hess, central_difference(gradient, p), atol=1e-6)


def test_compose_is_the_chain_rule():
    X = Jet2.variable([0.5, 1.2])
    Y = stack([X[0] * X[1], J.exp(X[0])])
    y = Y.value
    F = Jet2.variable(y)[0] * Jet2.variable(y)[1]   # F(u, v) = u v
    out = compose(F, Y)
    direct = X[0] * X[1] * J.exp(X[0])
    np.testing.assert_allclose(out.value, direct.value)
    np.testing.assert_allclose(out.grad, direct.grad)
    np.testing.assert_allclose(out.hess, direct.hess)


@pytest.mark.parametrize("fn, arg", [
    (J.log, -1.0),
    (J.sqrt, -0.5),
    (J.reciprocal, 0.0),
])
def test_domain_errors(fn, arg):
    with pytest.raises(JetDomainError):
        fn(Jet2.variable([arg])[0])


def test_singular_solve_raises():
    A = Jet2.constant(np.array([[1.0, 2.0], [2.0, 4.0]]), 2)
    with pytest.raises(SingularJetError):
        solve(A, Jet2.constant(np.ones(2), 2))


def test_numpy_does_not_swallow_jets():
    X = Jet2.variable([1.0, 2.0])
    out = np.float64(2.0) * X
    assert isinstance(out, Jet2)
    assert out.order == 2
