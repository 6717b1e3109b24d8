import math

import numpy as np
import pytest
from hypothesis import given, seed, settings, strategies as st

from intern.expr import (
    BinOp, Call, Const, ExprDomainError, ExprSyntaxError, Neg, Num, Sym, UnknownIdentifierError,
    parse, rebind, to_source,
)
from intern.geometry import central_difference, max_abs

COORDS = ("x", "y", "t")


@pytest.mark.parametrize("source, point, expected", [
    ("-x^2", [3.0, 0, 0], -9.0),
    ("2^3^2", [0, 0, 0], 512.0),
    ("x^-2", [2.0, 0, 0], 0.25),
    ("x - y - t", [1.0, 2.0, 3.0], -4.0),
    ("x / y / t", [12.0, 2.0, 3.0], 2.0),
    ("2*pi*x", [0.5, 0, 0], math.pi),
    ("e^x", [1.0, 0, 0], math.e),
    ("atan2(y, x)", [0.0, 1.0, 0], math.pi / 2),
    ("sqrt(x^2 + y^2)", [3.0, 4.0, 0], 5.0),
    ("1.5e-1 * t", [0, 0, 2.0], 0.3),
])
def test_evaluation_and_precedence(source, point, expected):
    assert parse(source, COORDS)(point) == pytest.approx(expected)


def test_syntax_error_location():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x +", COORDS)
    assert (exc.value.line, exc.value.column) == (1, 4)

    with pytest.raises(ExprSyntaxError) as exc:
        parse("x * (y\n + t", COORDS)
    assert exc.value.line == 2


@pytest.mark.parametrize("source", ["", "x y", "(x", "x $ y", "1e+", "atan2(x)", "sin(x, y)"])
def test_malformed_input(source):
    with pytest.raises(ExprSyntaxError):
        parse(source, COORDS)


def test_unknown_identifier_names_symbol():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse("x + z", COORDS)
    assert exc.value.symbol == "z"
    assert exc.value.column == 5

    with pytest.raises(UnknownIdentifierError, match="function 'foo'"):
        parse("foo(x)", COORDS)


def test_domain_error_carries_subexpression():
    e = parse("1 + log(x - 2)", COORDS)
    with pytest.raises(ExprDomainError) as exc:
        e.jet([1.0, 0.0, 0.0])
    assert exc.value.subexpression == "log(x - 2)"


def test_named_constants_print_by_name():
    e = parse("lambda^2 * t", COORDS, {"lambda": 2.0})
    assert e([0, 0, 1.5]) == pytest.approx(6.0)
    assert to_source(e) == "lambda^2 * t"
    assert e.free_symbols == frozenset({"t"})


def test_rebind_matches_symbols_by_name():
    e = parse("x * t", ("x", "t"))
    wider = rebind(e, ("t", "y", "x"))
    assert wider([2.0, 5.0, 3.0]) == pytest.approx(6.0)
    with pytest.raises(UnknownIdentifierError):
        rebind(e, ("x", "y"))


# ---------------------------------------------------------------------------
# Printing round trip
# ---------------------------------------------------------------------------

_leaves = st.one_of(
    st.sampled_from([Sym("x", 0), Sym("y", 1), Sym("t", 2), Const("pi", math.pi)]),
    st.floats(0, 50, allow_nan=False, allow_infinity=False).map(lambda v: Num(abs(round(v, 3)))),
)


def _nodes(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda a: BinOp(*a)),
        st.tuples(st.sampled_from(["sin", "exp", "log"]), children).map(lambda a: Call(a[0], (a[1],))),
        st.tuples(children, children).map(lambda a: Call("atan2", a)),
    )


@settings(max_examples=200, deadline=None)
@given(st.recursive(_leaves, _nodes, max_leaves=12))
def test_printed_source_reparses_to_same_tree(tree):
    assert parse(to_source(tree), COORDS).root == tree


# ---------------------------------------------------------------------------
# Jets against central differences
# ---------------------------------------------------------------------------

_smooth_leaves = st.one_of(
    st.sampled_from(["x", "y", "t"]),
    st.floats(-1.0, 1.0, allow_nan=False).map(lambda v: f"{v:.3f}"),
)


def _smooth_nodes(children):
    """Grammar constructs wrapped so that every draw is defined on [-1, 1]^3."""
    unary = st.sampled_from([
        "-({})", "sin({})", "cos({})", "exp(sin({}))", "log(1 + ({})^2)",
        "sqrt(2 + cos({}))", "tan(0.5*sin({}))", "cos(pi*({}))", "({0})^2 / (1 + ({0})^2)",
    ])
    binary = st.sampled_from([
        "({}) + ({})", "({}) - ({})", "({}) * ({})", "({}) / (2 + sin({}))",
        "({}) / (1 + ({})^2)", "(2 + sin({}))^(cos({}))",
    ])
    return st.one_of(
        st.tuples(unary, children).map(lambda a: a[0].format(a[1])),
        st.tuples(binary, children, children).map(lambda a: a[0].format(a[1], a[2])),
    )


@seed(42)
@settings(max_examples=200, deadline=None)
@given(st.recursive(_smooth_leaves, _smooth_nodes, max_leaves=6),
       st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3))
def test_jet_derivatives_match_central_differences(source, point):
    e = parse(source, COORDS)
    p = np.array(point)
    jet = e.jet(p)
    fd_grad = central_difference(e, p)
    fd_hess = central_difference(lambda q: e.jet(q).grad, p)
    assert max_abs(jet.grad - fd_grad) <= 1e-6 * max(1.0, max_abs(jet.grad))
    assert max_abs(jet.hess - fd_hess) <= 1e-4 * max(1.0, max_abs(jet.hess))
