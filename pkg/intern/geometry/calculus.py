import numpy as np

from intern.expr import Expression
from .chart import Chart
from .fields import (
    KForm, VectorField, bracket_field, lie_bracket, interior_product, lie_derivative,
)


FD_STEP = 1e-5


def max_abs(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x))) if x.size else 0.0


def relative(residual: float, scale: float) -> float:
    return residual / max(1.0, scale)


def coordinate_frame(chart: Chart) -> list[np.ndarray]:
    return list(np.eye(chart.dim))


def jacobi_residual(X: VectorField, Y: VectorField, Z: VectorField, p) -> float:
    terms = [
        lie_bracket(bracket_field(X, Y), Z, p),
        lie_bracket(bracket_field(Y, Z), X, p),
        lie_bracket(bracket_field(Z, X), Y, p),
    ]
    scale = max(max_abs(t) for t in terms)
    return relative(max_abs(sum(terms)), scale)


def cartan_residual(X: VectorField, omega: KForm, p) -> float:
    """L_X w - (i_X dw + d i_X w) for a 1-form, against the coordinate frame."""
    lhs = lie_derivative(X, omega).jet(p).value
    rhs_form = interior_product(X, omega.d()) + interior_product(X, omega).d()
    rhs = rhs_form.jet(p).value
    return relative(max_abs(lhs - rhs), max_abs(lhs))


def d_squared_residual(omega: KForm, p) -> float:
    """Largest |d(d w)| over coordinate triples."""
    dd = omega.d().d()
    e = coordinate_frame(omega.chart)
    N = omega.chart.dim
    worst = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            for k in range(j + 1, N):
                worst = max(worst, abs(dd(p, e[i], e[j], e[k])))
    return worst


def central_difference(fn, p, h: float = FD_STEP) -> np.ndarray:
    """Gradient of fn at p by central differences; fn may return arrays."""
    p = np.asarray(p, dtype=float)
    cols = []
    for i in range(p.shape[0]):
        step = np.zeros_like(p)
        step[i] = h
        cols.append((np.asarray(fn(p + step)) - np.asarray(fn(p - step))) / (2 * h))
    return np.stack(cols, axis=-1)


def fd_form_residual(omega: KForm, p, h: float = FD_STEP) -> float:
    """Jet gradient of a table form against central differences of its values."""
    J = omega.jet(p)
    fd = central_difference(lambda q: omega.jet(q).value, p, h)
    return relative(max_abs(J.grad - fd), max_abs(J.grad))


def fd_hessian_residual(omega: KForm, p, h: float = FD_STEP) -> float:
    """Jet Hessian of a table form against central differences of its jet gradient."""
    J = omega.jet(p)
    if J.hess is None:
        raise ValueError(f"form '{omega.name}' carries no second derivatives")
    fd = central_difference(lambda q: omega.jet(q).grad, p, h)
    return relative(max_abs(J.hess - fd), max_abs(J.hess))


def random_expressions(chart: Chart, count: int, seed: int, terms: int = 4) -> list[Expression]:
    """Seeded sums of linear, quadratic, sine and exponential terms in the chart coordinates."""
    rng = np.random.default_rng(seed)
    coords = chart.coords
    out = []
    for _ in range(count):
        parts = [f"{rng.uniform(-1, 1):.3f}"]
        for _ in range(terms):
            c = f"{rng.uniform(-1, 1):.3f}"
            a, b = rng.integers(0, len(coords), size=2)
            kind = rng.integers(0, 5)
            if kind == 0:
                parts.append(f"{c}*{coords[a]}")
            elif kind == 1:
                parts.append(f"{c}*{coords[a]}*{coords[b]}")
            elif kind == 2:
                parts.append(f"{c}*{coords[a]}^2")
            elif kind == 3:
                parts.append(f"{c}*sin({coords[a]} - {coords[b]})")
            else:
                parts.append(f"{c}*exp({rng.uniform(-0.5, 0.5):.3f}*{coords[a]})")
        out.append(chart.parse(" + ".join(parts).replace("+ -", "- ")))
    return out


def random_vector_fields(chart: Chart, count: int, seed: int) -> list[VectorField]:
    fields = []
    for k in range(count):
        comps = random_expressions(chart, chart.dim, seed * 1000 + k)
        fields.append(VectorField.from_expressions(chart, comps, name=f"rand{k}"))
    return fields


def random_one_form(chart: Chart, seed: int) -> KForm:
    return KForm.from_expressions(chart, random_expressions(chart, chart.dim, seed * 1000 + 999), name="rand")
