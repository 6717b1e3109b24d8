"""
Pointwise tensor fields on a chart.

Every field is a closure p -> Jet2 over the chart coordinates. Fields declared
by Expressions carry order-2 jets; fields derived from them (brackets,
exterior derivatives, linear solves) carry whatever order survives, which is
what lets one more derivative be taken exactly.

k-forms with k <= 2 are component tables (scalar, covector, antisymmetric
matrix). Higher degrees only exist transiently as evaluators on tangent
vectors.
"""

from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from intern.expr import Jet2, Expression, stack, matmul, outer, compose
from .chart import Chart, DimensionMismatchError, DegreeError


def _eval_all(exprs: Sequence[Expression], X: Jet2) -> Jet2:
    return stack([e.on(X) for e in exprs])


def _same_chart(a, b, what: str):
    if a.chart.dim != b.chart.dim:
        raise DimensionMismatchError(
            f"{what}: charts '{a.chart.name}' (dim {a.chart.dim}) and '{b.chart.name}' (dim {b.chart.dim})"
        )


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

class Map:
    """A smooth map between charts given by component jets."""

    def __init__(self, source: Chart, target: Chart, jet_fn: Callable[[np.ndarray], Jet2],
                 matrix: Optional[np.ndarray] = None, name: str = ""):
        self.source = source
        self.target = target
        self._jet_fn = jet_fn
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.name = name

    @classmethod
    def from_expressions(cls, source: Chart, target: Chart, exprs: Sequence[Expression], name: str = "") -> "Map":
        exprs = tuple(exprs)
        if len(exprs) != target.dim:
            raise DimensionMismatchError(
                f"map '{name}': {len(exprs)} components for target dimension {target.dim}"
            )
        return cls(source, target, lambda p: _eval_all(exprs, Jet2.variable(p)), name=name)

    @classmethod
    def linear(cls, source: Chart, target: Chart, matrix, name: str = "") -> "Map":
        M = np.asarray(matrix, dtype=float)
        if M.shape != (target.dim, source.dim):
            raise DimensionMismatchError(f"map '{name}': matrix {M.shape} for {source.dim} -> {target.dim}")
        return cls(source, target, lambda p: matmul(M, Jet2.variable(p)), matrix=M, name=name)

    @classmethod
    def identity(cls, chart: Chart) -> "Map":
        return cls.linear(chart, chart, np.eye(chart.dim), name="id")

    @classmethod
    def projection(cls, source: Chart, target: Chart, indices: Sequence[int]) -> "Map":
        M = np.zeros((target.dim, source.dim))
        for row, col in enumerate(indices):
            M[row, col] = 1.0
        return cls.linear(source, target, M, name=f"pr_{target.name}")

    def jet(self, p) -> Jet2:
        return self._jet_fn(np.asarray(p, dtype=float))

    def __call__(self, p) -> np.ndarray:
        return self.jet(p).value

    def differential(self, p) -> Jet2:
        """Jet of the Jacobian, shape (target dim, source dim), one order below the map."""
        if self.matrix is not None:
            return Jet2.constant(self.matrix, self.source.dim)
        return self.jet(p).gradient_jet()

    def push(self, p, v) -> np.ndarray:
        return self.differential(p).value @ np.asarray(v, dtype=float)

    def then(self, other: "Map") -> "Map":
        """other o self."""
        if self.target.dim != other.source.dim:
            raise DimensionMismatchError(f"cannot compose '{self.name}' with '{other.name}'")
        if self.matrix is not None and other.matrix is not None:
            return Map.linear(self.source, other.target, other.matrix @ self.matrix,
                              name=f"{other.name}.{self.name}")

        def jet_fn(p):
            Y = self.jet(p)
            return compose(other.jet(Y.value), Y)
        return Map(self.source, other.target, jet_fn, name=f"{other.name}.{self.name}")


# ---------------------------------------------------------------------------
# Vector and endomorphism fields
# ---------------------------------------------------------------------------

class VectorField:
    def __init__(self, chart: Chart, jet_fn: Callable[[np.ndarray], Jet2], name: str = ""):
        self.chart = chart
        self._jet_fn = jet_fn
        self.name = name

    @classmethod
    def from_expressions(cls, chart: Chart, exprs: Sequence[Expression], name: str = "") -> "VectorField":
        exprs = tuple(exprs)
        if len(exprs) != chart.dim:
            raise DimensionMismatchError(
                f"vector field '{name}': {len(exprs)} components on a chart of dimension {chart.dim}"
            )
        return cls(chart, lambda p: _eval_all(exprs, Jet2.variable(p)), name)

    @classmethod
    def constant(cls, chart: Chart, vector, name: str = "") -> "VectorField":
        v = np.asarray(vector, dtype=float)
        return cls(chart, lambda p: Jet2.constant(v, chart.dim), name)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "VectorField":
        e = np.zeros(chart.dim)
        e[i] = 1.0
        return cls.constant(chart, e, name=f"d/d{chart.coords[i]}")

    def jet(self, p) -> Jet2:
        return self._jet_fn(np.asarray(p, dtype=float))

    def __call__(self, p) -> np.ndarray:
        return self.jet(p).value

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_chart(self, other, "vector field sum")
        return VectorField(self.chart, lambda p: self.jet(p) + other.jet(p))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_chart(self, other, "vector field difference")
        return VectorField(self.chart, lambda p: self.jet(p) - other.jet(p))

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, lambda p: -self.jet(p))

    def scaled(self, f) -> "VectorField":
        """f * X for a float or a 0-form."""
        if isinstance(f, KForm):
            return VectorField(self.chart, lambda p: f.jet(p) * self.jet(p))
        return VectorField(self.chart, lambda p: self.jet(p) * float(f))


class EndomorphismField:
    def __init__(self, chart: Chart, jet_fn: Callable[[np.ndarray], Jet2], name: str = ""):
        self.chart = chart
        self._jet_fn = jet_fn
        self.name = name

    @classmethod
    def from_expressions(cls, chart: Chart, rows: Sequence[Sequence[Expression]], name: str = "") -> "EndomorphismField":
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != chart.dim or any(len(r) != chart.dim for r in rows):
            raise DimensionMismatchError(f"endomorphism '{name}' is not {chart.dim}x{chart.dim}")
        flat = tuple(e for r in rows for e in r)
        N = chart.dim
        return cls(chart, lambda p: _eval_all(flat, Jet2.variable(p)).reshape(N, N), name)

    @classmethod
    def constant(cls, chart: Chart, matrix, name: str = "") -> "EndomorphismField":
        M = np.asarray(matrix, dtype=float)
        return cls(chart, lambda p: Jet2.constant(M, chart.dim), name)

    def jet(self, p) -> Jet2:
        return self._jet_fn(np.asarray(p, dtype=float))

    def __call__(self, p, v=None):
        M = self.jet(p).value
        return M if v is None else M @ np.asarray(v, dtype=float)

    def apply(self, X: VectorField) -> VectorField:
        _same_chart(self, X, "endomorphism application")
        return VectorField(self.chart, lambda p: matmul(self.jet(p), X.jet(p)))

    def then(self, other: "EndomorphismField") -> "EndomorphismField":
        """other o self."""
        return EndomorphismField(self.chart, lambda p: matmul(other.jet(p), self.jet(p)))

    def __neg__(self) -> "EndomorphismField":
        return EndomorphismField(self.chart, lambda p: -self.jet(p), name=f"-{self.name}")


def bracket_jets(X: Jet2, Y: Jet2) -> Jet2:
    """[X,Y]^i = X^j d_j Y^i - Y^j d_j X^i; one order lower than the inputs."""
    return matmul(Y.gradient_jet(), X.truncate(1)) - matmul(X.gradient_jet(), Y.truncate(1))


def lie_bracket(X: VectorField, Y: VectorField, p) -> np.ndarray:
    _same_chart(X, Y, "lie bracket")
    return bracket_jets(X.jet(p), Y.jet(p)).value


def bracket_field(X: VectorField, Y: VectorField) -> VectorField:
    _same_chart(X, Y, "lie bracket")
    return VectorField(X.chart, lambda p: bracket_jets(X.jet(p), Y.jet(p)))


# ---------------------------------------------------------------------------
# Differential forms
# ---------------------------------------------------------------------------

def _permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class KForm:
    """
    A differential k-form. Degrees 0..2 are component tables given by
    `jet_fn`; higher degrees are evaluators `evaluator(p, vectors) -> float`.
    `exterior`, when given, returns d of this form without differentiating
    its jets (used for exact and pulled-back forms so they keep full order).
    """

    def __init__(self, chart: Chart, degree: int,
                 jet_fn: Optional[Callable[[np.ndarray], Jet2]] = None,
                 evaluator: Optional[Callable] = None,
                 exterior: Optional[Callable[[], "KForm"]] = None,
                 name: str = ""):
        if degree > chart.dim:
            raise DegreeError(f"{degree}-form on a chart of dimension {chart.dim}")
        if jet_fn is None and evaluator is None:
            raise ValueError("KForm needs a component table or an evaluator")
        if jet_fn is None and degree <= 2:
            raise ValueError("forms of degree <= 2 are stored as component tables")
        self.chart = chart
        self.degree = degree
        self._jet_fn = jet_fn
        self._evaluator = evaluator
        self._exterior = exterior
        self.name = name

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_expressions(cls, chart: Chart, components, name: str = "") -> "KForm":
        """0-form from one Expression, 1-form from a list, 2-form from an antisymmetric matrix."""
        if isinstance(components, Expression):
            return cls(chart, 0, lambda p: components.jet(p), name=name)
        comps = list(components)
        if comps and isinstance(comps[0], Expression):
            if len(comps) != chart.dim:
                raise DimensionMismatchError(
                    f"1-form '{name}': {len(comps)} components on a chart of dimension {chart.dim}"
                )
            return cls(chart, 1, lambda p: _eval_all(comps, Jet2.variable(p)), name=name)
        flat = [e for row in comps for e in row]
        N = chart.dim
        if len(flat) != N * N:
            raise DimensionMismatchError(f"2-form '{name}' is not {N}x{N}")
        return cls(chart, 2, lambda p: _eval_all(flat, Jet2.variable(p)).reshape(N, N), name=name)

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "KForm":
        if degree <= 2:
            shape = (chart.dim,) * degree
            return cls(chart, degree, lambda p: Jet2.constant(np.zeros(shape), chart.dim),
                       exterior=lambda: cls.zero(chart, degree + 1), name="0")
        return cls(chart, degree, evaluator=lambda p, vs: 0.0,
                   exterior=lambda: cls.zero(chart, degree + 1), name="0")

    @classmethod
    def constant(cls, chart: Chart, components, name: str = "") -> "KForm":
        c = np.asarray(components, dtype=float)
        degree = c.ndim
        return cls(chart, degree, lambda p: Jet2.constant(c, chart.dim),
                   exterior=lambda: cls.zero(chart, degree + 1), name=name)

    @classmethod
    def coordinate_function(cls, chart: Chart, i: int) -> "KForm":
        return cls(chart, 0, lambda p: Jet2.variable(p)[i], name=chart.coords[i])

    @classmethod
    def scalar(cls, chart: Chart, jet_fn, name: str = "") -> "KForm":
        return cls(chart, 0, jet_fn, name=name)

    # -- evaluation ---------------------------------------------------------

    @property
    def is_table(self) -> bool:
        return self._jet_fn is not None

    def jet(self, p) -> Jet2:
        if self._jet_fn is None:
            raise DegreeError(f"{self.degree}-form '{self.name}' has no component table")
        return self._jet_fn(np.asarray(p, dtype=float))

    def __call__(self, p, *vectors) -> float:
        if len(vectors) != self.degree:
            raise DegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        p = np.asarray(p, dtype=float)
        vs = [np.asarray(v, dtype=float) for v in vectors]
        for v in vs:
            if v.shape != (self.chart.dim,):
                raise DimensionMismatchError(f"vector of shape {v.shape} on a chart of dimension {self.chart.dim}")
        if self._jet_fn is None:
            return float(self._evaluator(p, vs))
        T = self.jet(p).value
        for v in vs:
            T = np.tensordot(T, v, axes=([0], [0]))
        return float(T)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "KForm") -> "KForm":
        return _combine(self, other, 1.0)

    def __sub__(self, other: "KForm") -> "KForm":
        return _combine(self, other, -1.0)

    def __neg__(self) -> "KForm":
        return self * -1.0

    def __mul__(self, f) -> "KForm":
        if isinstance(f, KForm):
            if f.degree != 0:
                return wedge(self, f)
            return wedge(f, self)
        c = float(f)
        if self.is_table:
            return KForm(self.chart, self.degree, lambda p: self.jet(p) * c,
                         exterior=lambda: self.d() * c, name=self.name)
        return KForm(self.chart, self.degree, evaluator=lambda p, vs: c * self._evaluator(p, vs),
                     exterior=lambda: self.d() * c, name=self.name)

    __rmul__ = __mul__

    def d(self) -> "KForm":
        return exterior_form(self)


def _combine(a: KForm, b: KForm, sign: float) -> KForm:
    _same_chart(a, b, "form sum")
    if a.degree != b.degree:
        raise DegreeError(f"cannot add a {a.degree}-form and a {b.degree}-form")
    exterior = lambda: _combine(a.d(), b.d(), sign)
    if a.is_table and b.is_table:
        return KForm(a.chart, a.degree, lambda p: a.jet(p) + b.jet(p) * sign, exterior=exterior)
    return KForm(a.chart, a.degree, evaluator=lambda p, vs: a(p, *vs) + sign * b(p, *vs), exterior=exterior)


def exterior_form(omega: KForm) -> KForm:
    if omega._exterior is not None:
        return omega._exterior()
    k, chart = omega.degree, omega.chart
    if k + 1 > chart.dim:
        raise DegreeError(f"d of a {k}-form exceeds chart dimension {chart.dim}")
    if not omega.is_table:
        raise DegreeError(f"d of the {k}-form '{omega.name}' needs a component table")

    if k == 0:
        return KForm(chart, 1, lambda p: omega.jet(p).gradient_jet(), name=f"d{omega.name}")
    if k == 1:
        def jet_fn(p):
            G = omega.jet(p).gradient_jet()
            return G.T - G
        return KForm(chart, 2, jet_fn, name=f"d{omega.name}")

    def evaluator(p, vs):
        # G[j, k, i] = d_i w_jk ; (dw)_ijk = G[j,k,i] + G[k,i,j] + G[i,j,k]
        G = omega.jet(p).gradient_jet().value
        u, v, w = vs
        return (np.einsum("jki,i,j,k->", G, u, v, w)
                + np.einsum("kij,i,j,k->", G, u, v, w)
                + np.einsum("ijk,i,j,k->", G, u, v, w))
    return KForm(chart, 3, evaluator=evaluator, name=f"d{omega.name}")


def wedge(a: KForm, b: KForm) -> KForm:
    _same_chart(a, b, "wedge")
    k, l = a.degree, b.degree
    chart = a.chart
    if k + l > chart.dim:
        return KForm.zero(chart, k + l) if k + l <= 2 else KForm(chart, k + l, evaluator=lambda p, vs: 0.0)
    sign_b = -1.0 if k % 2 else 1.0
    exterior = lambda: wedge(a.d(), b) + wedge(a, b.d()) * sign_b

    if a.is_table and b.is_table and k + l <= 2:
        if k == 0:
            return KForm(chart, l, lambda p: b.jet(p) * a.jet(p), exterior=exterior)
        if l == 0:
            return KForm(chart, k, lambda p: a.jet(p) * b.jet(p), exterior=exterior)

        def jet_fn(p):
            A, B = a.jet(p), b.jet(p)
            return outer(A, B) - outer(B, A)
        return KForm(chart, 2, jet_fn, exterior=exterior)

    def evaluator(p, vs):
        total = 0.0
        n = k + l
        for first in combinations(range(n), k):
            rest = tuple(i for i in range(n) if i not in first)
            sign = _permutation_sign(first + rest)
            total += sign * a(p, *[vs[i] for i in first]) * b(p, *[vs[i] for i in rest])
        return total
    return KForm(chart, k + l, evaluator=evaluator, exterior=exterior)


def interior_product(X: VectorField, omega: KForm) -> KForm:
    _same_chart(X, omega, "interior product")
    if omega.degree == 0:
        raise DegreeError("interior product of a 0-form")
    chart, k = omega.chart, omega.degree
    if omega.is_table:
        return KForm(chart, k - 1, lambda p: matmul(X.jet(p), omega.jet(p)), name=f"i_{X.name}{omega.name}")
    return KForm(chart, k - 1, evaluator=lambda p, vs: omega(p, X(p), *vs))


def pullback(F: Map, omega: KForm) -> KForm:
    """(F*w)(v...) = w(dF v, ...); d(F*w) is evaluated as F*(dw)."""
    if omega.chart.dim != F.target.dim:
        raise DimensionMismatchError(f"pullback: form on '{omega.chart.name}' through map into '{F.target.name}'")
    chart, k = F.source, omega.degree

    if not omega.is_table:
        def evaluator(p, vs):
            DF = F.differential(p).value
            return omega(F(p), *[DF @ v for v in vs])
        return KForm(chart, k, evaluator=evaluator, exterior=lambda: pullback(F, omega.d()))

    def jet_fn(p):
        Y = F.jet(p)
        W = compose(omega.jet(Y.value), Y)
        if k == 0:
            return W
        DF = F.differential(p)
        if k == 1:
            return matmul(W, DF)
        return matmul(DF.T, matmul(W, DF))
    return KForm(chart, k, jet_fn, exterior=lambda: pullback(F, omega.d()), name=f"pull {omega.name}")


def lie_derivative(X: VectorField, omega: KForm) -> KForm:
    """L_X w for 1-forms: (L_X w)_i = X^j d_j w_i + w_j d_i X^j."""
    if omega.degree != 1:
        raise DegreeError("lie_derivative is implemented for 1-forms")

    def jet_fn(p):
        W, V = omega.jet(p), X.jet(p)
        return matmul(W.gradient_jet(), V.truncate(1)) + matmul(W.truncate(1), V.gradient_jet())
    return KForm(omega.chart, 1, jet_fn, name=f"L_{X.name}{omega.name}")


def exterior_derivative(omega: KForm, p, *vectors) -> float:
    return omega.d()(p, *vectors)


def weighted_d(beta: KForm, gamma: KForm, w: int) -> KForm:
    """d^D on L^w-valued forms in the trivialization: d(beta) + w gamma ^ beta."""
    if gamma.degree != 1:
        raise DegreeError("the connection form must be a 1-form")
    if w == 0:
        return beta.d()
    return beta.d() + wedge(gamma, beta) * float(w)


def weighted_ext_derivative(beta: KForm, gamma: KForm, w: int, p, *vectors) -> float:
    return weighted_d(beta, gamma, w)(p, *vectors)


def exact_form(u: KForm) -> KForm:
    """du for a 0-form, with d(du) = 0 exactly."""
    if u.degree != 0:
        raise DegreeError("exact_form takes a 0-form")
    return KForm(u.chart, 1, lambda p: u.jet(p).gradient_jet(),
                 exterior=lambda: KForm.zero(u.chart, 2), name=f"d{u.name}")
