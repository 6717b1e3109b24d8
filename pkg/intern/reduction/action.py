"""
Group actions by CR-Weyl automorphisms: infinitesimal generators (the
identity component) and discrete generators given as chart self-maps with
their inverses.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from intern.checks import ValidationReport, measure
from intern.crweyl import CRWeylStructure, gauge_transform, h_frame_jets
from intern.expr import Expression, Jet2, SingularJetError, compose, concatenate, matmul, solve, stack
from intern.expr import jet as J
from intern.geometry import (
    KForm, Map, VectorField,
    bracket_jets, interior_product, lie_derivative, max_abs, pullback, wedge,
)


class ReductionError(Exception):
    pass


class NotInZeroSetError(ReductionError):
    pass


class DegenerateOrbitError(ReductionError):
    pass


class NonConstantFactorError(ReductionError):
    pass


S_TOL = 1e-10
ACTION_TOL = 1e-9
RHO_TOL = 1e-9
_ORBIT_COND = 1e10


@dataclass
class DiscreteGenerator:
    forward: Map
    inverse: Map
    name: str = "g"

    def inverted(self) -> "DiscreteGenerator":
        return DiscreteGenerator(self.inverse, self.forward, f"{self.name}^-1")


@dataclass
class GroupActionSpec:
    structure: CRWeylStructure
    generators: list = field(default_factory=list)
    discrete: list = field(default_factory=list)

    @property
    def chart(self):
        return self.structure.chart

    @property
    def rank(self) -> int:
        return len(self.generators)

    @cached_property
    def moment_forms(self) -> list:
        """Theta_a = theta0(xi_a) as 0-forms."""
        return [interior_product(xi, self.structure.theta0) for xi in self.generators]

    def gauged(self, u: Expression) -> "GroupActionSpec":
        return GroupActionSpec(gauge_transform(self.structure, u), self.generators, self.discrete)

    def orbit_matrix_jet(self, p) -> Optional[Jet2]:
        """Generators as columns, shape (dim, rank); None for a trivial identity component."""
        if not self.generators:
            return None
        return stack([xi.jet(p) for xi in self.generators], axis=1)


# ---------------------------------------------------------------------------
# Moment map and the zero set
# ---------------------------------------------------------------------------

def moment_map(a: GroupActionSpec, p) -> list:
    return [float(m.jet(p).value) for m in a.moment_forms]


def in_zero_set(a: GroupActionSpec, p, tol: float = S_TOL) -> bool:
    return all(abs(v) <= tol for v in moment_map(a, p))


def require_in_zero_set(a: GroupActionSpec, p, tol: float = S_TOL):
    values = moment_map(a, p)
    if any(abs(v) > tol for v in values):
        raise NotInZeroSetError(f"point {np.round(p, 6).tolist()} is off the zero set: moment {values}")


@dataclass
class Tangency:
    tangent: bool
    bracket_residual: float
    gradient_residual: float

    @property
    def disagreement(self) -> float:
        return abs(self.bracket_residual - self.gradient_residual)


def tangent_to_S(a: GroupActionSpec, p, v, tol: float = ACTION_TOL) -> Tangency:
    """
    v is tangent to the zero set iff (d theta0 + gamma ^ theta0)(v, xi_a) = 0 for
    all a; the same numbers are d Theta_a(v) + gamma(v) Theta_a.
    """
    require_in_zero_set(a, p)
    s = a.structure
    v = np.asarray(v, dtype=float)
    bracket, gradient = 0.0, 0.0
    gamma_v = s.gamma(p, v)
    for xi, m in zip(a.generators, a.moment_forms):
        bracket = max(bracket, abs(s.beta(p, v, xi(p))))
        mj = m.jet(p)
        gradient = max(gradient, abs(mj.grad @ v + gamma_v * mj.value))
    return Tangency(bracket <= tol, bracket, gradient)


# ---------------------------------------------------------------------------
# H = T + IT + E
# ---------------------------------------------------------------------------

@dataclass
class HDecomposition:
    proj_t: np.ndarray
    proj_it: np.ndarray
    proj_e: np.ndarray

    def ranks(self, tol: float = 1e-8) -> tuple:
        return tuple(int(np.sum(np.linalg.svd(P, compute_uv=False) > tol))
                     for P in (self.proj_t, self.proj_it, self.proj_e))


def _levi_matrix_jet(s: CRWeylStructure, p) -> Jet2:
    """M with g0(u, w) = u^T M w on H."""
    return matmul(s.dtheta0.jet(p), s.endo.jet(p)) * 0.5


def _orthogonal_projector(V: Jet2, M: Jet2) -> Jet2:
    """g0-orthogonal projector onto the columns of V: V (V^T M V)^-1 V^T M."""
    G = matmul(V.T, matmul(M, V))
    G = (G + G.T) * 0.5
    if np.linalg.cond(G.value) > _ORBIT_COND:
        raise DegenerateOrbitError("orbit directions are dependent or null for the Levi metric")
    try:
        return matmul(V, solve(G, matmul(V.T, M)))
    except SingularJetError as e:
        raise DegenerateOrbitError(str(e)) from e


def e_projector_jet(a: GroupActionSpec, p) -> Jet2:
    """P_E = P - (projector onto T + IT), with P the projection onto H along T0."""
    s = a.structure
    P = s.projector.jet(p)
    V = a.orbit_matrix_jet(p)
    if V is None:
        return P
    W = concatenate([V, matmul(s.endo.jet(p), V)], axis=1)
    return P - matmul(_orthogonal_projector(W, _levi_matrix_jet(s, p)), P)


def h_decomposition(a: GroupActionSpec, p) -> HDecomposition:
    require_in_zero_set(a, p)
    s = a.structure
    N = s.chart.dim
    P = s.projector(p)
    V = a.orbit_matrix_jet(p)
    if V is None:
        zero = np.zeros((N, N))
        return HDecomposition(zero, zero.copy(), P)
    M = _levi_matrix_jet(s, p)
    AV = matmul(s.endo.jet(p), V)
    proj_t = matmul(_orthogonal_projector(V, M), P).value
    proj_it = matmul(_orthogonal_projector(AV, M), P).value
    return HDecomposition(proj_t, proj_it, P - proj_t - proj_it)


# ---------------------------------------------------------------------------
# Action invariance
# ---------------------------------------------------------------------------

def _commutation_residual(a: GroupActionSpec, xi: VectorField, p) -> float:
    """[xi, IX] - I[xi, X] over axis-projected H frames."""
    s = a.structure
    fields, k = h_frame_jets(s, p)
    A = s.endo.jet(p)
    Q = s.axis_projector_jet(p, k).value
    X0 = xi.jet(p)
    worst = 0.0
    for X in fields:
        lhs = bracket_jets(X0, matmul(A, X)).value
        inner = bracket_jets(X0, X).value
        rhs = A.value @ (Q @ inner)
        worst = max(worst, max_abs(lhs - rhs) / max(1.0, max_abs(lhs), max_abs(inner)))
    return worst


def pullback_factor_jet(s: CRWeylStructure, g: Map, p) -> Jet2:
    """f with g*theta0 = f theta0 (least squares against theta0)."""
    pulled = pullback(g, s.theta0).jet(p)
    theta = s.theta0.jet(p)
    return matmul(pulled, theta) / matmul(theta, theta)


def discrete_invariance_residual(s: CRWeylStructure, g: Map, p) -> float:
    """g*gamma - gamma + d log f, where g*theta0 = f theta0."""
    f = pullback_factor_jet(s, g, p)
    dlogf = J.log(f).gradient_jet().value if f.value > 0 else J.log(-f).gradient_jet().value
    pulled_gamma = pullback(g, s.gamma).jet(p).value
    return max_abs(pulled_gamma - s.gamma.jet(p).value + dlogf)


def discrete_preserves_h_residual(s: CRWeylStructure, g: Map, p) -> float:
    pulled = pullback(g, s.theta0).jet(p).value
    theta = s.theta0.jet(p).value
    return max_abs(np.outer(pulled, theta) - np.outer(theta, pulled)) / max(1.0, max_abs(pulled))


def discrete_commutation_residual(s: CRWeylStructure, g: Map, p) -> float:
    """dg(A v) = A(g(p)) dg(v) on H."""
    fields, _ = h_frame_jets(s, p)
    Dg = g.differential(p).value
    A_here = s.endo(p)
    A_there = s.endo(g(p))
    worst = 0.0
    for X in fields:
        v = X.value
        worst = max(worst, max_abs(Dg @ (A_here @ v) - A_there @ (Dg @ v)) / max(1.0, max_abs(Dg @ v)))
    return worst


def action_checks(a: GroupActionSpec, samples: int = 100, seed: int = 42,
                  tolerance_scale: float = 1.0) -> ValidationReport:
    s = a.structure
    points = s.chart.sample(samples, seed)
    tol = ACTION_TOL * tolerance_scale
    report = ValidationReport(f"action on '{s.name}'")

    for i, xi in enumerate(a.generators):
        tag = f"[{i}]" if a.rank > 1 else ""
        theta_lie = wedge(lie_derivative(xi, s.theta0), s.theta0)
        report.add(measure(f"generator_preserves_h{tag}", tol,
                           lambda p: max_abs(theta_lie.jet(p).value), points))
        report.add(measure(f"generator_commutes_with_i{tag}", tol,
                           lambda p: _commutation_residual(a, xi, p), points))
        report.add(measure(f"generator_horizontal{tag}", tol,
                           lambda p: abs(s.gamma(p, xi(p))), points))
        report.add(measure(f"generator_faraday{tag}", tol,
                           lambda p: max_abs(xi(p) @ s.faraday.jet(p).value), points))
        for j, m in enumerate(a.moment_forms):
            report.add(measure(f"moment_invariant{tag}[{j}]" if a.rank > 1 else "moment_invariant", tol,
                               lambda p: abs(m.jet(p).grad @ xi(p)), points))

    for g in a.discrete:
        for h in (g, g.inverted()):
            report.add(measure(f"discrete_preserves_h[{h.name}]", tol,
                               lambda p: discrete_preserves_h_residual(s, h.forward, p), points))
            report.add(measure(f"discrete_commutes_with_i[{h.name}]", tol,
                               lambda p: discrete_commutation_residual(s, h.forward, p), points))
            report.add(measure(f"discrete_connection[{h.name}]", tol,
                               lambda p: discrete_invariance_residual(s, h.forward, p), points))
    return report


# ---------------------------------------------------------------------------
# rho
# ---------------------------------------------------------------------------

@dataclass
class RhoHomomorphism:
    factors: dict
    multiplicativity_residual: float = 0.0

    def __getitem__(self, name: str) -> float:
        return self.factors[name]

    @property
    def trivial(self) -> bool:
        return all(abs(f - 1.0) <= RHO_TOL for f in self.factors.values())


def _parallel_form(s: CRWeylStructure, potential: Optional[Expression]) -> KForm:
    if potential is None:
        return s.theta0
    h = KForm.from_expressions(s.chart, potential)
    return wedge(KForm.scalar(s.chart, lambda p: 1.0 / h.jet(p), name="1/h"), s.theta0)


def rho_factor(s: CRWeylStructure, g: Map, points, potential: Optional[Expression] = None) -> float:
    """Constant f with g*theta = f theta for the parallel contact form theta."""
    theta = _parallel_form(s, potential)
    values = []
    for p in points:
        pulled = pullback(g, theta).jet(p).value
        base = theta.jet(p).value
        f = float(pulled @ base / (base @ base))
        if max_abs(pulled - f * base) > RHO_TOL * max(1.0, max_abs(pulled)):
            raise NonConstantFactorError(f"g*theta is not proportional to theta at {np.round(p, 6).tolist()}")
        values.append(f)
    f0 = values[0]
    spread = max(abs(f - f0) for f in values)
    if spread > RHO_TOL * max(1.0, abs(f0)):
        raise NonConstantFactorError(f"pullback factor of '{g.name}' varies by {spread:.3e} over samples")
    return f0


def rho(a: GroupActionSpec, samples: int = 50, seed: int = 42,
        potential: Optional[Expression] = None) -> RhoHomomorphism:
    """
    rho(g) from g*theta = rho(g) theta for the parallel contact form
    theta = theta0 / h, where gamma = -d log h (h = 1 when gamma = 0).
    """
    s = a.structure
    points = s.chart.sample(samples, seed)
    if potential is None:
        worst = max(max_abs(s.gamma.jet(p).value) for p in points)
        if worst > ACTION_TOL:
            raise ReductionError("rho needs a parallel section: gamma is not zero and no potential was given")
    else:
        h = KForm.from_expressions(s.chart, potential)
        exactness = max(max_abs(s.gamma.jet(p).value + J.log(h.jet(p)).gradient_jet().value) for p in points)
        if exactness > ACTION_TOL:
            raise ReductionError(f"gamma != -d log h (residual {exactness:.3e})")

    factors, maps = {}, {}
    for g in a.discrete:
        for h in (g, g.inverted()):
            factors[h.name] = rho_factor(s, h.forward, points, potential)
            maps[h.name] = h.forward

    worst = 0.0
    names = list(maps)
    for x in names:
        for y in names:
            word = maps[y].then(maps[x])
            worst = max(worst, abs(rho_factor(s, word, points, potential) - factors[x] * factors[y]))
    return RhoHomomorphism(factors, worst)


# ---------------------------------------------------------------------------
# Cone side
# ---------------------------------------------------------------------------

def lifted_generator_jet(c, xi: VectorField, p) -> Jet2:
    """xi~ = xi - t gamma(xi) d/dt on the cone."""
    x, _ = c.split(p)
    Y = c.pi.jet(p)
    t = Jet2.variable(p)[c.t_index]
    X = compose(xi.jet(x), Y)
    g = compose(c.base.gamma.jet(x), Y)
    return concatenate([X, (-(t * matmul(g, X))).expand(0)], axis=0)


def cone_moment_map(a: GroupActionSpec, c, p) -> list:
    x, t = c.split(p)
    return [0.5 * t * v for v in moment_map(a, x)]


def cone_moment_residual(a: GroupActionSpec, c, p) -> float:
    """Omega(X, xi~) - 1/2 (Theta dt + t dTheta + 2 t Theta gamma)(X) as covectors."""
    x, t = c.split(p)
    W = c.omega.jet(p).value
    worst = 0.0
    for xi, m in zip(a.generators, a.moment_forms):
        lifted = lifted_generator_jet(c, xi, p).value
        lhs = W @ lifted
        mj = m.jet(x)
        dtheta = np.append(mj.grad, 0.0)
        rhs = 0.5 * (mj.value * c.dt.jet(p).value + t * dtheta
                     + 2.0 * t * mj.value * c.gamma.jet(p).value)
        worst = max(worst, max_abs(lhs - rhs))
    return worst


def holomorphic_action_residual(a: GroupActionSpec, c, p) -> float:
    """L_xi~ J and L_xi~ Omega for every lifted generator."""
    Jj = c.J.jet(p)
    Wj = c.omega.jet(p)
    worst = 0.0
    for xi in a.generators:
        X = lifted_generator_jet(c, xi, p)
        DX = X.grad
        lie_J = np.einsum("abk,k->ab", Jj.grad, X.value) - DX @ Jj.value + Jj.value @ DX
        lie_W = np.einsum("abk,k->ab", Wj.grad, X.value) + DX.T @ Wj.value + Wj.value @ DX
        worst = max(worst, max_abs(lie_J), max_abs(lie_W))
    return worst
