"""
The cone over a CR-Weyl structure, read in the s0-trivialization.

The cone chart is the base chart times one positive coordinate (named `t`,
or `sigma` when the base already has a `t`). A cone point is the base point
with the cone coordinate appended.

Horizontal lifts and the lifted Reeb field:
    X~  = X - t gamma(X) d/dt          (X in H)
    T0~ = T0 - t gamma(T0) d/dt
J acts by X~ -> (IX)~, T0~ -> -d/dt, d/dt -> T0~.
"""

from functools import cached_property
from typing import Union

import numpy as np

from intern.crweyl import CRWeylStructure, h_frame, sasaki_weyl_defect
from intern.expr import Jet2, compose, concatenate, matmul, outer
from intern.geometry import (
    EndomorphismField, KForm, Map, VectorField,
    bracket_jets, exact_form, max_abs, pullback, wedge,
)


class ConeError(Exception):
    pass


class DegenerateLeastSquaresError(ConeError):
    pass


CONE_INTERVAL = (0.25, 3.0)


class ConeSpace:
    def __init__(self, base: CRWeylStructure, interval=CONE_INTERVAL, orientation: float = 1.0):
        self.base = base
        self.coord = "sigma" if "t" in base.chart.coords else "t"
        self.chart = base.chart.extend(self.coord, interval, name=f"cone({base.chart.name})",
                                       positive_extra=(self.coord,))
        self.interval = tuple(interval)
        self.orientation = float(orientation)
        self.pi = Map.projection(self.chart, base.chart, range(base.chart.dim))

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def t_index(self) -> int:
        return self.chart.dim - 1

    def negated(self) -> "ConeSpace":
        """Same cone with J replaced by -J."""
        return ConeSpace(self.base, self.interval, -self.orientation)

    def split(self, p):
        p = np.asarray(p, dtype=float)
        return p[:-1], p[-1]

    def point(self, x, t: float) -> np.ndarray:
        return np.append(np.asarray(x, dtype=float), float(t))

    def vertical(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    # -- J ------------------------------------------------------------------

    def _j_jet(self, p) -> Jet2:
        s = self.base
        x, _ = self.split(p)
        Y = self.pi.jet(p)
        t = Jet2.variable(p)[self.t_index]
        theta = compose(s.theta0.jet(x), Y)
        gamma = compose(s.gamma.jet(x), Y)
        A = compose(s.endo.jet(x), Y)
        T = compose(s._reeb_jet(x), Y)
        Nb = s.chart.dim
        P = Jet2.constant(np.eye(Nb), self.dim) - outer(T, theta)
        I = matmul(A, P)
        c = matmul(gamma, T)

        top = concatenate([I + outer(T, gamma) * t, T.expand(1)], axis=1)
        bottom = concatenate([-(matmul(gamma, I) * t) - theta - gamma * (t * t * c),
                              (-(t * c)).expand(0)], axis=0)
        J = concatenate([top, bottom.expand(0)], axis=0)
        return J * self.orientation if self.orientation != 1.0 else J

    @cached_property
    def J(self) -> EndomorphismField:
        return EndomorphismField(self.chart, self._j_jet, name="J")

    # -- forms --------------------------------------------------------------

    @cached_property
    def t_function(self) -> KForm:
        return KForm.coordinate_function(self.chart, self.t_index)

    @cached_property
    def dt(self) -> KForm:
        return exact_form(self.t_function)

    def lift_form(self, omega: KForm) -> KForm:
        return pullback(self.pi, omega)

    @cached_property
    def theta0(self) -> KForm:
        return self.lift_form(self.base.theta0)

    @cached_property
    def gamma(self) -> KForm:
        return self.lift_form(self.base.gamma)

    @cached_property
    def omega(self) -> KForm:
        """Omega = 1/2 dt ^ theta0 + 1/2 t d theta0 + t gamma ^ theta0."""
        t = self.t_function
        return (wedge(self.dt, self.theta0) * 0.5
                + wedge(t, self.lift_form(self.base.dtheta0)) * 0.5
                + wedge(t, wedge(self.gamma, self.theta0)))

    # -- lifts --------------------------------------------------------------

    def horizontal_lift(self, p, X) -> np.ndarray:
        x, t = self.split(p)
        X = np.asarray(X, dtype=float)
        return np.append(X, -t * (self.base.gamma(x, X)))

    def reeb_lift(self, p) -> np.ndarray:
        x, t = self.split(p)
        T = self.base.reeb(x)
        return np.append(T, -t * self.base.gamma(x, T))


def cone_complex_structure(c: ConeSpace, p, v) -> np.ndarray:
    return c.J(p, v)


def cone_two_form(c: ConeSpace) -> KForm:
    return c.omega


def cone_metric(c: ConeSpace, p, u, v) -> float:
    return c.omega(p, u, c.J(p, v))


def metric_matrix(c: ConeSpace, p) -> np.ndarray:
    W = c.omega.jet(p).value
    return W @ c.J(p)


def cone_horizontal_lift(c: ConeSpace, p, X) -> np.ndarray:
    c.base.require_horizontal(c.split(p)[0], X)
    return c.horizontal_lift(p, X)


# ---------------------------------------------------------------------------
# Nijenhuis tensor
# ---------------------------------------------------------------------------

def _as_field(c: ConeSpace, X) -> VectorField:
    if isinstance(X, VectorField):
        return X
    return VectorField.constant(c.chart, X)


def nijenhuis(c: ConeSpace, p, X: Union[VectorField, np.ndarray], Y: Union[VectorField, np.ndarray]) -> np.ndarray:
    """N(X,Y) = [JX,JY] - J([JX,Y] + [X,JY]) - [X,Y] by brackets of jets."""
    X, Y = _as_field(c, X), _as_field(c, Y)
    Jj = c.J.jet(p)
    Xj, Yj = X.jet(p), Y.jet(p)
    JX, JY = matmul(Jj, Xj), matmul(Jj, Yj)
    return (bracket_jets(JX, JY).value
            - Jj.value @ (bracket_jets(JX, Yj).value + bracket_jets(Xj, JY).value)
            - bracket_jets(Xj, Yj).value)


def nijenhuis_matrix(c: ConeSpace, p) -> np.ndarray:
    """N(e_i, e_j) for all coordinate pairs, shape (dim, dim, dim)."""
    Jj = c.J.jet(p)
    J0, DJ = Jj.value, Jj.grad
    n = c.dim
    out = np.zeros((n, n, n))
    # DJ[:, i, :] is the Jacobian of the field J e_i
    for i in range(n):
        for j in range(i + 1, n):
            Ji, Jj_ = J0[:, i], J0[:, j]
            dJi = DJ[:, i, :]
            dJj = DJ[:, j, :]
            br_JJ = dJj @ Ji - dJi @ Jj_
            br_JX_Y = -(dJi[:, j])
            br_X_JY = dJj[:, i]
            out[i, j] = br_JJ - J0 @ (br_JX_Y + br_X_JY)
            out[j, i] = -out[i, j]
    return out


def faraday_anti_invariant(c: ConeSpace, x, X, Y) -> float:
    """F^-(X,Y) = 1/2 (F(X,Y) - F(IX,IY)) on H."""
    s = c.base
    F = s.faraday
    A = s.endo(x)
    return 0.5 * (F(x, X, Y) - F(x, A @ X, A @ Y))


def nijenhuis_closed_form(c: ConeSpace, p, X, Y) -> np.ndarray:
    """N(X~, Y~) = 2F^-(X,Y) t d/dt + 2F^-(IX,Y) t T0~ for X, Y in H."""
    s = c.base
    x, t = c.split(p)
    s.require_horizontal(x, X)
    s.require_horizontal(x, Y)
    IX = s.endo(x, X)
    vertical = 2.0 * faraday_anti_invariant(c, x, X, Y) * t
    along_reeb = 2.0 * faraday_anti_invariant(c, x, IX, Y) * t
    return vertical * c.vertical() + along_reeb * c.reeb_lift(p)


def nijenhuis_mixed(c: ConeSpace, p, X) -> np.ndarray:
    """
    N(X~, T0~) = F(X,T0) t d/dt + F(IX,T0) t T0~ - (defect(IX))~
    for X in H, where (Z)~ = Z - t gamma(Z) d/dt.
    """
    s = c.base
    x, t = c.split(p)
    s.require_horizontal(x, X)
    T = s.reeb(x)
    IX = s.endo(x, X)
    F = s.faraday
    defect = sasaki_weyl_defect(s, x, IX)
    return (F(x, X, T) * t * c.vertical()
            + F(x, IX, T) * t * c.reeb_lift(p)
            - c.horizontal_lift(p, defect))


# ---------------------------------------------------------------------------
# Residual helpers
# ---------------------------------------------------------------------------

def j_squared_residual(c: ConeSpace, p) -> float:
    J = c.J(p)
    return max_abs(J @ J + np.eye(c.dim))


def omega_invariance_residual(c: ConeSpace, p) -> float:
    W = c.omega.jet(p).value
    J = c.J(p)
    return max_abs(J.T @ W @ J - W) / max(1.0, max_abs(W))


def jpotential_residual(c: ConeSpace, p) -> float:
    """|J(2t dt + 2t^2 gamma) - 2t theta0| with (J alpha)(v) = -alpha(Jv)."""
    _, t = c.split(p)
    alpha = 2.0 * t * c.dt.jet(p).value + 2.0 * t * t * c.gamma.jet(p).value
    J_alpha = -(alpha @ c.J(p))
    target = 2.0 * t * c.theta0.jet(p).value
    return max_abs(J_alpha - target) / max(1.0, max_abs(target))


def jpotential_check(c: ConeSpace, samples: int = 100, seed: int = 42) -> float:
    return max(jpotential_residual(c, p) for p in c.chart.sample(samples, seed))


def metric_decomposition_residuals(c: ConeSpace, p) -> dict:
    """
    Orthogonality of H~, span(T0~), span(d/dt) under g, the two unit
    normalizations, and g(X~, Y~) = t g0(X, Y).
    """
    s = c.base
    x, t = c.split(p)
    G = metric_matrix(c, p)
    frame = h_frame(s, x).vectors
    lifts = np.stack([c.horizontal_lift(p, f) for f in frame.T], axis=1)
    R = c.reeb_lift(p)
    V = c.vertical()
    W0 = s.dtheta0.jet(x).value
    A = s.endo(x)
    levi = 0.5 * frame.T @ W0 @ A @ frame
    return {
        "orthogonal": max(max_abs(lifts.T @ G @ R), max_abs(lifts.T @ G @ V),
                          max_abs(R @ G @ lifts), max_abs(V @ G @ lifts),
                          abs(R @ G @ V), abs(V @ G @ R)),
        "reeb_norm": abs(R @ G @ R - 0.5),
        "vertical_norm": abs(V @ G @ V - 0.5),
        "horizontal": max_abs(lifts.T @ G @ lifts - t * levi),
    }


def min_metric_eigenvalue(c: ConeSpace, p) -> float:
    G = metric_matrix(c, p)
    return float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])


def metric_symmetry_residual(c: ConeSpace, p) -> float:
    G = metric_matrix(c, p)
    return max_abs(G - G.T) / max(1.0, max_abs(G))
