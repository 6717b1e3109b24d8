"""
CR-Weyl structures in a trivialization.

A structure is a chart with the contact form theta0 of a positive section s0,
an endomorphism field A extending I (A preserves H = ker theta0), and the
connection form gamma = s0^-1 D s0. Everything derived from them (Reeb field,
projector onto H, I, Levi metric, Faraday form) is computed lazily.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy.linalg import null_space

from intern.checks import ValidationReport, measure, measure_min
from intern.expr import Expression, Jet2, SingularJetError, matmul, outer, solve
from intern.expr import jet as J
from intern.geometry import (
    Chart, EndomorphismField, KForm, VectorField,
    bracket_jets, exact_form, max_abs, weighted_d, wedge,
)


class CRWeylError(Exception):
    pass


class ReebSolveError(CRWeylError):
    pass


class NotHorizontalError(CRWeylError):
    pass


H_TOL = 1e-10
EXACT_TOL = 1e-9
PD_FLOOR = 1e-8


@dataclass
class HFrame:
    vectors: np.ndarray   # (N, 2n), orthonormal basis of H in chart coordinates
    i_matrix: np.ndarray  # (2n, 2n), I expressed on the frame


class CRWeylStructure:
    def __init__(self, chart: Chart, theta0: KForm, endo: EndomorphismField, gamma: KForm, name: str = ""):
        if theta0.degree != 1 or gamma.degree != 1:
            raise CRWeylError("theta0 and gamma must be 1-forms")
        if (chart.dim - 1) % 2 or chart.dim < 3:
            raise CRWeylError(f"CR-Weyl chart must have odd dimension >= 3, got {chart.dim}")
        self.chart = chart
        self.theta0 = theta0
        self.endo = endo
        self.gamma = gamma
        self.name = name

    @property
    def n(self) -> int:
        return (self.chart.dim - 1) // 2

    def replace(self, theta0=None, endo=None, gamma=None, name=None) -> "CRWeylStructure":
        return CRWeylStructure(
            self.chart,
            self.theta0 if theta0 is None else theta0,
            self.endo if endo is None else endo,
            self.gamma if gamma is None else gamma,
            self.name if name is None else name,
        )

    # -- derived fields -----------------------------------------------------

    @cached_property
    def dtheta0(self) -> KForm:
        return self.theta0.d()

    @cached_property
    def beta(self) -> KForm:
        """Trivialized d^D eta = d theta0 + gamma ^ theta0."""
        return weighted_d(self.theta0, self.gamma, 1)

    @cached_property
    def faraday(self) -> KForm:
        return self.gamma.d()

    def _reeb_jet(self, p) -> Jet2:
        theta = self.theta0.jet(p)
        B = self.beta.jet(p)
        try:
            return solve(B.T + outer(theta, theta), theta)
        except SingularJetError as e:
            raise ReebSolveError(
                f"Reeb system singular at {np.round(p, 6).tolist()}: d theta0 is degenerate on H"
            ) from e

    @cached_property
    def reeb(self) -> VectorField:
        return VectorField(self.chart, self._reeb_jet, name="T0")

    @cached_property
    def projector(self) -> EndomorphismField:
        """P = Id - T0 (x) theta0, the projection onto H along T0."""
        N = self.chart.dim

        def jet_fn(p):
            T = self._reeb_jet(p)
            return Jet2.constant(np.eye(N), N) - outer(T, self.theta0.jet(p))
        return EndomorphismField(self.chart, jet_fn, name="P")

    @cached_property
    def cr(self) -> EndomorphismField:
        """I = A o P."""
        return self.projector.then(self.endo)

    # -- pointwise ------------------------------------------------------------

    def is_horizontal(self, p, v) -> bool:
        theta = self.theta0.jet(p).value
        v = np.asarray(v, dtype=float)
        return abs(theta @ v) <= H_TOL * max(1.0, np.linalg.norm(theta) * np.linalg.norm(v))

    def require_horizontal(self, p, v):
        if not self.is_horizontal(p, v):
            theta = self.theta0.jet(p).value
            raise NotHorizontalError(f"vector not in H: theta0(v) = {theta @ np.asarray(v):.3e}")

    def axis_projector_jet(self, p, k: Optional[int] = None) -> Jet2:
        """Projection onto H along the coordinate axis k where |theta0_k| is largest."""
        theta = self.theta0.jet(p)
        if k is None:
            k = int(np.argmax(np.abs(theta.value)))
        N = self.chart.dim
        e = np.zeros(N)
        e[k] = 1.0
        return Jet2.constant(np.eye(N), N) - outer(Jet2.constant(e, N), theta / theta[k])


def reeb_field(s: CRWeylStructure, p) -> np.ndarray:
    return s.reeb(p)


def faraday(s: CRWeylStructure) -> KForm:
    return s.faraday


def levi_metric(s: CRWeylStructure, p, v, w) -> float:
    """g0(v, w) = 1/2 d theta0(v, I w) for v, w in H."""
    s.require_horizontal(p, v)
    s.require_horizontal(p, w)
    return 0.5 * s.dtheta0(p, v, s.endo(p, w))


def h_frame(s: CRWeylStructure, p) -> HFrame:
    theta = s.theta0.jet(p).value
    F = null_space(theta[None, :])
    M = F.T @ (s.endo(p) @ F)
    return HFrame(F, M)


def i_on_frame(s: CRWeylStructure, p) -> np.ndarray:
    return h_frame(s, p).i_matrix


def levi_gram(s: CRWeylStructure, p, frame: Optional[HFrame] = None) -> np.ndarray:
    frame = frame or h_frame(s, p)
    F = frame.vectors
    W = s.dtheta0.jet(p).value
    A = s.endo(p)
    return 0.5 * F.T @ W @ A @ F


def h_frame_jets(s: CRWeylStructure, p):
    """H-valued fields Q e_i through p, Q projecting along the dominant theta0 axis."""
    theta = s.theta0.jet(p).value
    k = int(np.argmax(np.abs(theta)))
    N = s.chart.dim
    Q = s.axis_projector_jet(p, k)
    fields = []
    for i in range(N):
        if i == k:
            continue
        e = Jet2.constant(np.eye(N)[i], N)
        fields.append(matmul(Q, e))
    return fields, k


def _cr_residuals(s: CRWeylStructure, p):
    """Returns (integrability residual, horizontality residual) over frame pairs."""
    fields, k = h_frame_jets(s, p)
    A = s.endo.jet(p)
    Q = s.axis_projector_jet(p, k).value
    theta = s.theta0.jet(p).value
    Av = A.value
    worst_int, worst_h = 0.0, 0.0
    IX = [matmul(A, X) for X in fields]
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            X, Y, IXa, IYb = fields[a], fields[b], IX[a], IX[b]
            q = bracket_jets(IXa, IYb).value - bracket_jets(X, Y).value
            r = bracket_jets(IXa, Y).value + bracket_jets(X, IYb).value
            resid = q - Av @ (Q @ r)
            scale = max(1.0, max_abs(q), max_abs(r))
            worst_int = max(worst_int, max_abs(resid) / scale)
            worst_h = max(worst_h, abs(theta @ q) / scale)
    return worst_int, worst_h


def validate(s: CRWeylStructure, samples: int = 100, seed: int = 42, tolerance_scale: float = 1.0) -> ValidationReport:
    points = s.chart.sample(samples, seed)
    tol = EXACT_TOL * tolerance_scale
    report = ValidationReport(f"structure '{s.name}'")

    def theta_norm(p):
        return np.linalg.norm(s.theta0.jet(p).value)

    report.add(measure_min("contact_form_nonzero", 1e-12, theta_norm, points))

    def preserves_h(p):
        frame = h_frame(s, p)
        theta = s.theta0.jet(p).value
        AF = s.endo(p) @ frame.vectors
        return max_abs(theta @ AF) / max(1.0, np.linalg.norm(theta))

    report.add(measure("endo_preserves_h", tol, preserves_h, points))

    def squares_to_minus_one(p):
        F = h_frame(s, p).vectors
        A = s.endo(p)
        return max_abs(A @ (A @ F) + F)

    report.add(measure("endo_squared", tol, squares_to_minus_one, points))

    integrability = {}

    def cr_residuals(p):
        key = tuple(p)
        if key not in integrability:
            integrability[key] = _cr_residuals(s, p)
        return integrability[key]

    def cr_int(p):
        return cr_residuals(p)[0]

    report.add(measure("cr_integrability", tol, cr_int, points))
    report.add(measure("cr_bracket_horizontal", tol,
                       lambda p: cr_residuals(p)[1], points))

    def levi_symmetric(p):
        G = levi_gram(s, p)
        return max_abs(G - G.T) / max(1.0, max_abs(G))

    report.add(measure("levi_symmetric", tol, levi_symmetric, points))

    def levi_min_eigenvalue(p):
        G = levi_gram(s, p)
        G = 0.5 * (G + G.T)
        return np.linalg.eigvalsh(G)[0] / max(1.0, max_abs(G))

    report.add(measure_min("levi_positive", PD_FLOOR, levi_min_eigenvalue, points))

    def reeb_residual(p):
        T = s.reeb(p)
        theta = s.theta0.jet(p).value
        B = s.beta.jet(p).value
        return max(abs(theta @ T - 1.0), max_abs(T @ B) / max(1.0, max_abs(B)))

    report.add(measure("reeb_solvable", tol, reeb_residual, points))
    return report


# ---------------------------------------------------------------------------
# Sasaki-Weyl defect
# ---------------------------------------------------------------------------

def _extension(s: CRWeylStructure, p, v, linear: Optional[np.ndarray]) -> VectorField:
    N = s.chart.dim
    p0 = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)

    def jet_fn(x):
        c = Jet2.constant(v, N)
        if linear is not None:
            c = c + matmul(np.asarray(linear, dtype=float), Jet2.variable(x) - p0)
        return matmul(s.projector.jet(x), c)
    return VectorField(s.chart, jet_fn, name="X")


def sasaki_weyl_defect(s: CRWeylStructure, p, v, linear: Optional[np.ndarray] = None) -> np.ndarray:
    """
    L_{psi^D}(I)(X) at p in the s0-trivialization:
        ([T0, IX] + gamma(IX) T0) - I([T0, X] + gamma(X) T0)
    with X = P(v + linear (x - p)) extending v.
    """
    s.require_horizontal(p, v)
    X = _extension(s, p, v, linear)
    IX = s.cr.apply(X)
    T = s.reeb.jet(p)
    Xj, IXj = X.jet(p), IX.jet(p)
    gamma = s.gamma.jet(p).value
    term1 = bracket_jets(T, IXj).value + (gamma @ IXj.value) * T.value
    term2 = bracket_jets(T, Xj).value + (gamma @ Xj.value) * T.value
    return term1 - s.cr(p) @ term2


def max_defect(s: CRWeylStructure, points) -> float:
    worst = 0.0
    for p in points:
        frame = h_frame(s, p)
        for v in frame.vectors.T:
            worst = max(worst, max_abs(sasaki_weyl_defect(s, p, v)))
    return worst


def is_sasaki(s: CRWeylStructure, samples: int = 20, seed: int = 42, tolerance: float = EXACT_TOL) -> bool:
    """gamma = 0 and the Reeb flow preserves I."""
    points = s.chart.sample(samples, seed)
    if any(max_abs(s.gamma.jet(p).value) > tolerance for p in points):
        return False
    return max_defect(s, points) <= tolerance


# ---------------------------------------------------------------------------
# Gauge
# ---------------------------------------------------------------------------

def gauge_transform(s: CRWeylStructure, u: Union[Expression, KForm], name: Optional[str] = None) -> CRWeylStructure:
    """s0 -> e^u s0: theta0 -> e^-u theta0, gamma -> gamma + du."""
    U = KForm.from_expressions(s.chart, u) if isinstance(u, Expression) else u
    if U.degree != 0:
        raise CRWeylError("gauge function must be a 0-form")
    factor = KForm.scalar(s.chart, lambda p: J.exp(-U.jet(p)), name="exp(-u)")
    return s.replace(
        theta0=wedge(factor, s.theta0),
        gamma=s.gamma + exact_form(U),
        name=name or f"{s.name}~",
    )
