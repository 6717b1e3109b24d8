"""
Locally conformal Kaehler criteria for the cone.

The cone is l.c.K. exactly when the base is Sasaki-Weyl and its Faraday form
factors as F = kappa (d theta0 + gamma ^ theta0) with
d kappa - kappa gamma + kappa^2 theta0 = 0. The Lee form is then
2 kappa theta0 - 2 gamma, and where kappa != 0 the rescaled form kappa^2 Omega
is closed.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from intern.checks import ValidationReport, measure
from intern.crweyl import CRWeylStructure, h_frame, h_frame_jets, max_defect
from intern.expr import Jet2, matmul
from intern.geometry import KForm, max_abs, weighted_d, wedge
from .cone import ConeSpace, DegenerateLeastSquaresError


LCK_TOL = 1e-8
DOMEGA_TOL = 1e-9
KAPPA_T_VALUES = (0.5, 1.0, 2.0)
DEGENERATE_FLOOR = 1e-16
GLOBAL_LOCUS_FLOOR = 1e-6
_TRIPLES_PER_POINT = 4


def kappa_jet(s: CRWeylStructure, x) -> Jet2:
    """Least-squares factor of F against d theta0 + gamma ^ theta0 over H-frame pairs."""
    fields, _ = h_frame_jets(s, x)
    F = s.faraday.jet(x)
    B = s.beta.jet(x)
    num, den = None, None
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            f = matmul(fields[a], matmul(F, fields[b]))
            g = matmul(fields[a], matmul(B, fields[b]))
            num = f * g if num is None else num + f * g
            den = g * g if den is None else den + g * g
    if den is None or den.value <= DEGENERATE_FLOOR:
        raise DegenerateLeastSquaresError(
            f"d theta0 vanishes on H at {np.round(x, 6).tolist()}: no factor to solve for"
        )
    return num / den


def kappa_form(s: CRWeylStructure) -> KForm:
    return KForm.scalar(s.chart, lambda x: kappa_jet(s, x), name="kappa")


def factorization_residual(s: CRWeylStructure, x, kappa: float) -> float:
    F = h_frame(s, x).vectors
    Fw = F.T @ s.faraday.jet(x).value @ F
    Bw = F.T @ s.beta.jet(x).value @ F
    return max_abs(Fw - kappa * Bw) / max(1.0, max_abs(Fw))


def _random_triples(dim: int, seed: int, count: int = _TRIPLES_PER_POINT):
    rng = np.random.default_rng(seed)
    return [rng.normal(size=(3, dim)) for _ in range(count)]


def three_form_residual(lhs: KForm, rhs: KForm, p, seed: int) -> float:
    worst = 0.0
    for u, v, w in _random_triples(lhs.chart.dim, seed):
        a, b = lhs(p, u, v, w), rhs(p, u, v, w)
        worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
    return worst


@dataclass
class LckCertificate:
    cone: ConeSpace
    kappa: KForm
    lee_form: KForm
    report: ValidationReport
    kappa_values: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.report.passed

    def residual(self, name: str) -> float:
        return self.report.check(name).max_residual

    def in_global_kahler_locus(self, x) -> bool:
        return abs(self.kappa.jet(x).value) > GLOBAL_LOCUS_FLOOR


class LckForms:
    """Cone forms used by the l.c.K. checks, built once per cone."""

    def __init__(self, c: ConeSpace):
        self.c = c
        self.s = c.base

    @cached_property
    def kappa(self) -> KForm:
        return kappa_form(self.s)

    @cached_property
    def domega(self) -> KForm:
        return self.c.omega.d()

    @cached_property
    def domega_expected(self) -> KForm:
        """t F ^ theta0 - 2 Omega ^ gamma."""
        c = self.c
        F = c.lift_form(self.s.faraday)
        return wedge(c.t_function, wedge(F, c.theta0)) - wedge(c.omega, c.gamma) * 2.0

    @cached_property
    def lee_base(self) -> KForm:
        return wedge(self.kappa, self.s.theta0) * 2.0 - self.s.gamma * 2.0

    @cached_property
    def lee_form(self) -> KForm:
        return self.c.lift_form(self.lee_base)

    @cached_property
    def omega_lee(self) -> KForm:
        return wedge(self.c.omega, self.lee_form)

    @cached_property
    def bianchi(self) -> KForm:
        """d kappa - kappa gamma + kappa^2 theta0."""
        k = self.kappa
        return weighted_d(k, self.s.gamma, -1) + wedge(k * k, self.s.theta0)

    @cached_property
    def rescaled_domega(self) -> KForm:
        """d(kappa^2 Omega) = 2 kappa d kappa ^ Omega + kappa^2 d Omega."""
        c = self.c
        k = c.lift_form(self.kappa)
        dk = c.lift_form(self.kappa.d())
        return wedge(wedge(k, dk) * 2.0, c.omega) + wedge(k * k, self.domega)


def lee_form(c: ConeSpace) -> KForm:
    return LckForms(c).lee_form


def domega_identity_residual(c: ConeSpace, p, seed: int = 0, forms: Optional[LckForms] = None) -> float:
    forms = forms or LckForms(c)
    return three_form_residual(forms.domega, forms.domega_expected, p, seed)


def kappa_t_residual(c: ConeSpace, x, kappa: float) -> float:
    """Solves F ^ theta0 = lambda Omega ^ theta0 on lifted frames at several t; t lambda / 2 must equal kappa."""
    s = c.base
    F3 = wedge(c.lift_form(s.faraday), c.theta0)
    O3 = wedge(c.omega, c.theta0)
    frame = h_frame(s, x).vectors.T
    worst = 0.0
    for t in KAPPA_T_VALUES:
        p = c.point(x, t)
        R = c.reeb_lift(p)
        lifts = [c.horizontal_lift(p, f) for f in frame]
        num = den = 0.0
        for a in range(len(lifts)):
            for b in range(a + 1, len(lifts)):
                fv = F3(p, lifts[a], lifts[b], R)
                ov = O3(p, lifts[a], lifts[b], R)
                num += fv * ov
                den += ov * ov
        if den <= DEGENERATE_FLOOR:
            raise DegenerateLeastSquaresError(f"Omega ^ theta0 vanishes on lifted frames at t={t}")
        worst = max(worst, abs(t * (num / den) / 2.0 - kappa))
    return worst


def lck_check(c: ConeSpace, samples: int = 100, seed: int = 42, tolerance_scale: float = 1.0) -> LckCertificate:
    s = c.base
    forms = LckForms(c)
    points = c.chart.sample(samples, seed)
    bases = [c.split(p)[0] for p in points]
    kappas = [float(forms.kappa.jet(x).value) for x in bases]
    tol = LCK_TOL * tolerance_scale
    report = ValidationReport(f"l.c.K. cone over '{s.name}'")

    indexed = list(enumerate(points))
    report.add(measure("domega_identity", DOMEGA_TOL * tolerance_scale,
                       lambda ip: domega_identity_residual(c, ip[1], seed + ip[0], forms), indexed))
    report.add(measure("sasaki_weyl", tol, lambda x: max_defect(s, [x]), bases))

    by_index = list(zip(bases, kappas))
    report.add(measure("faraday_factorization", tol,
                       lambda xk: factorization_residual(s, xk[0], xk[1]), by_index))
    report.add(measure("kappa_t_independent", tol,
                       lambda xk: kappa_t_residual(c, xk[0], xk[1]), by_index))

    def reeb_faraday(x):
        T = s.reeb(x)
        return max_abs(T @ s.faraday.jet(x).value)

    report.add(measure("reeb_faraday", tol, reeb_faraday, bases))
    report.add(measure("bianchi", tol, lambda x: max_abs(forms.bianchi.jet(x).value), bases))
    report.add(measure("lee_closed", tol, lambda x: max_abs(forms.lee_base.d().jet(x).value), bases))
    report.add(measure("lee_identity", tol,
                       lambda ip: three_form_residual(forms.domega, forms.omega_lee, ip[1], seed + ip[0]),
                       indexed))

    def global_kahler(ip):
        i, p = ip
        x = c.split(p)[0]
        k = float(forms.kappa.jet(x).value)
        if abs(k) <= GLOBAL_LOCUS_FLOOR:
            return 0.0
        zero = KForm(c.chart, 3, evaluator=lambda q, vs: 0.0)
        return three_form_residual(forms.rescaled_domega, zero, p, seed + i) / max(1.0, k * k)

    report.add(measure("global_kahler", tol, global_kahler, indexed))
    return LckCertificate(c, forms.kappa, forms.lee_form, report, kappas)
