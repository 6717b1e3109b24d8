"""
Verification suites. Each suite turns one group of identities into named
checks (max residual against a tolerance) over seeded sample points.
"""

import math
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from intern.catalog import ExampleBundle
from intern.checks import CheckResult, measure, measure_min
from intern.cone import (
    ConeSpace, lck_check, nijenhuis, nijenhuis_matrix, nijenhuis_closed_form, nijenhuis_mixed,
    j_squared_residual, omega_invariance_residual, jpotential_residual,
    metric_decomposition_residuals, metric_symmetry_residual, min_metric_eigenvalue,
)
from intern.crweyl import (
    CRWeylStructure, PD_FLOOR, validate, h_frame, max_defect, sasaki_weyl_defect, gauge_transform,
)
from intern.geometry import (
    max_abs, jacobi_residual, cartan_residual, d_squared_residual, fd_form_residual,
    fd_hessian_residual, random_vector_fields, random_one_form,
)
from intern.reduction import (
    action_checks, validate_slice, tangent_to_S, reduce, reeb_projection_residual,
    lift_independence_residual, h_decomposition, rho, exactness_check,
    cone_commutativity, cone_moment_residual, holomorphic_action_residual,
)
from intern.utils import Logger, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE_SCALE
from .report import SuiteReport


CALC_TOL = 1e-9
FD_TOL = 1e-5
FD_HESS_TOL = 1e-4
STRUCTURE_TOL = 1e-9
DEFECT_TOL = 1e-8
NORM_TOL = 1e-10
INTEGRABILITY_TOL = 1e-8
REDUCTION_TOL = 1e-9
REDUCED_TOL = 1e-8
HOLONOMY_TOL = 1e-8
HOLONOMY_FLOOR = 1e-6
COMMUTE_TOL = 1e-8

# Loop names an example may carry for the exactness suite.
GENERATOR_LOOP, HOMOTOPIC_LOOP, CONTRACTIBLE_LOOP = "generator", "homotopic", "contractible"


@dataclass
class RunOptions:
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tolerance_scale: float = DEFAULT_TOLERANCE_SCALE


def guarded(name: str, tolerance: float, fn: Callable[[], float]) -> CheckResult:
    """A single-value check; an exception becomes an infinite residual."""
    try:
        value = float(fn())
    except Exception as e:
        return CheckResult(name, math.inf, tolerance, f"{type(e).__name__}: {e}")
    if math.isnan(value):
        return CheckResult(name, math.inf, tolerance, "residual is NaN")
    return CheckResult(name, value, tolerance)


def _renamed(checks, prefix: str) -> list:
    return [CheckResult(f"{prefix}{c.name}", c.max_residual, c.tolerance, c.detail) for c in checks]


class Suite:
    name = ""
    description = ""

    def __init__(self, bundle: ExampleBundle, options: RunOptions, logger: Logger):
        self.bundle = bundle
        self.options = options
        self.logger = logger.with_context("SUITE")

    @property
    def structure(self) -> CRWeylStructure:
        return self.bundle.structure

    def tol(self, base: float) -> float:
        return base * self.options.tolerance_scale

    @cached_property
    def points(self) -> np.ndarray:
        return self.structure.chart.sample(self.options.samples, self.options.seed)

    @cached_property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.options.seed)

    def skip_reason(self) -> Optional[str]:
        return None

    def run_checks(self) -> list:
        raise NotImplementedError

    def execute(self) -> SuiteReport:
        start = time.perf_counter()
        b, o = self.bundle, self.options
        report = SuiteReport(self.name, b.name, dict(b.params), o.seed, o.samples)

        reason = self.skip_reason()
        if reason:
            report.skipped = reason
            self.logger.info(f"{self.name} on '{b.name}': skipped ({reason})")
        else:
            try:
                report.checks = self.run_checks()
            except Exception as e:
                report.checks = [CheckResult(f"{self.name}_setup", math.inf, 0.0, f"{type(e).__name__}: {e}")]
            for c in report.checks:
                if c.passed:
                    self.logger.debug(f"  {c.name}: {c.max_residual:.3e} <= {c.tolerance:.1e}")
                else:
                    detail = f" ({c.detail})" if c.detail else ""
                    self.logger.warn(f"{self.name}/{c.name}: residual {c.max_residual:.3e} > {c.tolerance:.1e}{detail}")
            self.logger.info(f"{self.name} on '{b.name}': {self.logger.verdict(report.passed)} "
                             f"({sum(c.passed for c in report.checks)}/{len(report.checks)} checks)")

        report.seconds = time.perf_counter() - start
        self.logger.count_suite(report.outcome, len(report.checks), sum(c.passed for c in report.checks))
        return report


# ---------------------------------------------------------------------------
# Base manifold
# ---------------------------------------------------------------------------

class CalculusSuite(Suite):
    name = "calculus"
    description = "Jacobi, Cartan, d^2 = 0 and jets against finite differences"

    def run_checks(self) -> list:
        s = self.structure
        chart = s.chart
        X, Y, Z = random_vector_fields(chart, 3, self.options.seed)
        trial = random_one_form(chart, self.options.seed)
        tol, fd_tol, hess_tol = self.tol(CALC_TOL), self.tol(FD_TOL), self.tol(FD_HESS_TOL)
        pts = self.points
        return [
            measure("jacobi", tol, lambda p: jacobi_residual(X, Y, Z, p), pts),
            measure("cartan", tol, lambda p: cartan_residual(X, trial, p), pts),
            measure("cartan_theta0", tol, lambda p: cartan_residual(Y, s.theta0, p), pts),
            measure("d_squared", tol,
                    lambda p: max(d_squared_residual(trial, p), d_squared_residual(s.theta0, p)), pts),
            measure("jet_vs_fd", fd_tol,
                    lambda p: max(fd_form_residual(trial, p), fd_form_residual(s.theta0, p)), pts),
            measure("jet_hessian_vs_fd", hess_tol,
                    lambda p: max(fd_hessian_residual(f, p) for f in (trial, s.theta0)
                                  if f.jet(p).hess is not None), pts),
        ]


class CRAxiomsSuite(Suite):
    name = "cr-axioms"
    description = "contact form, I^2 = -1 on H, integrability, pseudoconvexity, Reeb solve"

    def run_checks(self) -> list:
        o = self.options
        return validate(self.structure, o.samples, o.seed, o.tolerance_scale).checks


class SasakiWeylSuite(Suite):
    name = "sasaki-weyl"
    description = "Weyl-Lie derivative of I along the Reeb field"

    def _tensorial(self, p) -> float:
        s = self.structure
        worst = 0.0
        for v in h_frame(s, p).vectors.T:
            L = self.rng.normal(size=(s.chart.dim, s.chart.dim))
            a = sasaki_weyl_defect(s, p, v)
            b = sasaki_weyl_defect(s, p, v, linear=L)
            worst = max(worst, max_abs(a - b) / max(1.0, max_abs(a)))
        return worst

    def _reeb(self, p) -> float:
        s = self.structure
        T = s.reeb(p)
        return max(abs(s.theta0(p, T) - 1.0), max_abs(T @ s.beta.jet(p).value))

    def run_checks(self) -> list:
        s, pts = self.structure, self.points
        return [
            measure("reeb_normalized", self.tol(STRUCTURE_TOL), self._reeb, pts),
            measure("defect", self.tol(DEFECT_TOL), lambda p: max_defect(s, [p]), pts),
            measure("defect_tensorial", self.tol(DEFECT_TOL), self._tensorial, pts),
        ]


# ---------------------------------------------------------------------------
# Cone
# ---------------------------------------------------------------------------

class _ConeSuite(Suite):
    @cached_property
    def cone(self) -> ConeSpace:
        return ConeSpace(self.structure)

    @cached_property
    def points(self) -> np.ndarray:
        return self.cone.chart.sample(self.options.samples, self.options.seed)


class ConeSuite(_ConeSuite):
    name = "cone"
    description = "J^2 = -1, J-invariant Omega, positive metric, potential and orthogonal splitting"

    def run_checks(self) -> list:
        c, pts = self.cone, self.points
        tol, norm_tol = self.tol(STRUCTURE_TOL), self.tol(NORM_TOL)

        def part(key):
            return lambda p: metric_decomposition_residuals(c, p)[key]

        return [
            measure("j_squared", tol, lambda p: j_squared_residual(c, p), pts),
            measure("omega_j_invariant", tol, lambda p: omega_invariance_residual(c, p), pts),
            measure("metric_symmetric", tol, lambda p: metric_symmetry_residual(c, p), pts),
            measure_min("metric_positive", PD_FLOOR, lambda p: min_metric_eigenvalue(c, p), pts),
            measure("j_potential", tol, lambda p: jpotential_residual(c, p), pts),
            measure("splitting_orthogonal", tol, part("orthogonal"), pts),
            measure("reeb_lift_norm", norm_tol, part("reeb_norm"), pts),
            measure("vertical_norm", norm_tol, part("vertical_norm"), pts),
            measure("horizontal_metric", tol, part("horizontal"), pts),
        ]


class IntegrabilitySuite(_ConeSuite):
    name = "integrability"
    description = "Nijenhuis tensor of the cone J and its closed forms"

    def _h_pair(self, x):
        frame = h_frame(self.structure, x).vectors
        return frame @ self.rng.normal(size=frame.shape[1]), frame @ self.rng.normal(size=frame.shape[1])

    def _closed_form(self, p) -> float:
        c = self.cone
        x, _ = c.split(p)
        X, Y = self._h_pair(x)
        lhs = nijenhuis(c, p, c.horizontal_lift(p, X), c.horizontal_lift(p, Y))
        rhs = nijenhuis_closed_form(c, p, X, Y)
        return max_abs(lhs - rhs) / max(1.0, max_abs(rhs))

    def _mixed(self, p) -> float:
        c = self.cone
        x, _ = c.split(p)
        X, _ = self._h_pair(x)
        lhs = nijenhuis(c, p, c.horizontal_lift(p, X), c.reeb_lift(p))
        rhs = nijenhuis_mixed(c, p, X)
        return max_abs(lhs - rhs) / max(1.0, max_abs(rhs))

    def run_checks(self) -> list:
        c, pts = self.cone, self.points
        tol = self.tol(INTEGRABILITY_TOL)
        return [
            measure("nijenhuis_vanishes", tol, lambda p: max_abs(nijenhuis_matrix(c, p)), pts),
            measure("closed_form_matches_bracket", tol, self._closed_form, pts),
            measure("mixed_matches_bracket", tol, self._mixed, pts),
        ]


class LckSuite(_ConeSuite):
    name = "lck"
    description = "l.c.K. certificate: d Omega identity, factorization, Lee form"

    def run_checks(self) -> list:
        o = self.options
        return lck_check(self.cone, o.samples, o.seed, o.tolerance_scale).report.checks


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------

class _ReductionSuite(Suite):
    needs_slice = True

    def skip_reason(self) -> Optional[str]:
        if self.bundle.action is None:
            return "no group action"
        if self.needs_slice and self.bundle.slice is None:
            return "no slice chart"
        return None

    @cached_property
    def reduced(self) -> CRWeylStructure:
        return reduce(self.bundle.action, self.bundle.slice)

    @cached_property
    def slice_points(self) -> np.ndarray:
        return self.bundle.slice.chart.sample(self.options.samples, self.options.seed)


class ReductionSuite(_ReductionSuite):
    name = "reduction"
    description = "action invariance, zero set, slice, reduced structure and Reeb projection"
    needs_slice = False

    def _tangency(self, x) -> float:
        a, sl = self.bundle.action, self.bundle.slice
        y = sl.lift(x)
        worst = 0.0
        for v in self.rng.normal(size=(5, a.chart.dim)):
            worst = max(worst, tangent_to_S(a, y, v).disagreement)
        return worst

    def _slice_tangent(self, x) -> float:
        a, sl = self.bundle.action, self.bundle.slice
        y = sl.lift(x)
        D = sl.embedding.differential(x).value
        return max(tangent_to_S(a, y, col).bracket_residual for col in D.T)

    def _projector_gauge(self, x) -> float:
        a, sl = self.bundle.action, self.bundle.slice
        y = sl.lift(x)
        gauged = a.gauged(a.chart.parse(f"0.3*{a.chart.coords[0]}"))
        base, other = h_decomposition(a, y), h_decomposition(gauged, y)
        frame = h_frame(a.structure, y).vectors
        return max_abs((base.proj_e - other.proj_e) @ frame)

    def _lift_independent(self, x) -> float:
        a, sl = self.bundle.action, self.bundle.slice
        worst = 0.0
        for v in h_frame(self.reduced, x).vectors.T:
            shift = self.rng.normal(size=a.rank)
            worst = max(worst, lift_independence_residual(a, sl, self.reduced, x, v, shift))
        return worst

    def run_checks(self) -> list:
        a, sl, o = self.bundle.action, self.bundle.slice, self.options
        checks = list(action_checks(a, o.samples, o.seed, o.tolerance_scale).checks)
        if sl is None:
            return checks
        tol = self.tol(REDUCTION_TOL)
        pts = self.slice_points
        checks += validate_slice(a, sl, o.samples, o.seed).checks
        checks += [
            measure("tangency_agree", tol, self._tangency, pts),
            measure("slice_tangent_to_zero_set", tol, self._slice_tangent, pts),
            measure("projector_gauge_invariant", tol, self._projector_gauge, pts),
        ]
        reduced = self.reduced
        checks += _renamed(validate(reduced, o.samples, o.seed, o.tolerance_scale).checks, "reduced_")
        checks += [
            measure("reduced_sasaki_weyl", self.tol(REDUCED_TOL), lambda x: max_defect(reduced, [x]), pts),
            measure("reduced_closed", tol, lambda x: max_abs(reduced.faraday.jet(x).value), pts),
            measure("reeb_projects", self.tol(REDUCED_TOL),
                    lambda x: reeb_projection_residual(a, sl, reduced, x), pts),
            measure("lift_independent", self.tol(REDUCED_TOL), self._lift_independent, pts),
        ]
        return checks


class ExactnessSuite(_ReductionSuite):
    name = "exactness"
    description = "rho homomorphism and holonomy of the reduced connection"

    def skip_reason(self) -> Optional[str]:
        reason = super().skip_reason()
        if reason:
            return reason
        if not self.bundle.action.discrete or GENERATOR_LOOP not in self.bundle.loops:
            return "no discrete generator loop"
        return None

    def run_checks(self) -> list:
        a, sl, o = self.bundle.action, self.bundle.slice, self.options
        loops = self.bundle.loops
        rh = rho(a, min(o.samples, 50), o.seed, self.bundle.potential)
        gauged = gauge_transform(self.reduced, sl.gauge) if sl.gauge is not None else self.reduced
        hol = {name: exactness_check(gauged, loop) for name, loop in loops.items()}
        g = a.discrete[0].name
        generator = hol[GENERATOR_LOOP].value

        checks = [
            CheckResult("rho_multiplicative", rh.multiplicativity_residual, self.tol(REDUCTION_TOL)),
            guarded("holonomy_log_rho", self.tol(HOLONOMY_TOL), lambda: abs(generator - math.log(rh[g]))),
            CheckResult("holonomy_nonzero", max(0.0, HOLONOMY_FLOOR - abs(generator)), 0.0, f"holonomy {generator:.6g}"),
            CheckResult("reduced_closed_on_loop", max(h.closedness for h in hol.values()), self.tol(REDUCTION_TOL)),
        ]
        if HOMOTOPIC_LOOP in hol:
            checks.append(CheckResult("homotopy_invariant", abs(hol[HOMOTOPIC_LOOP].value - generator),
                                      self.tol(HOLONOMY_TOL)))
        if CONTRACTIBLE_LOOP in hol:
            checks.append(CheckResult("contractible_zero", abs(hol[CONTRACTIBLE_LOOP].value), self.tol(HOLONOMY_TOL)))
        return checks


class CommutativitySuite(_ReductionSuite):
    name = "commutativity"
    description = "cone of the reduction against reduction of the cone; cone moment map"

    def run_checks(self) -> list:
        a, sl, o = self.bundle.action, self.bundle.slice, self.options
        cm = cone_commutativity(a, sl, o.samples, o.seed, self.reduced)
        cone = ConeSpace(a.structure)
        pts = cone.chart.sample(o.samples, o.seed)
        tol = self.tol(REDUCTION_TOL)
        return [
            CheckResult("complex_structure_commutes", cm.complex_structure, self.tol(COMMUTE_TOL)),
            CheckResult("metric_commutes", cm.metric, self.tol(COMMUTE_TOL)),
            measure("cone_moment_map", tol,
                    lambda p: cone_moment_residual(a, cone, p) / max(1.0, p[-1]), pts),
            measure("holomorphic_action", tol, lambda p: holomorphic_action_residual(a, cone, p), pts),
        ]
