"""
Slice charts and the reduced CR-Weyl structure.

A slice is an embedding iota of a reduced chart into the zero set S,
transverse to the orbits of the identity component. Tangent vectors of S
are pushed down by solving v = iota_* w + sum c_a xi_a.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from intern.checks import ValidationReport, measure, measure_min
from intern.crweyl import CRWeylStructure
from intern.expr import Expression, Jet2, SingularJetError, compose, concatenate, matmul, solve
from intern.geometry import Chart, EndomorphismField, Map, max_abs, pullback
from .action import (
    GroupActionSpec, ReductionError, S_TOL,
    e_projector_jet, moment_map,
)


class SliceError(ReductionError):
    pass


TRANSVERSE_FLOOR = 1e-8
TANGENT_TOL = 1e-8


@dataclass
class SliceChart:
    chart: Chart
    embedding: Map
    discrete: list = field(default_factory=list)
    gauge: Optional[Expression] = None
    name: str = "slice"

    def lift(self, x) -> np.ndarray:
        return self.embedding(x)


def _normal_system(a: GroupActionSpec, sl: SliceChart, x) -> Jet2:
    """[D iota | xi(iota(x))], shape (ambient dim, reduced dim + rank)."""
    Y = sl.embedding.jet(x)
    D = sl.embedding.differential(x)
    if not a.generators:
        return D
    cols = [compose(xi.jet(Y.value), Y).expand(1) for xi in a.generators]
    return concatenate([D] + cols, axis=1)


def transversality(a: GroupActionSpec, sl: SliceChart, x) -> float:
    """Smallest over largest singular value of [D iota | xi]."""
    sv = np.linalg.svd(_normal_system(a, sl, x).value, compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def pushdown_matrix_jet(a: GroupActionSpec, sl: SliceChart, x) -> Jet2:
    """Left inverse of [D iota | xi] restricted to the reduced block, shape (reduced dim, ambient dim)."""
    M = _normal_system(a, sl, x)
    if transversality(a, sl, x) < TRANSVERSE_FLOOR:
        raise SliceError(f"slice '{sl.name}' is not transverse to the orbits at {np.round(x, 6).tolist()}")
    try:
        L = solve(matmul(M.T, M), M.T)
    except SingularJetError as e:
        raise SliceError(f"push-down system singular at {np.round(x, 6).tolist()}") from e
    return L[: sl.chart.dim]


def pushdown(a: GroupActionSpec, sl: SliceChart, x, v) -> tuple:
    """(w, c) with v = iota_* w + sum c_a xi_a; raises if v is not tangent to slice plus orbits."""
    M = _normal_system(a, sl, x).value
    if transversality(a, sl, x) < TRANSVERSE_FLOOR:
        raise SliceError(f"slice '{sl.name}' is not transverse to the orbits at {np.round(x, 6).tolist()}")
    v = np.asarray(v, dtype=float)
    sol, *_ = np.linalg.lstsq(M, v, rcond=None)
    if max_abs(M @ sol - v) > TANGENT_TOL * max(1.0, max_abs(v)):
        raise SliceError("vector is not tangent to the slice and the orbits")
    m = sl.chart.dim
    return sol[:m], sol[m:]


def validate_slice(a: GroupActionSpec, sl: SliceChart, samples: int = 100, seed: int = 42) -> ValidationReport:
    points = sl.chart.sample(samples, seed)
    report = ValidationReport(f"slice '{sl.name}'")
    report.add(measure("slice_in_zero_set", S_TOL,
                       lambda x: max([abs(v) for v in moment_map(a, sl.lift(x))], default=0.0), points))
    report.add(measure_min("slice_transverse", TRANSVERSE_FLOOR, lambda x: transversality(a, sl, x), points))
    report.add(measure("slice_in_chart", 0.0,
                       lambda x: 0.0 if a.chart.contains(sl.lift(x)) else 1.0, points))
    return report


# ---------------------------------------------------------------------------
# Reduced structure
# ---------------------------------------------------------------------------

def reduced_endo_jet(a: GroupActionSpec, sl: SliceChart, x) -> Jet2:
    """A^(v) = pushdown(I proj_E(P iota_* v))."""
    s = a.structure
    Y = sl.embedding.jet(x)
    y = Y.value
    D = sl.embedding.differential(x)
    PE = compose(e_projector_jet(a, y), Y)
    A = compose(s.endo.jet(y), Y)
    L = pushdown_matrix_jet(a, sl, x)
    return matmul(L, matmul(A, matmul(PE, D)))


def reduce(a: GroupActionSpec, sl: SliceChart, name: Optional[str] = None) -> CRWeylStructure:
    s = a.structure
    if sl.embedding.target.dim != s.chart.dim or sl.embedding.source.dim != sl.chart.dim:
        raise SliceError(f"slice '{sl.name}' does not map its chart into '{s.chart.name}'")
    theta = pullback(sl.embedding, s.theta0)
    gamma = pullback(sl.embedding, s.gamma)
    endo = EndomorphismField(sl.chart, lambda x: reduced_endo_jet(a, sl, x), name="A^")
    return CRWeylStructure(sl.chart, theta, endo, gamma, name or f"{s.name}//{sl.name}")


def reeb_projection_residual(a: GroupActionSpec, sl: SliceChart, reduced: CRWeylStructure, x) -> float:
    T = a.structure.reeb(sl.lift(x))
    w, _ = pushdown(a, sl, x, T)
    That = reduced.reeb(x)
    return max_abs(w - That) / max(1.0, max_abs(That))


def reeb_projects(a: GroupActionSpec, sl: SliceChart, samples: int = 100, seed: int = 42,
                  reduced: Optional[CRWeylStructure] = None) -> float:
    reduced = reduced or reduce(a, sl)
    return max(reeb_projection_residual(a, sl, reduced, x) for x in sl.chart.sample(samples, seed))


def lift_independence_residual(a: GroupActionSpec, sl: SliceChart, reduced: CRWeylStructure, x,
                               v, shift) -> float:
    """I^ computed from iota_* v + sum shift_a xi_a must equal A^(v) for v in ker theta^."""
    s = a.structure
    y = sl.lift(x)
    lifted = sl.embedding.push(x, v)
    for c, xi in zip(shift, a.generators):
        lifted = lifted + c * xi(y)
    image = s.endo(y) @ (e_projector_jet(a, y).value @ lifted)
    w, _ = pushdown(a, sl, x, image)
    expected = reduced.endo(x, v)
    return max_abs(w - expected) / max(1.0, max_abs(expected))
