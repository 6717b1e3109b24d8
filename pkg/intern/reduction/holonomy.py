from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from intern.crweyl import CRWeylStructure
from intern.expr import Jet2, parse, stack
from intern.geometry import Chart, Map, max_abs
from .action import ReductionError


class LoopError(ReductionError):
    pass


class NotClosedError(ReductionError):
    pass


CLOSED_TOL = 1e-9
LOOP_CHECKPOINTS = 64
QUAD_OPTIONS = {"epsabs": 1e-12, "epsrel": 1e-12, "limit": 200}


@dataclass
class Loop:
    """
    A path s -> c(s), s in [0, 1], in a reduced chart. With a closing map g
    the path closes in the quotient: c(1) = g(c(0)).
    """
    chart: Chart
    path: tuple
    closing: Optional[Map] = None
    name: str = "loop"

    @classmethod
    def build(cls, chart: Chart, components: Sequence[str], closing: Optional[Map] = None,
              constants: Optional[dict] = None, name: str = "loop") -> "Loop":
        if len(components) != chart.dim:
            raise LoopError(f"loop '{name}': {len(components)} components for a chart of dimension {chart.dim}")
        return cls(chart, tuple(parse(c, ("s",), constants) for c in components), closing, name)

    def jet(self, s: float) -> Jet2:
        S = Jet2.variable([s])
        return stack([e.on(S) for e in self.path])

    def point(self, s: float) -> np.ndarray:
        return self.jet(s).value

    def velocity(self, s: float) -> np.ndarray:
        return self.jet(s).grad[:, 0]

    def closure_gap(self) -> float:
        start, end = self.point(0.0), self.point(1.0)
        target = self.closing(start) if self.closing is not None else start
        return max_abs(end - target)


@dataclass
class Holonomy:
    value: float
    abserr: float
    closedness: float


def closedness_residual(s: CRWeylStructure, points) -> float:
    F = s.faraday
    return max(max_abs(F.jet(p).value) for p in points)


def exactness_check(reduced: CRWeylStructure, loop: Loop) -> Holonomy:
    """Integral of gamma^ around the loop; nonzero certifies a non-exact connection."""
    if loop.chart.dim != reduced.chart.dim:
        raise LoopError(f"loop '{loop.name}' lives in a chart of dimension {loop.chart.dim}")
    checkpoints = [loop.point(s) for s in np.linspace(0.0, 1.0, LOOP_CHECKPOINTS)]
    for p in checkpoints:
        if not reduced.chart.contains(p):
            raise LoopError(f"loop '{loop.name}' leaves chart '{reduced.chart.name}' at {np.round(p, 6).tolist()}")
    gap = loop.closure_gap()
    if gap > CLOSED_TOL:
        raise LoopError(f"loop '{loop.name}' does not close (gap {gap:.3e})")
    closed = closedness_residual(reduced, checkpoints)
    if closed > CLOSED_TOL:
        raise NotClosedError(f"connection form is not closed along '{loop.name}' (|d gamma| = {closed:.3e})")

    def integrand(s):
        return float(reduced.gamma(loop.point(s), loop.velocity(s)))

    value, abserr = quad(integrand, 0.0, 1.0, **QUAD_OPTIONS)
    return Holonomy(value, abserr, closed)
