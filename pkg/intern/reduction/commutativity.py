"""
Reducing the cone against taking the cone of the reduction.

A reduced-cone vector (v, v_t) is lifted to (iota_* v, v_t) on the ambient
cone, its component along the lifted orbit directions is dropped, the
ambient J is applied and the result is pushed down again. The outcome must
match the J of the cone over the reduced structure; the metrics are compared
the same way.
"""

from dataclasses import dataclass

import numpy as np

from intern.cone import ConeSpace, metric_matrix
from intern.crweyl import CRWeylStructure
from intern.geometry import max_abs
from .action import GroupActionSpec, _levi_matrix_jet, _orthogonal_projector
from .slice import SliceChart, pushdown, reduce


@dataclass
class Commutativity:
    complex_structure: float
    metric: float


def _drop_orbit_part(a: GroupActionSpec, ambient: ConeSpace, q, V) -> np.ndarray:
    """Removes the lifted T-component (xi~ = xi - t gamma(xi) d/dt) of a cone vector."""
    if not a.generators:
        return V
    s = a.structure
    y, t = ambient.split(q)
    v_m = V[:-1]
    h = s.projector(y) @ v_m
    basis = a.orbit_matrix_jet(y)
    proj_t = _orthogonal_projector(basis, _levi_matrix_jet(s, y)).value
    tau = proj_t @ h
    return V - ambient.horizontal_lift(q, tau)


def _lift_and_reduce(a: GroupActionSpec, sl: SliceChart, ambient: ConeSpace, p_hat, V_hat):
    x_hat, t = p_hat[:-1], p_hat[-1]
    y = sl.lift(x_hat)
    q = ambient.point(y, t)
    V = np.append(sl.embedding.push(x_hat, V_hat[:-1]), V_hat[-1])
    return q, _drop_orbit_part(a, ambient, q, V)


def _push_cone_vector(a: GroupActionSpec, sl: SliceChart, ambient: ConeSpace, q, W, x_hat) -> np.ndarray:
    s = a.structure
    y, t = ambient.split(q)
    w, coeffs = pushdown(a, sl, x_hat, W[:-1])
    w_t = W[-1] + sum(c * t * s.gamma(y, xi(y)) for c, xi in zip(coeffs, a.generators))
    return np.append(w, w_t)


def cone_commutativity(a: GroupActionSpec, sl: SliceChart, samples: int = 100, seed: int = 42,
                       reduced: CRWeylStructure = None) -> Commutativity:
    reduced = reduced or reduce(a, sl)
    ambient = ConeSpace(a.structure)
    small = ConeSpace(reduced)
    worst_j = worst_g = 0.0
    for p_hat in small.chart.sample(samples, seed):
        x_hat = p_hat[:-1]
        J_small = small.J(p_hat)
        G_small = metric_matrix(small, p_hat)
        lifts = []
        for V_hat in np.eye(small.dim):
            q, V = _lift_and_reduce(a, sl, ambient, p_hat, V_hat)
            JV = ambient.J(q) @ V
            J1 = _push_cone_vector(a, sl, ambient, q, JV, x_hat)
            worst_j = max(worst_j, max_abs(J1 - J_small @ V_hat))
            lifts.append(V)
        lifts = np.stack(lifts, axis=1)
        G_big = lifts.T @ metric_matrix(ambient, q) @ lifts
        worst_g = max(worst_g, max_abs(G_big - G_small) / max(1.0, max_abs(G_small)))
    return Commutativity(worst_j, worst_g)
