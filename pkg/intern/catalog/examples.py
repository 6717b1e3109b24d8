"""
Built-in structures.

Every factory returns an ExampleBundle: the structure, and when the example
carries one, the group action, a slice chart of the quotient and the loops
used for holonomy. Expected outcomes are listed per suite; suites an example
does not list are not asserted.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from intern.crweyl import CRWeylStructure
from intern.expr import Expression, Jet2, compose, concatenate, matmul, outer
from intern.geometry import (
    Chart, EndomorphismField, KForm, Map, VectorField,
    exact_form, pullback, wedge,
)
from intern.reduction import DiscreteGenerator, GroupActionSpec, Loop, SliceChart


class CatalogError(Exception):
    pass


PASS, FAIL = "pass", "fail"

DEFAULT_N = 2
DEFAULT_WEIGHTS = (1, -1)
DEFAULT_LAMBDA = 2.0

EXAMPLE2_BOX = 1.5
EXAMPLE2_T = (0.1, 4.5)
SPHERE_HALF_WIDTH = 0.45
EXAMPLE3_R = (0.5, 2.5)
EXAMPLE3_T = (0.25, 3.0)


@dataclass
class ExampleBundle:
    name: str
    params: dict
    structure: CRWeylStructure
    action: Optional[GroupActionSpec] = None
    slice: Optional[SliceChart] = None
    loops: dict = field(default_factory=dict)
    potential: Optional[Expression] = None
    expected: dict = field(default_factory=dict)


@dataclass
class ExampleDescriptor:
    name: str
    description: str
    factory: Callable[..., ExampleBundle]
    expected: dict
    uses: tuple = ("n", "weights", "lambda")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _one_form(chart: Chart, comps: Sequence[str], constants: Optional[dict] = None, name: str = "") -> KForm:
    return KForm.from_expressions(chart, [chart.parse(c, constants) for c in comps], name=name)


def _endo(chart: Chart, rows, constants: Optional[dict] = None, name: str = "A") -> EndomorphismField:
    return EndomorphismField.from_expressions(
        chart, [[chart.parse(c, constants) for c in row] for row in rows], name=name)


def _field(chart: Chart, comps: Sequence[str], constants: Optional[dict] = None, name: str = "") -> VectorField:
    return VectorField.from_expressions(chart, [chart.parse(c, constants) for c in comps], name=name)


def _map(source: Chart, target: Chart, comps: Sequence[str], constants: Optional[dict] = None,
         name: str = "") -> Map:
    return Map.from_expressions(source, target, [source.parse(c, constants) for c in comps], name=name)


def _check_params(n: int, weights: Sequence[int], lam: float):
    if n < 2:
        raise CatalogError(f"n must be at least 2, got {n}")
    if len(weights) != n:
        raise CatalogError(f"{len(weights)} weights given for n = {n}")
    if any(float(w) != int(w) for w in weights):
        raise CatalogError(f"weights must be integers, got {list(weights)}")
    if all(w > 0 for w in weights) or all(w < 0 for w in weights) or any(w == 0 for w in weights):
        raise CatalogError(f"weights must be nonzero and not all of the same sign, got {list(weights)}")
    if not lam > 1.0:
        raise CatalogError(f"lambda must be > 1, got {lam}")


def _complex_coords(n: int) -> list:
    coords = []
    for p in range(1, n + 1):
        coords += [f"x{p}", f"y{p}"]
    return coords


# ---------------------------------------------------------------------------
# Example 2: C^n minus the origin times R>0
# ---------------------------------------------------------------------------

def example2_chart(n: int) -> Chart:
    coords = _complex_coords(n) + ["t"]
    box = [(-EXAMPLE2_BOX, EXAMPLE2_BOX)] * (2 * n) + [EXAMPLE2_T]
    radius = " + ".join(f"x{p}^2 + y{p}^2" for p in range(1, n + 1))
    return Chart.build(f"C{n}xR+", coords, box, positive=[f"{radius} - 0.01", "t"])


def example2_endo_rows(n: int, flip: Sequence[int] = (), twist: Optional[str] = None) -> list:
    """
    Rows of A: the standard complex structure on each (x_p, y_p) plane and a
    t-row that keeps A(H) inside H. `flip` negates the listed planes, `twist`
    conjugates the last plane by diag(f, 1) for the expression f.
    """
    N = 2 * n + 1
    rows = [["0"] * N for _ in range(N)]
    for p in range(1, n + 1):
        ix, iy = 2 * (p - 1), 2 * (p - 1) + 1
        sign = -1 if p in flip else 1
        if twist is not None and p == n:
            rows[ix][iy] = f"-{twist}"
            rows[iy][ix] = f"1/{twist}"
            rows[N - 1][ix] = f"x{p}/{twist}"
            rows[N - 1][iy] = f"{twist}*y{p}"
            continue
        rows[ix][iy] = "-1" if sign > 0 else "1"
        rows[iy][ix] = "1" if sign > 0 else "-1"
        rows[N - 1][ix] = f"x{p}" if sign > 0 else f"-x{p}"
        rows[N - 1][iy] = f"y{p}" if sign > 0 else f"-y{p}"
    return rows


def example2_theta(n: int) -> list:
    comps = []
    for p in range(1, n + 1):
        comps += [f"-y{p}", f"x{p}"]
    return comps + ["-1"]


def make_example2(n: int = DEFAULT_N, weights: Sequence[int] = DEFAULT_WEIGHTS, lam: float = DEFAULT_LAMBDA,
                  gamma: Optional[Sequence[str]] = None, endo_rows=None, name: str = "example2",
                  with_action: bool = True) -> ExampleBundle:
    """
    theta = sum x_p dy_p - y_p dx_p - dt with the weighted circle action and
    the dilation (z, t) -> (lam z, lam^2 t).
    """
    weights = tuple(int(w) for w in weights)
    _check_params(n, weights, lam)
    chart = example2_chart(n)
    constants = {"lambda": lam}
    N = chart.dim
    theta = _one_form(chart, example2_theta(n), name="theta")
    gamma_form = _one_form(chart, gamma, name="gamma") if gamma else KForm.zero(chart, 1)
    endo = _endo(chart, endo_rows or example2_endo_rows(n))
    structure = CRWeylStructure(chart, theta, endo, gamma_form, name)
    params = {"n": n, "weights": list(weights), "lambda": lam}
    bundle = ExampleBundle(name, params, structure)
    if not with_action:
        return bundle

    xi = ["0"] * N
    for p, a in enumerate(weights, start=1):
        ix, iy = 2 * (p - 1), 2 * (p - 1) + 1
        xi[ix] = f"{-a}*y{p}"
        xi[iy] = f"{a}*x{p}"
    generator = _field(chart, xi, name="xi")

    forward = [f"lambda*{c}" for c in _complex_coords(n)] + ["lambda^2*t"]
    backward = [f"{c}/lambda" for c in _complex_coords(n)] + ["t/lambda^2"]
    dilation = DiscreteGenerator(_map(chart, chart, forward, constants, "g"),
                                 _map(chart, chart, backward, constants, "g^-1"), "g")
    bundle.action = GroupActionSpec(structure, [generator], [dilation])

    if n == 2 and weights == (1, -1):
        bundle.slice = example2_slice(chart, lam)
        bundle.loops = example2_loops(bundle.slice, lam)
    return bundle


def example2_slice(ambient: Chart, lam: float, transverse: bool = True) -> SliceChart:
    """
    (phi, u, v) -> z1 = z2 = e^u e^(i phi/2), t = e^(v + 2u); the phase e^(i phi/2)
    is the residual rotation left after fixing the circle orbit. The
    non-transverse variant follows the orbit instead.
    """
    constants = {"lambda": lam}
    chart = Chart.build("slice", ("phi", "u", "v"),
                        [(-2.5, 2.5), (-0.5, 0.3), (-0.8, 0.8)])
    if transverse:
        comps = ["exp(u)*cos(phi/2)", "exp(u)*sin(phi/2)", "exp(u)*cos(phi/2)", "exp(u)*sin(phi/2)",
                 "exp(v + 2*u)"]
    else:
        comps = ["exp(u)*cos(phi)", "exp(u)*sin(phi)", "exp(u)*cos(phi)", "-exp(u)*sin(phi)",
                 "exp(v + 2*u)"]
    embedding = _map(chart, ambient, comps, constants, "iota")
    shift = DiscreteGenerator(_map(chart, chart, ["phi", "u + log(lambda)", "v"], constants, "g"),
                              _map(chart, chart, ["phi", "u - log(lambda)", "v"], constants, "g^-1"), "g")
    return SliceChart(chart, embedding, [shift], chart.parse("v + 2*u"),
                      "slice" if transverse else "orbit-slice")


def example2_loops(sl: SliceChart, lam: float) -> dict:
    constants = {"lambda": lam}
    g = sl.discrete[0].forward
    return {
        "generator": Loop.build(sl.chart, ["0.3", "-0.45 + s*log(lambda)", "0.1"], g, constants, "generator"),
        "homotopic": Loop.build(sl.chart, ["0.3 + 0.5*sin(pi*s)", "-0.45 + s*log(lambda)",
                                           "0.1 + 0.3*sin(2*pi*s)"], g, constants, "homotopic"),
        "contractible": Loop.build(sl.chart, ["0.3*cos(2*pi*s)", "-0.1 + 0.2*sin(2*pi*s)", "0"],
                                   None, constants, "contractible"),
    }


def non_transverse_slice(bundle: ExampleBundle) -> SliceChart:
    if bundle.slice is None:
        raise CatalogError(f"'{bundle.name}' has no slice chart")
    return example2_slice(bundle.structure.chart, bundle.params["lambda"], transverse=False)


# ---------------------------------------------------------------------------
# Example 1: gamma = kappa theta0 on a Sasaki structure
# ---------------------------------------------------------------------------

def make_example1(base: CRWeylStructure, kappa: Expression, name: str = "example1") -> CRWeylStructure:
    k = KForm.from_expressions(base.chart, kappa, name="kappa")
    return base.replace(gamma=wedge(k, base.theta0), name=name)


def _example1_bundle(kappa_src: str, name: str):
    def factory(n=DEFAULT_N, weights=DEFAULT_WEIGHTS, lam=DEFAULT_LAMBDA):
        base = make_example2(n, weights, lam, with_action=False).structure
        s = make_example1(base, base.chart.parse(kappa_src), name)
        return ExampleBundle(name, {"n": n, "kappa": kappa_src}, s)
    return factory


# ---------------------------------------------------------------------------
# The round sphere
# ---------------------------------------------------------------------------

def sphere_chart(n: int) -> Chart:
    coords = _complex_coords(n)[1:]
    half = min(SPHERE_HALF_WIDTH, 0.9 / math.sqrt(len(coords)))
    radius = " - ".join(f"{c}^2" for c in coords)
    return Chart.build(f"S{2 * n - 1}", coords, [(-half, half)] * len(coords), positive=[f"1 - {radius}"])


def make_sphere(n: int = DEFAULT_N) -> CRWeylStructure:
    """
    Graph patch x1 = sqrt(1 - |rest|^2) of the unit sphere in C^n, with
    theta = sum x_p dy_p - y_p dx_p and A = (drop x1) o J_std o d(graph).
    """
    if n < 2:
        raise CatalogError(f"sphere needs n >= 2, got {n}")
    chart = sphere_chart(n)
    ambient_coords = _complex_coords(n)
    ambient = Chart.build(f"C{n}", ambient_coords, [(-2.0, 2.0)] * (2 * n))
    radius = " - ".join(f"{c}^2" for c in chart.coords)
    graph = _map(chart, ambient, [f"sqrt(1 - {radius})"] + list(chart.coords), name="graph")
    ambient_theta = _one_form(ambient, example2_theta(n)[:-1], name="theta")
    theta = pullback(graph, ambient_theta)

    M = 2 * n
    Jstd = np.zeros((M, M))
    for p in range(n):
        Jstd[2 * p + 1, 2 * p] = 1.0
        Jstd[2 * p, 2 * p + 1] = -1.0
    drop = np.eye(M)[1:]
    L = drop @ Jstd

    def endo_jet(x):
        return matmul(L, graph.differential(x))
    endo = EndomorphismField(chart, endo_jet, name="A")
    return CRWeylStructure(chart, theta, endo, KForm.zero(chart, 1), f"sphere{2 * n - 1}")


def _sphere_bundle(n=DEFAULT_N, weights=DEFAULT_WEIGHTS, lam=DEFAULT_LAMBDA):
    return ExampleBundle("sphere", {"n": n}, make_sphere(n))


# ---------------------------------------------------------------------------
# Example 3: Kaehler cone of a Sasaki manifold as a Sasaki product
# ---------------------------------------------------------------------------

def make_example3(sasaki: CRWeylStructure, lam: float = DEFAULT_LAMBDA, name: str = "example3") -> ExampleBundle:
    """
    N x R>0(r) x R>0(t) with theta = 1/2 r^2 theta_N - dt and gamma = 0; the
    Z-action (x, r, t) -> (x, lam r, lam^2 t) scales theta by lam^2.
    """
    if not lam > 1.0:
        raise CatalogError(f"lambda must be > 1, got {lam}")
    base = sasaki.chart
    if "r" in base.coords or "t" in base.coords:
        raise CatalogError(f"chart '{base.name}' already uses r or t")
    chart = base.extend("r", EXAMPLE3_R, positive_extra=("r",)).extend("t", EXAMPLE3_T, name=f"{base.name}xR+xR+",
                                                                       positive_extra=("t",))
    constants = {"lambda": lam}
    nN, ir, it = base.dim, base.dim, base.dim + 1
    pi = Map.projection(chart, base, range(nN))

    half_r2 = KForm.from_expressions(chart, chart.parse("r^2/2"), name="r^2/2")
    t_fn = KForm.coordinate_function(chart, it)
    theta = wedge(half_r2, pullback(pi, sasaki.theta0)) - exact_form(t_fn)

    def endo_jet(p):
        Y = pi.jet(p)
        xN = Y.value
        r = Jet2.variable(p)[ir]
        dim = chart.dim
        thN = compose(sasaki.theta0.jet(xN), Y)
        TN = compose(sasaki._reeb_jet(xN), Y)
        AN = compose(sasaki.endo.jet(xN), Y)
        IN = matmul(AN, Jet2.constant(np.eye(nN), dim) - outer(TN, thN))
        zero_col = Jet2.constant(np.zeros((nN, 1)), dim)
        top = concatenate([IN, (TN / r).expand(1), zero_col], axis=1)
        r_row = concatenate([-(thN * r), Jet2.constant(np.zeros(2), dim)], axis=0)
        t_row = concatenate([Jet2.constant(np.zeros(nN), dim), (r * 0.5).expand(0),
                             Jet2.constant(np.zeros(1), dim)], axis=0)
        return concatenate([top, r_row.expand(0), t_row.expand(0)], axis=0)

    endo = EndomorphismField(chart, endo_jet, name="A")
    structure = CRWeylStructure(chart, theta, endo, KForm.zero(chart, 1), name)

    coords = list(chart.coords)
    forward = coords[:nN] + ["lambda*r", "lambda^2*t"]
    backward = coords[:nN] + ["r/lambda", "t/lambda^2"]
    dilation = DiscreteGenerator(_map(chart, chart, forward, constants, "g"),
                                 _map(chart, chart, backward, constants, "g^-1"), "g")
    action = GroupActionSpec(structure, [], [dilation])
    sl = SliceChart(chart, Map.identity(chart), [dilation], chart.parse("log(t)"), "identity")

    centre = [f"{0.5 * (lo + hi):.6g}" for lo, hi in base.box]
    loops = {
        "generator": Loop.build(chart, centre + ["0.6*lambda^s", "0.5*lambda^(2*s)"],
                                dilation.forward, constants, "generator"),
        "homotopic": Loop.build(chart, [f"{centre[0]} + 0.1*sin(pi*s)"] + centre[1:]
                                + ["0.6*lambda^s", "0.5*lambda^(2*s) + 0.2*sin(pi*s)"],
                                dilation.forward, constants, "homotopic"),
        "contractible": Loop.build(chart, centre + ["1 + 0.3*cos(2*pi*s)", "1 + 0.3*sin(2*pi*s)"],
                                   None, constants, "contractible"),
    }
    return ExampleBundle(name, {"lambda": lam, "base": sasaki.name}, structure, action, sl, loops)


def _example3_bundle(n=DEFAULT_N, weights=DEFAULT_WEIGHTS, lam=DEFAULT_LAMBDA):
    return make_example3(make_sphere(n), lam)


# ---------------------------------------------------------------------------
# Negative controls
# ---------------------------------------------------------------------------

def _variant(name: str, gamma: Optional[list] = None, flip=(), twist: Optional[str] = None):
    def factory(n=DEFAULT_N, weights=DEFAULT_WEIGHTS, lam=DEFAULT_LAMBDA):
        g = None
        if gamma is not None:
            g = ["0"] * (2 * n + 1)
            for idx, src in gamma:
                g[idx] = src
        rows = example2_endo_rows(n, flip=flip, twist=twist)
        return make_example2(n, weights, lam, gamma=g, endo_rows=rows, name=name, with_action=False)
    return factory


ALL_SUITES = ("calculus", "cr-axioms", "sasaki-weyl", "cone", "integrability", "lck",
              "reduction", "exactness", "commutativity")


def _all_pass(*suites) -> dict:
    return {s: PASS for s in suites}


CATALOG = {
    "example2": ExampleDescriptor(
        "example2", "C^n\\0 x R>0 with the weighted circle action and the dilation (Sasaki, closed, non-exact quotient)",
        make_example2, _all_pass(*ALL_SUITES)),
    "example1": ExampleDescriptor(
        "example1", "Example 2 structure with gamma = theta0 (kappa = 1): non-closed Sasaki-Weyl, globally conformal Kaehler cone",
        _example1_bundle("1", "example1"), _all_pass(*ALL_SUITES[:6]), ("n",)),
    "example1-kappa": ExampleDescriptor(
        "example1-kappa", "Example 2 structure with gamma = x1 theta0: Sasaki-Weyl but not l.c.K.",
        _example1_bundle("x1", "example1-kappa"),
        {**_all_pass("calculus", "cr-axioms", "sasaki-weyl", "cone"), "integrability": FAIL, "lck": FAIL}, ("n",)),
    "sphere": ExampleDescriptor(
        "sphere", "graph patch of the round sphere S^(2n-1)",
        _sphere_bundle, _all_pass(*ALL_SUITES[:6]), ("n",)),
    "example3": ExampleDescriptor(
        "example3", "Kaehler cone of the round sphere patch times R>0 with the Z-dilation",
        _example3_bundle, _all_pass(*ALL_SUITES), ("n", "lambda")),
    "example2-broken": ExampleDescriptor(
        "example2-broken", "gamma = x1 dx1: closed but not Sasaki-Weyl",
        _variant("example2-broken", gamma=[(0, "x1")]),
        {**_all_pass("calculus", "cr-axioms", "cone"),
         "sasaki-weyl": FAIL, "integrability": FAIL, "lck": FAIL}),
    "example2-faraday": ExampleDescriptor(
        "example2-faraday", "gamma = x1 dy2: Faraday form with an I-anti-invariant part",
        _variant("example2-faraday", gamma=[(3, "x1")]),
        {**_all_pass("calculus", "cr-axioms", "cone"),
         "sasaki-weyl": FAIL, "integrability": FAIL, "lck": FAIL}),
    "example2-flipped": ExampleDescriptor(
        "example2-flipped", "A negated on the last complex line: Levi form indefinite",
        _variant("example2-flipped", flip=(2,)),
        {**_all_pass("calculus", "sasaki-weyl", "integrability", "lck"), "cr-axioms": FAIL, "cone": FAIL}),
    "example2-twisted": ExampleDescriptor(
        "example2-twisted", "A conjugated by exp(x1) on the last complex line: CR structure not integrable",
        _variant("example2-twisted", twist="exp(x1)"),
        {**_all_pass("calculus", "sasaki-weyl", "cone", "lck"), "cr-axioms": FAIL, "integrability": FAIL}),
}


def example_names() -> list:
    return list(CATALOG)


def build_example(name: str, n: int = DEFAULT_N, weights: Sequence[int] = DEFAULT_WEIGHTS,
                  lam: float = DEFAULT_LAMBDA) -> ExampleBundle:
    descriptor = CATALOG.get(name)
    if descriptor is None:
        raise CatalogError(f"unknown example '{name}' (known: {', '.join(CATALOG)})")
    bundle = descriptor.factory(n=n, weights=weights, lam=lam)
    bundle.expected = dict(descriptor.expected)
    return bundle
