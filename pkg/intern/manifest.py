"""
Declarative example files.

A config is a JSON object with `"header": "CRWeyl"`; every mathematical
entry is an expression string, every number may be a simpleeval expression
over `pi`, `e` and the earlier `params`.
"""

import keyword, math, re
from pathlib import Path
from typing import Any, Optional

from simpleeval import simple_eval, InvalidExpression

from intern.catalog import ExampleBundle
from intern.crweyl import CRWeylStructure, validate
from intern.expr import ExpressionError, parse
from intern.geometry import Chart, EndomorphismField, GeometryError, KForm, Map, VectorField
from intern.reduction import DiscreteGenerator, GroupActionSpec, Loop, SliceChart
from intern.utils import CONFIG_HEADER, ConfigError, Logger, parse_config_json

VALIDATION_SAMPLES = 20
VALIDATION_SEED = 42
OUTCOMES = ("pass", "fail")


def _python_syntax(text: str, names: dict) -> tuple:
    """`^` as a power, and parameters that are Python keywords (`lambda`) renamed."""
    text = text.replace("^", "**")
    safe = {}
    for name, value in names.items():
        if keyword.iskeyword(name):
            text = re.sub(rf"\b{name}\b", f"{name}_", text)
            name = f"{name}_"
        safe[name] = value
    return text, safe


class _Reader:
    """Walks one config file, attaching `file: key.path` to every error."""

    def __init__(self, path: Path, config: dict):
        self.path = path
        self.config = config
        self.constants: dict = {}

    def fail(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, f"{self.path.name}: {key}")

    def get(self, data: dict, key: str, where: str, kind=None, required: bool = True) -> Any:
        if key not in data:
            if required:
                raise self.fail(where, f"missing '{key}'")
            return None
        value = data[key]
        if kind is not None and not isinstance(value, kind):
            names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            raise self.fail(f"{where}.{key}", f"expected {names}, got {type(value).__name__}")
        return value

    def number(self, value, where: str) -> float:
        if isinstance(value, bool):
            raise self.fail(where, "expected a number")
        if isinstance(value, (int, float)):
            return float(value)
        if not isinstance(value, str):
            raise self.fail(where, f"expected a number or numeric expression, got {type(value).__name__}")
        try:
            text, names = _python_syntax(value, {"pi": math.pi, "e": math.e, **self.constants})
            out = simple_eval(text, names=names)
        except (InvalidExpression, SyntaxError, TypeError, ZeroDivisionError, OverflowError) as e:
            raise self.fail(where, f"cannot evaluate '{value}': {e}") from e
        if not isinstance(out, (int, float)) or not math.isfinite(out):
            raise self.fail(where, f"'{value}' is not a finite number")
        return float(out)

    def expression(self, coords, source, where: str):
        if not isinstance(source, (str, int, float)) or isinstance(source, bool):
            raise self.fail(where, "expected an expression string")
        try:
            return parse(str(source), coords, self.constants)
        except ExpressionError as e:
            raise self.fail(where, str(e)) from e

    def expressions(self, coords, sources, where: str, length: Optional[int] = None) -> list:
        if not isinstance(sources, list):
            raise self.fail(where, "expected a list of expressions")
        if length is not None and len(sources) != length:
            raise self.fail(where, f"expected {length} entries, got {len(sources)}")
        return [self.expression(coords, s, f"{where}[{i}]") for i, s in enumerate(sources)]

    # -- sections -------------------------------------------------------------

    def param(self, value, where: str):
        # JSON numbers keep their type so reports echo params as written
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return value
        return self.number(value, where)

    def params(self) -> dict:
        raw = self.get(self.config, "params", "params", dict, required=False) or {}
        out = {}
        for key, value in raw.items():
            if not key.isidentifier():
                raise self.fail(f"params.{key}", "parameter names must be identifiers")
            if isinstance(value, list):
                out[key] = [self.param(v, f"params.{key}[{i}]") for i, v in enumerate(value)]
                continue
            out[key] = self.param(value, f"params.{key}")
            self.constants[key] = float(out[key])
        return out

    def chart(self, data: dict, where: str, name: str) -> Chart:
        coords = self.get(data, "coords", where, list)
        if not coords or not all(isinstance(c, str) and c.isidentifier() for c in coords):
            raise self.fail(f"{where}.coords", "coordinates must be a non-empty list of identifiers")
        if len(set(coords)) != len(coords):
            raise self.fail(f"{where}.coords", "duplicate coordinate names")
        box = self.get(data, "box", where, dict)
        intervals = []
        for c in coords:
            if c not in box:
                raise self.fail(f"{where}.box", f"no interval for coordinate '{c}'")
            lo_hi = box[c]
            if not isinstance(lo_hi, list) or len(lo_hi) != 2:
                raise self.fail(f"{where}.box.{c}", "expected [lo, hi]")
            lo, hi = (self.number(v, f"{where}.box.{c}") for v in lo_hi)
            if not lo < hi:
                raise self.fail(f"{where}.box.{c}", f"empty interval [{lo}, {hi}]")
            intervals.append((lo, hi))
        extra = set(box) - set(coords)
        if extra:
            raise self.fail(f"{where}.box", f"interval for undeclared coordinate(s) {sorted(extra)}")
        positive = self.get(data, "positive", where, list, required=False) or []
        exprs = tuple(self.expression(tuple(coords), src, f"{where}.positive[{i}]") for i, src in enumerate(positive))
        try:
            return Chart(name, tuple(coords), tuple(intervals), exprs)
        except GeometryError as e:
            raise self.fail(where, str(e)) from e

    def endo(self, chart: Chart, rows, where: str) -> EndomorphismField:
        if not isinstance(rows, list) or len(rows) != chart.dim:
            raise self.fail(where, f"expected a {chart.dim}x{chart.dim} matrix")
        matrix = [self.expressions(chart.coords, row, f"{where}[{i}]", chart.dim) for i, row in enumerate(rows)]
        return EndomorphismField.from_expressions(chart, matrix, name="A")

    def map(self, source: Chart, target: Chart, comps, where: str, name: str) -> Map:
        return Map.from_expressions(source, target, self.expressions(source.coords, comps, where, target.dim), name=name)

    def discrete(self, chart: Chart, entries, where: str) -> list:
        if not isinstance(entries, list):
            raise self.fail(where, "expected a list of {map, inverse}")
        out = []
        for i, entry in enumerate(entries):
            w = f"{where}[{i}]"
            if not isinstance(entry, dict):
                raise self.fail(w, "expected an object with 'map' and 'inverse'")
            name = str(entry.get("name", "g" if i == 0 else f"g{i}"))
            forward = self.map(chart, chart, self.get(entry, "map", w, list), f"{w}.map", name)
            inverse = self.map(chart, chart, self.get(entry, "inverse", w, list), f"{w}.inverse", f"{name}^-1")
            out.append(DiscreteGenerator(forward, inverse, name))
        return out


def _structure(r: _Reader, name: str) -> CRWeylStructure:
    chart = r.chart(r.get(r.config, "chart", "chart", dict), "chart", name)
    data = r.get(r.config, "structure", "structure", dict)
    theta = KForm.from_expressions(chart, r.expressions(chart.coords, r.get(data, "theta0", "structure"),
                                                        "structure.theta0", chart.dim), name="theta0")
    gamma_src = r.get(data, "gamma", "structure", list, required=False)
    gamma = (KForm.from_expressions(chart, r.expressions(chart.coords, gamma_src, "structure.gamma", chart.dim),
                                    name="gamma")
             if gamma_src else KForm.zero(chart, 1))
    endo = r.endo(chart, r.get(data, "endo", "structure"), "structure.endo")
    try:
        return CRWeylStructure(chart, theta, endo, gamma, name)
    except Exception as e:
        raise r.fail("structure", str(e)) from e


def _slice(r: _Reader, data: dict, action: GroupActionSpec) -> tuple:
    chart = r.chart(data, "slice", "slice")
    embedding = r.map(chart, action.chart, r.get(data, "embedding", "slice", list), "slice.embedding", "iota")
    discrete = r.discrete(chart, data.get("discrete", []), "slice.discrete")
    gauge_src = r.get(data, "gauge", "slice", required=False)
    gauge = r.expression(chart.coords, gauge_src, "slice.gauge") if gauge_src is not None else None
    sl = SliceChart(chart, embedding, discrete, gauge, "slice")

    loops = {}
    closing_by_name = {g.name: g.forward for g in discrete}
    for key, entry in (r.get(data, "loops", "slice", dict, required=False) or {}).items():
        w = f"slice.loops.{key}"
        if not isinstance(entry, dict):
            raise r.fail(w, "expected an object with 'path'")
        path = r.get(entry, "path", w, list)
        closing = entry.get("closing")
        if closing is not None and closing not in closing_by_name:
            raise r.fail(f"{w}.closing", f"unknown slice generator '{closing}'")
        if len(path) != chart.dim:
            raise r.fail(f"{w}.path", f"expected {chart.dim} entries, got {len(path)}")
        try:
            loops[key] = Loop.build(chart, [str(c) for c in path],
                                    closing_by_name.get(closing), r.constants, key)
        except ExpressionError as e:
            raise r.fail(f"{w}.path", str(e)) from e
    return sl, loops


def load_config(path, logger: Optional[Logger] = None, validate_structure: bool = True) -> ExampleBundle:
    """
    Builds an example bundle from a config file. Raises ConfigError with the
    failing location, or with the failing invariant names when the structure
    does not validate.
    """
    path = Path(path)
    log = logger.with_context("CFG") if logger else None
    config = parse_config_json(str(path))
    if config.get("header") != CONFIG_HEADER:
        raise ConfigError(f"header must be '{CONFIG_HEADER}', got {config.get('header')!r}", f"{path.name}: header")

    r = _Reader(path, config)
    name = str(config.get("name", path.stem))
    params = r.params()
    structure = _structure(r, name)
    bundle = ExampleBundle(name, params, structure)

    action_data = r.get(config, "action", "action", dict, required=False)
    if action_data is not None:
        chart = structure.chart
        gens = [VectorField.from_expressions(chart, r.expressions(chart.coords, comps, f"action.generators[{i}]",
                                                                  chart.dim), name=f"xi{i}")
                for i, comps in enumerate(action_data.get("generators", []))]
        discrete = r.discrete(chart, action_data.get("discrete", []), "action.discrete")
        bundle.action = GroupActionSpec(structure, gens, discrete)

    slice_data = r.get(config, "slice", "slice", dict, required=False)
    if slice_data is not None:
        if bundle.action is None:
            raise r.fail("slice", "a slice needs an 'action' section")
        bundle.slice, bundle.loops = _slice(r, slice_data, bundle.action)

    potential = r.get(config, "potential", "potential", required=False)
    if potential is not None:
        bundle.potential = r.expression(structure.chart.coords, potential, "potential")

    # null clears an expectation inherited through `include`
    expect = r.get(config, "expect", "expect", dict, required=False) or {}
    for suite, outcome in expect.items():
        if outcome is not None and outcome not in OUTCOMES:
            raise r.fail(f"expect.{suite}", f"expected one of {OUTCOMES} or null, got {outcome!r}")
    bundle.expected = {k: v for k, v in expect.items() if v is not None}

    if validate_structure:
        report = validate(structure, VALIDATION_SAMPLES, VALIDATION_SEED)
        if not report.passed:
            raise ConfigError(f"structure does not validate: {', '.join(report.failing())}",
                              f"{path.name}: structure")
    if log:
        log.info(f"Loaded '{name}' from {path.name} (dim {structure.chart.dim}"
                 f"{', action' if bundle.action else ''}{', slice' if bundle.slice else ''})")
    return bundle
