import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional


@dataclass
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_residual) and self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": self.max_residual if math.isfinite(self.max_residual) else None,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class ValidationReport:
    subject: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        return result


def measure(name: str, tolerance: float, fn: Callable, points: Iterable) -> CheckResult:
    """
    Max of fn(p) over the points. A failure to evaluate is recorded as an
    infinite residual carrying the error message.
    """
    worst = 0.0
    for p in points:
        try:
            r = float(fn(p))
        except Exception as e:
            return CheckResult(name, math.inf, tolerance, f"{type(e).__name__}: {e}")
        if math.isnan(r):
            return CheckResult(name, math.inf, tolerance, "residual is NaN")
        worst = max(worst, r)
    return CheckResult(name, worst, tolerance)


def measure_min(name: str, floor: float, fn: Callable, points: Iterable) -> CheckResult:
    """Lower-bound check: residual is how far min fn(p) falls below the floor (0 when it holds)."""
    lowest: Optional[float] = None
    for p in points:
        try:
            v = float(fn(p))
        except Exception as e:
            return CheckResult(name, math.inf, 0.0, f"{type(e).__name__}: {e}")
        if not math.isfinite(v):
            return CheckResult(name, math.inf, 0.0, f"non-finite value {v}")
        lowest = v if lowest is None else min(lowest, v)
    if lowest is None:
        return CheckResult(name, 0.0, 0.0)
    return CheckResult(name, max(0.0, floor - lowest), 0.0, f"min {lowest:.3e}")
