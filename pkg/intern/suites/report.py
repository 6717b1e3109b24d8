import json
import math
from dataclasses import dataclass, field
from typing import Optional

from intern.checks import CheckResult


@dataclass
class SuiteReport:
    suite: str
    example: str
    params: dict
    seed: int
    samples: int
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    skipped: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.skipped is not None or all(c.passed for c in self.checks)

    @property
    def outcome(self) -> str:
        if self.skipped is not None:
            return "skip"
        return "pass" if self.passed else "fail"

    def failing(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "example": self.example,
            "params": self.params,
            "seed": self.seed,
            "samples": self.samples,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }
        if self.skipped is not None:
            out["skipped"] = self.skipped
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def dump_reports(reports: list, timing: bool = True) -> str:
    return json.dumps([r.to_dict(timing) for r in reports], indent=2, sort_keys=False, allow_nan=False)


def worst_residual(report: SuiteReport) -> float:
    finite = [c.max_residual for c in report.checks if math.isfinite(c.max_residual)]
    if len(finite) != len(report.checks):
        return math.inf
    return max(finite, default=0.0)


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SuiteReport",
    "type": "object",
    "required": ["suite", "example", "params", "seed", "samples", "checks", "pass"],
    "properties": {
        "suite": {"type": "string"},
        "example": {"type": "string"},
        "params": {"type": "object"},
        "seed": {"type": "integer"},
        "samples": {"type": "integer"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "max_residual", "tolerance", "pass"],
                "properties": {
                    "name": {"type": "string"},
                    "max_residual": {"type": ["number", "null"]},
                    "tolerance": {"type": "number"},
                    "pass": {"type": "boolean"},
                },
            },
        },
        "pass": {"type": "boolean"},
        "skipped": {"type": "string"},
        "seconds": {"type": "number"},
    },
}
