from .report import SuiteReport, REPORT_SCHEMA, dump_reports, worst_residual
from .runner import (
    RunOptions, Suite, guarded,
    CalculusSuite, CRAxiomsSuite, SasakiWeylSuite, ConeSuite, IntegrabilitySuite, LckSuite,
    ReductionSuite, ExactnessSuite, CommutativitySuite,
)

SUITE_REGISTRY = {
    "calculus":      CalculusSuite,
    "cr-axioms":     CRAxiomsSuite,
    "sasaki-weyl":   SasakiWeylSuite,
    "cone":          ConeSuite,
    "integrability": IntegrabilitySuite,
    "lck":           LckSuite,
    "reduction":     ReductionSuite,
    "exactness":     ExactnessSuite,
    "commutativity": CommutativitySuite,
}


def run_suites(bundle, names, options: RunOptions, logger) -> list:
    """Runs the named suites in registry order; names must be registered."""
    return [SUITE_REGISTRY[n](bundle, options, logger).execute() for n in SUITE_REGISTRY if n in names]
