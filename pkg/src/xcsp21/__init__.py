"""Reader, writer, validator and reference semantics for XCSP 2.1 instances."""

from .diagnostics import Diagnostic
from .document import Notation, convert, load, load_file, load_instance, write_instance
from .errors import LoadError, XCSPError
from .model import Instance, InstanceType, model_equal
from .semantics import check_constraint, check_solution, cost_constraint, eval_qcsp, solve_bruteforce
from .validate import ValidationReport, validate_competition, validate_structure

__all__ = [
    "Diagnostic", "Instance", "InstanceType", "LoadError", "Notation", "ValidationReport", "XCSPError",
    "check_constraint", "check_solution", "convert", "cost_constraint", "eval_qcsp", "load", "load_file",
    "load_instance", "model_equal", "solve_bruteforce", "validate_competition", "validate_structure",
    "write_instance",
]
__version__ = "0.1.0"
