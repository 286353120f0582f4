"""Partial rough algebraic systems and step checking for equational reasoning."""

from ._undefined import UNDEFINED, is_undefined
from .partial import (
    CheckReport, FiniteStructure, Formula, Operation, check_axiom_set, check_formula,
    load_structure, read_structure, write_structure,
)
from .rough import (
    DefectClass, RoughSpace, Trajectory, apply_operator, build_space, induced_structure,
    iterate_operator, load_corpus, sample_corpus,
)
from .suites import (
    SUITES, EnumerationTask, SuiteReport, Verdict, chain_structure, classify_structure,
    enumerate_models, get_suite, pawlak_structure, run_suite,
)
from .terms import (
    Equation, SolutionSet, normalize_linear, parse_equation, parse_term, print_term,
    solution_set,
)
from .verifier import (
    DefectLedger, RuleApplication, SolutionScript, StepVerdict, apply_rule, check_step,
    parse_solution, verify_solution,
)

__version__ = "0.1.0"
