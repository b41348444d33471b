"""Certified subexponential growth bounds for automaton groups.

Searches for strongly contracting, essentially geodesic generating sets
of the group generated by an invertible Mealy machine, under optimized
generator weights, and turns a successful search into a certified bound
exp(c * l**alpha) on the growth function.
"""

from mealybound.machine import (
    MachineError,
    MealyMachine,
    apply,
    apply_word,
    dual,
    level_power,
    symmetrize,
    validate,
    wreath,
    wreath_mul,
)
from mealybound.words import AuxiliaryGroup, Calculus, CalculusError, Caps, verify_factors
from mealybound.formats import (
    builtin,
    builtin_aux,
    builtin_blocks,
    builtin_names,
    builtin_text,
    discover_blocks,
    export_dot,
    format_automaton,
    parse_automaton,
)
from mealybound.search import (
    EggSearch,
    RunResult,
    SearchCaps,
    alpha_from,
    eta_of,
    normalize_weights,
    search_egg,
)
from mealybound.optimize import MinimaxProblem, OptOptions, OptResult, optimize
from mealybound.strategies import Session, SessionError, StrategyRun, run_opt, run_ovi
from mealybound.superpoly import superpoly_report
from mealybound.growth import growth

__version__ = "0.1.0"

__all__ = [
    "AuxiliaryGroup",
    "Calculus",
    "CalculusError",
    "Caps",
    "EggSearch",
    "MachineError",
    "MealyMachine",
    "MinimaxProblem",
    "OptOptions",
    "OptResult",
    "RunResult",
    "SearchCaps",
    "Session",
    "SessionError",
    "StrategyRun",
    "alpha_from",
    "apply",
    "apply_word",
    "builtin",
    "builtin_aux",
    "builtin_blocks",
    "builtin_names",
    "builtin_text",
    "discover_blocks",
    "dual",
    "eta_of",
    "export_dot",
    "format_automaton",
    "growth",
    "level_power",
    "normalize_weights",
    "optimize",
    "parse_automaton",
    "run_opt",
    "run_ovi",
    "search_egg",
    "superpoly_report",
    "symmetrize",
    "validate",
    "verify_factors",
    "wreath",
    "wreath_mul",
    "__version__",
]
