"""incmeter: inconsistency degrees of propositional knowledge bases.

Six measures (contension, forgetting, hitting set, max-, sum-, and
hit-distance) computed through interchangeable pipelines: SAT encodings
driven by binary or linear search, a MaxSAT formulation for contension,
emitted answer-set programs for an external ASP solver, naive baselines,
and brute-force definitional oracles that everything is validated against.
"""

from .kb import (
    And,
    Atom,
    AtomOccurrence,
    Bottom,
    Formula,
    Iff,
    Implies,
    KnowledgeBase,
    KbSyntaxError,
    Not,
    Or,
    Site,
    Top,
    format_formula,
    load_kb,
    parse_formula,
    parse_kb,
)
from .oracles import (
    CapExceededError,
    MeasureUndefinedError,
    naive_measure,
    oracle_value,
)
from .search import RunConfig, SearchOutcome, binary_search, compute, linear_search
from .solver import BackendConfig
from .values import INF, MEASURES, format_value

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "AtomOccurrence",
    "BackendConfig",
    "Bottom",
    "CapExceededError",
    "Formula",
    "INF",
    "Iff",
    "Implies",
    "KbSyntaxError",
    "KnowledgeBase",
    "MEASURES",
    "MeasureUndefinedError",
    "Not",
    "Or",
    "RunConfig",
    "SearchOutcome",
    "Site",
    "Top",
    "binary_search",
    "compute",
    "format_formula",
    "format_value",
    "linear_search",
    "load_kb",
    "naive_measure",
    "oracle_value",
    "parse_formula",
    "parse_kb",
]
