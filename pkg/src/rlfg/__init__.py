"""Resource-based grammaticality checking: f-terms and their simplification,
annotated grammars, and a classical LFG solver for comparison."""

from .fterm import (
    Atom, Declarations, Embed, FTerm, FTermSyntaxError, Limp, Meta, Multiset,
    Opt, PathEq, UndeclaredIdentifier, canonicalize, parse_fterm,
    serialize_fterm,
)
from .reduction import (
    ReductionResult, SearchConfig, UndecidedError, Verdict, is_grammatical,
    reduce_search, trace_witness,
)
from .classical import (
    FStructure, dnf, parse_fdescription, solve, solve_conjunct, solve_relaxed,
    verify_constraints,
)
from .grammar import (
    CStructure, Grammar, GrammarError, UnknownWord, instantiate_lfg,
    instantiate_rlfg, load_grammar, parse_sentence,
)

__all__ = [
    "Atom", "Declarations", "Embed", "FTerm", "FTermSyntaxError", "Limp", "Meta",
    "Multiset", "Opt", "PathEq", "UndeclaredIdentifier", "canonicalize",
    "parse_fterm", "serialize_fterm",
    "ReductionResult", "SearchConfig", "UndecidedError", "Verdict",
    "is_grammatical", "reduce_search", "trace_witness",
    "FStructure", "dnf", "parse_fdescription", "solve", "solve_conjunct",
    "solve_relaxed", "verify_constraints",
    "CStructure", "Grammar", "GrammarError", "UnknownWord", "instantiate_lfg",
    "instantiate_rlfg", "load_grammar", "parse_sentence",
]

__version__ = "0.1.0"
