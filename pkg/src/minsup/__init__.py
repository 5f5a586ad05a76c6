"""Responsibility scores for facts of a partitioned relational database
under Boolean monotone queries."""

from .errors import GuardExceeded, InputError
from .model import (
    Fact,
    PartitionedDatabase,
    database_size,
    parse_database,
    parse_fact,
    serialize_database,
)
from .queries import (
    Atom,
    ConjunctiveQuery,
    ExplicitMonotoneQuery,
    RegularPathQuery,
    UnionQuery,
    Variable,
    count_homomorphisms,
    enumerate_homomorphisms,
    evaluate,
    parse_query,
)
from .supports import (
    count_fms,
    count_ms,
    enumerate_minimal_supports,
    fms_vector,
    is_relevant,
)
from .weights import WeightFunction, decode_reversible, wsms_direct, wsms_via_countfms
from .games import CoefficientSpec, WealthSpec, score_all_game, shapley_like
from .measures import MEASURES, score_all_measure, score_for_fact

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "CoefficientSpec",
    "ConjunctiveQuery",
    "ExplicitMonotoneQuery",
    "Fact",
    "GuardExceeded",
    "InputError",
    "MEASURES",
    "PartitionedDatabase",
    "RegularPathQuery",
    "UnionQuery",
    "Variable",
    "WealthSpec",
    "WeightFunction",
    "count_fms",
    "count_homomorphisms",
    "count_ms",
    "database_size",
    "decode_reversible",
    "enumerate_homomorphisms",
    "enumerate_minimal_supports",
    "evaluate",
    "fms_vector",
    "is_relevant",
    "parse_database",
    "parse_fact",
    "parse_query",
    "score_all_game",
    "score_all_measure",
    "score_for_fact",
    "serialize_database",
    "shapley_like",
    "wsms_direct",
    "wsms_via_countfms",
    "__version__",
]
