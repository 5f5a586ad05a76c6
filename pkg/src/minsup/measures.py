"""Measure registry: maps measure names to the scoring engines."""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import InputError
from .games import CoefficientSpec, WealthSpec, score_all_game, shapley_like
from .model import Fact, PartitionedDatabase
from .queries import Query, RegularPathQuery
from .weights import WeightFunction, score_all as _wsms_score_all, wsms_direct

MEASURES = (
    "ms",
    "s",
    "sharp",
    "wsms-custom",
    "drastic-shapley",
    "drastic-banzhaf",
    "sa-shapley",
    "p-shapley",
    "mc-shapley",
    "r-shapley",
)

_WEIGHT_KIND = {"ms": "invw", "s": "s", "sharp": "sharp", "wsms-custom": "custom"}

WSMS_MEASURES = tuple(_WEIGHT_KIND)

_GAME_KIND = {
    "drastic-shapley": ("drastic", "shapley"),
    "drastic-banzhaf": ("drastic", "banzhaf"),
    "sa-shapley": ("sa", "shapley"),
    "p-shapley": ("p", "shapley"),
    "mc-shapley": ("mc", "shapley"),
    "r-shapley": ("r", "shapley"),
}


def weight_function_for(measure: str, weight_table=None) -> WeightFunction:
    kind = _WEIGHT_KIND[measure]
    if kind == "custom":
        if not weight_table:
            raise InputError("the wsms-custom measure needs a weight table")
        return WeightFunction("custom", weight_table)
    return WeightFunction(kind)


def _acyclic_graph(db: PartitionedDatabase) -> bool:
    from . import rpq

    _, cycle = rpq.check_dag(db.all_facts)
    return cycle is None


def score_all_measure(
    measure: str,
    q: Query,
    db: PartitionedDatabase,
    weight_table=None,
    jobs: int = 1,
) -> dict[Fact, Fraction]:
    """Score every endogenous fact. Support-weighted measures ride the
    dynamic program on acyclic graph databases and fall back to direct
    support enumeration elsewhere; game measures run the subset sum."""
    if measure in _WEIGHT_KIND:
        w = weight_function_for(measure, weight_table)
        if isinstance(q, RegularPathQuery) and _acyclic_graph(db):
            from . import rpq

            return {f: rpq.wsms_rpq(q, db, f, w) for f in db.endogenous_sorted()}
        return _wsms_score_all(q, db, w)
    if measure in _GAME_KIND:
        wealth_kind, coeff_kind = _GAME_KIND[measure]
        spec = WealthSpec(wealth_kind, db, query=q)
        return score_all_game(spec, CoefficientSpec(coeff_kind), jobs=jobs)
    raise InputError(f"unknown measure {measure!r}; choose one of: {', '.join(MEASURES)}")


def score_for_fact(
    measure: str,
    q: Query,
    db: PartitionedDatabase,
    fact: Fact,
    weight_table=None,
) -> Fraction:
    if measure in _WEIGHT_KIND:
        w = weight_function_for(measure, weight_table)
        if isinstance(q, RegularPathQuery) and _acyclic_graph(db):
            from . import rpq

            return rpq.wsms_rpq(q, db, fact, w)
        return wsms_direct(q, db, fact, w)
    if measure in _GAME_KIND:
        wealth_kind, coeff_kind = _GAME_KIND[measure]
        spec = WealthSpec(wealth_kind, db, query=q)
        return shapley_like(spec, CoefficientSpec(coeff_kind), fact)
    raise InputError(f"unknown measure {measure!r}; choose one of: {', '.join(MEASURES)}")


def score_fn(measure: str, weight_table=None):
    """Single-fact scoring callable, the shape the axiom checks consume."""
    if measure not in MEASURES:
        raise InputError(f"unknown measure {measure!r}; choose one of: {', '.join(MEASURES)}")

    def fn(q, db, fact):
        return score_for_fact(measure, q, db, fact, weight_table)

    return fn


def decimal_string(value: Fraction, digits: int = 12) -> str:
    """Advisory decimal rendering; scores stay exact everywhere else."""
    with localcontext() as ctx:
        ctx.prec = digits
        approx = Decimal(value.numerator) / Decimal(value.denominator)
    return str(approx)
