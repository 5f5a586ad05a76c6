"""HTTP facade over the scoring engines.

Every response carries `"schema": 1`. Input problems map to 400 and
guard refusals to 413, mirroring the CLI exit codes 2 and 3.
"""

from __future__ import annotations

import random
from fractions import Fraction

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .errors import GuardExceeded, InputError
from .games import CoefficientSpec, WealthSpec, score_all_game
from .measures import MEASURES, WSMS_MEASURES, decimal_string, score_all_measure
from .model import Fact, PartitionedDatabase, parse_database, parse_fact
from .queries import (
    ConjunctiveQuery,
    ExplicitMonotoneQuery,
    RegularPathQuery,
    UnionQuery,
    core,
    hom_equals_minsup,
    is_acyclic,
    is_self_join_free,
    parse_query,
    self_join_width,
    unifiable,
)
from .sqlgen import build_rewriting, emit_sql
from .supports import count_fms, enumerate_minimal_supports, fms_vector
from .weights import parse_weight_table
from . import axioms as ax
from . import rpq as rpq_mod

app = FastAPI(title="minsup", version=__version__)


@app.exception_handler(InputError)
async def _on_input_error(_request, exc: InputError):
    return JSONResponse(status_code=400, content={"schema": 1, "error": str(exc)})


@app.exception_handler(GuardExceeded)
async def _on_guard(_request, exc: GuardExceeded):
    return JSONResponse(status_code=413, content={"schema": 1, "error": str(exc)})


def _rational(value) -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational value {value!r}: {exc}") from exc


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _score_rows(scores: dict[Fact, Fraction], wanted: list[str] | None) -> list[dict]:
    if wanted is not None:
        keep = []
        for text in wanted:
            fact = parse_fact(text)
            if fact not in scores:
                raise InputError(f"fact {fact} is not endogenous in the database")
            keep.append(fact)
        scores = {f: scores[f] for f in keep}
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [
        {
            "fact": str(fact),
            "score": _fraction_str(value),
            "floor": value.numerator // value.denominator,
            "decimal": decimal_string(value),
        }
        for fact, value in ordered
    ]


# ---------------------------------------------------------------------------
# request models

class ScoreRequest(BaseModel):
    database: str
    query: str
    measure: str = "ms"
    weight_table: dict[str, str | int | float] | None = None
    facts: list[str] | None = None
    jobs: int = 1


class CountMsRequest(BaseModel):
    database: str
    query: str
    include_supports: bool = False


class CountFmsRequest(BaseModel):
    database: str
    query: str
    k: int


class RewriteSqlRequest(BaseModel):
    query: str
    k: int
    relation_schema: dict[str, int] | None = None


class RpqRequest(BaseModel):
    query: str
    database: str | None = None
    measure: str = "ms"
    weight_table: dict[str, str | int | float] | None = None
    facts: list[str] | None = None


class AnalyzeRequest(BaseModel):
    query: str


class AxiomsRequest(BaseModel):
    seed: int = 0
    count: int = 10
    measures: list[str] | None = None


class BruteRequest(BaseModel):
    database: str
    wealth: dict[str, str | int | float]
    coefficient: str | dict[str, str | int | float] = "shapley"
    facts: list[str] | None = None


# ---------------------------------------------------------------------------
# endpoints

@app.get("/v1/health")
def health():
    return {"schema": 1, "status": "ok", "version": __version__}


@app.post("/v1/score")
def score(req: ScoreRequest):
    db = parse_database(req.database)
    q = parse_query(req.query)
    table = parse_weight_table(req.weight_table) if req.weight_table else None
    scores = score_all_measure(req.measure, q, db, weight_table=table, jobs=req.jobs)
    return {"schema": 1, "measure": req.measure, "rows": _score_rows(scores, req.facts)}


@app.post("/v1/count-ms")
def count_ms_endpoint(req: CountMsRequest):
    db = parse_database(req.database)
    q = parse_query(req.query)
    vec = fms_vector(q, db)
    payload = {
        "schema": 1,
        "count": vec.total,
        "by_size": {str(k): c for k, c in enumerate(vec.counts) if c},
    }
    if req.include_supports:
        payload["supports"] = [
            sorted(str(f) for f in m) for m in enumerate_minimal_supports(q, db)
        ]
    return payload


@app.post("/v1/count-fms")
def count_fms_endpoint(req: CountFmsRequest):
    db = parse_database(req.database)
    q = parse_query(req.query)
    if req.k < 1:
        raise InputError("the support size must be at least 1")
    return {"schema": 1, "k": req.k, "count": count_fms(q, db, req.k)}


@app.post("/v1/rewrite-sql")
def rewrite_sql(req: RewriteSqlRequest):
    q = parse_query(req.query)
    if not isinstance(q, (ConjunctiveQuery, UnionQuery)):
        raise InputError("SQL rewriting needs a conjunctive query or a union of them")
    result = build_rewriting(q, req.k)
    sql = emit_sql(result, schema=req.relation_schema)
    return {
        "schema": 1,
        "k": req.k,
        "sql": sql,
        "pieces": [
            {"query": str(piece), "gamma": _fraction_str(gamma)}
            for piece, gamma in result.queries
        ],
    }


@app.post("/v1/rpq")
def rpq_endpoint(req: RpqRequest):
    q = parse_query(req.query)
    if not isinstance(q, RegularPathQuery):
        raise InputError("this endpoint needs a path query")
    dfa = rpq_mod.compile_regex(q.regex)
    payload = {
        "schema": 1,
        "classification": rpq_mod.classify_rpq(q),
        "states": dfa.n_states,
        "alphabet": list(dfa.alphabet),
    }
    if req.database is not None:
        if req.measure not in WSMS_MEASURES:
            raise InputError(
                "path scoring supports the support-weighted measures: "
                + ", ".join(sorted(WSMS_MEASURES))
            )
        db = parse_database(req.database)
        table = parse_weight_table(req.weight_table) if req.weight_table else None
        scores = score_all_measure(req.measure, q, db, weight_table=table)
        payload["measure"] = req.measure
        payload["rows"] = _score_rows(scores, req.facts)
    return payload


@app.post("/v1/analyze")
def analyze(req: AnalyzeRequest):
    q = parse_query(req.query)
    if not isinstance(q, ConjunctiveQuery):
        raise InputError("analysis applies to a single conjunctive query")
    atoms = q.relational_atoms
    pairs = [
        [str(atoms[i]), str(atoms[j])]
        for i in range(len(atoms))
        for j in range(i + 1, len(atoms))
        if unifiable(atoms[i], atoms[j])
    ]
    return {
        "schema": 1,
        "acyclic": is_acyclic(q),
        "self_join_free": is_self_join_free(q),
        "self_join_width": self_join_width(q),
        "unifiable_pairs": pairs,
        "core": str(core(q)),
        "hom_equals_minsup": hom_equals_minsup(q),
    }


_AXIOM_DEFAULT_MEASURES = ("ms", "s", "sharp", "drastic-shapley", "drastic-banzhaf", "r-shapley")


def _random_strict_mstest(rnd: random.Random) -> ax.MstestInstance:
    l = rnd.randint(0, 2)
    k = rnd.randint(max(l, 1), 3)
    a_sizes = [rnd.randint(2, 3) for _ in range(k)]
    b_sizes = [rnd.randint(a_sizes[i], 3) for i in range(l)]
    if k == l and all(a_sizes[i] == b_sizes[i] for i in range(l)):
        if b_sizes and b_sizes[-1] < 3:
            b_sizes[-1] += 1
        else:
            k += 1
            a_sizes.append(2)
    return ax.generate_mstest(k, l, a_sizes, b_sizes)


def _symmetric_twin_instance():
    alpha = Fact("F", ("alpha",))
    beta = Fact("F", ("beta",))
    shared = Fact("F", ("shared",))
    q = ExplicitMonotoneQuery((frozenset({alpha, shared}), frozenset({beta, shared})))
    db = PartitionedDatabase(frozenset({alpha, beta, shared}), frozenset())
    return q, db, alpha, beta


def _axiom_row(result: ax.AxiomResult, instance_id: str, measure: str) -> dict:
    return {
        "axiom": result.axiom,
        "instance_id": instance_id,
        "measure": measure,
        "verdict": result.verdict,
        "alpha_score": None if result.alpha_score is None else _fraction_str(result.alpha_score),
        "beta_score": None if result.beta_score is None else _fraction_str(result.beta_score),
        "detail": result.detail,
    }


@app.post("/v1/axioms")
def axioms_endpoint(req: AxiomsRequest):
    measures = req.measures if req.measures is not None else list(_AXIOM_DEFAULT_MEASURES)
    for m in measures:
        if m not in MEASURES:
            raise InputError(f"unknown measure {m!r}; choose one of: {', '.join(MEASURES)}")
    if req.count < 1:
        raise InputError("need at least one instance")
    rnd = random.Random(req.seed)
    rows: list[dict] = []
    for i in range(req.count):
        instance = _random_strict_mstest(rnd)
        instance_id = f"mstest-{i}"
        padded = PartitionedDatabase(
            instance.db.endogenous | {Fact("F", ("pad",))}, frozenset()
        )
        for measure in measures:
            for axiom_call in (
                lambda m=measure: ax.check_mstest(m, instance),
                lambda m=measure: ax.check_null_db(m, instance.query, padded),
            ):
                try:
                    result = axiom_call()
                except InputError as exc:
                    result = ax.AxiomResult("error", "error", detail=str(exc))
                rows.append(_axiom_row(result, instance_id, measure))
    q, db, alpha, beta = _symmetric_twin_instance()
    for measure in measures:
        try:
            result = ax.check_wsym(measure, q, db, alpha, beta)
        except InputError as exc:
            result = ax.AxiomResult("error", "error", detail=str(exc))
        rows.append(_axiom_row(result, "twin-0", measure))
    return {"schema": 1, "rows": rows}


@app.post("/v1/brute")
def brute(req: BruteRequest):
    db = parse_database(req.database)
    table = {key: _rational(value) for key, value in req.wealth.items()}

    def lookup(subset):
        key = ";".join(sorted(str(f) for f in subset))
        if key not in table:
            raise InputError(f"wealth table is missing subset {key!r}")
        return table[key]

    spec = WealthSpec("explicit", db, explicit_fn=lookup)
    if isinstance(req.coefficient, str):
        coeff = CoefficientSpec(req.coefficient)
    else:
        coeff = CoefficientSpec("custom", parse_weight_table(req.coefficient))
    scores = score_all_game(spec, coeff)
    return {"schema": 1, "rows": _score_rows(scores, req.facts)}
