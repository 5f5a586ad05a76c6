"""Counting size-k minimal supports with plain SQL.

The per-size support count of a union of conjunctive queries equals a
fixed rational combination of answer counts of inequality-augmented
queries, one per surviving k-atom homomorphic image of the input. This
module builds that combination and renders it as SQL.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .queries import (
    ConjunctiveQuery,
    Query,
    UnionQuery,
    Variable,
    canonical_key,
    count_automorphisms,
    count_homomorphisms,
    query_hom_exists,
    quotients,
    with_all_inequalities,
)


@dataclass(frozen=True)
class RewriteResult:
    """Augmented queries with their rational weights; the size-k support
    count of the source query is the weighted sum of their answer counts."""

    queries: tuple[tuple[ConjunctiveQuery, Fraction], ...]
    k: int


def enumerate_reducts(q: Query) -> list[ConjunctiveQuery]:
    """All homomorphic images of the query (of any disjunct, for unions),
    deduplicated up to isomorphism. Deterministic order: by atom count,
    then by canonical key."""
    if isinstance(q, ConjunctiveQuery):
        disjuncts: tuple[ConjunctiveQuery, ...] = (q,)
    elif isinstance(q, UnionQuery):
        disjuncts = q.disjuncts
    else:
        raise InputError("rewriting needs a conjunctive query or a union of them")
    seen: dict[object, ConjunctiveQuery] = {}
    for d in disjuncts:
        for r in quotients(d):
            key = canonical_key(r)
            if key not in seen:
                seen[key] = r
    return sorted(seen.values(), key=lambda r: (len(r.relational_atoms), canonical_key(r)))


def build_rewriting(q: Query, k: int) -> RewriteResult:
    """Select the k-atom reducts that can count size-k minimal supports.

    A k-atom reduct is dropped when a strictly smaller reduct maps into it
    (its support would not be minimal), and the survivors are pruned to
    one representative per class of the injective-homomorphism preorder,
    keeping only the classes nothing else maps into. Each representative
    is augmented with inequalities over all its variable pairs and
    weighted by the reciprocal of its automorphism count.
    """
    if k < 1:
        raise InputError(f"the support size must be positive, got k={k}")
    reducts = enumerate_reducts(q)
    smaller = [r for r in reducts if len(r.relational_atoms) < k]
    candidates = [
        r
        for r in reducts
        if len(r.relational_atoms) == k
        and not any(query_hom_exists(s, r) for s in smaller)
    ]
    augmented = [with_all_inequalities(r) for r in candidates]

    n = len(candidates)
    into = [
        [i != j and query_hom_exists(augmented[i], candidates[j]) for j in range(n)]
        for i in range(n)
    ]
    # mutual-homomorphism classes; a class survives only if no outside
    # candidate maps into it, and contributes its canonically least member
    class_id = list(range(n))
    for i in range(n):
        for j in range(n):
            if i < j and into[i][j] and into[j][i]:
                cj = class_id[j]
                ci = class_id[i]
                for t in range(n):
                    if class_id[t] == cj:
                        class_id[t] = ci
    survivors: list[ConjunctiveQuery] = []
    for cid in sorted(set(class_id)):
        members = [i for i in range(n) if class_id[i] == cid]
        outside_in = any(
            into[i][j] for j in members for i in range(n) if class_id[i] != cid
        )
        if outside_in:
            continue
        best = min(members, key=lambda i: canonical_key(candidates[i]))
        survivors.append(augmented[best])

    survivors.sort(key=canonical_key)
    queries = tuple(
        (s, Fraction(1, count_automorphisms(s))) for s in survivors
    )
    return RewriteResult(queries, k)


def evaluate_rewriting(result: RewriteResult, facts) -> int:
    """Apply the weighted combination to a database; the result is the
    number of size-k minimal supports and must come out integral."""
    total = sum(
        (gamma * count_homomorphisms(query, facts) for query, gamma in result.queries),
        Fraction(0),
    )
    if total.denominator != 1:
        raise RuntimeError(f"rewriting produced a non-integer count {total}")
    return int(total)


# ---------------------------------------------------------------------------
# SQL rendering

def _infer_schema(result: RewriteResult) -> dict[str, int]:
    schema: dict[str, int] = {}
    for query, _ in result.queries:
        for atom in query.relational_atoms:
            seen = schema.setdefault(atom.relation, len(atom.args))
            if seen != len(atom.args):
                raise InputError(
                    f"relation {atom.relation} used with arities {seen} and {len(atom.args)}"
                )
    return schema


def emit_sql(result: RewriteResult, schema: dict[str, int] | None = None) -> str:
    """Render each augmented query as SELECT COUNT(*) over aliased tables
    with columns c0..c{arity-1}, joined by equality conditions, variable
    pairs separated with <>, and constants as string literals. A trailing
    comment states the weighted combination."""
    inferred = _infer_schema(result)
    if schema is not None:
        for rel, arity in inferred.items():
            if rel not in schema:
                raise InputError(f"relation {rel} missing from schema")
            if schema[rel] != arity:
                raise InputError(
                    f"relation {rel} has arity {schema[rel]} in the schema "
                    f"but {arity} in the query"
                )
    statements: list[str] = []
    for query, _ in result.queries:
        statements.append(_render_query(query))
    combo_terms = [
        f"{gamma} * (query {i})" for i, (_, gamma) in enumerate(result.queries, start=1)
    ]
    combination = " + ".join(combo_terms) if combo_terms else "0"
    lines = [f"{stmt};" for stmt in statements]
    lines.append(f"-- size-{result.k} minimal support count = {combination}")
    return "\n".join(lines) + "\n"


def _render_query(query: ConjunctiveQuery) -> str:
    atoms = query.relational_atoms
    first_occ: dict[Variable, str] = {}
    conds: list[str] = []
    froms: list[str] = []
    for i, atom in enumerate(atoms):
        froms.append(f"{atom.relation} t{i}")
        for p, t in enumerate(atom.args):
            ref = f"t{i}.c{p}"
            if isinstance(t, str):
                conds.append(f"{ref} = '{t}'")
            elif t in first_occ:
                conds.append(f"{first_occ[t]} = {ref}")
            else:
                first_occ[t] = ref

    def render(t) -> str:
        return f"'{t}'" if isinstance(t, str) else first_occ[t]

    for a, b in query.inequality_atoms:
        conds.append(f"{render(a)} <> {render(b)}")
    sql = "SELECT COUNT(*) FROM " + ", ".join(froms)
    if conds:
        sql += " WHERE " + " AND ".join(conds)
    return sql
