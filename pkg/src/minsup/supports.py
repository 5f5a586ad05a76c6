"""Minimal supports of monotone queries.

A support of q in a fact set D is a subset that satisfies q; a minimal
support is one no proper subset of which does. Minimality is a property
of the fact set itself, so supports of a subset of D are exactly the
supports of D lying inside it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError, check_guard
from .model import Fact, PartitionedDatabase
from .queries import (
    Atom,
    ConjunctiveQuery,
    ExplicitMonotoneQuery,
    Query,
    RegularPathQuery,
    UnionQuery,
    Variable,
    enumerate_homomorphisms,
    evaluate,
    induced_support,
)

LATTICE_GUARD = 22


def _fact_set(d) -> frozenset[Fact]:
    if isinstance(d, PartitionedDatabase):
        return d.all_facts
    return frozenset(d)


@dataclass(frozen=True)
class FmsVector:
    """counts[k] is the number of minimal supports of size k, for
    0 <= k <= |D|."""

    counts: tuple[int, ...]

    def count(self, k: int) -> int:
        if 0 <= k < len(self.counts):
            return self.counts[k]
        return 0

    @property
    def total(self) -> int:
        return sum(self.counts)


def _minimal_among(candidates: Iterable[frozenset[Fact]]) -> list[frozenset[Fact]]:
    ordered = sorted(set(candidates), key=lambda s: (len(s), sorted(s)))
    kept: list[frozenset[Fact]] = []
    for cand in ordered:
        if not any(prev < cand for prev in kept):
            kept.append(cand)
    return kept


def _supports_by_homomorphisms(q, facts: frozenset[Fact]) -> list[frozenset[Fact]]:
    disjuncts = q.disjuncts if isinstance(q, UnionQuery) else (q,)
    candidates = []
    for d in disjuncts:
        for hom in enumerate_homomorphisms(d, facts):
            candidates.append(induced_support(hom, d))
    return _minimal_among(candidates)


def _supports_by_lattice(q, facts: frozenset[Fact]) -> list[frozenset[Fact]]:
    check_guard(len(facts), LATTICE_GUARD, "minimal-support lattice enumeration")
    ordered = sorted(facts)
    found: list[frozenset[Fact]] = []
    for size in range(len(ordered) + 1):
        for combo in itertools.combinations(ordered, size):
            s = frozenset(combo)
            if any(prev < s for prev in found):
                continue
            if not evaluate(q, s):
                continue
            if all(not evaluate(q, s - {f}) for f in s):
                found.append(s)
    return found


def enumerate_minimal_supports(q: Query, d) -> list[frozenset[Fact]]:
    """All minimal supports of q within the fact set, sorted by size and
    then by their sorted facts."""
    facts = _fact_set(d)
    if isinstance(q, (ConjunctiveQuery, UnionQuery)):
        out = _supports_by_homomorphisms(q, facts)
    elif isinstance(q, (RegularPathQuery, ExplicitMonotoneQuery)):
        out = _supports_by_lattice(q, facts)
    else:
        raise InputError(f"unsupported query type {type(q).__name__}")
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def fms_vector(q: Query, d) -> FmsVector:
    """Sizes histogram of the minimal supports."""
    facts = _fact_set(d)
    counts = [0] * (len(facts) + 1)
    for m in enumerate_minimal_supports(q, facts):
        counts[len(m)] += 1
    return FmsVector(tuple(counts))


def count_fms(q: Query, d, k: int) -> int:
    """Number of minimal supports of size exactly k (0 outside 0..|D|)."""
    facts = _fact_set(d)
    if k < 0 or k > len(facts):
        return 0
    return sum(1 for m in enumerate_minimal_supports(q, facts) if len(m) == k)


def count_ms(q: Query, d) -> int:
    """Total number of minimal supports."""
    return len(enumerate_minimal_supports(q, d))


def is_relevant(q: Query, db: PartitionedDatabase, fact: Fact) -> bool:
    """Is the fact a member of at least one minimal support of q in the
    whole database?"""
    if fact not in db.all_facts:
        raise InputError(f"fact {fact} is not in the database")
    return any(fact in m for m in enumerate_minimal_supports(q, db.all_facts))


# ---------------------------------------------------------------------------
# reference instance families

def _label_path(relations: list[str], start, end, inner_names: list[str], as_query: bool):
    """Chain of atoms or facts reading the given relations from start to
    end through fresh intermediate points."""
    points = [start] + inner_names + [end]
    assert len(points) == len(relations) + 1
    out = []
    for rel, a, b in zip(relations, points, points[1:]):
        out.append(Atom(rel, (a, b)) if as_query else Fact(rel, (a, b)))
    return out


def generate_matching_instance(n: int, edges: list[tuple[int, int]]):
    """Bipartite perfect-matching instance over an unbounded schema.

    Vertices are a_1..a_n on the left and b_1..b_n on the right; edges are
    1-based (i, j) pairs. Returns (query, database) such that the number
    of minimal supports equals n plus the number of perfect matchings.
    """
    if n < 1:
        raise InputError("matching instance needs n >= 1")
    seen = set()
    for i, j in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise InputError(f"edge ({i},{j}) out of range for n={n}")
        if (i, j) in seen:
            raise InputError(f"duplicate edge ({i},{j})")
        seen.add((i, j))

    rels = [f"R{m}" for m in range(1, n + 1)]
    facts: list[Fact] = []
    for j in range(1, n + 1):
        for rel in rels:
            facts.append(Fact(rel, (f"b{j}", f"b{j}")))
    for i in range(1, n):
        inner = [f"p{i}_{t}" for t in range(1, n)]
        facts += _label_path(rels[::-1], f"a{i}", f"a{i+1}", inner, as_query=False)
    for i, j in sorted(seen):
        inner = [f"e{i}_{j}_{t}" for t in range(1, n)]
        facts += _label_path(rels, f"a{i}", f"b{j}", inner, as_query=False)

    atoms: list[Atom] = []
    xs = [Variable(f"x{i}") for i in range(1, n + 1)]
    for i in range(1, n):
        inner = [Variable(f"s{i}_{t}") for t in range(1, n)]
        atoms += _label_path(rels[::-1], xs[i - 1], xs[i], inner, as_query=True)
    for i in range(1, n + 1):
        y = Variable(f"y{i}")
        z = Variable(f"z{i}")
        inner = [Variable(f"t{i}_{k}") for k in range(1, n)]
        atoms += _label_path(rels, xs[i - 1], y, inner, as_query=True)
        for m in range(1, n + 1):
            if m != i:
                atoms.append(Atom(f"R{m}", (y, z)))
    query = ConjunctiveQuery(tuple(atoms))
    return query, PartitionedDatabase(facts)


def generate_vertex_cover_instance(vertices: list[str], edges: list[tuple[str, str]]):
    """Graph instance whose minimum removal cost equals the size of a
    minimum vertex cover: vertex facts are endogenous, edge facts
    exogenous, and the query asks for an edge with both ends present."""
    vset = set(vertices)
    if len(vset) != len(vertices):
        raise InputError("duplicate vertices")
    exo = set()
    for u, v in edges:
        if u not in vset or v not in vset:
            raise InputError(f"edge ({u},{v}) mentions an unknown vertex")
        if u == v:
            raise InputError(f"self-loop at {u} not allowed")
        a, b = sorted((u, v))
        exo.add(Fact("S", (a, b)))
    endo = {Fact("R", (v,)) for v in vertices}
    x, y = Variable("x"), Variable("y")
    query = ConjunctiveQuery((Atom("R", (x,)), Atom("S", (x, y)), Atom("R", (y,))))
    return query, PartitionedDatabase(endo, exo)
