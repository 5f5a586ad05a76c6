"""Exact per-size support counting for conjunctive queries whose self-join
structure is small.

Only the terms of atoms that can collide with another atom matter; when
few enough, every way of unifying them can be tried up front, each giving
a collapsed core query whose inequality-augmented answer count divides
out its automorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, check_guard
from .queries import (
    Atom,
    ConjunctiveQuery,
    Term,
    _set_partitions,
    canonical_key,
    core,
    count_automorphisms,
    count_homomorphisms,
    mergeable,
    query_hom_exists,
    term_key,
)

SELF_JOIN_GUARD = 6


@dataclass(frozen=True)
class UnifPartition:
    """One way of equating the unification-relevant terms, with the
    collapsed core query and its inequality-augmented version."""

    classes: tuple[tuple[Term, ...], ...]
    query: ConjunctiveQuery
    augmented: ConjunctiveQuery


def _unification_terms(q: ConjunctiveQuery) -> list[Term]:
    atoms = q.relational_atoms
    out: list[Term] = []
    for a in atoms:
        if any(b != a and mergeable(a, b) for b in atoms):
            for t in a.args:
                if t not in out:
                    out.append(t)
    return sorted(out, key=term_key)


def build_punif(q: ConjunctiveQuery) -> list[UnifPartition]:
    """All maximal ways of collapsing the unification-relevant terms.

    A partition is kept when no strictly more collapsed partition's query
    maps into it one-sidedly; kept partitions are deduplicated up to
    isomorphism of their augmented queries.
    """
    if q.inequality_atoms:
        raise InputError("self-join counting does not take inequality atoms")
    unif = _unification_terms(q)
    check_guard(len(unif), SELF_JOIN_GUARD, "self-join unification enumeration")

    entries: list[tuple[tuple[tuple[Term, ...], ...], ConjunctiveQuery, ConjunctiveQuery]] = []
    for part in _set_partitions(list(unif)):
        sub: dict[Term, Term] = {}
        ok = True
        for cls in part:
            consts = {t for t in cls if isinstance(t, str)}
            if len(consts) > 1:
                ok = False
                break
            rep: Term = next(iter(consts)) if consts else min(cls, key=term_key)
            for t in cls:
                sub[t] = rep
        if not ok:
            continue
        atoms = tuple(
            Atom(a.relation, tuple(sub.get(t, t) for t in a.args))
            for a in q.relational_atoms
        )
        collapsed = core(ConjunctiveQuery(atoms))
        present = {t for a in collapsed.relational_atoms for t in a.args}
        reps = sorted({sub[t] for t in unif if sub[t] in present}, key=term_key)
        ineqs = tuple(
            (reps[i], reps[j])
            for i in range(len(reps))
            for j in range(i + 1, len(reps))
        )
        try:
            augmented = ConjunctiveQuery(collapsed.relational_atoms, ineqs)
        except InputError:
            continue
        classes = tuple(
            tuple(sorted(cls, key=term_key)) for cls in sorted(part, key=lambda c: term_key(min(c, key=term_key)))
        )
        entries.append((classes, collapsed, augmented))

    kept: list[tuple[tuple[tuple[Term, ...], ...], ConjunctiveQuery, ConjunctiveQuery]] = []
    for classes, collapsed, augmented in entries:
        dominated = False
        for _, _, other_aug in entries:
            if other_aug == augmented:
                continue
            if query_hom_exists(other_aug, augmented) and not query_hom_exists(
                augmented, other_aug
            ):
                dominated = True
                break
        if not dominated:
            kept.append((classes, collapsed, augmented))

    seen: dict[object, UnifPartition] = {}
    for classes, collapsed, augmented in kept:
        key = canonical_key(augmented)
        if key not in seen:
            seen[key] = UnifPartition(classes, collapsed, augmented)
    return sorted(
        seen.values(),
        key=lambda up: (len(up.query.relational_atoms), canonical_key(up.augmented)),
    )


def count_fms_selfjoin(q: ConjunctiveQuery, facts, k: int) -> int:
    """Number of size-k minimal supports, via the collapsed queries with
    exactly k atoms."""
    members = build_punif(q)
    total = Fraction(0)
    for up in members:
        if len(up.query.relational_atoms) != k:
            continue
        count = count_homomorphisms(up.augmented, facts)
        if count:
            total += Fraction(count, count_automorphisms(up.augmented))
    if total.denominator != 1:
        raise RuntimeError(f"self-join counting produced a non-integer total {total}")
    return int(total)
