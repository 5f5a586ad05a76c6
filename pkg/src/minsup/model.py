"""Facts and partitioned databases.

A database is a finite set of ground facts split into an endogenous part
(the facts whose contribution is being measured) and an exogenous part
(facts taken for granted). The two parts must be disjoint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_FACT_RE = re.compile(
    r"\s*(?P<rel>[A-Za-z_][A-Za-z0-9_]*)\s*\(\s*(?P<args>[^()]*?)\s*\)\s*\Z"
)


@dataclass(frozen=True, order=True)
class Fact:
    relation: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.relation}({','.join(self.args)})"


def parse_fact(text: str) -> Fact:
    """Parse a single fact like R(a,b). Constants are bare identifiers."""
    m = _FACT_RE.match(text)
    if m is None:
        raise InputError(f"malformed fact: {text.strip()!r}")
    rel = m.group("rel")
    body = m.group("args")
    if body.strip() == "":
        args: tuple[str, ...] = ()
    else:
        parts = [p.strip() for p in body.split(",")]
        for p in parts:
            if not IDENT_RE.match(p):
                raise InputError(f"malformed constant {p!r} in fact {text.strip()!r}")
        args = tuple(parts)
    return Fact(rel, args)


class PartitionedDatabase:
    """Immutable pair of disjoint fact sets (endogenous, exogenous)."""

    __slots__ = ("endogenous", "exogenous")

    def __init__(self, endogenous: Iterable[Fact], exogenous: Iterable[Fact] = ()):
        endo = frozenset(endogenous)
        exo = frozenset(exogenous)
        overlap = endo & exo
        if overlap:
            worst = min(overlap)
            raise InputError(f"fact {worst} is both endogenous and exogenous")
        _check_arities(endo | exo)
        object.__setattr__(self, "endogenous", endo)
        object.__setattr__(self, "exogenous", exo)

    def __setattr__(self, name, value):
        raise AttributeError("PartitionedDatabase is immutable")

    @property
    def all_facts(self) -> frozenset[Fact]:
        return self.endogenous | self.exogenous

    def endogenous_sorted(self) -> list[Fact]:
        return sorted(self.endogenous)

    def exogenous_sorted(self) -> list[Fact]:
        return sorted(self.exogenous)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PartitionedDatabase)
            and self.endogenous == other.endogenous
            and self.exogenous == other.exogenous
        )

    def __hash__(self) -> int:
        return hash((self.endogenous, self.exogenous))

    def __repr__(self) -> str:
        return (
            f"PartitionedDatabase({len(self.endogenous)} endogenous, "
            f"{len(self.exogenous)} exogenous)"
        )


def _check_arities(facts: Iterable[Fact]) -> None:
    arities: dict[str, int] = {}
    for f in sorted(facts):
        seen = arities.setdefault(f.relation, len(f.args))
        if seen != len(f.args):
            raise InputError(
                f"relation {f.relation} used with arities {seen} and {len(f.args)}"
            )


def parse_database(text: str) -> PartitionedDatabase:
    """Parse a facts file.

    One fact per line, e.g. ``R(a,b)``. A leading ``*`` marks the fact as
    exogenous. ``#`` starts a comment; blank lines are ignored. Errors
    report 1-based line numbers.
    """
    endo: set[Fact] = set()
    exo: set[Fact] = set()
    arities: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        exogenous = line.startswith("*")
        if exogenous:
            line = line[1:].strip()
        try:
            fact = parse_fact(line)
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        seen = arities.setdefault(fact.relation, len(fact.args))
        if seen != len(fact.args):
            raise InputError(
                f"line {lineno}: relation {fact.relation} used with arity "
                f"{len(fact.args)} but earlier with {seen}"
            )
        if exogenous:
            if fact in endo:
                raise InputError(f"line {lineno}: fact {fact} already endogenous")
            exo.add(fact)
        else:
            if fact in exo:
                raise InputError(f"line {lineno}: fact {fact} already exogenous")
            endo.add(fact)
    return PartitionedDatabase(endo, exo)


def serialize_database(db: PartitionedDatabase) -> str:
    """Render a database in the facts-file format, facts sorted by
    (relation, args), exogenous facts prefixed with ``*``."""
    lines = []
    for fact in sorted(db.all_facts):
        prefix = "*" if fact in db.exogenous else ""
        lines.append(prefix + str(fact))
    return "\n".join(lines) + ("\n" if lines else "")


def database_size(db: PartitionedDatabase) -> tuple[int, int, int]:
    """(number of endogenous facts, exogenous facts, total)."""
    n, x = len(db.endogenous), len(db.exogenous)
    return n, x, n + x
