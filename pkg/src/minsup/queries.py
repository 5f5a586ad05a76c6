"""Monotone Boolean queries.

Four query kinds share one evaluation interface: conjunctive queries with
optional inequality atoms, finite unions of those, regular path queries
over binary relations, and explicit monotone queries given by a list of
generator fact sets.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import InputError, check_guard
from .model import Fact, IDENT_RE, parse_fact, _check_arities


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


# A term is a variable or a constant (plain string).
Term = Union[Variable, str]


def is_variable(t: Term) -> bool:
    return isinstance(t, Variable)


def term_key(t: Term) -> tuple[int, str]:
    # constants sort before variables
    return (0, t) if isinstance(t, str) else (1, t.name)


def render_term(t: Term) -> str:
    return f"'{t}'" if isinstance(t, str) else t.name


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]

    def sort_key(self):
        return (self.relation, tuple(term_key(a) for a in self.args))

    def variables(self) -> list[Variable]:
        return [a for a in self.args if isinstance(a, Variable)]

    def __str__(self) -> str:
        return f"{self.relation}({','.join(render_term(a) for a in self.args)})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    """Boolean conjunctive query, optionally with inequality atoms.

    Relational atoms are deduplicated and stored in a canonical sorted
    order; inequality atoms are unordered pairs, each with at least one
    variable side. Every inequality variable must also occur in some
    relational atom.
    """

    relational_atoms: tuple[Atom, ...]
    inequality_atoms: tuple[tuple[Term, Term], ...] = ()

    def __post_init__(self):
        if not self.relational_atoms:
            raise InputError("a conjunctive query needs at least one relational atom")
        atoms = tuple(sorted(set(self.relational_atoms), key=Atom.sort_key))
        ineqs = []
        for pair in self.inequality_atoms:
            a, b = pair
            if a == b:
                raise InputError(f"unsatisfiable inequality {render_term(a)} != {render_term(b)}")
            if isinstance(a, str) and isinstance(b, str):
                continue  # two distinct constants: always true
            lo, hi = sorted((a, b), key=term_key)
            ineqs.append((lo, hi))
        ineqs = tuple(sorted(set(ineqs), key=lambda p: (term_key(p[0]), term_key(p[1]))))
        atom_vars = {v for at in atoms for v in at.variables()}
        for a, b in ineqs:
            for t in (a, b):
                if isinstance(t, Variable) and t not in atom_vars:
                    raise InputError(f"variable {t.name} occurs only in an inequality")
        object.__setattr__(self, "relational_atoms", atoms)
        object.__setattr__(self, "inequality_atoms", ineqs)

    def variables(self) -> list[Variable]:
        seen: list[Variable] = []
        for at in self.relational_atoms:
            for v in at.variables():
                if v not in seen:
                    seen.append(v)
        return seen

    def terms(self) -> list[Term]:
        seen: list[Term] = []
        for at in self.relational_atoms:
            for t in at.args:
                if t not in seen:
                    seen.append(t)
        return seen

    def constants(self) -> set[str]:
        return {t for at in self.relational_atoms for t in at.args if isinstance(t, str)}

    def __str__(self) -> str:
        parts = [str(a) for a in self.relational_atoms]
        parts += [f"{render_term(a)} != {render_term(b)}" for a, b in self.inequality_atoms]
        return ", ".join(parts)


@dataclass(frozen=True)
class UnionQuery:
    """Finite union (disjunction) of conjunctive queries."""

    disjuncts: tuple[ConjunctiveQuery, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise InputError("a union query needs at least one disjunct")
        seen: list[ConjunctiveQuery] = []
        for d in self.disjuncts:
            if d not in seen:
                seen.append(d)
        object.__setattr__(self, "disjuncts", tuple(seen))


# Regular expression AST for path queries.
@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Cat:
    items: tuple


@dataclass(frozen=True)
class Alt:
    items: tuple


@dataclass(frozen=True)
class Star:
    item: object


RegexNode = Union[Eps, Sym, Cat, Alt, Star]


@dataclass(frozen=True)
class RegularPathQuery:
    """Is there a directed path from source to target whose edge labels
    spell a word of the regular language?"""

    regex: RegexNode
    source: str
    target: str


@dataclass(frozen=True)
class ExplicitMonotoneQuery:
    """Monotone query given extensionally: satisfied by any fact set that
    contains one of the generator sets."""

    generators: tuple[frozenset[Fact], ...]

    def __post_init__(self):
        gens: list[frozenset[Fact]] = []
        for g in self.generators:
            g = frozenset(g)
            if g not in gens:
                gens.append(g)
        gens.sort(key=lambda g: (len(g), sorted(g)))
        object.__setattr__(self, "generators", tuple(gens))


Query = Union[ConjunctiveQuery, UnionQuery, RegularPathQuery, ExplicitMonotoneQuery]


class Homomorphism:
    """Assignment of constants to the variables of one conjunctive query;
    acts as the identity on constants."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: dict[Variable, str]):
        self.mapping = dict(mapping)

    def __call__(self, t: Term) -> str:
        return t if isinstance(t, str) else self.mapping[t]

    def apply(self, atom: Atom) -> Fact:
        return Fact(atom.relation, tuple(self(t) for t in atom.args))

    def items(self):
        return sorted(self.mapping.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, Homomorphism) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.mapping.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name}->{c}" for v, c in sorted(self.mapping.items()))
        return f"Homomorphism({inner})"


def induced_support(hom: Homomorphism, q: ConjunctiveQuery) -> frozenset[Fact]:
    """The set of facts the query's relational atoms map onto."""
    return frozenset(hom.apply(a) for a in q.relational_atoms)


# ---------------------------------------------------------------------------
# parsing

_RULE_TOKEN = re.compile(
    r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<str>'[^']*'|\"[^\"]*\")"
    r"|(?P<op>:-|!=|=|\(|\)|,|\.))"
)
_RPQ_TOKEN = re.compile(
    r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>'[^']*'|\"[^\"]*\")|(?P<op>[.|*+?():]))"
)


def _tokenize(text: str, pattern: re.Pattern) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = pattern.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if not rest:
                break
            raise InputError(f"unexpected input near {rest[:20]!r}")
        pos = m.end()
        tok = m.group(0).strip()
        if tok:
            tokens.append(tok)
    return tokens


def _term_of(token: str) -> Term:
    if token[0] in "'\"":
        inner = token[1:-1]
        if not IDENT_RE.match(inner):
            raise InputError(f"malformed constant {token}")
        return inner
    if not IDENT_RE.match(token):
        raise InputError(f"expected a term, found {token!r}")
    return Variable(token)


class _Rules:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        if self.i >= len(self.toks):
            raise InputError("unexpected end of query text")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise InputError(f"expected {tok!r} but found {got!r}")


def _parse_rule(p: _Rules) -> ConjunctiveQuery:
    head = p.next()
    if not IDENT_RE.match(head):
        raise InputError(f"rule head must be an identifier, found {head!r}")
    if p.peek() == "(":
        p.next()
        while p.peek() != ")":
            p.next()
        p.next()
    p.expect(":-")
    atoms: list[Atom] = []
    ineqs: list[tuple[Term, Term]] = []
    eqs: list[tuple[Term, Term]] = []
    while True:
        tok = p.next()
        if IDENT_RE.match(tok) and p.peek() == "(":
            p.next()
            args: list[Term] = []
            if p.peek() != ")":
                while True:
                    args.append(_term_of(p.next()))
                    sep = p.next()
                    if sep == ")":
                        break
                    if sep != ",":
                        raise InputError(f"expected ',' or ')' in atom, found {sep!r}")
            else:
                p.next()
            atoms.append(Atom(tok, tuple(args)))
        else:
            left = _term_of(tok)
            op = p.next()
            if op not in ("!=", "="):
                raise InputError(f"expected comparison after term, found {op!r}")
            right = _term_of(p.next())
            (ineqs if op == "!=" else eqs).append((left, right))
        sep = p.next()
        if sep == ".":
            break
        if sep != ",":
            raise InputError(f"expected ',' or '.' in rule body, found {sep!r}")
    if not atoms:
        raise InputError("rule body has no relational atom")
    if eqs:
        atoms, ineqs = _eliminate_equalities(atoms, ineqs, eqs)
    return ConjunctiveQuery(tuple(atoms), tuple(ineqs))


def _eliminate_equalities(atoms, ineqs, eqs):
    parent: dict[Term, Term] = {}

    def find(t: Term) -> Term:
        parent.setdefault(t, t)
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a: Term, b: Term) -> None:
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        # keep constants as representatives
        if isinstance(ra, str) and isinstance(rb, str):
            raise InputError(f"equality forces distinct constants {ra} and {rb}")
        if isinstance(rb, str) or (not isinstance(ra, str) and term_key(rb) < term_key(ra)):
            ra, rb = rb, ra
        parent[rb] = ra

    for a, b in eqs:
        union(a, b)
    sub = lambda t: find(t)
    new_atoms = [Atom(a.relation, tuple(sub(t) for t in a.args)) for a in atoms]
    new_ineqs = [(sub(a), sub(b)) for a, b in ineqs]
    return new_atoms, new_ineqs


def _parse_rpq(tokens: list[str]) -> RegularPathQuery:
    p = _Rules(tokens)
    p.expect("rpq")

    def endpoint(token: str) -> str:
        if token and token[0] in "'\"":
            token = token[1:-1]
        if not IDENT_RE.match(token or ""):
            raise InputError("rpq endpoints must be constants")
        return token

    src = endpoint(p.next())
    dst = endpoint(p.next())
    p.expect(":")

    def parse_alt():
        items = [parse_cat()]
        while p.peek() == "|":
            p.next()
            items.append(parse_cat())
        return items[0] if len(items) == 1 else Alt(tuple(items))

    def parse_cat():
        items = [parse_postfix()]
        while p.peek() == ".":
            p.next()
            items.append(parse_postfix())
        return items[0] if len(items) == 1 else Cat(tuple(items))

    def parse_postfix():
        node = parse_primary()
        while p.peek() in ("*", "+", "?"):
            op = p.next()
            if op == "*":
                node = Star(node)
            elif op == "+":
                node = Cat((node, Star(node)))
            else:
                node = Alt((node, Eps()))
        return node

    def parse_primary():
        tok = p.next()
        if tok == "(":
            node = parse_alt()
            p.expect(")")
            return node
        if tok == "eps":
            return Eps()
        if IDENT_RE.match(tok):
            return Sym(tok)
        raise InputError(f"unexpected token {tok!r} in path expression")

    regex = parse_alt()
    if p.peek() is not None:
        raise InputError(f"trailing input after path expression: {p.peek()!r}")
    return RegularPathQuery(regex, src, dst)


def _parse_explicit(text: str) -> ExplicitMonotoneQuery:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed generator list: {exc}") from None
    if not isinstance(data, list) or not all(isinstance(g, list) for g in data):
        raise InputError("generator list must be a JSON list of fact lists")
    gens = []
    all_facts = []
    for g in data:
        facts = set()
        for s in g:
            if not isinstance(s, str):
                raise InputError("generator facts must be strings like 'R(a,b)'")
            f = parse_fact(s)
            facts.add(f)
            all_facts.append(f)
        gens.append(frozenset(facts))
    _check_arities(all_facts)
    if not gens:
        raise InputError("explicit query needs at least one generator")
    return ExplicitMonotoneQuery(tuple(gens))


def parse_query(text: str) -> Query:
    """Parse query text.

    Three syntaxes are recognized: datalog-style rules
    ``q :- R(x,y), S(y,'a'), x != y.`` (several rules form a union; quoted
    identifiers are constants, bare ones variables), path queries
    ``rpq c d : (R.S)*|T``, and a JSON list of generator fact sets for
    explicit monotone queries.
    """
    stripped = text.strip()
    if not stripped:
        raise InputError("empty query text")
    if stripped.startswith("["):
        return _parse_explicit(stripped)
    if ":-" not in stripped and re.match(r"rpq\b", stripped):
        return _parse_rpq(_tokenize(stripped, _RPQ_TOKEN))
    tokens = _tokenize(stripped, _RULE_TOKEN)
    p = _Rules(tokens)
    cqs: list[ConjunctiveQuery] = []
    while p.peek() is not None:
        cqs.append(_parse_rule(p))
    dedup: list[ConjunctiveQuery] = []
    for cq in cqs:
        if cq not in dedup:
            dedup.append(cq)
    return dedup[0] if len(dedup) == 1 else UnionQuery(tuple(dedup))


# ---------------------------------------------------------------------------
# homomorphisms and evaluation

def _facts_by_relation(facts) -> dict[str, list[Fact]]:
    by_rel: dict[str, list[Fact]] = {}
    for f in facts:
        by_rel.setdefault(f.relation, []).append(f)
    for lst in by_rel.values():
        lst.sort()
    return by_rel


def _plan_atom_order(q: ConjunctiveQuery, by_rel) -> list[Atom]:
    # most-constrained-first: prefer atoms with few unbound variables and
    # few candidate facts, so bindings propagate early
    remaining = list(q.relational_atoms)
    ordered: list[Atom] = []
    bound: set[Variable] = set()
    while remaining:
        def cost(a: Atom):
            unbound = {v for v in a.variables() if v not in bound}
            return (len(unbound), len(by_rel.get(a.relation, ())), a.sort_key())

        best = min(remaining, key=cost)
        remaining.remove(best)
        ordered.append(best)
        bound.update(best.variables())
    return ordered


def _hom_search(q: ConjunctiveQuery, facts, mode: str):
    """Backtracking search for homomorphisms of a conjunctive query.

    mode is one of 'exists', 'count', 'all'. Inequality atoms are checked
    as soon as both sides are bound.
    """
    by_rel = _facts_by_relation(facts)
    order = _plan_atom_order(q, by_rel)
    ineqs = q.inequality_atoms
    assignment: dict[Variable, str] = {}
    found: list[dict[Variable, str]] = []
    count = 0

    def resolved(t: Term) -> str | None:
        return t if isinstance(t, str) else assignment.get(t)

    def ineqs_ok() -> bool:
        for a, b in ineqs:
            ra, rb = resolved(a), resolved(b)
            if ra is not None and rb is not None and ra == rb:
                return False
        return True

    def rec(i: int) -> bool:
        nonlocal count
        if i == len(order):
            if mode == "exists":
                return True
            if mode == "count":
                count += 1
            else:
                found.append(dict(assignment))
            return False
        atom = order[i]
        for fact in by_rel.get(atom.relation, ()):
            if len(fact.args) != len(atom.args):
                continue
            newly: list[Variable] = []
            ok = True
            for t, c in zip(atom.args, fact.args):
                if isinstance(t, str):
                    if t != c:
                        ok = False
                        break
                else:
                    cur = assignment.get(t)
                    if cur is None:
                        assignment[t] = c
                        newly.append(t)
                    elif cur != c:
                        ok = False
                        break
            if ok and ineqs_ok() and rec(i + 1):
                return True
            for t in newly:
                del assignment[t]
        return False

    hit = rec(0)
    if mode == "exists":
        return hit
    if mode == "count":
        return count
    return found


def enumerate_homomorphisms(q, facts) -> list[Homomorphism]:
    """All homomorphisms of the query into the fact set, in a deterministic
    order: sorted by the constants assigned to the variables in order of
    first occurrence. For a union, the disjuncts' lists are concatenated."""
    if isinstance(q, UnionQuery):
        out: list[Homomorphism] = []
        for d in q.disjuncts:
            out.extend(enumerate_homomorphisms(d, facts))
        return out
    if not isinstance(q, ConjunctiveQuery):
        raise InputError("homomorphisms are defined for conjunctive queries and unions")
    maps = _hom_search(q, facts, "all")
    var_order = q.variables()
    maps.sort(key=lambda m: tuple(m[v] for v in var_order))
    return [Homomorphism(m) for m in maps]


def count_homomorphisms(q, facts) -> int:
    """Number of homomorphisms (the answer count of the Boolean query)."""
    if isinstance(q, UnionQuery):
        return sum(count_homomorphisms(d, facts) for d in q.disjuncts)
    if not isinstance(q, ConjunctiveQuery):
        raise InputError("homomorphisms are defined for conjunctive queries and unions")
    return _hom_search(q, facts, "count")


def evaluate(q: Query, facts) -> bool:
    """Does the fact set satisfy the query?"""
    facts = frozenset(facts)
    if isinstance(q, ConjunctiveQuery):
        return _hom_search(q, facts, "exists")
    if isinstance(q, UnionQuery):
        return any(_hom_search(d, facts, "exists") for d in q.disjuncts)
    if isinstance(q, RegularPathQuery):
        from . import rpq

        return rpq.rpq_evaluate(q, facts)
    if isinstance(q, ExplicitMonotoneQuery):
        return any(g <= facts for g in q.generators)
    raise InputError(f"unsupported query type {type(q).__name__}")


# ---------------------------------------------------------------------------
# structural analysis of conjunctive queries

def is_acyclic(q: ConjunctiveQuery) -> bool:
    """GYO reduction on the hypergraph of relational atoms' variables."""
    edges = [frozenset(a.variables()) for a in q.relational_atoms]
    while len(edges) > 1:
        cnt = Counter(v for e in edges for v in e)
        solo = {v for v, c in cnt.items() if c == 1}
        shrunk = [e - solo for e in edges] if solo else edges
        removed = False
        for i, e in enumerate(shrunk):
            if any(i != j and e <= other for j, other in enumerate(shrunk)):
                shrunk.pop(i)
                removed = True
                break
        if not removed and shrunk == edges:
            return False
        edges = shrunk
    return True


def is_self_join_free(q: ConjunctiveQuery) -> bool:
    rels = [a.relation for a in q.relational_atoms]
    return len(rels) == len(set(rels))


def unifiable(a1: Atom, a2: Atom) -> bool:
    """Can one variable assignment send both atoms to the same fact?"""
    if a1.relation != a2.relation or len(a1.args) != len(a2.args):
        return False
    parent: dict[Term, Term] = {}

    def find(t: Term) -> Term:
        parent.setdefault(t, t)
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for t1, t2 in zip(a1.args, a2.args):
        r1, r2 = find(t1), find(t2)
        if r1 != r2:
            parent[r1] = r2
    groups: dict[Term, set[str]] = {}
    for t in list(parent):
        if isinstance(t, str):
            groups.setdefault(find(t), set()).add(t)
    return all(len(cs) <= 1 for cs in groups.values())


def mergeable(a1: Atom, a2: Atom) -> bool:
    """Can two separate variable assignments send the two atoms to the
    same fact? Unlike unifiability, each atom gets its own assignment."""
    if a1 == a2:
        raise InputError("mergeable is defined for two distinct atoms")
    if a1.relation != a2.relation or len(a1.args) != len(a2.args):
        return False
    ar = len(a1.args)
    parent = list(range(ar))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(ar):
        for j in range(i + 1, ar):
            if a1.args[i] == a1.args[j] or a2.args[i] == a2.args[j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, set[str]] = {}
    for i in range(ar):
        cls = groups.setdefault(find(i), set())
        for atom in (a1, a2):
            if isinstance(atom.args[i], str):
                cls.add(atom.args[i])
    return all(len(cs) <= 1 for cs in groups.values())


def self_join_width(q: ConjunctiveQuery) -> int:
    """Number of distinct terms in atoms that can merge with another atom
    of the query; 0 for self-join-free queries."""
    atoms = q.relational_atoms
    involved: set[Term] = set()
    for a in atoms:
        if any(b != a and mergeable(a, b) for b in atoms):
            involved.update(a.args)
    return len(involved)


def canonical_database(q: ConjunctiveQuery) -> tuple[frozenset[Fact], dict[Variable, str]]:
    """Freeze the query's variables into fresh constants. The fresh names
    are guaranteed not to clash with the query's own constants."""
    consts = q.constants()
    prefix = "v_"
    names = [prefix + v.name for v in q.variables()]
    while any(n in consts for n in names):
        prefix = "_" + prefix
        names = [prefix + v.name for v in q.variables()]
    var_map = {v: prefix + v.name for v in q.variables()}
    hom = Homomorphism(var_map)
    return frozenset(hom.apply(a) for a in q.relational_atoms), var_map


def query_hom_exists(src: ConjunctiveQuery, dst: ConjunctiveQuery) -> bool:
    """Is there a homomorphism from src into dst? The target is treated as
    its frozen structure, so src's inequality atoms must land on distinct
    targets; dst's own inequality atoms impose nothing here."""
    facts, _ = canonical_database(dst)
    return evaluate(src, facts)


def count_automorphisms(q: ConjunctiveQuery) -> int:
    """Homomorphism count of the query into its own frozen structure.
    For cores this is the number of automorphisms."""
    facts, _ = canonical_database(q)
    return count_homomorphisms(q, facts)


def core(q: ConjunctiveQuery) -> ConjunctiveQuery:
    """Smallest equivalent subquery, computed by greedily retrying atom
    removals in canonical atom order until none preserves equivalence."""
    atoms = list(q.relational_atoms)
    changed = True
    while changed:
        changed = False
        current = ConjunctiveQuery(tuple(atoms), q.inequality_atoms)
        for a in sorted(atoms, key=Atom.sort_key):
            rest = [b for b in atoms if b != a]
            if not rest:
                continue
            ineq_vars = {
                t
                for pair in q.inequality_atoms
                for t in pair
                if isinstance(t, Variable)
            }
            rest_vars = {v for b in rest for v in b.variables()}
            if not ineq_vars <= rest_vars:
                continue
            candidate = ConjunctiveQuery(tuple(rest), q.inequality_atoms)
            if query_hom_exists(current, candidate):
                atoms = rest
                changed = True
                break
    return ConjunctiveQuery(tuple(atoms), q.inequality_atoms)


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def quotients(q: ConjunctiveQuery) -> list[ConjunctiveQuery]:
    """All homomorphic images of the query obtained by merging its terms.

    A merge class may contain at most one distinct constant; classes whose
    members are forced apart by an inequality atom are skipped.
    """
    terms = q.terms()
    check_guard(len(terms), 8, "quotient enumeration over query terms")
    out: list[ConjunctiveQuery] = []
    for part in _set_partitions(terms):
        sub: dict[Term, Term] = {}
        ok = True
        for cls in part:
            consts = {t for t in cls if isinstance(t, str)}
            if len(consts) > 1:
                ok = False
                break
            rep: Term
            if consts:
                rep = next(iter(consts))
            else:
                rep = min(cls, key=term_key)
            for t in cls:
                sub[t] = rep
        if not ok:
            continue
        atoms = tuple(Atom(a.relation, tuple(sub[t] for t in a.args)) for a in q.relational_atoms)
        try:
            ineqs = tuple((sub[a], sub[b]) for a, b in q.inequality_atoms)
            out.append(ConjunctiveQuery(atoms, ineqs))
        except InputError:
            continue  # the merge contradicts an inequality atom
    return out


def _var_signature(q: ConjunctiveQuery, v: Variable):
    occ = tuple(
        sorted(
            (a.relation, i)
            for a in q.relational_atoms
            for i, t in enumerate(a.args)
            if t == v
        )
    )
    ineq_consts = tuple(
        sorted(
            other
            for pair in q.inequality_atoms
            for side, other in ((pair[0], pair[1]), (pair[1], pair[0]))
            if side == v and isinstance(other, str)
        )
    )
    ineq_deg = sum(1 for pair in q.inequality_atoms if v in pair)
    return (occ, ineq_deg, ineq_consts)


def canonical_key(q: ConjunctiveQuery):
    """Isomorphism-invariant key: minimal rendering over the variable
    renamings compatible with each variable's occurrence signature."""
    vars_ = q.variables()
    sigs = {v: _var_signature(q, v) for v in vars_}
    groups: dict[object, list[Variable]] = {}
    for v in sorted(vars_):
        groups.setdefault(sigs[v], []).append(v)
    ordered_groups = [groups[s] for s in sorted(groups.keys())]
    # slot indices are fixed per group block; permuting within blocks
    # covers every signature-preserving renaming
    blocks: list[tuple[int, list[Variable]]] = []
    base = 0
    for g in ordered_groups:
        blocks.append((base, g))
        base += len(g)

    def render(mapping: dict[Variable, int]):
        atoms = tuple(
            sorted(
                (
                    a.relation,
                    tuple(
                        ("c", t) if isinstance(t, str) else ("v", mapping[t])
                        for t in a.args
                    ),
                )
                for a in q.relational_atoms
            )
        )
        ineqs = tuple(
            sorted(
                tuple(
                    sorted(
                        ("c", t) if isinstance(t, str) else ("v", mapping[t])
                        for t in pair
                    )
                )
                for pair in q.inequality_atoms
            )
        )
        return (atoms, ineqs)

    best = None
    for perms in itertools.product(*(itertools.permutations(g) for _, g in blocks)):
        mapping: dict[Variable, int] = {}
        for (start, _), perm in zip(blocks, perms):
            for offset, v in enumerate(perm):
                mapping[v] = start + offset
        key = render(mapping)
        if best is None or key < best:
            best = key
    return best


def is_isomorphic(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    if len(q1.relational_atoms) != len(q2.relational_atoms):
        return False
    if len(q1.inequality_atoms) != len(q2.inequality_atoms):
        return False
    if sorted(a.relation for a in q1.relational_atoms) != sorted(
        a.relation for a in q2.relational_atoms
    ):
        return False
    if len(q1.variables()) != len(q2.variables()):
        return False
    return canonical_key(q1) == canonical_key(q2)


def hom_equals_minsup(q: ConjunctiveQuery) -> bool:
    """Does the homomorphism count equal the minimal-support count on every
    database? Holds exactly when all quotients are pairwise non-isomorphic
    cores with a single automorphism."""
    keys = set()
    for qt in quotients(q):
        if count_automorphisms(qt) != 1:
            return False
        if len(core(qt).relational_atoms) != len(qt.relational_atoms):
            return False
        key = canonical_key(qt)
        if key in keys:
            return False
        keys.add(key)
    return True


def with_all_inequalities(q: ConjunctiveQuery) -> ConjunctiveQuery:
    """Add an inequality atom for every pair of distinct variables."""
    pairs = list(q.inequality_atoms)
    vs = q.variables()
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            pairs.append((vs[i], vs[j]))
    return ConjunctiveQuery(q.relational_atoms, tuple(pairs))
