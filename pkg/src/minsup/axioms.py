"""Finite-instance checks for the properties a responsibility measure
should have: the support-size ranking test, null scores for irrelevant
facts, score equality for interchangeable facts, and the witness
structures that certify one fact outranking another.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .errors import InputError, check_guard
from .model import Fact, PartitionedDatabase
from .queries import Atom, ConjunctiveQuery, ExplicitMonotoneQuery, Variable, evaluate
from .supports import enumerate_minimal_supports, is_relevant

WSYM_GUARD = 20
WITNESS_CS_GUARD = 6
WITNESS_DB_GUARD = 12


def _resolve_measure(measure):
    if callable(measure):
        return measure
    from . import measures

    return measures.score_fn(measure)


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    verdict: str  # "pass" | "fail" | "vacuous"
    alpha_score: Fraction | None = None
    beta_score: Fraction | None = None
    detail: str = ""


# ---------------------------------------------------------------------------
# ranking-test instances

@dataclass(frozen=True)
class MstestInstance:
    """Two distinguished facts whose minimal supports are laid out so that
    every supporting set of the second pairs with a no-larger supporting
    set of the first."""

    alpha: Fact
    beta: Fact
    a_sets: tuple[frozenset, ...]
    b_sets: tuple[frozenset, ...]
    query: ExplicitMonotoneQuery
    db: PartitionedDatabase
    is_strict: bool


def generate_mstest(k: int, l: int, a_sizes, b_sizes) -> MstestInstance:
    """Build the instance with supporting sets A_1..A_k for alpha and
    B_1..B_l for beta of the requested sizes (sizes include the
    distinguished fact). Distinct sets of one family share only their
    distinguished fact and the families are otherwise disjoint."""
    a_sizes = list(a_sizes)
    b_sizes = list(b_sizes)
    if k < 1:
        raise InputError("need at least one supporting set for the first fact")
    if l < 0 or l > k:
        raise InputError("the second fact may not have more supporting sets than the first")
    if len(a_sizes) != k or len(b_sizes) != l:
        raise InputError("need exactly one size per supporting set")
    for sizes, many, who in ((a_sizes, k, "first"), (b_sizes, l, "second")):
        for size in sizes:
            if size < 1:
                raise InputError("a supporting set holds at least its own fact")
            if size == 1 and many >= 2:
                raise InputError(
                    f"a singleton supporting set for the {who} fact would make its siblings non-minimal"
                )
    for i in range(l):
        if a_sizes[i] > b_sizes[i]:
            raise InputError(f"pair {i + 1} breaks the size premise: {a_sizes[i]} > {b_sizes[i]}")
    alpha = Fact("F", ("alpha",))
    beta = Fact("F", ("beta",))
    a_sets = tuple(
        frozenset({alpha} | {Fact("F", (f"a{i}_{t}",)) for t in range(1, size)})
        for i, size in enumerate(a_sizes, start=1)
    )
    b_sets = tuple(
        frozenset({beta} | {Fact("F", (f"b{i}_{t}",)) for t in range(1, size)})
        for i, size in enumerate(b_sizes, start=1)
    )
    query = ExplicitMonotoneQuery(a_sets + b_sets)
    facts = frozenset({alpha, beta}).union(*a_sets, *b_sets)
    db = PartitionedDatabase(facts, frozenset())
    is_strict = k > l or any(a_sizes[i] < b_sizes[i] for i in range(l))
    return MstestInstance(alpha, beta, a_sets, b_sets, query, db, is_strict)


def loop_tail_instance(k: int):
    """The instance on which homomorphism-count scoring misbehaves: k
    copies of a self-loop plus a two-edge tail. Walks of lengths 1..3
    through a self-loop alpha_i inflate its score, and the tail edge
    gamma collects a positive score despite lying on no support.

    Returns (query, database, parts) with parts holding the alpha_i and
    beta_i lists and the single gamma fact.
    """
    if k < 1:
        raise InputError("need at least one gadget")
    xs = [Variable(f"x{i}") for i in range(4)]
    query = ConjunctiveQuery(tuple(Atom("R", (xs[i], xs[i + 1])) for i in range(3)))
    alphas = [Fact("R", (f"a{i}", f"a{i}")) for i in range(1, k + 1)]
    betas = [Fact("R", (f"a{i}", "b")) for i in range(1, k + 1)]
    gamma = Fact("R", ("b", "c"))
    db = PartitionedDatabase(frozenset(alphas + betas + [gamma]), frozenset())
    return query, db, {"alpha": alphas, "beta": betas, "gamma": gamma}


def check_mstest(measure, instance: MstestInstance) -> AxiomResult:
    """The first fact must score at least the second; strictly when it has
    more supporting sets or some strictly smaller one."""
    score = _resolve_measure(measure)
    sa = score(instance.query, instance.db, instance.alpha)
    sb = score(instance.query, instance.db, instance.beta)
    if instance.is_strict:
        ok = sa > sb
        wanted = "strictly above"
    else:
        ok = sa >= sb
        wanted = "no less than"
    detail = "" if ok else f"expected {sa} to be {wanted} {sb}"
    return AxiomResult("mstest", "pass" if ok else "fail", sa, sb, detail)


def check_null_db(measure, q, db: PartitionedDatabase) -> AxiomResult:
    """Irrelevant endogenous facts must score zero and relevant ones must
    score strictly positive."""
    score = _resolve_measure(measure)
    for fact in db.endogenous_sorted():
        value = score(q, db, fact)
        if is_relevant(q, db, fact):
            if value <= 0:
                return AxiomResult(
                    "null-db", "fail", detail=f"relevant fact {fact} scores {value}"
                )
        elif value != 0:
            return AxiomResult(
                "null-db", "fail", detail=f"irrelevant fact {fact} scores {value}"
            )
    return AxiomResult("null-db", "pass")


def check_wsym(measure, q, db: PartitionedDatabase, alpha: Fact, beta: Fact) -> AxiomResult:
    """When no context set from the database distinguishes the two facts
    under the query, their scores must coincide. Vacuous when the
    interchangeability premise fails."""
    if alpha not in db.all_facts or beta not in db.all_facts:
        raise InputError("both facts must belong to the database")
    if alpha == beta:
        return AxiomResult("wsym", "vacuous", detail="the two facts coincide")
    rest = sorted(db.all_facts - {alpha, beta})
    check_guard(len(rest) + 2, WSYM_GUARD, "database size for the symmetry scan")
    for r in range(len(rest) + 1):
        for combo in combinations(rest, r):
            base = frozenset(combo)
            if evaluate(q, base | {alpha}) != evaluate(q, base | {beta}):
                return AxiomResult(
                    "wsym",
                    "vacuous",
                    detail=f"context {sorted(map(str, combo))} separates the facts",
                )
    score = _resolve_measure(measure)
    sa = score(q, db, alpha)
    sb = score(q, db, beta)
    ok = sa == sb
    detail = "" if ok else f"interchangeable facts score {sa} vs {sb}"
    return AxiomResult("wsym", "pass" if ok else "fail", sa, sb, detail)


# ---------------------------------------------------------------------------
# domination witnesses

@dataclass
class DominationWitness:
    """Certificate that one fact outranks another: an injection f between
    completing-set families, one injection back into each set, and for the
    stronger flavors a global bijection consistent with them."""

    flavor: str  # "a" | "b" | "full"
    f: dict
    eta_s: dict
    eta: dict | None = None


def completing_sets(q, db: PartitionedDatabase, fact: Fact) -> list[frozenset]:
    """Sets S such that S plus the fact is a minimal support."""
    if fact not in db.all_facts:
        raise InputError(f"fact {fact} is not in the database")
    found = [m - {fact} for m in enumerate_minimal_supports(q, db) if fact in m]
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def verify_domination_witness(
    witness: DominationWitness, q, db: PartitionedDatabase, alpha: Fact, beta: Fact
) -> tuple[bool, str | None]:
    """Check each clause in order; report the first one violated."""
    if witness.flavor not in ("a", "b", "full"):
        raise InputError(f"unknown witness flavor {witness.flavor!r}")
    cs_a = set(completing_sets(q, db, alpha))
    cs_b = completing_sets(q, db, beta)
    f = witness.f
    if set(f.keys()) != set(cs_b) or not all(v in cs_a for v in f.values()):
        return False, "completing-set-map"
    if len(set(f.values())) != len(f):
        return False, "completing-set-map"
    for s in cs_b:
        eta_s = witness.eta_s.get(s)
        if eta_s is None or set(eta_s.keys()) != set(f[s]):
            return False, "per-set-injection"
        if not all(v in s for v in eta_s.values()):
            return False, "per-set-injection"
        if len(set(eta_s.values())) != len(eta_s):
            return False, "per-set-injection"
    if witness.flavor == "a":
        return True, None
    eta = witness.eta
    facts = db.all_facts
    if eta is None or set(eta.keys()) != facts - {alpha}:
        return False, "global-bijection"
    if set(eta.values()) != facts - {beta}:
        return False, "global-bijection"
    for s in cs_b:
        for g, target in witness.eta_s[s].items():
            if eta[g] != target:
                return False, "global-bijection"
    if witness.flavor == "b":
        return True, None
    minsups = enumerate_minimal_supports(q, db)
    # a set X avoiding alpha contains a minimal support iff it contains one
    # avoiding alpha, so checking images of those suffices
    for m in minsups:
        if alpha in m:
            continue
        image = frozenset(eta[g] for g in m)
        if not any(other <= image for other in minsups):
            return False, "support-preservation"
    return True, None


def search_domination_witness(
    q, db: PartitionedDatabase, alpha: Fact, beta: Fact, flavor: str = "full"
) -> DominationWitness | None:
    """Exhaustive search in lexicographic order, stopping at the first
    witness that validates."""
    if flavor not in ("a", "b", "full"):
        raise InputError(f"unknown witness flavor {flavor!r}")
    facts = db.all_facts
    if alpha not in facts or beta not in facts:
        raise InputError("both facts must belong to the database")
    cs_a = completing_sets(q, db, alpha)
    cs_b = completing_sets(q, db, beta)
    check_guard(max(len(cs_a), len(cs_b)), WITNESS_CS_GUARD, "completing sets in the witness search")
    check_guard(len(facts), WITNESS_DB_GUARD, "database size for the witness search")
    if len(cs_b) > len(cs_a):
        return None
    minsups = enumerate_minimal_supports(q, db)
    alpha_free = [m for m in minsups if alpha not in m]

    for chosen in permutations(range(len(cs_a)), len(cs_b)):
        f = {cs_b[i]: cs_a[chosen[i]] for i in range(len(cs_b))}
        if any(len(f[s]) > len(s) for s in cs_b):
            continue
        if flavor == "a":
            eta_s = {s: dict(zip(sorted(f[s]), sorted(s))) for s in cs_b}
            witness = DominationWitness("a", f, eta_s)
            ok, _ = verify_domination_witness(witness, q, db, alpha, beta)
            if ok:
                return witness
            continue
        witness = _search_global_map(q, db, alpha, beta, flavor, f, cs_b, minsups, alpha_free)
        if witness is not None:
            return witness
    return None


def _search_global_map(q, db, alpha, beta, flavor, f, cs_b, minsups, alpha_free):
    facts = db.all_facts
    targets = sorted(facts - {beta})
    constrained = sorted(set().union(frozenset(), *f.values()))
    remainder = [g for g in sorted(facts - {alpha}) if g not in set(constrained)]
    order = constrained + remainder
    allowed: dict[Fact, list[Fact]] = {}
    for g in constrained:
        pool = set(targets)
        for s in cs_b:
            if g in f[s]:
                pool &= s
        allowed[g] = sorted(pool)
    for g in remainder:
        allowed[g] = targets
    watchers: dict[Fact, list[frozenset]] = {}
    for m in alpha_free:
        for g in m:
            watchers.setdefault(g, []).append(m)
    assignment: dict[Fact, Fact] = {}
    used: set[Fact] = set()

    def image_keeps_support(m) -> bool:
        image = frozenset(assignment[g] for g in m)
        return any(other <= image for other in minsups)

    def extend(idx: int) -> bool:
        if idx == len(order):
            return True
        g = order[idx]
        for t in allowed[g]:
            if t in used:
                continue
            assignment[g] = t
            used.add(t)
            ok = True
            if flavor == "full":
                for m in watchers.get(g, ()):
                    if all(x in assignment for x in m) and not image_keeps_support(m):
                        ok = False
                        break
            if ok and extend(idx + 1):
                return True
            del assignment[g]
            used.discard(t)
        return False

    if not extend(0):
        return None
    eta = dict(assignment)
    eta_s = {s: {g: eta[g] for g in f[s]} for s in cs_b}
    witness = DominationWitness(flavor, f, eta_s, eta)
    ok, _ = verify_domination_witness(witness, q, db, alpha, beta)
    return witness if ok else None


def canonical_mstest_witness(instance: MstestInstance) -> DominationWitness:
    """The hand construction on a ranking-test instance: pair the i-th
    supporting sets, inject the smaller one into the larger, and take the
    involution that swaps the paired facts (the distinguished two
    included) and fixes everything else."""
    alpha, beta = instance.alpha, instance.beta
    f: dict = {}
    eta_s: dict = {}
    pair = {beta: alpha}
    for a_set, b_set in zip(instance.a_sets, instance.b_sets):
        source = b_set - {beta}
        target = a_set - {alpha}
        f[source] = target
        mapping = dict(zip(sorted(target), sorted(source)))
        eta_s[source] = mapping
        pair.update(mapping)
    inverse = {v: k for k, v in pair.items()}
    eta = {}
    for g in instance.db.all_facts:
        if g == alpha:
            continue
        eta[g] = pair.get(g, inverse.get(g, g))
    return DominationWitness("full", f, eta_s, eta)
