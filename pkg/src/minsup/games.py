"""Cooperative games over the endogenous facts and their subset-weighted
value shares.

A wealth function assigns a value to every subset of the endogenous part;
scores distribute that wealth over the facts through coefficient-weighted
marginal contributions (Shapley, Banzhaf, or caller-supplied weights).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable

from .errors import InputError, check_guard
from .model import Fact, PartitionedDatabase
from .queries import (
    ConjunctiveQuery,
    Query,
    UnionQuery,
    enumerate_homomorphisms,
    evaluate,
    induced_support,
)
from .supports import enumerate_minimal_supports

GAME_GUARD = 22
MC_GUARD = 18
PERMUTATION_GUARD = factorial(9)

WEALTH_KINDS = ("drastic", "ms", "sa", "p", "mc", "r", "explicit")
COEFFICIENT_KINDS = ("shapley", "banzhaf", "custom")


class CoefficientSpec:
    """Weight c(j, m) applied to the marginal contribution to coalitions
    of size j among m players."""

    def __init__(self, kind: str, table: dict[tuple[int, int], Fraction] | None = None):
        if kind not in COEFFICIENT_KINDS:
            raise InputError(f"unknown coefficient kind {kind!r}")
        if kind == "custom" and table is None:
            raise InputError("custom coefficients need a table")
        self.kind = kind
        self.table = dict(table) if table else None

    def coefficient(self, j: int, m: int) -> Fraction:
        if self.kind == "shapley":
            return Fraction(factorial(j) * factorial(m - j - 1), factorial(m))
        if self.kind == "banzhaf":
            return Fraction(1)
        try:
            return Fraction(self.table[(j, m)])
        except KeyError:
            raise InputError(f"custom coefficient table is missing c({j},{m})") from None


def _popcount(x: int) -> int:
    return x.bit_count()


class WealthSpec:
    """A wealth function over subsets of the endogenous facts.

    Query-backed kinds precompute, from the minimal supports of the whole
    database, whatever lets each subset be valued with bit operations.
    The wealth of the empty set must be 0; this is checked here.
    """

    def __init__(
        self,
        kind: str,
        db: PartitionedDatabase,
        query: Query | None = None,
        explicit_fn: Callable[[frozenset[Fact]], Fraction] | None = None,
    ):
        if kind not in WEALTH_KINDS:
            raise InputError(f"unknown wealth kind {kind!r}")
        self.kind = kind
        self.db = db
        self.query = query
        self.explicit_fn = explicit_fn
        self.players: list[Fact] = sorted(db.endogenous)
        self.index = {f: i for i, f in enumerate(self.players)}
        self._memo: dict[int, Fraction | int] = {}

        if kind == "explicit":
            if explicit_fn is None:
                raise InputError("explicit wealth needs a callable")
        else:
            if query is None:
                raise InputError(f"wealth kind {kind!r} needs a query")
            self._prepare_query_backed()

        empty = self.value_of_mask(0)
        if empty != 0:
            raise InputError(f"wealth of the empty set must be 0, got {empty}")

    # -- construction helpers

    def _mask_of_endo(self, facts: Iterable[Fact]) -> int:
        m = 0
        for f in facts:
            m |= 1 << self.index[f]
        return m

    def _prepare_query_backed(self) -> None:
        q, db = self.query, self.db
        if self.kind in ("p", "mc") and db.exogenous:
            raise InputError(f"wealth kind {self.kind!r} needs a purely endogenous database")
        if self.kind == "sa" and not isinstance(q, (ConjunctiveQuery, UnionQuery)):
            raise InputError("homomorphism-count wealth needs a conjunctive query or union")
        self.exo_satisfies = evaluate(q, db.exogenous)
        if self.kind == "r" and self.exo_satisfies:
            raise InputError("removal-cost wealth needs the exogenous part alone to falsify the query")

        minsups = enumerate_minimal_supports(q, db.all_facts)
        # endogenous footprint of each minimal support, with its total size
        self.minsup_masks: list[tuple[int, int]] = []
        for m in minsups:
            endo_part = [f for f in m if f in self.index]
            self.minsup_masks.append((self._mask_of_endo(endo_part), len(m)))

        if self.kind == "sa":
            self.hom_masks: list[int] = []
            if not self.exo_satisfies:
                disjuncts = q.disjuncts if isinstance(q, UnionQuery) else (q,)
                for d in disjuncts:
                    for hom in enumerate_homomorphisms(d, db.all_facts):
                        endo_part = [
                            f for f in induced_support(hom, d) if f in self.index
                        ]
                        self.hom_masks.append(self._mask_of_endo(endo_part))

    # -- evaluation

    def mask_of(self, subset: Iterable[Fact]) -> int:
        mask = 0
        for f in subset:
            idx = self.index.get(f)
            if idx is None:
                raise InputError(f"fact {f} is not endogenous")
            mask |= 1 << idx
        return mask

    def value_of_mask(self, mask: int):
        memo = self._memo
        if mask in memo:
            return memo[mask]
        value = self._compute(mask)
        memo[mask] = value
        return value

    def _compute(self, mask: int):
        kind = self.kind
        if kind == "explicit":
            subset = frozenset(f for f in self.players if mask & (1 << self.index[f]))
            try:
                value = self.explicit_fn(subset)
            except KeyError:
                raise InputError(
                    f"explicit wealth is undefined for subset {sorted(map(str, subset))}"
                ) from None
            return Fraction(value)
        if kind == "drastic":
            if self.exo_satisfies:
                return 0
            return 1 if any(m & mask == m for m, _ in self.minsup_masks) else 0
        if kind == "ms":
            if self.exo_satisfies:
                return 0
            return sum(
                (
                    Fraction(_popcount(m), size)
                    for m, size in self.minsup_masks
                    if m & mask == m
                ),
                Fraction(0),
            )
        if kind == "sa":
            if self.exo_satisfies:
                return 0
            return sum(1 for m in self.hom_masks if m & mask == m)
        if kind == "p":
            covered = 0
            for m, _ in self.minsup_masks:
                if m & mask == m:
                    covered |= m
            return _popcount(covered)
        if kind == "mc":
            return self._mc(mask)
        if kind == "r":
            return self._r(mask)
        raise AssertionError(kind)

    def _contained_masks(self, mask: int) -> list[int]:
        return [m for m, _ in self.minsup_masks if m & mask == m]

    def _mc(self, mask: int) -> int:
        check_guard(_popcount(mask), MC_GUARD, "maximal non-satisfying subset enumeration")
        inside = self._contained_masks(mask)
        singletons = sum(1 for m in inside if _popcount(m) == 1)
        bits = [1 << i for i in range(len(self.players)) if mask & (1 << i)]

        def satisfies(sub: int) -> bool:
            return any(m & sub == m for m in inside)

        # Counts maximal non-satisfying subsets strictly below the coalition.
        # A non-satisfying coalition is its own unique maximal subset, so it
        # scores 0; this keeps wealth({}) == 0 without a global offset.
        maximal = 0
        for pick in range(1 << len(bits)):
            sub = 0
            for i, b in enumerate(bits):
                if pick & (1 << i):
                    sub |= b
            if sub == mask or satisfies(sub):
                continue
            if all(satisfies(sub | b) for b in bits if not sub & b):
                maximal += 1
        return maximal + singletons

    def _r(self, mask: int) -> int:
        inside = self._contained_masks(mask)
        if not inside:
            return 0
        union = 0
        for m in inside:
            union |= m
        bits = [1 << i for i in range(len(self.players)) if union & (1 << i)]
        for size in range(1, len(bits) + 1):
            for combo in itertools.combinations(bits, size):
                gamma = 0
                for b in combo:
                    gamma |= b
                if all(m & gamma for m in inside):
                    return size
        raise AssertionError("a full removal always suffices")


def wealth(spec: WealthSpec, subset: Iterable[Fact]):
    """Value of a subset of the endogenous facts."""
    return spec.value_of_mask(spec.mask_of(subset))


def _coefficients_by_size(coeff: CoefficientSpec, m: int) -> list[Fraction]:
    return [coeff.coefficient(j, m) for j in range(m)] if m else []


def shapley_like(spec: WealthSpec, coeff: CoefficientSpec, fact: Fact) -> Fraction:
    """Coefficient-weighted sum of the fact's marginal contributions over
    all coalitions of the other endogenous facts."""
    idx = spec.index.get(fact)
    if idx is None:
        raise InputError(f"fact {fact} is not endogenous")
    n = len(spec.players)
    check_guard(n, GAME_GUARD, "cooperative game subset enumeration")
    coeffs = _coefficients_by_size(coeff, n)
    bit = 1 << idx
    total = Fraction(0)
    for mask in range(1 << n):
        if mask & bit:
            continue
        delta = spec.value_of_mask(mask | bit) - spec.value_of_mask(mask)
        if delta:
            total += coeffs[_popcount(mask)] * delta
    return total


def score_all_game(
    spec: WealthSpec, coeff: CoefficientSpec, jobs: int = 1
) -> dict[Fact, Fraction]:
    """Score every endogenous fact, sharing one memo table of wealth
    values. The jobs parameter may parallelize the per-fact loop; the
    result does not depend on it."""
    n = len(spec.players)
    check_guard(n, GAME_GUARD, "cooperative game subset enumeration")
    if jobs > 1 and n > 1:
        # materialize wealth values once, then split facts across threads
        for mask in range(1 << n):
            spec.value_of_mask(mask)
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(lambda f: shapley_like(spec, coeff, f), spec.players))
        return dict(zip(spec.players, scores))
    return {f: shapley_like(spec, coeff, f) for f in spec.players}


def shapley_permutation_form(spec: WealthSpec, fact: Fact) -> Fraction:
    """Shapley value computed from first principles as the average marginal
    contribution over all orderings of the endogenous facts."""
    idx = spec.index.get(fact)
    if idx is None:
        raise InputError(f"fact {fact} is not endogenous")
    n = len(spec.players)
    check_guard(factorial(n), PERMUTATION_GUARD, "permutation enumeration")
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        before = 0
        for i in perm:
            if i == idx:
                break
            before |= 1 << i
        total += spec.value_of_mask(before | (1 << idx)) - spec.value_of_mask(before)
    return total / factorial(n)
