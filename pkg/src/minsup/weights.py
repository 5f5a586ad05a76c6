"""Weighted sums over minimal supports.

A fact's score is the sum, over the minimal supports containing it, of a
weight depending on the support's size and the database size; the whole
family is zero when the exogenous part alone already satisfies the query.
Three stock weights are provided: the reciprocal of the support size, the
vanishing weight 2^(-k*n), and 1 plus that; callers may also supply a
weight table. The two vanishing-weight variants make the score vector
reversible: the per-size support counts can be decoded back out of the
scores of a purely endogenous database.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb

from .errors import InputError
from .games import WealthSpec, CoefficientSpec
from .model import Fact, PartitionedDatabase
from .queries import Query, evaluate
from .supports import enumerate_minimal_supports, fms_vector

WEIGHT_KINDS = ("invw", "s", "sharp", "custom")

_TABLE_KEY = re.compile(r"\s*(\d+)\s*,\s*(\d+)\s*\Z")


class WeightFunction:
    def __init__(self, kind: str, table: dict[tuple[int, int], Fraction] | None = None):
        if kind not in WEIGHT_KINDS:
            raise InputError(f"unknown weight kind {kind!r}")
        if kind == "custom" and not table:
            raise InputError("custom weights need a table")
        self.kind = kind
        self.table = dict(table) if table else None

    def weight(self, k: int, n: int) -> Fraction:
        if k < 1 or n < k:
            raise InputError(f"weight is defined for 1 <= k <= n, got k={k}, n={n}")
        if self.kind == "invw":
            return Fraction(1, k)
        if self.kind == "s":
            return Fraction(1, 2 ** (k * n))
        if self.kind == "sharp":
            return 1 + Fraction(1, 2 ** (k * n))
        try:
            return Fraction(self.table[(k, n)])
        except KeyError:
            raise InputError(f"custom weight table is missing w({k},{n})") from None

    def validate_for(self, n_total: int) -> None:
        """A custom table must cover every pair 1 <= k <= n <= n_total."""
        if self.kind != "custom":
            return
        missing = [
            (k, n)
            for n in range(1, n_total + 1)
            for k in range(1, n + 1)
            if (k, n) not in self.table
        ]
        if missing:
            raise InputError(f"custom weight table is missing w{missing[0]}")


def parse_weight_table(data: dict) -> dict[tuple[int, int], Fraction]:
    """Weight tables are JSON objects mapping 'k,n' keys to rationals
    written as 'num/den' strings or numbers."""
    if not isinstance(data, dict):
        raise InputError("weight table must be a JSON object")
    table: dict[tuple[int, int], Fraction] = {}
    for key, value in data.items():
        m = _TABLE_KEY.match(str(key))
        if m is None:
            raise InputError(f"weight table key {key!r} is not of the form 'k,n'")
        k, n = int(m.group(1)), int(m.group(2))
        try:
            table[(k, n)] = Fraction(str(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"weight table entry {key!r}: {exc}") from None
    return table


def _require_endogenous(db: PartitionedDatabase, fact: Fact) -> None:
    if fact in db.exogenous:
        raise InputError(f"fact {fact} is exogenous; scores are defined for endogenous facts")
    if fact not in db.endogenous:
        raise InputError(f"fact {fact} is not in the database")


def wsms_direct(q: Query, db: PartitionedDatabase, fact: Fact, w: WeightFunction) -> Fraction:
    """Score by direct enumeration of the minimal supports."""
    _require_endogenous(db, fact)
    d_total = len(db.all_facts)
    w.validate_for(d_total)
    if evaluate(q, db.exogenous):
        return Fraction(0)
    total = Fraction(0)
    for m in enumerate_minimal_supports(q, db.all_facts):
        if fact in m:
            total += w.weight(len(m), d_total)
    return total


def wsms_via_countfms(q: Query, db: PartitionedDatabase, fact: Fact, w: WeightFunction) -> Fraction:
    """Score from the per-size support counts of D and of D minus the
    fact; the weights still use the full database size."""
    _require_endogenous(db, fact)
    d_total = len(db.all_facts)
    w.validate_for(d_total)
    if evaluate(q, db.exogenous):
        return Fraction(0)
    with_fact = fms_vector(q, db.all_facts)
    without_fact = fms_vector(q, db.all_facts - {fact})
    total = Fraction(0)
    for k in range(1, d_total + 1):
        diff = with_fact.count(k) - without_fact.count(k)
        if diff:
            total += diff * w.weight(k, d_total)
    return total


def score_all(q: Query, db: PartitionedDatabase, w: WeightFunction) -> dict[Fact, Fraction]:
    """Score every endogenous fact from a single minimal-support pass."""
    d_total = len(db.all_facts)
    w.validate_for(d_total)
    scores = {f: Fraction(0) for f in sorted(db.endogenous)}
    if evaluate(q, db.exogenous):
        return scores
    for m in enumerate_minimal_supports(q, db.all_facts):
        wk = w.weight(len(m), d_total)
        for f in m:
            if f in scores:
                scores[f] += wk
    return scores


# ---------------------------------------------------------------------------
# decoding support counts back out of score vectors

def _decode_fields(x: Fraction, d: int) -> list[int]:
    """Split a vanishing-weight score into its d bit fields; fields[k-1]
    is the number of size-k minimal supports through the fact."""
    if x < 0 or x >= 1:
        raise InputError(f"malformed score vector: {x} is not in [0, 1)")
    fields = []
    for k in range(1, d + 1):
        shifted = x * 2 ** (k * d)
        field = int(shifted) % (2 ** d)
        fields.append(field)
    if sum(Fraction(f, 2 ** (k * d)) for k, f in enumerate(fields, start=1)) != x:
        raise InputError("malformed score vector: bits overflow field width")
    for k, f in enumerate(fields, start=1):
        if f > comb(d - 1, k - 1):
            raise InputError("malformed score vector: bits overflow field width")
    return fields


def decode_reversible(scores: dict[Fact, Fraction], kind: str, d_total: int) -> int:
    """Recover the total number of minimal supports from the score vector
    of a purely endogenous database of d_total facts."""
    if len(scores) != d_total:
        raise InputError(
            f"decoding needs one score per fact of a purely endogenous database "
            f"({len(scores)} scores for |D| = {d_total})"
        )
    if d_total == 0:
        return 0
    if kind == "invw":
        total = sum(scores.values(), Fraction(0))
        if total.denominator != 1:
            raise InputError(f"malformed score vector: total {total} is not an integer")
        return int(total)
    if kind not in ("s", "sharp"):
        raise InputError(f"weight kind {kind!r} is not reversible")
    per_size = [0] * (d_total + 1)
    for fact in sorted(scores):
        x = scores[fact]
        if kind == "sharp":
            whole = x.numerator // x.denominator
            frac = x - whole
            fields = _decode_fields(frac, d_total)
            if whole != sum(fields):
                raise InputError(
                    f"malformed score vector: integer part of {fact} disagrees "
                    "with its bit fields"
                )
        else:
            fields = _decode_fields(x, d_total)
        for k, f in enumerate(fields, start=1):
            per_size[k] += f
    total = 0
    for k in range(1, d_total + 1):
        if per_size[k] % k != 0:
            raise InputError(
                f"malformed score vector: size-{k} field total {per_size[k]} "
                f"is not divisible by {k}"
            )
        total += per_size[k] // k
    return total


# ---------------------------------------------------------------------------
# the wealth function whose Shapley-like scores reproduce these measures

def zeta_wealth(
    q: Query, db: PartitionedDatabase, w: WeightFunction, coeff: CoefficientSpec
) -> WealthSpec:
    """Wealth function over endogenous subsets whose coefficient-weighted
    scores coincide with the weighted minimal-support scores.

    Each minimal support M contributes, to every subset containing its
    endogenous part, its weight divided by the total coefficient mass the
    contribution gets spread over. Coefficients must be positive."""
    n_endo = len(db.endogenous)
    d_total = len(db.all_facts)
    w.validate_for(d_total)
    for j in range(n_endo):
        if coeff.coefficient(j, n_endo) <= 0:
            raise InputError(
                f"this wealth construction needs positive coefficients; "
                f"c({j},{n_endo}) is not"
            )
    if evaluate(q, db.exogenous):
        return WealthSpec("explicit", db, explicit_fn=lambda subset: Fraction(0))

    contributions: list[tuple[frozenset[Fact], Fraction]] = []
    for m in enumerate_minimal_supports(q, db.all_facts):
        endo_part = frozenset(m) & db.endogenous
        mn = len(endo_part)
        denom = sum(
            (
                comb(n_endo - mn, k - mn + 1) * coeff.coefficient(k, n_endo)
                for k in range(mn - 1, n_endo)
            ),
            Fraction(0),
        )
        contributions.append((endo_part, w.weight(len(m), d_total) / denom))

    def fn(subset: frozenset[Fact]) -> Fraction:
        return sum(
            (gamma for part, gamma in contributions if part <= subset),
            Fraction(0),
        )

    return WealthSpec("explicit", db, explicit_fn=fn)
