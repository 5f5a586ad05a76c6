import random
from fractions import Fraction

import pytest

import oracles
from minsup.errors import InputError
from minsup.games import CoefficientSpec, score_all_game
from minsup.model import Fact, PartitionedDatabase, parse_database
from minsup.queries import ExplicitMonotoneQuery, parse_query
from minsup.supports import count_ms
from minsup.weights import (
    WeightFunction,
    decode_reversible,
    parse_weight_table,
    score_all,
    wsms_direct,
    wsms_via_countfms,
    zeta_wealth,
)

ORACLE_WEIGHTS = {
    "invw": oracles.weight_invw,
    "s": oracles.weight_s,
    "sharp": oracles.weight_sharp,
}


def test_weight_values():
    n = 5
    assert WeightFunction("invw").weight(3, n) == Fraction(1, 3)
    assert WeightFunction("s").weight(2, n) == Fraction(1, 2 ** 10)
    assert WeightFunction("sharp").weight(2, n) == 1 + Fraction(1, 2 ** 10)


def test_weights_positive_and_decreasing():
    for kind in ("invw", "s", "sharp"):
        w = WeightFunction(kind)
        for n in range(1, 8):
            values = [w.weight(k, n) for k in range(1, n + 1)]
            assert all(v > 0 for v in values)
            assert all(a > b for a, b in zip(values, values[1:]))


def test_weight_argument_validation():
    w = WeightFunction("invw")
    with pytest.raises(InputError):
        w.weight(0, 3)
    with pytest.raises(InputError):
        w.weight(4, 3)
    with pytest.raises(InputError):
        WeightFunction("nope")


def test_custom_table_requires_all_entries():
    table = parse_weight_table({"1,1": "1", "1,2": "1/2", "2,2": "1/4"})
    w = WeightFunction("custom", table)
    w.validate_for(2)
    with pytest.raises(InputError):
        w.validate_for(3)


def test_parse_weight_table_rejects_garbage():
    with pytest.raises(InputError):
        parse_weight_table({"one,two": "1"})
    with pytest.raises(InputError):
        parse_weight_table({"1,1": "abc"})


def test_forced_example():
    # minimal supports {alpha} and {beta, gamma}
    alpha, beta, gamma = Fact("A", ("a",)), Fact("B", ("b",)), Fact("C", ("c",))
    q = ExplicitMonotoneQuery((frozenset({alpha}), frozenset({beta, gamma})))
    db = PartitionedDatabase(frozenset({alpha, beta, gamma}), frozenset())
    w = WeightFunction("invw")
    assert wsms_direct(q, db, alpha, w) == 1
    assert wsms_direct(q, db, beta, w) == Fraction(1, 2)


def test_zero_when_exogenous_satisfies():
    q = parse_query("q :- T(x).")
    db = parse_database("T(a)\n*T(b)")
    for kind in ("invw", "s", "sharp"):
        assert wsms_direct(q, db, Fact("T", ("a",)), WeightFunction(kind)) == 0


def test_exogenous_fact_rejected():
    q = parse_query("q :- T(x).")
    db = parse_database("T(a)\n*T(b)")
    with pytest.raises(InputError):
        wsms_direct(q, db, Fact("T", ("b",)), WeightFunction("invw"))
    with pytest.raises(InputError):
        wsms_direct(q, db, Fact("T", ("zz",)), WeightFunction("invw"))


def test_paths_agree_and_match_oracle():
    rnd = random.Random(59)
    for _ in range(30):
        q = oracles.random_ucq(rnd)
        db = oracles.random_database(rnd, max_endo=6, max_exo=2)
        for kind in ("invw", "s", "sharp"):
            w = WeightFunction(kind)
            batch = score_all(q, db, w)
            for f in db.endogenous:
                direct = wsms_direct(q, db, f, w)
                assert direct == wsms_via_countfms(q, db, f, w)
                assert direct == batch[f]
                assert direct == oracles.wsms_score(q, db, f, ORACLE_WEIGHTS[kind])


def test_irrelevant_scores_zero_relevant_positive():
    rnd = random.Random(61)
    q = parse_query("q :- R(x,y), R(y,z).")
    for _ in range(20):
        db = oracles.random_database(rnd, relations=(("R", 2),))
        if oracles.holds(q, db.exogenous):
            continue
        w = WeightFunction("invw")
        supports = oracles.minimal_supports(q, db.all_facts)
        for f in db.endogenous:
            score = wsms_direct(q, db, f, w)
            if any(f in m for m in supports):
                assert score > 0
            else:
                assert score == 0


def test_decode_reversible():
    rnd = random.Random(67)
    done = 0
    while done < 20:
        q = oracles.random_ucq(rnd)
        db = oracles.random_database(rnd, max_endo=6, max_exo=0)
        if not db.all_facts or db.exogenous:
            continue
        total = count_ms(q, db.all_facts)
        d = len(db.all_facts)
        for kind in ("invw", "s", "sharp"):
            scores = score_all(q, db, WeightFunction(kind))
            assert decode_reversible(scores, kind, d) == total
        done += 1


def test_sharp_floor_is_support_count():
    rnd = random.Random(71)
    for _ in range(15):
        q = oracles.random_ucq(rnd)
        db = oracles.random_database(rnd, max_endo=6, max_exo=2)
        if oracles.holds(q, db.exogenous):
            continue
        scores = score_all(q, db, WeightFunction("sharp"))
        supports = oracles.minimal_supports(q, db.all_facts)
        for f, v in scores.items():
            assert v.numerator // v.denominator == sum(1 for m in supports if f in m)


def test_decode_rejects_foreign_scores():
    alpha = Fact("A", ("a",))
    with pytest.raises(InputError):
        decode_reversible({alpha: Fraction(3, 7)}, "s", 1)


def test_zeta_wealth_reproduces_wsms():
    rnd = random.Random(73)
    done = 0
    while done < 10:
        q = oracles.random_ucq(rnd)
        db = oracles.random_database(rnd, max_endo=5, max_exo=1)
        if oracles.holds(q, db.exogenous):
            continue
        for kind in ("invw", "s"):
            w = WeightFunction(kind)
            for coeff_kind in ("shapley", "banzhaf"):
                coeff = CoefficientSpec(coeff_kind)
                spec = zeta_wealth(q, db, w, coeff)
                game_scores = score_all_game(spec, coeff)
                for f in db.endogenous:
                    assert game_scores[f] == wsms_direct(q, db, f, w)
        done += 1


def test_zeta_wealth_no_supports():
    q = parse_query("q :- T(x).")
    db = parse_database("R(a,b)")
    spec = zeta_wealth(q, db, WeightFunction("invw"), CoefficientSpec("shapley"))
    scores = score_all_game(spec, CoefficientSpec("shapley"))
    assert all(v == 0 for v in scores.values())
