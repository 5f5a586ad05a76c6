import random

import pytest

import oracles
from minsup.errors import GuardExceeded, InputError
from minsup.model import Fact, PartitionedDatabase, parse_database
from minsup.queries import ExplicitMonotoneQuery, parse_query
from minsup.supports import (
    count_fms,
    count_ms,
    enumerate_minimal_supports,
    fms_vector,
    generate_matching_instance,
    generate_vertex_cover_instance,
    is_relevant,
)

CYCLE3 = frozenset({Fact("R", ("a", "b")), Fact("R", ("b", "c")), Fact("R", ("c", "a"))})


def test_cycle_has_one_minimal_support():
    q = parse_query("q :- R(x,y), R(y,z), R(z,w).")
    assert enumerate_minimal_supports(q, CYCLE3) == [CYCLE3]
    assert count_ms(q, CYCLE3) == 1


def test_non_minimal_generator_dropped():
    f1, f2 = Fact("R", ("a",)), Fact("R", ("b",))
    q = ExplicitMonotoneQuery((frozenset({f1}), frozenset({f1, f2})))
    assert enumerate_minimal_supports(q, {f1, f2}) == [frozenset({f1})]


def test_minimal_supports_match_oracle():
    rnd = random.Random(41)
    for _ in range(50):
        q = oracles.random_ucq(rnd, allow_constants=True)
        db = oracles.random_database(rnd)
        got = enumerate_minimal_supports(q, db.all_facts)
        want = oracles.minimal_supports(q, db.all_facts)
        assert sorted(map(sorted, got)) == sorted(map(sorted, want))


def test_fms_vector_consistency():
    rnd = random.Random(43)
    for _ in range(30):
        q = oracles.random_ucq(rnd)
        db = oracles.random_database(rnd)
        vec = fms_vector(q, db.all_facts)
        by_size = oracles.support_counts_by_size(q, db.all_facts)
        for k in range(len(db.all_facts) + 2):
            assert vec.count(k) == by_size.get(k, 0)
            assert count_fms(q, db.all_facts, k) == by_size.get(k, 0)
        assert vec.total == count_ms(q, db.all_facts)
        assert vec.count(0) == 0  # queries here are never satisfied by {}


def test_sjf_answer_count_equals_support_count():
    rnd = random.Random(47)
    checked = 0
    for _ in range(60):
        q = oracles.random_cq(rnd, relations=(("R", 2), ("S", 2), ("T", 1)))
        rels = [a.relation for a in q.relational_atoms]
        if len(set(rels)) != len(rels):
            continue
        db = oracles.random_database(rnd)
        n_atoms = len(q.relational_atoms)
        hom_count = oracles.count_answers(q, db.all_facts)
        assert count_fms(q, db.all_facts, n_atoms) == hom_count
        for k in range(len(db.all_facts) + 1):
            if k != n_atoms:
                assert count_fms(q, db.all_facts, k) == 0
        checked += 1
    assert checked >= 10


def test_is_relevant():
    q = parse_query("q :- R(x,y), R(y,z), R(z,w).")
    db = PartitionedDatabase(endogenous=CYCLE3, exogenous=frozenset())
    assert all(is_relevant(q, db, f) for f in CYCLE3)
    db2 = PartitionedDatabase(
        endogenous=CYCLE3 | {Fact("S", ("a", "b"))}, exogenous=frozenset()
    )
    assert not is_relevant(q, db2, Fact("S", ("a", "b")))


def test_relevance_of_singleton_support():
    q = parse_query("q :- T(x).")
    db = parse_database("T(a)\nR(a,b)")
    assert is_relevant(q, db, Fact("T", ("a",)))
    assert not is_relevant(q, db, Fact("R", ("a", "b")))


def test_matching_instance_k22():
    q, db = generate_matching_instance(2, [(1, 1), (1, 2), (2, 1), (2, 2)])
    assert count_ms(q, db.all_facts) == 2 + oracles.count_perfect_matchings(
        2, [(0, 0), (0, 1), (1, 0), (1, 1)]
    )


def test_matching_instance_small_cases():
    q, db = generate_matching_instance(1, [])
    assert count_ms(q, db.all_facts) == 1
    q, db = generate_matching_instance(1, [(1, 1)])
    assert count_ms(q, db.all_facts) == 2


def test_matching_instance_random_graphs():
    rnd = random.Random(53)
    for _ in range(8):
        n = rnd.randint(1, 2)
        edges = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)
                 if rnd.random() < 0.6]
        q, db = generate_matching_instance(n, edges)
        pm = oracles.count_perfect_matchings(n, [(i - 1, j - 1) for i, j in edges])
        assert count_ms(q, db.all_facts) == n + pm


def test_vertex_cover_instance_shape():
    q, db = generate_vertex_cover_instance(["u", "v", "w"], [("u", "v"), ("v", "w"), ("u", "w")])
    assert len(db.endogenous) == 3
    assert len(db.exogenous) == 3
    assert oracles.min_vertex_cover_size(["u", "v", "w"], [("u", "v"), ("v", "w"), ("u", "w")]) == 2


def test_lattice_guard():
    facts = frozenset(Fact("E", (f"n{i}", f"n{i+1}")) for i in range(23))
    q = parse_query("rpq n0 n1 : E")
    with pytest.raises(GuardExceeded):
        enumerate_minimal_supports(q, facts)


def test_guard_override(monkeypatch):
    monkeypatch.setenv("MINSUP_GUARD_OVERRIDE", "1")
    facts = frozenset(Fact("E", (f"n{i}", f"n{i+1}")) for i in range(23))
    q = ExplicitMonotoneQuery((frozenset({Fact("E", ("n0", "n1"))}),))
    assert enumerate_minimal_supports(q, facts) == [frozenset({Fact("E", ("n0", "n1"))})]


def test_matching_rejects_bad_vertex():
    with pytest.raises(InputError):
        generate_matching_instance(2, [(0, 5)])
