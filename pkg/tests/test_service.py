from fractions import Fraction

from fastapi.testclient import TestClient

import minsup
from minsup.service import app

client = TestClient(app)

PATH_DB = "R(a,b)\nR(b,c)\n"
PATH_Q = "q :- R(x,y), R(y,z).\n"


def post(path, **payload):
    return client.post(path, json=payload)


def test_health():
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body == {"schema": 1, "status": "ok", "version": minsup.__version__}


# ---------------------------------------------------------------------------
# scoring

def test_score_rows():
    resp = post("/v1/score", database=PATH_DB, query=PATH_Q, measure="ms")
    assert resp.status_code == 200
    body = resp.json()
    assert body["schema"] == 1 and body["measure"] == "ms"
    assert body["rows"] == [
        {"fact": "R(a,b)", "score": "1/2", "floor": 0, "decimal": "0.5"},
        {"fact": "R(b,c)", "score": "1/2", "floor": 0, "decimal": "0.5"},
    ]


def test_score_sorts_by_score_then_fact():
    db = "R(a,a)\nR(a,b)\nR(b,c)\n"
    resp = post("/v1/score", database=db, query=PATH_Q, measure="ms")
    rows = resp.json()["rows"]
    keys = [(-Fraction(row["score"]), row["fact"]) for row in rows]
    assert keys == sorted(keys)
    # the self loop sits on more supports than the tail edges
    assert rows[0]["fact"] == "R(a,a)"


def test_score_fact_filter():
    resp = post("/v1/score", database=PATH_DB, query=PATH_Q, facts=["R(a,b)"])
    rows = resp.json()["rows"]
    assert [row["fact"] for row in rows] == ["R(a,b)"]
    resp = post("/v1/score", database=PATH_DB, query=PATH_Q, facts=["R(z,z)"])
    assert resp.status_code == 400
    resp = post("/v1/score", database="R(a,b)\n*R(b,c)\n", query=PATH_Q, facts=["R(b,c)"])
    assert resp.status_code == 400  # exogenous facts carry no score


def test_score_custom_weights():
    resp = post(
        "/v1/score",
        database=PATH_DB,
        query=PATH_Q,
        measure="wsms-custom",
        weight_table={"1,1": "1/3", "1,2": "1/3", "2,2": "1/9"},
    )
    assert resp.status_code == 200
    assert {row["score"] for row in resp.json()["rows"]} == {"1/9"}


def test_score_input_errors():
    assert post("/v1/score", database=PATH_DB, query=PATH_Q, measure="zzz").status_code == 400
    assert post("/v1/score", database="R(a\n", query=PATH_Q).status_code == 400
    assert post("/v1/score", database=PATH_DB, query=PATH_Q, measure="wsms-custom").status_code == 400
    assert post("/v1/score", database=PATH_DB).status_code == 422  # missing field


def test_score_guard_maps_to_413():
    big = "".join(f"R(a{i},b{i})\n" for i in range(23))
    resp = post("/v1/score", database=big, query="q :- R(x,y).", measure="drastic-shapley")
    assert resp.status_code == 413
    assert "error" in resp.json()


# ---------------------------------------------------------------------------
# counting

def test_count_ms():
    db = "R(a,b)\nR(b,a)\nR(c,c)\n"
    resp = post("/v1/count-ms", database=db, query="q :- R(x,y), R(y,x).")
    body = resp.json()
    assert body["count"] == 2
    assert body["by_size"] == {"1": 1, "2": 1}
    assert "supports" not in body


def test_count_ms_with_supports():
    resp = post("/v1/count-ms", database=PATH_DB, query=PATH_Q, include_supports=True)
    body = resp.json()
    assert body["count"] == 1
    assert body["supports"] == [["R(a,b)", "R(b,c)"]]


def test_count_fms():
    resp = post("/v1/count-fms", database=PATH_DB, query=PATH_Q, k=2)
    assert resp.json()["count"] == 1
    resp = post("/v1/count-fms", database=PATH_DB, query=PATH_Q, k=1)
    assert resp.json()["count"] == 0
    assert post("/v1/count-fms", database=PATH_DB, query=PATH_Q, k=0).status_code == 400


# ---------------------------------------------------------------------------
# rewriting

def test_rewrite_sql():
    resp = post("/v1/rewrite-sql", query=PATH_Q, k=2)
    body = resp.json()
    assert body["k"] == 2
    assert "SELECT COUNT(*)" in body["sql"]
    assert all("gamma" in piece and "query" in piece for piece in body["pieces"])
    assert post("/v1/rewrite-sql", query="rpq a b : R", k=2).status_code == 400


def test_rewrite_sql_schema_mismatch():
    resp = post("/v1/rewrite-sql", query=PATH_Q, k=2, relation_schema={"R": 1})
    assert resp.status_code == 400
    resp = post("/v1/rewrite-sql", query=PATH_Q, k=2, relation_schema={"S": 2})
    assert resp.status_code == 400
    resp = post("/v1/rewrite-sql", query=PATH_Q, k=2, relation_schema={"R": 2})
    assert resp.status_code == 200


# ---------------------------------------------------------------------------
# path queries

def test_rpq_classification_only():
    resp = post("/v1/rpq", query="rpq c d : R.R*")
    body = resp.json()
    assert body["classification"] == "hard"
    assert body["states"] >= 2
    assert "rows" not in body


def test_rpq_with_scores():
    resp = post("/v1/rpq", query="rpq a c : R.R", database=PATH_DB, measure="ms")
    body = resp.json()
    assert body["classification"] == "tractable-finite"
    assert {row["score"] for row in body["rows"]} == {"1/2"}


def test_rpq_rejections():
    assert post("/v1/rpq", query="q :- R(x,y).").status_code == 400
    assert (
        post("/v1/rpq", query="rpq a c : R", database=PATH_DB, measure="drastic-shapley").status_code
        == 400
    )


# ---------------------------------------------------------------------------
# analysis

def test_analyze():
    resp = post("/v1/analyze", query=PATH_Q)
    body = resp.json()
    assert body["acyclic"] is True
    assert body["self_join_free"] is False
    assert body["self_join_width"] == 3
    assert body["unifiable_pairs"] == [["R(x,y)", "R(y,z)"]]
    assert body["core"] == "R(x,y), R(y,z)"
    assert isinstance(body["hom_equals_minsup"], bool)
    assert post("/v1/analyze", query="rpq a b : R").status_code == 400


# ---------------------------------------------------------------------------
# axiom sweeps

def test_axioms_report():
    resp = post("/v1/axioms", seed=7, count=3, measures=["ms", "drastic-shapley"])
    body = resp.json()
    rows = body["rows"]
    keys = {"axiom", "instance_id", "measure", "verdict", "alpha_score", "beta_score", "detail"}
    assert all(set(row) == keys for row in rows)
    # 3 instances x 2 measures x 2 checks + 2 twin rows
    assert len(rows) == 14
    for row in rows:
        if row["axiom"] in ("mstest", "null-db", "wsym"):
            assert row["verdict"] in ("pass", "vacuous"), row
    again = post("/v1/axioms", seed=7, count=3, measures=["ms", "drastic-shapley"]).json()
    assert again["rows"] == rows


def test_axioms_validation():
    assert post("/v1/axioms", count=0).status_code == 400
    assert post("/v1/axioms", measures=["zzz"]).status_code == 400


# ---------------------------------------------------------------------------
# brute-force games

BRUTE_DB = "A(a)\nA(b)\n"
BRUTE_WEALTH = {"": 0, "A(a)": 0, "A(b)": 0, "A(a);A(b)": 1}


def test_brute_shapley():
    resp = post("/v1/brute", database=BRUTE_DB, wealth=BRUTE_WEALTH)
    rows = resp.json()["rows"]
    assert {row["score"] for row in rows} == {"1/2"}


def test_brute_banzhaf_and_custom():
    resp = post("/v1/brute", database=BRUTE_DB, wealth=BRUTE_WEALTH, coefficient="banzhaf")
    assert {row["score"] for row in resp.json()["rows"]} == {"1/1"}
    resp = post(
        "/v1/brute",
        database=BRUTE_DB,
        wealth=BRUTE_WEALTH,
        coefficient={"0,2": "2", "1,2": "2"},
    )
    assert {row["score"] for row in resp.json()["rows"]} == {"2/1"}


def test_brute_validation():
    missing = {"": 0, "A(a)": 0, "A(a);A(b)": 1}
    assert post("/v1/brute", database=BRUTE_DB, wealth=missing).status_code == 400
    nonzero_empty = dict(BRUTE_WEALTH, **{"": 1})
    assert post("/v1/brute", database=BRUTE_DB, wealth=nonzero_empty).status_code == 400
    bad_value = dict(BRUTE_WEALTH, **{"A(a)": "x/y"})
    assert post("/v1/brute", database=BRUTE_DB, wealth=bad_value).status_code == 400
