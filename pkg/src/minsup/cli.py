"""Command-line client.

Every subcommand drives the HTTP API: by default against an in-process
application instance, or against a live server via --server. Exit codes:
0 success, 2 input error, 3 guard refusal.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_INPUT = 2
EXIT_GUARD = 3


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(message: str, code: int) -> "SystemExit":
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(code)


def _call(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json()
    try:
        data = resp.json()
        message = data.get("error") or json.dumps(data.get("detail", data))
    except ValueError:
        message = resp.text
    if resp.status_code in (400, 422):
        raise _fail(message, EXIT_INPUT)
    if resp.status_code == 413:
        raise _fail(message, EXIT_GUARD)
    raise _fail(f"unexpected response {resp.status_code}: {message}", 1)


def _read_text(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _fail(f"cannot read {what} file {path}: {exc}", EXIT_INPUT)


def _read_json(path: str, what: str):
    text = _read_text(path, what)
    try:
        return json.loads(text)
    except ValueError as exc:
        raise _fail(f"{what} file {path} is not valid JSON: {exc}", EXIT_INPUT)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=False))


def _print_score_rows(rows: list[dict]) -> None:
    print("fact\tscore\tfloor\tdecimal")
    for row in rows:
        print(f"{row['fact']}\t{row['score']}\t{row['floor']}\t{row['decimal']}")


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_score(args) -> int:
    payload = {
        "database": _read_text(args.database, "database"),
        "query": _read_text(args.query, "query"),
        "measure": args.measure,
        "jobs": args.jobs,
    }
    if args.weight_table:
        payload["weight_table"] = _read_json(args.weight_table, "weight table")
    if args.fact:
        payload["facts"] = args.fact
    data = _call(args.server, "/v1/score", payload)
    if args.format == "json":
        _print_json(data)
    else:
        _print_score_rows(data["rows"])
    return 0


def _cmd_count_ms(args) -> int:
    payload = {
        "database": _read_text(args.database, "database"),
        "query": _read_text(args.query, "query"),
        "include_supports": bool(args.supports),
    }
    data = _call(args.server, "/v1/count-ms", payload)
    if args.format == "json":
        _print_json(data)
        return 0
    print(f"total\t{data['count']}")
    for size, cnt in sorted(data["by_size"].items(), key=lambda kv: int(kv[0])):
        print(f"size-{size}\t{cnt}")
    for support in data.get("supports", []):
        print("support\t" + ";".join(support))
    return 0


def _cmd_count_fms(args) -> int:
    payload = {
        "database": _read_text(args.database, "database"),
        "query": _read_text(args.query, "query"),
        "k": args.k,
    }
    data = _call(args.server, "/v1/count-fms", payload)
    if args.format == "json":
        _print_json(data)
    else:
        print(f"{data['k']}\t{data['count']}")
    return 0


def _cmd_rewrite_sql(args) -> int:
    payload = {"query": _read_text(args.query, "query"), "k": args.k}
    if args.schema:
        payload["relation_schema"] = _read_json(args.schema, "schema")
    data = _call(args.server, "/v1/rewrite-sql", payload)
    if args.format == "json":
        _print_json(data)
    else:
        print(data["sql"])
    return 0


def _cmd_rpq(args) -> int:
    payload = {"query": _read_text(args.query, "query"), "measure": args.measure}
    if args.database:
        payload["database"] = _read_text(args.database, "database")
    if args.weight_table:
        payload["weight_table"] = _read_json(args.weight_table, "weight table")
    if args.fact:
        payload["facts"] = args.fact
    data = _call(args.server, "/v1/rpq", payload)
    if args.format == "json":
        _print_json(data)
        return 0
    print(f"classification\t{data['classification']}")
    if "rows" in data:
        _print_score_rows(data["rows"])
    return 0


def _cmd_analyze(args) -> int:
    data = _call(args.server, "/v1/analyze", {"query": _read_text(args.query, "query")})
    if args.format == "json":
        _print_json(data)
        return 0
    for key in ("acyclic", "self_join_free", "self_join_width", "core", "hom_equals_minsup"):
        print(f"{key}\t{data[key]}")
    for pair in data["unifiable_pairs"]:
        print(f"unifiable\t{pair[0]}\t{pair[1]}")
    return 0


def _cmd_axioms(args) -> int:
    payload = {"seed": args.seed, "count": args.count}
    if args.measures:
        payload["measures"] = [m.strip() for m in args.measures.split(",") if m.strip()]
    data = _call(args.server, "/v1/axioms", payload)
    if args.format == "json":
        _print_json(data)
        return 0
    print("axiom\tinstance_id\tmeasure\tverdict\talpha_score\tbeta_score")
    for row in data["rows"]:
        alpha = row["alpha_score"] if row["alpha_score"] is not None else "-"
        beta = row["beta_score"] if row["beta_score"] is not None else "-"
        print(
            f"{row['axiom']}\t{row['instance_id']}\t{row['measure']}\t"
            f"{row['verdict']}\t{alpha}\t{beta}"
        )
    return 0


def _cmd_brute(args) -> int:
    payload = {
        "database": _read_text(args.database, "database"),
        "wealth": _read_json(args.wealth, "wealth table"),
    }
    if args.coefficient in ("shapley", "banzhaf"):
        payload["coefficient"] = args.coefficient
    else:
        payload["coefficient"] = _read_json(args.coefficient, "coefficient table")
    if args.fact:
        payload["facts"] = args.fact
    data = _call(args.server, "/v1/brute", payload)
    if args.format == "json":
        _print_json(data)
    else:
        _print_score_rows(data["rows"])
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def _add_common(sub, *, database=False, query=False, fmt="json"):
    if database:
        sub.add_argument("-d", "--database", required=True, help="path to a database file")
    if query:
        sub.add_argument("-q", "--query", required=True, help="path to a query file")
    sub.add_argument(
        "--format", choices=("json", "tsv"), default=fmt, help=f"output format (default {fmt})"
    )
    sub.add_argument("--server", help="URL of a running service; default runs in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minsup",
        description="Responsibility scores of database facts under monotone queries.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("score", help="score every endogenous fact")
    _add_common(p, database=True, query=True, fmt="tsv")
    p.add_argument("--measure", default="ms")
    p.add_argument("--weight-table", help="JSON file {\"k,n\": weight} for wsms-custom")
    p.add_argument("--fact", action="append", help="restrict output to this fact (repeatable)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=_cmd_score)

    p = subs.add_parser("count-ms", help="count minimal supports")
    _add_common(p, database=True, query=True)
    p.add_argument("--supports", action="store_true", help="also list the supports")
    p.set_defaults(handler=_cmd_count_ms)

    p = subs.add_parser("count-fms", help="count minimal supports of one size")
    _add_common(p, database=True, query=True)
    p.add_argument("--k", type=int, required=True, help="support size")
    p.set_defaults(handler=_cmd_count_fms)

    p = subs.add_parser("rewrite-sql", help="emit counting SQL for one support size")
    _add_common(p, query=True, fmt="tsv")
    p.add_argument("--k", type=int, required=True, help="support size")
    p.add_argument("--schema", help="JSON file {relation: [column, ...]}")
    p.set_defaults(handler=_cmd_rewrite_sql)

    p = subs.add_parser("rpq", help="classify a path query and optionally score facts")
    _add_common(p, query=True)
    p.add_argument("-d", "--database", help="path to a database file (enables scoring)")
    p.add_argument("--measure", default="ms")
    p.add_argument("--weight-table", help="JSON file {\"k,n\": weight} for wsms-custom")
    p.add_argument("--fact", action="append", help="restrict output to this fact (repeatable)")
    p.set_defaults(handler=_cmd_rpq)

    p = subs.add_parser("analyze", help="structural analysis of a conjunctive query")
    _add_common(p, query=True)
    p.set_defaults(handler=_cmd_analyze)

    p = subs.add_parser("axioms", help="run the axiom checks on generated instances")
    _add_common(p, fmt="tsv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10, help="number of generated instances")
    p.add_argument("--measures", help="comma-separated measure names")
    p.set_defaults(handler=_cmd_axioms)

    p = subs.add_parser("brute", help="score an explicitly tabulated wealth function")
    _add_common(p, database=True, fmt="tsv")
    p.add_argument(
        "--wealth",
        required=True,
        help="JSON file mapping ';'-joined sorted fact strings to wealth values",
    )
    p.add_argument(
        "--coefficient",
        default="shapley",
        help="shapley, banzhaf, or a JSON file {\"j,m\": value}",
    )
    p.add_argument("--fact", action="append", help="restrict output to this fact (repeatable)")
    p.set_defaults(handler=_cmd_brute)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
