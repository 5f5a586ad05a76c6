"""Path queries over binary facts.

The regular expression is compiled to a minimal trimmed DFA. On acyclic
databases, accepted paths are in bijection with minimal supports, and a
layered dynamic program counts, per length, the accepted paths through a
given edge; scoring then reduces to weighting those counts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count as _counter

from .errors import InputError
from .model import Fact, PartitionedDatabase
from .queries import Alt, Cat, Eps, RegexNode, RegularPathQuery, Star, Sym
from .weights import WeightFunction


@dataclass(frozen=True)
class Dfa:
    """Deterministic automaton, trimmed to states that are reachable from
    the start and either useful (can still accept) or the start itself.
    States are numbered breadth-first from 0 = initial."""

    n_states: int
    alphabet: tuple[str, ...]
    transitions: dict[tuple[int, str], int]
    accepting: frozenset[int]

    initial: int = 0

    def __hash__(self):
        return hash((self.n_states, self.alphabet, tuple(sorted(self.transitions.items())), self.accepting))

    def step(self, state: int, symbol: str) -> int | None:
        return self.transitions.get((state, symbol))


def _symbols(node: RegexNode) -> set[str]:
    if isinstance(node, Sym):
        return {node.name}
    if isinstance(node, (Cat, Alt)):
        out: set[str] = set()
        for item in node.items:
            out |= _symbols(item)
        return out
    if isinstance(node, Star):
        return _symbols(node.item)
    return set()


def _thompson(node: RegexNode, trans: list, fresh) -> tuple[int, int]:
    start, end = next(fresh), next(fresh)
    if isinstance(node, Eps):
        trans.append((start, None, end))
    elif isinstance(node, Sym):
        trans.append((start, node.name, end))
    elif isinstance(node, Cat):
        prev = start
        for item in node.items:
            s, e = _thompson(item, trans, fresh)
            trans.append((prev, None, s))
            prev = e
        trans.append((prev, None, end))
    elif isinstance(node, Alt):
        for item in node.items:
            s, e = _thompson(item, trans, fresh)
            trans.append((start, None, s))
            trans.append((e, None, end))
    elif isinstance(node, Star):
        s, e = _thompson(node.item, trans, fresh)
        trans.append((start, None, end))
        trans.append((start, None, s))
        trans.append((e, None, s))
        trans.append((e, None, end))
    else:
        raise InputError(f"unknown regex node {type(node).__name__}")
    return start, end


def _eps_closure(states: frozenset[int], eps_adj: dict[int, list[int]]) -> frozenset[int]:
    seen = set(states)
    stack = list(states)
    while stack:
        s = stack.pop()
        for t in eps_adj.get(s, ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def _hopcroft(n: int, alphabet: tuple[str, ...], delta, accepting: frozenset[int]):
    all_states = frozenset(range(n))
    acc = frozenset(accepting)
    rej = all_states - acc
    partition = {p for p in (acc, rej) if p}
    work = {(p, a) for p in partition for a in alphabet}
    while work:
        target, sym = work.pop()
        movers = frozenset(s for s in range(n) if delta[(s, sym)] in target)
        for block in list(partition):
            inside = block & movers
            outside = block - movers
            if inside and outside:
                partition.remove(block)
                partition.add(inside)
                partition.add(outside)
                for a in alphabet:
                    if (block, a) in work:
                        work.remove((block, a))
                        work.add((inside, a))
                        work.add((outside, a))
                    else:
                        work.add((min(inside, outside, key=len), a))
    return partition


@lru_cache(maxsize=None)
def compile_regex(node: RegexNode) -> Dfa:
    """Thompson construction, subset determinization, Hopcroft
    minimization, then trimming and breadth-first renumbering."""
    alphabet = tuple(sorted(_symbols(node)))
    trans: list[tuple[int, str | None, int]] = []
    fresh = _counter()
    nfa_start, nfa_accept = _thompson(node, trans, fresh)
    eps_adj: dict[int, list[int]] = {}
    sym_adj: dict[tuple[int, str], list[int]] = {}
    for s, label, t in trans:
        if label is None:
            eps_adj.setdefault(s, []).append(t)
        else:
            sym_adj.setdefault((s, label), []).append(t)

    start = _eps_closure(frozenset([nfa_start]), eps_adj)
    ids: dict[frozenset[int], int] = {start: 0}
    queue = [start]
    delta: dict[tuple[int, str], int] = {}
    while queue:
        subset = queue.pop(0)
        sid = ids[subset]
        for a in alphabet:
            moved = frozenset(t for s in subset for t in sym_adj.get((s, a), ()))
            closed = _eps_closure(moved, eps_adj)
            if closed not in ids:
                ids[closed] = len(ids)
                queue.append(closed)
            delta[(sid, a)] = ids[closed]
    accepting = frozenset(i for subset, i in ids.items() if nfa_accept in subset)

    blocks = _hopcroft(len(ids), alphabet, delta, accepting)
    block_of = {}
    for block in blocks:
        for s in block:
            block_of[s] = block
    block_ids = {block: i for i, block in enumerate(sorted(blocks, key=min))}
    b_delta = {}
    for (s, a), t in delta.items():
        b_delta[(block_ids[block_of[s]], a)] = block_ids[block_of[t]]
    b_init = block_ids[block_of[0]]
    b_acc = {block_ids[block_of[s]] for s in accepting}

    # co-reachable states (can still reach an accepting state)
    useful = set(b_acc)
    changed = True
    while changed:
        changed = False
        for (s, _), t in b_delta.items():
            if t in useful and s not in useful:
                useful.add(s)
                changed = True

    # breadth-first renumbering from the initial state over useful states
    renum = {b_init: 0}
    order = [b_init]
    head = 0
    while head < len(order):
        s = order[head]
        head += 1
        for a in alphabet:
            t = b_delta.get((s, a))
            if t is not None and t in useful and t not in renum:
                renum[t] = len(renum)
                order.append(t)
    final_delta = {
        (renum[s], a): renum[t]
        for (s, a), t in b_delta.items()
        if s in renum and t in renum
    }
    final_acc = frozenset(renum[s] for s in b_acc if s in renum)
    return Dfa(len(renum), alphabet, final_delta, final_acc)


# ---------------------------------------------------------------------------
# databases as labeled graphs

def _validate_binary(facts) -> None:
    for f in sorted(facts):
        if len(f.args) != 2:
            raise InputError(f"path queries need binary facts; {f} has arity {len(f.args)}")


def rpq_evaluate(q: RegularPathQuery, facts) -> bool:
    """Product-graph reachability; the empty path counts when the source
    and target coincide and the language contains the empty word."""
    dfa = compile_regex(q.regex)
    if q.source == q.target and dfa.initial in dfa.accepting:
        return True
    _validate_binary(facts)
    adj: dict[str, list[tuple[str, str]]] = {}
    for f in facts:
        adj.setdefault(f.args[0], []).append((f.relation, f.args[1]))
    seen = {(q.source, dfa.initial)}
    stack = [(q.source, dfa.initial)]
    while stack:
        node, state = stack.pop()
        for sym, nxt in adj.get(node, ()):
            t = dfa.step(state, sym)
            if t is None:
                continue
            pair = (nxt, t)
            if pair in seen:
                continue
            if nxt == q.target and t in dfa.accepting:
                return True
            seen.add(pair)
            stack.append(pair)
    return False


def check_dag(facts) -> tuple[list[str] | None, list[str] | None]:
    """Topological order of the constants (lexicographic among ties), or a
    cycle witness as (None, cycle_nodes)."""
    _validate_binary(facts)
    nodes = sorted({t for f in facts for t in f.args})
    indeg = {v: 0 for v in nodes}
    adj: dict[str, list[str]] = {v: [] for v in nodes}
    for f in sorted(facts):
        adj[f.args[0]].append(f.args[1])
        indeg[f.args[1]] += 1
    heap = [v for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order: list[str] = []
    degree = dict(indeg)
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in adj[v]:
            degree[w] -= 1
            if degree[w] == 0:
                heapq.heappush(heap, w)
    if len(order) == len(nodes):
        return order, None
    # every unplaced node keeps an unplaced predecessor, so walking
    # predecessors must revisit a node
    remaining = set(nodes) - set(order)
    preds: dict[str, list[str]] = {v: [] for v in remaining}
    for f in sorted(facts):
        if f.args[0] in remaining and f.args[1] in remaining:
            preds[f.args[1]].append(f.args[0])
    path = [min(remaining)]
    index = {path[0]: 0}
    while True:
        nxt = min(preds[path[-1]])
        if nxt in index:
            back = path[index[nxt] :]
            return None, [back[0]] + back[:0:-1]
        index[nxt] = len(path)
        path.append(nxt)


class PathCountTable:
    """sp[k][(i, p)][(j, q)] counts the k-edge walks from node i read from
    state p that end in node j at state q. On a DAG all such walks are
    paths whose edge sets are exactly the accepted minimal supports."""

    def __init__(self, layers: dict[int, dict], order: list[str]):
        self.layers = layers
        self.order = order

    def count(self, k: int, i: str, p: int, j: str, q: int) -> int:
        vec = self.layers.get(k, {}).get((i, p))
        if not vec:
            return 0
        return vec.get((j, q), 0)


def build_path_counts(facts, dfa: Dfa, max_k: int | None = None) -> PathCountTable:
    order, cycle = check_dag(facts)
    if cycle is not None:
        raise InputError(f"database contains a cycle: {' -> '.join(cycle + cycle[:1])}")
    if max_k is None:
        max_k = max(len(order) - 1, 0)
    outgoing: dict[str, list[tuple[str, str]]] = {}
    for f in facts:
        outgoing.setdefault(f.args[0], []).append((f.relation, f.args[1]))
    starts = [(i, p) for i in order for p in range(dfa.n_states)]
    layers: dict[int, dict] = {0: {s: {s: 1} for s in starts}}
    for k in range(1, max_k + 1):
        prev = layers[k - 1]
        cur: dict = {}
        for start, vec in prev.items():
            newvec: dict[tuple[str, int], int] = {}
            for (node, state), cnt in vec.items():
                for sym, nxt in outgoing.get(node, ()):
                    t = dfa.step(state, sym)
                    if t is not None:
                        key = (nxt, t)
                        newvec[key] = newvec.get(key, 0) + cnt
            if newvec:
                cur[start] = newvec
        layers[k] = cur
    return PathCountTable(layers, order)


def count_paths_through(
    facts, dfa: Dfa, source: str, target: str, edge: Fact, k: int,
    table: PathCountTable | None = None,
) -> int:
    """Number of accepted k-edge paths from source to target that use the
    given edge fact."""
    facts = frozenset(facts)
    if edge not in facts:
        raise InputError(f"fact {edge} is not in the database")
    if k < 1:
        return 0
    if table is None:
        table = build_path_counts(facts, dfa, max_k=k - 1)
    mid_s, mid_t = edge.args
    total = 0
    for k_before in range(k):
        k_after = k - 1 - k_before
        for state in range(dfa.n_states):
            prefix = table.count(k_before, source, dfa.initial, mid_s, state)
            if not prefix:
                continue
            after = dfa.step(state, edge.relation)
            if after is None:
                continue
            suffix = sum(
                table.count(k_after, mid_t, after, target, qf) for qf in dfa.accepting
            )
            if suffix:
                total += prefix * suffix
    return total


def wsms_rpq(
    q: RegularPathQuery, db: PartitionedDatabase, fact: Fact, w: WeightFunction
) -> Fraction:
    """Weighted support score of one endogenous fact on an acyclic
    database, straight from the per-length path counts."""
    if fact in db.exogenous:
        raise InputError(f"fact {fact} is exogenous; scores are defined for endogenous facts")
    if fact not in db.endogenous:
        raise InputError(f"fact {fact} is not in the database")
    facts = db.all_facts
    d_total = len(facts)
    w.validate_for(d_total)
    if rpq_evaluate(q, db.exogenous):
        return Fraction(0)
    dfa = compile_regex(q.regex)
    table = build_path_counts(facts, dfa)
    total = Fraction(0)
    for k in range(1, len(table.order)):
        through = count_paths_through(facts, dfa, q.source, q.target, fact, k, table)
        if through:
            total += through * w.weight(k, d_total)
    return total


def classify_rpq(q: RegularPathQuery) -> str:
    """tractable-trivial when the empty word is accepted and the endpoints
    coincide; tractable-finite when the trimmed automaton is acyclic (the
    language is finite); hard otherwise."""
    dfa = compile_regex(q.regex)
    if q.source == q.target and dfa.initial in dfa.accepting:
        return "tractable-trivial"
    if _dfa_acyclic(dfa):
        return "tractable-finite"
    return "hard"


def _dfa_acyclic(dfa: Dfa) -> bool:
    adj: dict[int, set[int]] = {}
    for (s, _), t in dfa.transitions.items():
        adj.setdefault(s, set()).add(t)
    state = {}

    def visit(v: int) -> bool:
        state[v] = 1
        for w in adj.get(v, ()):
            if state.get(w) == 1:
                return False
            if state.get(w) is None and not visit(w):
                return False
        state[v] = 2
        return True

    return all(visit(v) for v in range(dfa.n_states) if state.get(v) is None)


def accepts_word_with_length_in(dfa: Dfa, lo: int, hi: int) -> bool:
    """Is some word of length in [lo, hi) accepted? Used to cross-check
    the finite-language classification."""
    frontier = {dfa.initial}
    if lo <= 0 < hi and dfa.initial in dfa.accepting:
        return True
    for length in range(1, hi):
        frontier = {
            t
            for s in frontier
            for a in dfa.alphabet
            if (t := dfa.step(s, a)) is not None
        }
        if not frontier:
            return False
        if length >= lo and frontier & dfa.accepting:
            return True
    return False
