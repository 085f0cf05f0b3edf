"""The reduction loop: candidate list, incremental scores and compression rounds.

Scores are only recomputed for items whose inputs changed.  A node is marked
dirty when any incident weight changes; an L-edge is re-scored when an
endpoint is dirty, and a triangle when any of its three nodes is.  Because
flips and merges only touch the neighborhood of the nodes involved, a score
that is not re-evaluated is still exact for the current graph.
"""

from __future__ import annotations

import heapq
import logging
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field

from .bounds import classify_pair, common_correction, relation_of, triangle_core, Relation
from .compress import (
    ClassifiedRelations,
    MergeEvent,
    ReductionMap,
    compress_round,
    ReductionFunction,
    enlarge,
    extract_reduced_hamiltonian,
    merge_event,
    reduced_labels,
    reduction_function,
)
from .model import IsingHamiltonian, SKGraph, ising_to_sk

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 2

Edge = tuple[int, int]


@dataclass
class RunReport:
    rounds: int = 0
    merges: int = 0
    flips: int = 0
    weak_merges: int = 0
    nodes_before: int = 0
    nodes_after: int = 0
    edges_before: int = 0
    edges_after: int = 0
    fixed_spins: int = 0
    offset: int = 0
    reduction_ratio_logical: float = 0.0
    time_ms: float = 0.0
    # elementary score-maintenance operations; not part of the JSON report
    work: int = field(default=0, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        del d["work"]
        return d


class ScoreState:
    """Maintained norms ``A``, candidate list ``L`` with corrections ``B``, dirt."""

    def __init__(self, alpha: int, capacity: int):
        self.alpha = alpha
        self.capacity = capacity
        self.A: dict[int, int] = {}
        self.B: dict[Edge, int] = {}
        self.at: dict[int, set[Edge]] = defaultdict(set)
        self.dirty: set[int] = set()
        self.fresh: set[Edge] = set()
        self.weak: set[Edge] = set()
        self.work = 0

    @property
    def L(self) -> list[Edge]:
        return sorted(self.B)

    def fast(self, g: SKGraph, e: Edge) -> int:
        u, v = e
        return 2 * abs(g.adj[u][v]) - min(self.A[u], self.A[v])

    def similarity_x2(self, g: SKGraph, e: Edge) -> int:
        u, v = e
        return 4 * abs(g.adj[u][v]) - (self.A[u] + self.A[v] + self.B[e])

    def add(self, g: SKGraph, e: Edge) -> None:
        u, v = e
        self.B[e] = common_correction(g, u, v)
        self.work += min(len(g.adj[u]), len(g.adj[v])) + 1
        self.at[u].add(e)
        self.at[v].add(e)
        self.fresh.add(e)

    def remove(self, e: Edge) -> None:
        del self.B[e]
        u, v = e
        self.at[u].discard(e)
        self.at[v].discard(e)
        self.fresh.discard(e)
        self.weak.discard(e)
        self.work += 1

    def evict_to_capacity(self, g: SKGraph, keep: set[Edge] = frozenset()) -> None:
        excess = len(self.B) - self.capacity
        if excess <= 0:
            return
        self.work += len(self.B)
        # lowest fast score goes first; ties evict the highest edge id
        victims = heapq.nsmallest(
            excess,
            (e for e in self.B if e not in keep),
            key=lambda e: (self.fast(g, e), tuple(-x for x in e)),
        )
        for e in victims:
            self.remove(e)


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _top_edges(g: SKGraph, A: dict[int, int], k: int) -> list[Edge]:
    if k <= 0:
        return []
    keyed = ((-(2 * abs(w) - min(A[u], A[v])), u, v) for u, v, w in g.edges())
    return [(u, v) for _, u, v in heapq.nsmallest(k, keyed)]


def initialize(g: SKGraph, alpha: int = DEFAULT_ALPHA) -> ScoreState:
    """Norms for every node; the top ``n * alpha`` edges by fast score form ``L``."""
    if isinstance(alpha, bool) or not isinstance(alpha, int) or alpha < 1:
        raise ValueError(f"alpha must be a positive integer, got {alpha!r}")
    st = ScoreState(alpha, alpha * g.n_spins)
    st.A = {u: sum(abs(w) for w in nbrs.values()) for u, nbrs in g.adj.items()}
    st.work += len(st.A) + g.num_edges
    for e in _top_edges(g, st.A, st.capacity):
        st.add(g, e)
    return st


def on_flip(st: ScoreState, g: SKGraph, u: int) -> None:
    """Norms are flip-invariant; corrections of L-edges at ``u`` are refreshed."""
    for e in st.at.get(u, ()):
        st.B[e] = common_correction(g, *e)
        st.work += 1
    st.dirty.add(u)


def _term(x: int, y: int, neg: bool) -> int:
    return abs(x + y if neg else x - y) - abs(x) - abs(y)


def on_merge(st: ScoreState, g: SKGraph, ev: MergeEvent) -> None:
    s, a = ev.survivor, ev.absorbed
    adj_s = g.adj[s]
    A = st.A
    before = ev.survivor_before
    absorbed = ev.absorbed_adj
    for c, wa in absorbed.items():
        A[c] += abs(adj_s.get(c, 0)) - abs(before[c]) - abs(wa)
    A[s] = sum(abs(w) for w in adj_s.values())
    del A[a]
    st.work += len(absorbed) + len(adj_s)

    for e in list(st.at.pop(a, ())) + list(st.at.pop(s, ())):
        if e in st.B:
            st.remove(e)

    # only neighbors of the absorbed node can see a different common-neighbor term
    done = set()
    for u in absorbed:
        for e in st.at.get(u, ()):
            if e in done:
                continue
            done.add(e)
            p, q = e
            neg = g.adj[p][q] < 0
            new = _term(adj_s.get(p, 0), adj_s.get(q, 0), neg)
            old_s = _term(before.get(p, adj_s.get(p, 0)), before.get(q, adj_s.get(q, 0)), neg)
            old_a = _term(absorbed.get(p, 0), absorbed.get(q, 0), neg)
            st.B[e] += new - old_s - old_a
            st.work += 1

    if st.alpha and adj_s:
        keyed = ((-(2 * abs(w) - min(A[s], A[c])), _edge(s, c)) for c, w in adj_s.items())
        for _, e in heapq.nsmallest(st.alpha, keyed):
            st.add(g, e)
        st.work += len(adj_s)
    st.evict_to_capacity(g, keep=set(st.at.get(s, ())))

    st.dirty.discard(a)
    st.dirty.add(s)
    st.dirty.update(absorbed)


def identify(st: ScoreState, g: SKGraph) -> ClassifiedRelations:
    """Re-score every dirty pair and triangle; strict claims are returned, weak ones kept."""
    adj = g.adj
    A = st.A
    pairs = set(st.fresh)
    dirty = [d for d in st.dirty if d in adj]
    for d in dirty:
        pairs.update(st.at.get(d, ()))
    triples = set()
    # A positive triangle score needs the third node t to satisfy
    # 2 * (|w_ut| + |w_vt|) > min(A_t, A_u + A_v - 2|w_uv|); skip the rest early.
    for u, v in pairs:
        au, av = adj[u], adj[v]
        room = A[u] + A[v] - 2 * abs(au[v])
        st.work += len(au) + len(av)
        for t in au.keys() | av.keys():
            if t != u and t != v:
                it2 = 2 * (abs(au.get(t, 0)) + abs(av.get(t, 0)))
                if it2 > A[t] or it2 > room:
                    triples.add(tuple(sorted((u, v, t))))
    for d in dirty:
        ad = adj[d]
        st.work += len(ad)
        for u in ad:
            st.work += len(st.at.get(u, ()))
            for e in st.at.get(u, ()):
                p, q = e
                if d != p and d != q:
                    it2 = 2 * (abs(ad.get(p, 0)) + abs(ad.get(q, 0)))
                    if it2 > A[d] or it2 > A[p] + A[q] - 2 * abs(adj[p][q]):
                        triples.add(tuple(sorted((p, q, d))))
    st.dirty.clear()
    st.fresh.clear()
    st.work += len(pairs) + len(triples)

    rel = ClassifiedRelations()
    for e in sorted(pairs):
        u, v = e
        w = adj[u][v]
        aw = abs(w)
        fast2 = 4 * aw - 2 * min(A[u], A[v])
        sim2 = 4 * aw - (A[u] + A[v] + st.B[e])
        kind = relation_of(w, max(fast2, sim2))
        if kind is Relation.WEAK:
            st.weak.add(e)
            continue
        st.weak.discard(e)
        if kind is Relation.NG:
            rel.ngs.append(frozenset(e))
        elif kind is Relation.ANTIPOLAR:
            rel.antipolar.append(e)

    for a, b, c in sorted(triples):
        wa = adj[a]
        score, fb, fc = triangle_core(a, b, c, wa.get(b, 0), wa.get(c, 0), adj[b].get(c, 0),
                                      A[a], A[b], A[c])
        if score <= 0:
            continue
        if fb == fc:
            if fb:
                rel.ngs.append(frozenset((b, c)))
                rel.antipolar.append((a, b))
            else:
                rel.ngs.append(frozenset((a, b, c)))
        else:
            lone = b if fb else c
            other = c if fb else b
            rel.ngs.append(frozenset((a, other)))
            rel.antipolar.append(_edge(a, lone))
    return rel


def _verified_weak(st: ScoreState, g: SKGraph) -> Edge | None:
    """First weak candidate that still classifies as weak on the current graph."""
    for e in sorted(st.weak):
        u, v = e
        if u in g.adj and v in g.adj[u] and classify_pair(g, u, v).kind is Relation.WEAK:
            st.work += len(g.adj[u]) + len(g.adj[v])
            return e
        st.weak.discard(e)
    return None


def _top_up(st: ScoreState, g: SKGraph) -> bool:
    """Ensure L holds the edges a fresh run on the current graph would start from."""
    spins = len(g.adj) - 1
    top = _top_edges(g, st.A, st.alpha * spins)
    st.work += g.num_edges
    missing = [e for e in top if e not in st.B]
    if not missing:
        return False
    for e in missing:
        st.add(g, e)
    st.evict_to_capacity(g, keep=set(top))
    return True


def check_state(st: ScoreState, g: SKGraph) -> None:
    """Assert every maintained quantity equals its from-scratch value."""
    g.check_invariants()
    for u in g.adj:
        if st.A.get(u) != g.norm(u):
            raise AssertionError(f"A[{u}] = {st.A.get(u)} but norm is {g.norm(u)}")
    if set(st.A) != set(g.adj):
        raise AssertionError("A is defined for dead nodes")
    if len(st.B) > st.capacity:
        raise AssertionError(f"|L| = {len(st.B)} exceeds capacity {st.capacity}")
    for e, b in st.B.items():
        u, v = e
        if v not in g.adj.get(u, {}):
            raise AssertionError(f"L-edge {e} is not an edge")
        if b != common_correction(g, u, v):
            raise AssertionError(f"B{e} = {b} but recomputed {common_correction(g, u, v)}")
        if e not in st.at[u] or e not in st.at[v]:
            raise AssertionError(f"L-edge {e} missing from the node index")


def run(
    g: SKGraph,
    alpha: int = DEFAULT_ALPHA,
    weak_ngs: bool = True,
    rmap: ReductionMap | None = None,
    check: bool = False,
) -> tuple[SKGraph, ReductionMap, RunReport]:
    """Compress ``g`` in place until no pair or triangle certifies anything."""
    t0 = time.perf_counter()
    rmap = rmap if rmap is not None else ReductionMap(g.n_spins)
    rep = RunReport()
    f = g.field_node
    rep.nodes_before = len(g.adj) - 1
    rep.edges_before = sum(1 for u, v, _ in g.edges() if f not in (u, v))

    st = initialize(g, alpha)

    def flipped(u):
        rep.flips += 1
        on_flip(st, g, u)

    def merged(ev):
        on_merge(st, g, ev)

    while True:
        rel = identify(st, g)
        if rel.has_strict:
            m = compress_round(g, enlarge(rel), rmap, on_flip=flipped, on_merge=merged)
        elif weak_ngs and (e := _verified_weak(st, g)) is not None:
            m = compress_round(g, ClassifiedRelations(weak_ngs=[frozenset(e)]), rmap,
                               on_flip=flipped, on_merge=merged)
            rep.weak_merges += m
        elif _top_up(st, g):
            continue
        else:
            break
        rep.rounds += 1
        rep.merges += m
        log.debug("round %d: %d merges, %d nodes left", rep.rounds, m, len(g.adj))
        if check:
            check_state(st, g)

    # isolated spins take no part in any cut; pin them to the field node
    for u in sorted(g.adj):
        if u != f and not g.adj[u]:
            merge_event(g, rmap, f, u)
            rep.merges += 1

    rep.work = st.work
    rep.nodes_after = len(g.adj) - 1
    rep.edges_after = sum(1 for u, v, _ in g.edges() if f not in (u, v))
    labels = reduced_labels(g)
    rep.fixed_spins = sum(1 for i in range(1, rmap.n + 1) if rmap.find(i)[0] == f)
    rep.offset = rmap.energy_offset
    rep.reduction_ratio_logical = 1.0 - len(labels) / rep.nodes_before if rep.nodes_before else 0.0
    rep.time_ms = (time.perf_counter() - t0) * 1000.0
    return g, rmap, rep


@dataclass(frozen=True)
class Reduction:
    """Reduced Hamiltonian, the map back to the original spins, and run statistics."""

    reduced: IsingHamiltonian
    function: ReductionFunction
    report: RunReport

    @property
    def offset(self) -> int:
        return self.function.offset


def reduce_hamiltonian(ham: IsingHamiltonian, alpha: int = DEFAULT_ALPHA, weak_ngs: bool = True) -> Reduction:
    """Reduce ``ham`` so that ``min ham == min reduced + offset``."""
    g, rmap, rep = run(ising_to_sk(ham), alpha=alpha, weak_ngs=weak_ngs)
    reduced, _ = extract_reduced_hamiltonian(g, rmap)
    return Reduction(reduced, reduction_function(g, rmap), rep)
