"""Graph compression: flips, merges, relation closure and the reduction function.

A merge of ``u`` and ``v`` folds the smaller adjacency into the larger and
aggregates parallel edges.  The internal edge disappears and its weight leaves
the energy, so ``energy_offset`` drops by that weight; flips leave every
energy unchanged.  The field node always keeps its id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .model import IsingHamiltonian, ModelError, SKGraph


class ContradictionError(RuntimeError):
    """Strict relations demanded two nodes be both together and apart."""


class ReductionMap:
    """Union-find over the original nodes ``1..n+1`` with sign parities.

    Each graph node is the root of its class.  The value of an original spin
    is ``(-1) ** parity * y[root]`` where ``(root, parity) = find(spin)``.
    """

    def __init__(self, n_spins: int):
        self.n = n_spins
        self.field = n_spins + 1
        size = n_spins + 2
        self._parent = list(range(size))
        self._parity = [0] * size
        self._flipped = [0] * size
        self.energy_offset = 0

    def find(self, i: int) -> tuple[int, int]:
        parent, parity = self._parent, self._parity
        path = []
        r = i
        while parent[r] != r:
            path.append(r)
            r = parent[r]
        acc = 0
        for node in reversed(path):
            acc ^= parity[node]
            parity[node] = acc
            parent[node] = r
        return r, (parity[i] if i != r else 0) ^ self._flipped[r]

    def is_root(self, u: int) -> bool:
        return self._parent[u] == u

    def flip(self, u: int) -> None:
        if not self.is_root(u):
            raise ModelError(f"node {u} is not live")
        self._flipped[u] ^= 1

    def union(self, absorbed: int, survivor: int) -> None:
        if not (self.is_root(absorbed) and self.is_root(survivor)) or absorbed == survivor:
            raise ModelError(f"cannot union {absorbed} into {survivor}")
        self._parent[absorbed] = survivor
        self._parity[absorbed] = self._flipped[absorbed] ^ self._flipped[survivor]


@dataclass
class MergeEvent:
    survivor: int
    absorbed: int
    internal_weight: int
    absorbed_adj: dict[int, int]
    survivor_before: dict[int, int]  # survivor's old weight to each node in absorbed_adj


def flip(g: SKGraph, rmap: ReductionMap, u: int) -> None:
    """Negate every weight incident to ``u`` (the substitution s_u -> -s_u)."""
    if u not in g.adj:
        raise ModelError(f"node {u} is not live")
    adj = g.adj
    nbrs = adj[u]
    for c, w in nbrs.items():
        nbrs[c] = -w
        adj[c][u] = -w
    rmap.flip(u)


def _pick_survivor(g: SKGraph, u: int, v: int) -> tuple[int, int]:
    if g.field_node in (u, v):
        s = g.field_node
    else:
        du, dv = len(g.adj[u]), len(g.adj[v])
        s = u if (du, -u) > (dv, -v) else v
    return s, (v if s == u else u)


def merge_event(g: SKGraph, rmap: ReductionMap, u: int, v: int) -> MergeEvent:
    """Merge ``u`` and ``v`` and report what changed."""
    if u == v:
        raise ModelError("cannot merge a node with itself")
    if u not in g.adj or v not in g.adj:
        raise ModelError(f"cannot merge dead node(s) {(u, v)}")
    s, a = _pick_survivor(g, u, v)
    adj = g.adj
    adj_s = adj[s]
    adj_a = adj.pop(a)
    w_int = adj_a.pop(s, 0)
    if w_int:
        del adj_s[a]
    before = {}
    for c, w in adj_a.items():
        adj_c = adj[c]
        del adj_c[a]
        prev = adj_s.get(c, 0)
        before[c] = prev
        total = prev + w
        if total:
            adj_s[c] = total
            adj_c[s] = total
        elif prev:
            del adj_s[c]
            del adj_c[s]
    rmap.union(a, s)
    rmap.energy_offset -= w_int
    return MergeEvent(s, a, w_int, adj_a, before)


def merge(g: SKGraph, rmap: ReductionMap, u: int, v: int) -> int:
    """Merge ``u`` and ``v``; returns the surviving node id."""
    return merge_event(g, rmap, u, v).survivor


def compress_antipolar(g: SKGraph, rmap: ReductionMap, u: int, v: int) -> int:
    flip(g, rmap, u)
    return merge(g, rmap, u, v)


@dataclass
class ClassifiedRelations:
    ngs: list[frozenset[int]] = field(default_factory=list)
    weak_ngs: list[frozenset[int]] = field(default_factory=list)
    antipolar: list[tuple[int, int]] = field(default_factory=list)

    @property
    def has_strict(self) -> bool:
        return bool(self.ngs or self.antipolar)

    def __bool__(self) -> bool:
        return bool(self.ngs or self.antipolar or self.weak_ngs)


class SignedUnionFind:
    """Union-find whose edges carry 'same side' (0) or 'opposite side' (1)."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.parity: dict[int, int] = {}

    def find(self, u: int) -> tuple[int, int]:
        if u not in self.parent:
            self.parent[u] = u
            self.parity[u] = 0
            return u, 0
        path = []
        r = u
        while self.parent[r] != r:
            path.append(r)
            r = self.parent[r]
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = r
        return r, self.parity[u] if u != r else 0

    def union(self, u: int, v: int, rel: int) -> None:
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            if pu ^ pv != rel:
                raise ContradictionError(f"nodes {u} and {v} are claimed both together and apart")
            return
        if ru > rv:
            ru, rv, pu, pv = rv, ru, pv, pu
        self.parent[rv] = ru
        self.parity[rv] = pu ^ pv ^ rel

    def components(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        """Components as ``(side of the smallest node, opposite side)``, sorted."""
        groups: dict[int, tuple[list[int], list[int]]] = {}
        for u in self.parent:
            r, p = self.find(u)
            groups.setdefault(r, ([], []))[p].append(u)
        out = []
        for same, other in groups.values():
            lo = min(same + other)
            if lo in other:
                same, other = other, same
            out.append((frozenset(same), frozenset(other)))
        out.sort(key=lambda c: min(c[0]))
        return out


def _strict_closure(rel: ClassifiedRelations) -> SignedUnionFind:
    uf = SignedUnionFind()
    for group in rel.ngs:
        members = sorted(group)
        for m in members[1:]:
            uf.union(members[0], m, 0)
    for u, v in rel.antipolar:
        if u == v:
            raise ModelError(f"antipolar pair needs distinct nodes, got {(u, v)}")
        uf.union(u, v, 1)
    return uf


def enlarge(rel: ClassifiedRelations) -> ClassifiedRelations:
    """Close strict relations under union, antipolar propagation and composition.

    Weak groups stay separate; any that contradict the strict closure are dropped.
    """
    uf = _strict_closure(rel)
    out = ClassifiedRelations()
    for same, other in uf.components():
        for side in (same, other):
            if len(side) >= 2:
                out.ngs.append(side)
        if other:
            r0, r1 = min(same), min(other)
            pairs = {tuple(sorted((r0, v))) for v in other}
            pairs |= {tuple(sorted((u, r1))) for u in same if u != r0}
            out.antipolar.extend(sorted(pairs))
    for group in rel.weak_ngs:
        sides: dict[int, int] = {}
        ok = True
        for m in group:
            if m in uf.parent:
                r, p = uf.find(m)
                ok &= sides.setdefault(r, p) == p
        if ok:
            out.weak_ngs.append(frozenset(group))
    return out


def compress_round(
    g: SKGraph,
    rel: ClassifiedRelations,
    rmap: ReductionMap,
    on_flip: Callable[[int], None] | None = None,
    on_merge: Callable[[MergeEvent], None] | None = None,
) -> int:
    """Apply one round of compression; returns the number of merges.

    Every strict group and antipolar pair is compressed.  Only when there are
    none is a single weak group merged.
    """
    merges = 0
    uf = _strict_closure(rel)
    comps = uf.components()
    if comps:
        for same, other in comps:
            if other:
                if g.field_node in same:
                    to_flip = other
                elif g.field_node in other:
                    to_flip = same
                else:
                    to_flip = other if len(other) <= len(same) else same
                for u in sorted(to_flip):
                    flip(g, rmap, u)
                    if on_flip:
                        on_flip(u)
            members = sorted(same | other)
            s = members[0]
            for m in members[1:]:
                ev = merge_event(g, rmap, s, m)
                merges += 1
                if on_merge:
                    on_merge(ev)
                s = ev.survivor
    elif rel.weak_ngs:
        members = sorted(rel.weak_ngs[0])
        s = members[0]
        for m in members[1:]:
            ev = merge_event(g, rmap, s, m)
            merges += 1
            if on_merge:
                on_merge(ev)
            s = ev.survivor
    return merges


def reduced_labels(g: SKGraph) -> dict[int, int]:
    """Graph node -> reduced spin index (1-based, increasing node order)."""
    spins = sorted(u for u in g.adj if u != g.field_node)
    return {u: i for i, u in enumerate(spins, 1)}


def extract_reduced_hamiltonian(g: SKGraph, rmap: ReductionMap | None = None) -> tuple[IsingHamiltonian, int]:
    labels = reduced_labels(g)
    f = g.field_node
    h = {}
    j = {}
    for u, v, w in g.edges():
        if u == f or v == f:
            h[labels[v if u == f else u]] = w
        else:
            a, b = labels[u], labels[v]
            j[(a, b) if a < b else (b, a)] = w
    ham = IsingHamiltonian.from_terms(len(labels), h, j)
    return ham, (rmap.energy_offset if rmap is not None else 0)


@dataclass(frozen=True)
class ReductionFunction:
    """Maps a reduced configuration back to the original spins.

    ``reps[i]`` is the reduced index carrying spin ``i + 1`` (0 when the spin
    is fixed) and ``signs[i]`` the parity relative to it.
    """

    n: int
    n_reduced: int
    reps: tuple[int, ...]
    signs: tuple[int, ...]
    offset: int

    @property
    def fixed(self) -> dict[int, int]:
        return {i: (-1 if s else 1) for i, (r, s) in enumerate(zip(self.reps, self.signs), 1) if r == 0}

    def __call__(self, y: Sequence[int]) -> tuple[int, ...]:
        return reconstruct(self, y)

    def to_dict(self) -> dict:
        rows = []
        for i, (r, s) in enumerate(zip(self.reps, self.signs), 1):
            rows.append({"spin": i, "rep": r, "sign": s, "fixed": (-1 if s else 1) if r == 0 else None})
        return {"n": self.n, "assignments": rows, "offset": self.offset}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ReductionFunction":
        rows = sorted(data["assignments"], key=lambda r: r["spin"])
        if [r["spin"] for r in rows] != list(range(1, data["n"] + 1)):
            raise ModelError("assignments must cover spins 1..n exactly once")
        reps = tuple(int(r["rep"]) for r in rows)
        signs = tuple(int(r["sign"]) for r in rows)
        return cls(data["n"], max(reps, default=0), reps, signs, int(data["offset"]))

    @classmethod
    def from_json(cls, text: str) -> "ReductionFunction":
        return cls.from_dict(json.loads(text))


def reduction_function(g: SKGraph, rmap: ReductionMap) -> ReductionFunction:
    labels = reduced_labels(g)
    _, field_parity = rmap.find(rmap.field)
    reps = []
    signs = []
    for i in range(1, rmap.n + 1):
        root, p = rmap.find(i)
        reps.append(0 if root == g.field_node else labels[root])
        signs.append(p ^ field_parity)
    return ReductionFunction(rmap.n, len(labels), tuple(reps), tuple(signs), rmap.energy_offset)


def reconstruct(f: ReductionFunction, y: Sequence[int]) -> tuple[int, ...]:
    """Original configuration ``x_i = (-1)^sign(i) * y[rep(i)]``; fixed spins use +1."""
    if len(y) != f.n_reduced:
        raise ModelError(f"reduced configuration has length {len(y)}, expected {f.n_reduced}")
    if any(v not in (-1, 1) for v in y):
        raise ModelError("spin values must be -1 or +1")
    return tuple((-1 if s else 1) * (y[r - 1] if r else 1) for r, s in zip(f.reps, f.signs))
