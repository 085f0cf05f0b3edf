"""Ising, QUBO and SK-graph representations with exact integer arithmetic.

Energy convention::

    H(s) = -sum_i h_i s_i - sum_{i<j} J_ij s_i s_j

The SK graph carries one node per spin plus a field node (id ``n + 1``).
Spin pairs become edges with weight ``J_ij`` and every field ``h_i`` becomes an
edge ``(i, n + 1)``.  With the field node held at +1 the energy of the spin
configuration induced by a cut ``S`` is::

    H = ENERGY_PER_CUT * c(S) - total_weight(G)

which is what :func:`energy_of_cut` computes.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

Edge = tuple[int, int]

#: Energy gained per unit of cut capacity (the affine slope of energy vs cut).
ENERGY_PER_CUT = 2

#: Scale applied when turning a QUBO into an integral Hamiltonian.
QUBO_SCALE = 4


class ModelError(ValueError):
    """Raised for malformed Hamiltonians, QUBOs, graphs or configurations."""


def _check_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ModelError(f"{what} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class IsingHamiltonian:
    """External fields ``h`` and couplings ``j`` over spins ``1..n``.

    Couplings are keyed by ordered pairs ``(i, j)`` with ``i < j``; zero terms
    are never stored.  Use :meth:`from_terms` to build one from loose input.
    """

    n: int
    h: Mapping[int, int] = field(default_factory=dict)
    j: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self):
        _check_int(self.n, "n")
        if self.n < 0:
            raise ModelError("n must be non-negative")
        for i, v in self.h.items():
            if not 1 <= i <= self.n:
                raise ModelError(f"field index {i} outside 1..{self.n}")
            if _check_int(v, f"h[{i}]") == 0:
                raise ModelError(f"zero field stored for spin {i}")
        for (a, b), v in self.j.items():
            if not (1 <= a < b <= self.n):
                raise ModelError(f"coupling key {(a, b)} must satisfy 1 <= i < j <= {self.n}")
            if _check_int(v, f"j[{a},{b}]") == 0:
                raise ModelError(f"zero coupling stored for pair {(a, b)}")

    @classmethod
    def from_terms(
        cls,
        n: int,
        h: Mapping[int, int] | Iterable[tuple[int, int]] = (),
        j: Mapping[Edge, int] | Iterable[tuple[Edge, int]] = (),
    ) -> "IsingHamiltonian":
        """Canonicalize loose terms: ``J_ij`` and ``J_ji`` are summed, zeros dropped."""
        hs: dict[int, int] = {}
        js: dict[Edge, int] = {}
        for i, v in (h.items() if isinstance(h, Mapping) else h):
            hs[i] = hs.get(i, 0) + _check_int(v, f"h[{i}]")
        for (a, b), v in (j.items() if isinstance(j, Mapping) else j):
            if a == b:
                raise ModelError(f"self-coupling on spin {a}")
            key = (a, b) if a < b else (b, a)
            js[key] = js.get(key, 0) + _check_int(v, f"j[{a},{b}]")
        return cls(
            n,
            {i: v for i, v in sorted(hs.items()) if v},
            {k: v for k, v in sorted(js.items()) if v},
        )

    @property
    def num_couplings(self) -> int:
        return len(self.j)

    def energy(self, s: Sequence[int]) -> int:
        return energy(self, s)


@dataclass(frozen=True)
class QuboInstance:
    """``Q(x) = sum_{i<=j} q_ij x_i x_j`` over binary ``x``; diagonal terms are linear."""

    n: int
    q: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self):
        for (a, b), v in self.q.items():
            if not (1 <= a <= b <= self.n):
                raise ModelError(f"QUBO key {(a, b)} must satisfy 1 <= i <= j <= {self.n}")
            if _check_int(v, f"q[{a},{b}]") == 0:
                raise ModelError(f"zero QUBO coefficient stored for {(a, b)}")

    @classmethod
    def from_terms(cls, n: int, q: Mapping[Edge, int] | Iterable[tuple[Edge, int]]) -> "QuboInstance":
        qs: dict[Edge, int] = {}
        for (a, b), v in (q.items() if isinstance(q, Mapping) else q):
            key = (a, b) if a <= b else (b, a)
            qs[key] = qs.get(key, 0) + _check_int(v, f"q[{a},{b}]")
        return cls(n, {k: v for k, v in sorted(qs.items()) if v})

    def value(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise ModelError(f"assignment has length {len(x)}, expected {self.n}")
        return sum(v * x[a - 1] * x[b - 1] for (a, b), v in self.q.items())


class SKGraph:
    """Weighted undirected graph with a distinguished field node.

    ``adj[u][v]`` is the weight of edge ``(u, v)``; the view is kept symmetric
    and never holds zero weights or self-loops.
    """

    __slots__ = ("adj", "field_node", "n_spins")

    def __init__(self, n_spins: int, field_node: int | None = None, nodes: Iterable[int] | None = None):
        self.n_spins = n_spins
        self.field_node = n_spins + 1 if field_node is None else field_node
        ids = range(1, n_spins + 2) if nodes is None else nodes
        self.adj: dict[int, dict[int, int]] = {v: {} for v in ids}
        if self.field_node not in self.adj:
            raise ModelError("field node must be one of the graph nodes")

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Mapping[Edge, int] | Iterable[tuple[Edge, int]],
                   field_node: int | None = None) -> "SKGraph":
        """Graph on nodes ``1..num_nodes``; the field node defaults to the last one."""
        g = cls(num_nodes - 1, field_node=num_nodes if field_node is None else field_node)
        for (u, v), w in (edges.items() if isinstance(edges, Mapping) else edges):
            g.add_weight(u, v, w)
        return g

    @property
    def nodes(self) -> set[int]:
        return set(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def __contains__(self, u: int) -> bool:
        return u in self.adj

    def weight(self, u: int, v: int) -> int:
        return self.adj[u].get(v, 0)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def norm(self, u: int) -> int:
        """1-norm of the weight vector of ``u``."""
        return sum(abs(w) for w in self.adj[u].values())

    def add_weight(self, u: int, v: int, w: int) -> None:
        """Aggregate ``w`` onto edge ``(u, v)``; a zero total deletes the edge."""
        if u == v:
            raise ModelError(f"self-loop on node {u}")
        if u not in self.adj or v not in self.adj:
            raise ModelError(f"edge {(u, v)} references a node outside the graph")
        total = self.adj[u].get(v, 0) + _check_int(w, "weight")
        if total:
            self.adj[u][v] = total
            self.adj[v][u] = total
        else:
            self.adj[u].pop(v, None)
            self.adj[v].pop(u, None)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(u, v, w)`` once per edge with ``u < v``."""
        for u, nbrs in self.adj.items():
            for v, w in nbrs.items():
                if u < v:
                    yield u, v, w

    @property
    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges())

    def copy(self) -> "SKGraph":
        g = SKGraph.__new__(SKGraph)
        g.n_spins = self.n_spins
        g.field_node = self.field_node
        g.adj = {u: dict(nbrs) for u, nbrs in self.adj.items()}
        return g

    def check_invariants(self) -> None:
        if self.field_node not in self.adj:
            raise AssertionError("field node is not live")
        for u, nbrs in self.adj.items():
            if u in nbrs:
                raise AssertionError(f"self-loop at {u}")
            for v, w in nbrs.items():
                if w == 0:
                    raise AssertionError(f"zero-weight edge {(u, v)}")
                if self.adj.get(v, {}).get(u) != w:
                    raise AssertionError(f"asymmetric edge {(u, v)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SKGraph):
            return NotImplemented
        return self.field_node == other.field_node and self.adj == other.adj

    def __repr__(self) -> str:
        return f"SKGraph(nodes={len(self.adj)}, edges={self.num_edges}, field_node={self.field_node})"


def qubo_to_ising(q: QuboInstance) -> tuple[IsingHamiltonian, int]:
    """Convert a QUBO to an Ising Hamiltonian scaled by :data:`QUBO_SCALE`.

    With ``x_i = (s_i + 1) / 2`` the result satisfies, for every configuration,
    ``QUBO_SCALE * Q(x) == H(s) + offset``.  Scaling keeps every coefficient
    integral and leaves the argmin untouched.
    """
    h: dict[int, int] = {}
    j: dict[Edge, int] = {}
    offset = 0
    for (a, b), v in q.q.items():
        if a == b:
            # 4 * v * (s + 1) / 2
            h[a] = h.get(a, 0) - 2 * v
            offset += 2 * v
        else:
            # 4 * v * (s_a s_b + s_a + s_b + 1) / 4
            j[(a, b)] = j.get((a, b), 0) - v
            h[a] = h.get(a, 0) - v
            h[b] = h.get(b, 0) - v
            offset += v
    return IsingHamiltonian.from_terms(q.n, h, j), offset


def ising_to_sk(ham: IsingHamiltonian) -> SKGraph:
    g = SKGraph(ham.n)
    f = g.field_node
    for (a, b), v in ham.j.items():
        g.adj[a][b] = v
        g.adj[b][a] = v
    for i, v in ham.h.items():
        g.adj[i][f] = v
        g.adj[f][i] = v
    return g


def sk_to_ising(g: SKGraph) -> IsingHamiltonian:
    """Read an uncompressed SK graph back as a Hamiltonian (nodes must be ``1..n+1``)."""
    f = g.field_node
    h = {}
    j = {}
    for u, v, w in g.edges():
        if v == f:
            h[u] = w
        elif u == f:
            h[v] = w
        else:
            j[(u, v)] = w
    return IsingHamiltonian.from_terms(g.n_spins, h, j)


def check_spins(s: Sequence[int], n: int) -> tuple[int, ...]:
    if len(s) != n:
        raise ModelError(f"configuration has length {len(s)}, expected {n}")
    out = tuple(int(v) for v in s)
    if any(v not in (-1, 1) for v in out):
        raise ModelError("spin values must be -1 or +1")
    return out


def energy(ham: IsingHamiltonian, s: Sequence[int]) -> int:
    s = check_spins(s, ham.n)
    e = 0
    for i, v in ham.h.items():
        e -= v * s[i - 1]
    for (a, b), v in ham.j.items():
        e -= v * s[a - 1] * s[b - 1]
    return e


def cut_capacity(g: SKGraph, side: Iterable[int]) -> int:
    """Total weight of edges with exactly one endpoint in ``side``."""
    side = set(side)
    extra = side - g.adj.keys()
    if extra:
        raise ModelError(f"cut references nodes outside the graph: {sorted(extra)}")
    total = 0
    for u in side:
        for v, w in g.adj[u].items():
            if v not in side:
                total += w
    return total


def energy_of_cut(g: SKGraph, capacity: int) -> int:
    """Energy of the configuration induced by a cut of the given capacity."""
    return ENERGY_PER_CUT * capacity - g.total_weight()


def config_of_cut(g: SKGraph, side: Iterable[int]) -> tuple[int, ...]:
    """Spin configuration induced by a cut, normalized so the field node is +1.

    Spins are read in increasing node order, skipping the field node.
    """
    side = set(side)
    flip = -1 if g.field_node not in side else 1
    return tuple((1 if u in side else -1) * flip for u in sorted(g.adj) if u != g.field_node)


def cut_of_config(g: SKGraph, s: Sequence[int]) -> frozenset[int]:
    """Inverse of :func:`config_of_cut`; the field node lands outside the cut."""
    spins = [u for u in sorted(g.adj) if u != g.field_node]
    s = check_spins(s, len(spins))
    return frozenset(u for u, v in zip(spins, s) if v == -1)
