"""Exhaustive ground truth for small instances.

Everything here is exponential and exists for tests and the ``verify`` command.
Cuts are enumerated with the field node pinned outside ``S``; capacity is
complement-invariant so no optimum is lost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .model import (
    IsingHamiltonian,
    ModelError,
    SKGraph,
    config_of_cut,
    energy_of_cut,
)

MAX_CUT_NODES = 24
MAX_SPINS = 22
MAX_STORED = 1 << 20
_CHUNK_BITS = 15


class OracleGuardError(ModelError):
    """The instance is too large for exhaustive enumeration."""


@dataclass
class OracleResult:
    min_capacity: int | None = None
    argmin_cuts: list[frozenset[int]] = field(default_factory=list)
    ground_energy: int | None = None
    ground_states: list[tuple[int, ...]] = field(default_factory=list)


def _bit_chunks(k: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, bits)`` where ``bits[r, c]`` is bit ``c`` of ``start + r``."""
    total = 1 << k
    step = min(total, 1 << _CHUNK_BITS)
    shifts = np.arange(k, dtype=np.int64)
    for start in range(0, total, step):
        codes = np.arange(start, start + step, dtype=np.int64)
        yield start, ((codes[:, None] >> shifts) & 1).astype(np.int8)


def _cut_capacities(g: SKGraph) -> Iterator[tuple[list[int], np.ndarray, np.ndarray]]:
    """Yield ``(free_nodes, bits, capacities)`` chunk by chunk over all cuts."""
    free = sorted(u for u in g.adj if u != g.field_node)
    if len(g.adj) > MAX_CUT_NODES:
        raise OracleGuardError(f"{len(g.adj)} nodes exceeds the oracle limit of {MAX_CUT_NODES}")
    pos = {u: i for i, u in enumerate(free)}
    k = len(free)
    edges = list(g.edges())
    # field node maps to an all-zero column at index k
    us = np.array([pos.get(u, k) for u, _, _ in edges], dtype=np.int64)
    vs = np.array([pos.get(v, k) for _, v, _ in edges], dtype=np.int64)
    ws = np.array([w for _, _, w in edges], dtype=np.int64)
    for _, bits in _bit_chunks(k):
        padded = np.concatenate([bits, np.zeros((bits.shape[0], 1), dtype=np.int8)], axis=1)
        crossing = (padded[:, us] != padded[:, vs]).astype(np.int64)
        yield free, bits, crossing @ ws


def exact_min_cut(g: SKGraph) -> OracleResult:
    """Minimum capacity and every minimizing cut (field node outside each cut)."""
    best = None
    cuts: list[frozenset[int]] = []
    for free, bits, caps in _cut_capacities(g):
        lo = int(caps.min())
        if best is None or lo < best:
            best = lo
            cuts = []
        if lo == best:
            for r in np.flatnonzero(caps == best):
                if len(cuts) >= MAX_STORED:
                    raise OracleGuardError("too many optimal cuts to store")
                cuts.append(frozenset(u for u, b in zip(free, bits[r]) if b))
    res = OracleResult(min_capacity=best, argmin_cuts=cuts)
    res.ground_energy = energy_of_cut(g, best)
    res.ground_states = [config_of_cut(g, c) for c in cuts]
    return res


def exact_nonseparability_index(g: SKGraph, x: Iterable[int]) -> int:
    """Min capacity over cuts separating ``x`` minus min capacity over the rest."""
    x = set(x)
    if len(x) < 2:
        raise ModelError("the group needs at least two nodes")
    if not x <= g.adj.keys():
        raise ModelError("the group references nodes outside the graph")
    free = sorted(u for u in g.adj if u != g.field_node)
    cols = [free.index(u) for u in x if u != g.field_node]
    sep_best = None
    non_best = None
    for _, bits, caps in _cut_capacities(g):
        # the field node is pinned outside, so as a member it counts as 0
        inside = bits[:, cols].sum(axis=1)
        sep = (inside > 0) & (inside < len(x))
        if sep.any():
            v = int(caps[sep].min())
            sep_best = v if sep_best is None else min(sep_best, v)
        if (~sep).any():
            v = int(caps[~sep].min())
            non_best = v if non_best is None else min(non_best, v)
    return sep_best - non_best


def exact_ground_states(ham: IsingHamiltonian) -> OracleResult:
    """Minimum energy and every minimizing configuration by enumeration."""
    energies = all_energies(ham)
    best = int(energies.min())
    codes = np.flatnonzero(energies == best)
    if len(codes) > MAX_STORED:
        raise OracleGuardError("too many ground states to store")
    states = [tuple(-1 if (int(c) >> i) & 1 else 1 for i in range(ham.n)) for c in codes]
    return OracleResult(ground_energy=best, ground_states=states)


def all_energies(ham: IsingHamiltonian) -> np.ndarray:
    """Energy of every configuration, indexed by the bit code (bit set = spin -1)."""
    if ham.n > MAX_SPINS:
        raise OracleGuardError(f"{ham.n} spins exceeds the oracle limit of {MAX_SPINS}")
    out = []
    hi = np.array([i - 1 for i in ham.h], dtype=np.int64)
    hv = np.array(list(ham.h.values()), dtype=np.int64)
    ja = np.array([a - 1 for a, _ in ham.j], dtype=np.int64)
    jb = np.array([b - 1 for _, b in ham.j], dtype=np.int64)
    jv = np.array(list(ham.j.values()), dtype=np.int64)
    for _, bits in _bit_chunks(ham.n):
        s = 1 - 2 * bits.astype(np.int64)
        out.append(-(s[:, hi] @ hv) - ((s[:, ja] * s[:, jb]) @ jv))
    return np.concatenate(out)
