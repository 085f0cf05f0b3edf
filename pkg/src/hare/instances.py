"""Instance formats and random instance generators.

Native Ising format::

    # comment
    ising <n>
    h <i> <value>
    j <i> <k> <value>

QUBO format uses a ``qubo <n>`` header and ``q <i> <j> <value>`` lines.  MQLib
Max-Cut files start with ``<n> <m>`` followed by ``m`` lines ``<u> <v> <w>``.
All indices are 1-based, all values integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .model import IsingHamiltonian, ModelError, QuboInstance
from .rng import Xoshiro256

#: Coupling sign applied to Max-Cut weights: ``J_uv = MAXCUT_COUPLING_SIGN * w_uv``.
#: With it, ``H(s) = W - 2 * cut(s)`` so maximizing the cut minimizes the energy.
MAXCUT_COUPLING_SIGN = -1


class ParseError(ModelError):
    """Malformed instance text."""


class DecimalWeightError(ParseError):
    """The instance uses non-integer weights, which are not supported."""


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield no, line.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        float(tok)
    except ValueError:
        raise ParseError(f"line {no}: {what} {tok!r} is not a number") from None
    raise DecimalWeightError(f"line {no}: {what} {tok!r} is not an integer")


def _index(tok: str, no: int, n: int) -> int:
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"line {no}: index {tok!r} is not an integer") from None
    if not 1 <= i <= n:
        raise ParseError(f"line {no}: index {i} outside 1..{n}")
    return i


def parse_maxcut(text: str) -> IsingHamiltonian:
    """Read an MQLib Max-Cut instance as a coupling-only Hamiltonian."""
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise ParseError("empty Max-Cut file") from None
    if len(head) != 2:
        raise ParseError(f"line {no}: header must be 'n m'")
    n = _int(head[0], no, "node count")
    m = _int(head[1], no, "edge count")
    if n < 0 or m < 0:
        raise ParseError(f"line {no}: negative header values")
    j: dict[tuple[int, int], int] = {}
    count = 0
    for no, toks in it:
        if len(toks) != 3:
            raise ParseError(f"line {no}: expected 'u v w', got {len(toks)} fields")
        u, v = _index(toks[0], no, n), _index(toks[1], no, n)
        w = _int(toks[2], no, "weight")
        if u == v:
            raise ParseError(f"line {no}: self-loop on node {u}")
        key = (u, v) if u < v else (v, u)
        j[key] = j.get(key, 0) + MAXCUT_COUPLING_SIGN * w
        count += 1
    if count != m:
        raise ParseError(f"header announces {m} edges but {count} were read")
    return IsingHamiltonian.from_terms(n, {}, j)


def parse_ising(text: str) -> IsingHamiltonian:
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise ParseError("empty Ising file") from None
    if len(head) != 2 or head[0] != "ising":
        raise ParseError(f"line {no}: header must be 'ising n'")
    n = _int(head[1], no, "spin count")
    if n < 0:
        raise ParseError(f"line {no}: negative spin count")
    h: dict[int, int] = {}
    j: dict[tuple[int, int], int] = {}
    for no, toks in it:
        kind = toks[0]
        if kind == "h" and len(toks) == 3:
            i = _index(toks[1], no, n)
            if i in h:
                raise ParseError(f"line {no}: duplicate field for spin {i}")
            h[i] = _int(toks[2], no, "field")
        elif kind == "j" and len(toks) == 4:
            a, b = _index(toks[1], no, n), _index(toks[2], no, n)
            if a == b:
                raise ParseError(f"line {no}: self-coupling on spin {a}")
            key = (a, b) if a < b else (b, a)
            if key in j:
                raise ParseError(f"line {no}: duplicate coupling {key}")
            j[key] = _int(toks[3], no, "coupling")
        else:
            raise ParseError(f"line {no}: unrecognized line {' '.join(toks)!r}")
    return IsingHamiltonian.from_terms(n, h, j)


def write_ising(ham: IsingHamiltonian) -> str:
    out = [f"ising {ham.n}"]
    out += [f"h {i} {v}" for i, v in sorted(ham.h.items())]
    out += [f"j {a} {b} {v}" for (a, b), v in sorted(ham.j.items())]
    return "\n".join(out) + "\n"


def parse_qubo(text: str) -> QuboInstance:
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise ParseError("empty QUBO file") from None
    if len(head) != 2 or head[0] != "qubo":
        raise ParseError(f"line {no}: header must be 'qubo n'")
    n = _int(head[1], no, "variable count")
    q: dict[tuple[int, int], int] = {}
    for no, toks in it:
        if toks[0] != "q" or len(toks) != 4:
            raise ParseError(f"line {no}: unrecognized line {' '.join(toks)!r}")
        a, b = _index(toks[1], no, n), _index(toks[2], no, n)
        key = (a, b) if a <= b else (b, a)
        if key in q:
            raise ParseError(f"line {no}: duplicate coefficient {key}")
        q[key] = _int(toks[3], no, "coefficient")
    return QuboInstance.from_terms(n, q)


def write_qubo(qubo: QuboInstance) -> str:
    out = [f"qubo {qubo.n}"]
    out += [f"q {a} {b} {v}" for (a, b), v in sorted(qubo.q.items())]
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class GeneratorSpec:
    topology: str
    n: int
    avg_degree: int
    weight_bound: int = 1 << 10
    seed: int = 0
    with_fields: bool = False

    def __post_init__(self):
        if self.topology not in ("er", "sf"):
            raise ModelError(f"topology must be 'er' or 'sf', got {self.topology!r}")
        if self.n < 2:
            raise ModelError("n must be at least 2")
        if not 0 < self.avg_degree < self.n:
            raise ModelError("average degree must be in 1..n-1")
        if self.weight_bound < 1:
            raise ModelError("weight bound must be at least 1")


def _erdos_renyi(n: int, p: float, rng: Xoshiro256) -> list[tuple[int, int]]:
    """G(n, p) by geometric skipping over the pairs (v, w), w < v."""
    if p >= 1.0:
        return [(w, v) for v in range(n) for w in range(v)]
    edges = []
    log_q = math.log(1.0 - p)
    v, w = 1, -1
    while v < n:
        w += 1 + rng.geometric_skip(log_q)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            edges.append((w, v))
    return edges


def _barabasi_albert(n: int, m: int, rng: Xoshiro256) -> list[tuple[int, int]]:
    """Preferential attachment from an initial clique on ``m + 1`` nodes."""
    edges = [(a, b) for b in range(m + 1) for a in range(b)]
    repeated = [x for e in edges for x in e]
    for v in range(m + 1, n):
        targets: list[int] = []
        while len(targets) < m:
            t = repeated[rng.randbelow(len(repeated))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((t, v))
        repeated.extend(targets)
        repeated.extend([v] * m)
    return edges


def generate(spec: GeneratorSpec) -> IsingHamiltonian:
    rng = Xoshiro256(spec.seed)
    if spec.topology == "er":
        pairs = _erdos_renyi(spec.n, spec.avg_degree / (spec.n - 1), rng)
    else:
        pairs = _barabasi_albert(spec.n, -(-spec.avg_degree // 2), rng)
    j = {(a + 1, b + 1): rng.nonzero_weight(spec.weight_bound) for a, b in pairs}
    h = {}
    if spec.with_fields:
        h = {i: rng.nonzero_weight(spec.weight_bound) for i in range(1, spec.n + 1)}
    return IsingHamiltonian.from_terms(spec.n, h, j)


def random_instance(n: int, seed: int, weight_bound: int = 16,
                    density: float | None = None) -> IsingHamiltonian:
    """Small dense-or-sparse instance for exhaustive checks.

    When ``density`` is omitted it is drawn from the seed, so a run of seeds
    covers sparse and dense couplings and fields alike.
    """
    if n < 1:
        raise ModelError("n must be at least 1")
    rng = Xoshiro256(seed)
    if density is None:
        density = (1 + rng.randbelow(10)) / 10
    field_density = rng.randbelow(11) / 10
    j = {}
    for b in range(2, n + 1):
        for a in range(1, b):
            if rng.random() < density:
                j[(a, b)] = rng.nonzero_weight(weight_bound)
    h = {i: rng.nonzero_weight(weight_bound) for i in range(1, n + 1) if rng.random() < field_density}
    return IsingHamiltonian.from_terms(n, h, j)


def detect_format(text: str) -> str:
    """Guess ``ising``, ``qubo`` or ``mqlib`` from the first non-comment line."""
    for _, toks in _lines(text):
        if toks[0] in ("ising", "qubo"):
            return toks[0]
        return "mqlib"
    raise ParseError("empty instance file")
