"""Graph storage, the two query-model access handles, generators, and
edge-list file I/O.

Graph is an immutable simple undirected graph in compact adjacency-array
form. Neighbor lists are sorted by vertex id so that probe sequences are
deterministic. All estimator-side access goes through ListAccess /
MatrixAccess, whose probe counters are the unit of sublinear cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np


class GraphFormatError(ValueError):
    """Raised on malformed edge-list input. `kind` distinguishes the failure:
    one of "parse", "range", "self_loop", "duplicate"."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class GeneratorSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    Attributes:
        n: vertex count; vertices are 0..n-1.
        eu, ev: per-edge endpoint arrays with eu[i] < ev[i]; edge ids are
            0..m-1 in input order.
        indptr, nbrs, eids: CSR adjacency; nbrs sorted ascending per vertex,
            eids gives the edge id stored at each adjacency slot.
        metadata: generator-provided extras (e.g. a planted matching).
    """

    n: int
    eu: np.ndarray
    ev: np.ndarray
    indptr: np.ndarray
    nbrs: np.ndarray
    eids: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.eu)

    @property
    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return int(np.max(self.indptr[1:] - self.indptr[:-1]))

    @property
    def avg_degree(self) -> Fraction:
        if self.n == 0:
            return Fraction(0)
        return Fraction(2 * self.m, self.n)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbrs[self.indptr[v]:self.indptr[v + 1]]

    def edge_endpoints(self, eid: int) -> tuple[int, int]:
        return int(self.eu[eid]), int(self.ev[eid])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in zip(self.eu, self.ev)}


def build_graph(n: int, edges: Iterable[tuple[int, int]], metadata: Optional[dict] = None) -> Graph:
    """Build a Graph from an edge list, validating simplicity.

    Edge ids follow input order. Raises GraphFormatError on out-of-range
    endpoints, self-loops, or duplicate edges.
    """
    pairs = list(edges)
    m = len(pairs)
    eu = np.empty(m, dtype=np.int32)
    ev = np.empty(m, dtype=np.int32)
    seen = set()
    for i, (a, b) in enumerate(pairs):
        a, b = int(a), int(b)
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError("range", f"edge {i}: vertex out of range: ({a}, {b}) with n={n}")
        if a == b:
            raise GraphFormatError("self_loop", f"edge {i}: self-loop at vertex {a}")
        if a > b:
            a, b = b, a
        if (a, b) in seen:
            raise GraphFormatError("duplicate", f"edge {i}: duplicate edge ({a}, {b})")
        seen.add((a, b))
        eu[i] = a
        ev[i] = b

    deg = np.zeros(n, dtype=np.int64)
    for a, b in zip(eu, ev):
        deg[a] += 1
        deg[b] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    nbrs = np.empty(2 * m, dtype=np.int32)
    eids = np.empty(2 * m, dtype=np.int32)
    cursor = indptr[:-1].copy()
    for i in range(m):
        a, b = eu[i], ev[i]
        nbrs[cursor[a]] = b
        eids[cursor[a]] = i
        cursor[a] += 1
        nbrs[cursor[b]] = a
        eids[cursor[b]] = i
        cursor[b] += 1
    # sort each adjacency row by neighbor id, carrying edge ids along
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        if hi - lo > 1:
            order = np.argsort(nbrs[lo:hi], kind="stable")
            nbrs[lo:hi] = nbrs[lo:hi][order]
            eids[lo:hi] = eids[lo:hi][order]
    return Graph(n=n, eu=eu, ev=ev, indptr=indptr, nbrs=nbrs, eids=eids,
                 metadata=dict(metadata or {}))


def load_edge_list(text: str) -> Graph:
    """Parse the plain edge-list format: first line "n m", then one "u v"
    line per edge. Each malformed input gets a distinct diagnostic."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("parse", "empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("parse", f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphFormatError("parse", f"header must be two integers, got {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise GraphFormatError("parse", "n and m must be non-negative")
    if len(lines) - 1 != m:
        raise GraphFormatError("parse", f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError("parse", f"edge line must be 'u v', got {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError("parse", f"edge line must be two integers, got {ln!r}") from None
    return build_graph(n, edges)


def dump_edge_list(graph: Graph) -> str:
    out = [f"{graph.n} {graph.m}"]
    for u, v in zip(graph.eu, graph.ev):
        out.append(f"{u} {v}")
    return "\n".join(out) + "\n"


class ListAccess:
    """Adjacency-list query handle.

    Every neighbor lookup costs exactly one probe. Degree discovery costs
    one probe under the default "direct" policy, or O(log deg) probes under
    "exponential-search", which finds the degree using only neighbor
    lookups.
    """

    def __init__(self, graph: Graph, degree_policy: str = "direct"):
        if degree_policy not in ("direct", "exponential-search"):
            raise ValueError(f"unknown degree policy: {degree_policy}")
        self.graph = graph
        self.degree_policy = degree_policy
        self.probe_counter = 0

    @property
    def n(self) -> int:
        return self.graph.n

    def neighbor(self, v: int, i: int) -> Optional[int]:
        """i-th neighbor of v (1-based, sorted order), or None past the end."""
        self.probe_counter += 1
        lo, hi = self.graph.indptr[v], self.graph.indptr[v + 1]
        if i < 1 or lo + i - 1 >= hi:
            return None
        return int(self.graph.nbrs[lo + i - 1])

    def degree(self, v: int) -> int:
        if self.degree_policy == "direct":
            self.probe_counter += 1
            return self.graph.degree(v)
        # exponential search on top of neighbor probes, then bisection
        if self.neighbor(v, 1) is None:
            return 0
        hi = 1
        while self.neighbor(v, hi * 2) is not None:
            hi *= 2
        lo = hi  # deg in [lo, 2*lo)
        hi = hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.neighbor(v, mid) is not None:
                lo = mid
            else:
                hi = mid
        return lo


class MatrixAccess:
    """Adjacency-matrix query handle: one probe per vertex-pair query."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.probe_counter = 0

    @property
    def n(self) -> int:
        return self.graph.n

    def probe(self, u: int, v: int) -> bool:
        self.probe_counter += 1
        return self.graph.has_edge(u, v)


# ---------------------------------------------------------------------------
# generators


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))


def _sample_distinct_pairs(rng: np.random.Generator, count: int, decode,
                           universe: int, forbidden: set[int]) -> list[tuple[int, int]]:
    """Sample `count` distinct pair codes uniformly from [0, universe),
    skipping `forbidden`, by rejection."""
    chosen: list[int] = []
    have = set(forbidden)
    while len(chosen) < count:
        want = count - len(chosen)
        draw = rng.integers(0, universe, size=max(16, 2 * want))
        for code in draw:
            code = int(code)
            if code in have:
                continue
            have.add(code)
            chosen.append(code)
            if len(chosen) == count:
                break
    return [decode(c) for c in chosen]


def gen_erdos_renyi(n: int, p_edge: float, seed: int) -> Graph:
    if n < 0 or not (0.0 <= p_edge <= 1.0):
        raise GeneratorSpecError("erdos_renyi requires n >= 0 and p_edge in [0, 1]")
    rng = _rng(seed)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p_edge)) if total > 0 else 0

    def decode(code: int) -> tuple[int, int]:
        # code enumerates pairs (u, v), u < v, row by row
        u = int((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * code)) // 2)
        base = u * (2 * n - u - 1) // 2
        v = u + 1 + (code - base)
        return u, int(v)

    edges = _sample_distinct_pairs(rng, m, decode, total, set())
    return build_graph(n, edges, metadata={"generator": "erdos_renyi", "p_edge": p_edge})


def gen_random_bipartite(n_left: int, n_right: int, p_edge: float, seed: int) -> Graph:
    if n_left < 0 or n_right < 0 or not (0.0 <= p_edge <= 1.0):
        raise GeneratorSpecError("random_bipartite requires non-negative sides and p_edge in [0, 1]")
    rng = _rng(seed)
    total = n_left * n_right
    m = int(rng.binomial(total, p_edge)) if total > 0 else 0

    def decode(code: int) -> tuple[int, int]:
        return code // n_right, n_left + code % n_right

    edges = _sample_distinct_pairs(rng, m, decode, total, set())
    return build_graph(n_left + n_right, edges,
                       metadata={"generator": "random_bipartite",
                                 "n_left": n_left, "n_right": n_right})


def gen_planted_matching(n: int, noise_degree: float, seed: int) -> Graph:
    """n/2 disjoint matching edges (recorded in metadata) plus optional
    random noise edges, so the maximum matching size n/2 is known without
    solving."""
    if n < 0 or n % 2 != 0:
        raise GeneratorSpecError("planted_matching requires even n >= 0")
    if noise_degree < 0:
        raise GeneratorSpecError("planted_matching requires noise_degree >= 0")
    rng = _rng(seed)
    perm = rng.permutation(n)
    edges = []
    for i in range(n // 2):
        a, b = int(perm[2 * i]), int(perm[2 * i + 1])
        edges.append((min(a, b), max(a, b)))
    planted_ids = list(range(n // 2))
    if noise_degree > 0 and n > 1:
        total = n * (n - 1) // 2

        def encode(u: int, v: int) -> int:
            return u * (2 * n - u - 1) // 2 + (v - u - 1)

        def decode(code: int) -> tuple[int, int]:
            u = int((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * code)) // 2)
            base = u * (2 * n - u - 1) // 2
            return u, int(u + 1 + (code - base))

        forbidden = {encode(a, b) for a, b in edges}
        extra = min(int(round(n * noise_degree / 2)), total - len(forbidden))
        edges.extend(_sample_distinct_pairs(rng, extra, decode, total, forbidden))
    return build_graph(n, edges, metadata={"generator": "planted_matching",
                                           "planted_edge_ids": planted_ids})


def gen_disjoint_paths(count: int, path_len: int, seed: int = 0) -> Graph:
    """`count` vertex-disjoint paths with `path_len` edges each."""
    if count < 0 or path_len < 1:
        raise GeneratorSpecError("disjoint_paths requires count >= 0 and path_len >= 1")
    edges = []
    n = count * (path_len + 1)
    for c in range(count):
        base = c * (path_len + 1)
        for j in range(path_len):
            edges.append((base + j, base + j + 1))
    return build_graph(n, edges, metadata={"generator": "disjoint_paths",
                                           "count": count, "path_len": path_len})


_GENERATORS = {
    "erdos_renyi": (gen_erdos_renyi, (int, float)),
    "random_bipartite": (gen_random_bipartite, (int, int, float)),
    "planted_matching": (gen_planted_matching, (int, float)),
    "disjoint_paths": (gen_disjoint_paths, (int, int)),
}


def gen_graph(spec, seed: int) -> Graph:
    """Build a deterministic graph from a generator spec.

    `spec` is either a (kind, *params) tuple or a string "kind:p1:p2".
    """
    if isinstance(spec, str):
        parts = spec.replace(",", ":").split(":")
        kind, raw = parts[0], parts[1:]
    else:
        kind, raw = spec[0], list(spec[1:])
    if kind not in _GENERATORS:
        raise GeneratorSpecError(f"unknown generator {kind!r}; known: {sorted(_GENERATORS)}")
    fn, types = _GENERATORS[kind]
    if len(raw) != len(types):
        raise GeneratorSpecError(f"{kind} takes {len(types)} parameters, got {len(raw)}")
    try:
        args = [t(x) for t, x in zip(types, raw)]
    except (TypeError, ValueError):
        raise GeneratorSpecError(f"bad parameters for {kind}: {raw}") from None
    if kind == "disjoint_paths":
        return fn(*args)
    return fn(*args, seed)
