"""Implicit random total order over the element sequence T, plus vertex
colors, freeze coins, and derived run parameters.

Every edge contributes K "start" copies (candidates for the greedy matching
M) and one "extend" copy (candidate for the augmenting matching S) to T.
An element's rank is a 64-bit word keyed by (seed, edge, copy); ties are
broken by the canonical element id, so the order is total. The fraction of
a rank value in (0, 1] plays the role of the element's relative position in
T: it decides both the partition index of a matched edge and the frozen
interval test.

Two backends realize the order:

  * EAGER evaluates the keyed mixing function directly and materializes a
    vertex's incident elements, sorted, on first touch.
  * LAZY samples ranks incrementally: each vertex-side enumeration keeps a
    cursor and draws the minimum of the remaining unrealized ranks by order
    statistics, while a shared registry keeps both endpoints consistent.
    The two backends agree in distribution, not samplewise.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from ._mix import (LBL_COIN, LBL_COLOR, LBL_JSTAR, LBL_LAZY, LBL_RANK,
                   derive_seed, mix64_scalar, unit_from_bits)

START_SIDE = 0
EXTEND_SIDE = 1

RED = 0
BLUE = 1


class ElementKind(IntEnum):
    START = 0
    EXTEND = 1


@dataclass(frozen=True)
class ElementRef:
    """One entry of the sequence T: an edge plus kind. `copy` is 1-based in
    [1, K] for start elements and None for the extend element."""

    edge_id: int
    kind: ElementKind
    copy: Optional[int] = None

    def copy0(self, K: int) -> int:
        if self.kind == ElementKind.START:
            if self.copy is None or not (1 <= self.copy <= K):
                raise ValueError(f"start copy index must be in [1, {K}], got {self.copy}")
            return self.copy - 1
        return K


@dataclass(frozen=True, order=True)
class Rank:
    """Total-order key: 64-bit value, ties broken by canonical element id."""

    value: int
    pairkey: int
    copy0: int

    @property
    def fraction(self) -> float:
        return unit_from_bits(np.uint64(self.value))


def pair_key(u: int, v: int, n: int) -> int:
    a, b = (u, v) if u < v else (v, u)
    return a * n + b


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSet:
    """Derived run parameters. `alphas[i]` for i in [1, levels+1] are the
    shrinking interval thresholds; alphas[1] = 1 and alphas[levels+1] = 0."""

    epsilon: float
    levels: int           # 2 / epsilon
    c: int
    p: float
    D: int
    K: int
    alphas: tuple
    j_star: int
    delta: float
    n: int
    m: int
    max_degree: int
    T_size: int
    k_overridden: bool

    def partition_index(self, fraction: float) -> int:
        """Index i in [1, levels] with alphas[i+1] < fraction <= alphas[i]."""
        for i in range(1, self.levels + 1):
            if fraction > self.alphas[i + 1]:
                return i
        return self.levels


P_FREEZE = 0.007


def validate_epsilon(epsilon: float) -> int:
    """Return levels = 2/epsilon, requiring it to be an integer >= 8."""
    if epsilon <= 0:
        raise ParamError(f"epsilon must be positive, got {epsilon}")
    levels = round(2.0 / epsilon)
    if levels < 8 or abs(levels - 2.0 / epsilon) > 1e-9:
        raise ParamError(
            f"epsilon must be 2/L for an integer L >= 8 (epsilon <= 0.25), got {epsilon}")
    return levels


def derive_params(graph, epsilon: float, c: int, seed: tuple[int, int],
                  k_override: Optional[int] = None,
                  delta: Optional[float] = None) -> ParamSet:
    """Compute the parameter block for a run on `graph`.

    Logs are base 2. D and K are rounded up to integers, D is clamped to at
    least 2 so the alpha ladder is strictly decreasing. j_star is drawn
    uniformly from [1, 2/epsilon] using the seed.
    """
    return derive_params_raw(graph.n, graph.m, graph.max_degree, epsilon, c,
                             seed, k_override=k_override, delta=delta)


def derive_params_raw(n: int, m: int, max_degree: int, epsilon: float, c: int,
                      seed: tuple[int, int], k_override: Optional[int] = None,
                      delta: Optional[float] = None) -> ParamSet:
    levels = validate_epsilon(epsilon)
    if c < 1:
        raise ParamError(f"c must be a positive integer, got {c}")
    if max_degree < 1:
        raise ParamError("graph must have at least one edge (max degree >= 1)")
    log2n = math.log2(max(n, 2))
    D = max(2, math.ceil((c * max_degree * log2n) ** epsilon))
    K = max(1, math.ceil(10 * D * log2n * log2n))
    k_overridden = k_override is not None
    if k_overridden:
        if k_override < 1:
            raise ParamError(f"K override must be >= 1, got {k_override}")
        K = int(k_override)
    alphas = [math.inf] + [D ** (1 - i) for i in range(1, levels + 1)] + [0.0]
    j_star = 1 + mix64_scalar(seed[0], seed[1], LBL_JSTAR, 0, 0) % levels
    if delta is None:
        delta = 2.0 ** (-70.0 / epsilon)
    return ParamSet(epsilon=float(epsilon), levels=levels, c=int(c), p=P_FREEZE,
                    D=D, K=K, alphas=tuple(alphas), j_star=j_star,
                    delta=float(delta), n=n, m=m, max_degree=max_degree,
                    T_size=m * (K + 1), k_overridden=k_overridden)


# ---------------------------------------------------------------------------
# adjacency views: the minimal probe-costed surface the rank model needs


class ListView:
    """Adjacency provider over a ListAccess handle."""

    def __init__(self, access):
        self.access = access
        self.n = access.n

    def degree(self, v: int) -> int:
        return self.access.degree(v)

    def resolve(self, v: int, slot: int) -> tuple[int, int]:
        """(neighbor, canonical edge key) for v's slot (1-based)."""
        nbr = self.access.neighbor(v, slot)
        if nbr is None:
            raise IndexError(f"slot {slot} out of range for vertex {v}")
        return nbr, pair_key(v, nbr, self.n)


class _Fenwick:
    """Prefix-sum tree over slot counts, with weighted-descend selection."""

    def __init__(self, counts: list[int]):
        self.size = len(counts)
        self.tree = [0] * (self.size + 1)
        self.total = 0
        for i, cnt in enumerate(counts):
            if cnt:
                self.add(i, cnt)

    def add(self, i: int, delta: int) -> None:
        self.total += delta
        i += 1
        while i <= self.size:
            self.tree[i] += delta
            i += i & (-i)

    def prefix(self, i: int) -> int:
        """Sum of counts for slots < i."""
        s = 0
        while i > 0:
            s += self.tree[i]
            i -= i & (-i)
        return s

    def count(self, i: int) -> int:
        return self.prefix(i + 1) - self.prefix(i)

    def descend(self, target: int) -> int:
        """Smallest slot index such that the prefix sum exceeds `target`."""
        pos = 0
        rem = target
        bit = 1 << (self.size.bit_length())
        while bit:
            nxt = pos + bit
            if nxt <= self.size and self.tree[nxt] <= rem:
                rem -= self.tree[nxt]
                pos = nxt
            bit >>= 1
        return pos


def _bits_from_unit(frac: float) -> int:
    """Inverse of unit_from_bits on the top 53 bits (low bits zero)."""
    hi = int(frac * (1 << 53)) - 1
    hi = min(max(hi, 0), (1 << 53) - 1)
    return hi << 11


class _VertexSlots:
    """Per-vertex slot cache shared by both sides: degree plus lazily
    resolved (neighbor, edge key) pairs."""

    __slots__ = ("deg", "resolved")

    def __init__(self, deg: int):
        self.deg = deg
        self.resolved: dict[int, tuple[int, int]] = {}


class _LazyState:
    __slots__ = ("v", "side", "slots", "fen", "heap", "cursor", "returned",
                 "registered")

    def __init__(self, v: int, side: int, slots: _VertexSlots, per_slot: int):
        self.v = v
        self.side = side
        self.slots = slots
        self.fen = _Fenwick([per_slot] * slots.deg)
        self.heap: list[tuple[int, int, int, int]] = []  # (value, pk, cp, nbr)
        self.cursor = 0.0
        self.returned: list[tuple[int, int, int, int]] = []
        self.registered: set[int] = set()


class RankModel:
    """Realizes the element order for one run; confined to one session."""

    def __init__(self, view, params: ParamSet, seed: tuple[int, int],
                 backend: str = "eager"):
        if backend not in ("eager", "lazy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.view = view
        self.params = params
        self.seed = seed
        self.backend = backend
        self.K = params.K
        self._vertex_slots: dict[int, _VertexSlots] = {}
        self._eager: dict[int, tuple[list, list]] = {}
        self._lazy: dict[tuple[int, int], _LazyState] = {}
        if backend == "lazy":
            self.registry: dict[tuple[int, int], int] = {}
            self.edge_realized: dict[int, dict[int, int]] = {}
            self.watchers: dict[int, list[tuple[_LazyState, int]]] = {}
            ls = derive_seed(seed, int(LBL_LAZY))
            self._rng = np.random.Generator(
                np.random.Philox(key=(ls[0] | (ls[1] << 64))))

    # -- keyed randomness ---------------------------------------------------

    def rank_value(self, pairkey: int, copy0: int) -> int:
        return mix64_scalar(self.seed[0], self.seed[1], LBL_RANK, pairkey, copy0)

    def color(self, v: int) -> int:
        return mix64_scalar(self.seed[0], self.seed[1], LBL_COLOR, v, 0) & 1

    def coin_is_one(self, pairkey: int, copy0: int) -> bool:
        """Per-start-element freeze coin: Bernoulli(1 - p) outcome."""
        u = unit_from_bits(np.uint64(
            mix64_scalar(self.seed[0], self.seed[1], LBL_COIN, pairkey, copy0)))
        return u < 1.0 - self.params.p

    def element_frozen(self, color_u: int, color_v: int, pairkey: int,
                       copy0: int, rank_value: int) -> bool:
        """Frozen test for a start element: same endpoint colors, rank
        outside the j_star interval, or freeze coin one."""
        if color_u == color_v:
            return True
        frac = unit_from_bits(np.uint64(rank_value))
        if self.params.partition_index(frac) != self.params.j_star:
            return True
        return self.coin_is_one(pairkey, copy0)

    # -- vertex bookkeeping ---------------------------------------------------

    def _slots(self, v: int) -> _VertexSlots:
        st = self._vertex_slots.get(v)
        if st is None:
            st = _VertexSlots(self.view.degree(v))
            self._vertex_slots[v] = st
        return st

    def _resolve_slot(self, v: int, st: _VertexSlots, slot: int) -> tuple[int, int]:
        got = st.resolved.get(slot)
        if got is None:
            got = self.view.resolve(v, slot)
            st.resolved[slot] = got
        return got

    def side_size(self, v: int) -> tuple[int, int]:
        """(start-side element count, extend-side element count) for v."""
        d = self._slots(v).deg
        return d * self.K, d

    # -- eager backend --------------------------------------------------------

    def _eager_streams(self, v: int):
        got = self._eager.get(v)
        if got is not None:
            return got
        st = self._slots(v)
        start_entries = []
        extend_entries = []
        for slot in range(1, st.deg + 1):
            nbr, pk = self._resolve_slot(v, st, slot)
            for cp in range(self.K):
                start_entries.append((self.rank_value(pk, cp), pk, cp, nbr))
            extend_entries.append((self.rank_value(pk, self.K), pk, self.K, nbr))
        start_entries.sort()
        extend_entries.sort()
        self._eager[v] = (start_entries, extend_entries)
        return start_entries, extend_entries

    # -- lazy backend -----------------------------------------------------------

    def _lazy_state(self, v: int, side: int) -> _LazyState:
        key = (v, side)
        st = self._lazy.get(key)
        if st is None:
            st = _LazyState(v, side, self._slots(v),
                            self.K if side == START_SIDE else 1)
            self._lazy[key] = st
        return st

    def _relevant(self, side: int, cp: int) -> bool:
        return (cp < self.K) if side == START_SIDE else (cp == self.K)

    def _register_slot(self, st: _LazyState, slot: int, pk: int, nbr: int) -> bool:
        """First time a lazy state sees this slot's edge: import copies
        already realized from elsewhere and start watching the edge.
        Returns True when counts changed."""
        if slot in st.registered:
            return False
        st.registered.add(slot)
        changed = False
        for cp, val in self.edge_realized.get(pk, {}).items():
            if self._relevant(st.side, cp):
                heapq.heappush(st.heap, (val, pk, cp, nbr))
                st.fen.add(slot, -1)
                changed = True
        self.watchers.setdefault(pk, []).append((st, slot))
        return changed

    def _record_realized(self, origin: Optional[_LazyState], pk: int, cp: int,
                         value: int) -> None:
        self.registry[(pk, cp)] = value
        self.edge_realized.setdefault(pk, {})[cp] = value
        for st, slot in self.watchers.get(pk, ()):  # push to the other endpoint
            if st is origin or not self._relevant(st.side, cp):
                continue
            nbr, _ = st.slots.resolved[slot]
            heapq.heappush(st.heap, (value, pk, cp, nbr))
            st.fen.add(slot, -1)

    def _pick_copy(self, pk: int, j: int) -> int:
        """j-th unrealized start copy of edge pk (0-based j)."""
        taken = sorted(cp for cp in self.edge_realized.get(pk, {}) if cp < self.K)
        for t in taken:
            if t <= j:
                j += 1
        return j

    def _lazy_next(self, st: _LazyState):
        while True:
            top = st.heap[0] if st.heap else None
            k = st.fen.total
            if top is None and k == 0:
                return None
            top_frac = unit_from_bits(np.uint64(top[0])) if top is not None else 2.0
            if top is not None and (k == 0 or top_frac <= st.cursor):
                entry = heapq.heappop(st.heap)
                st.cursor = max(st.cursor, top_frac)
                st.returned.append(entry)
                return entry
            # draw the minimum of the k unrealized ranks above the cursor
            u = float(self._rng.random())
            vmin = 1.0 - (1.0 - st.cursor) * (1.0 - u) ** (1.0 / k)
            if top is not None and vmin >= top_frac:
                # all unrealized ranks exceed the realized candidate
                entry = heapq.heappop(st.heap)
                st.cursor = top_frac
                st.returned.append(entry)
                return entry
            slot = st.fen.descend(int(self._rng.integers(0, k)))
            nbr, pk = self._resolve_slot(st.v, st.slots, slot + 1)
            if self._register_slot(st, slot, pk, nbr):
                continue  # counts changed; redraw against fresh totals
            if st.side == START_SIDE:
                within = int(self._rng.integers(0, st.fen.count(slot)))
                cp = self._pick_copy(pk, within)
            else:
                cp = self.K
            value = _bits_from_unit(vmin)
            st.fen.add(slot, -1)
            self._record_realized(st, pk, cp, value)
            st.cursor = vmin
            entry = (value, pk, cp, nbr)
            st.returned.append(entry)
            return entry

    # -- unified stream API -------------------------------------------------

    def stream_entry(self, v: int, side: int, idx: int):
        """idx-th (0-based) incident element of v on the given side, in
        realized rank order: (value, pairkey, copy0, neighbor) or None."""
        if self.backend == "eager":
            streams = self._eager_streams(v)
            entries = streams[side]
            return entries[idx] if idx < len(entries) else None
        st = self._lazy_state(v, side)
        while len(st.returned) <= idx:
            if self._lazy_next(st) is None:
                return None
        return st.returned[idx]

    def realize_rank(self, u: int, v: int, pairkey: int, copy0: int) -> int:
        """Rank value of one element; lazy backend realizes it if needed."""
        if self.backend == "eager":
            return self.rank_value(pairkey, copy0)
        got = self.registry.get((pairkey, copy0))
        if got is not None:
            return got
        side = START_SIDE if copy0 < self.K else EXTEND_SIDE
        floor = 0.0
        for w in (u, v):
            st = self._lazy.get((w, side))
            if st is not None:
                floor = max(floor, st.cursor)
        frac = floor + (1.0 - floor) * float(self._rng.random())
        value = _bits_from_unit(frac)
        self._record_realized(None, pairkey, copy0, value)
        return value


# ---------------------------------------------------------------------------
# public operation wrappers (graph-level API used by tests and the CLI)


def element_pairkey(graph, elem: ElementRef) -> int:
    u, v = graph.edge_endpoints(elem.edge_id)
    return pair_key(u, v, graph.n)


def rank_of(model: RankModel, graph, elem: ElementRef) -> Rank:
    """Rank of an element; identical from either endpoint."""
    pk = element_pairkey(graph, elem)
    cp = elem.copy0(model.K)
    u, v = graph.edge_endpoints(elem.edge_id)
    value = model.realize_rank(u, v, pk, cp)
    return Rank(value=value, pairkey=pk, copy0=cp)


def color_of(model: RankModel, v: int) -> int:
    return model.color(v)


def is_frozen(model: RankModel, params: ParamSet, graph, elem: ElementRef,
              rank: Rank) -> bool:
    if elem.kind != ElementKind.START:
        raise ValueError("frozen status is defined for start elements only")
    u, v = graph.edge_endpoints(elem.edge_id)
    return model.element_frozen(model.color(u), model.color(v), rank.pairkey,
                                rank.copy0, rank.value)


def lowest(model: RankModel, side: int, u: int, i: int):
    """i-th smallest-ranked incident element of u on the given side
    (1-based), as (neighbor, ElementRef, Rank), or None when exhausted."""
    if i < 1:
        raise ValueError("index must be >= 1")
    entry = model.stream_entry(u, side, i - 1)
    if entry is None:
        return None
    value, pk, cp, nbr = entry
    eid = _edge_id_for(model, u, nbr)
    if cp < model.K:
        ref = ElementRef(eid, ElementKind.START, cp + 1)
    else:
        ref = ElementRef(eid, ElementKind.EXTEND)
    return nbr, ref, Rank(value=value, pairkey=pk, copy0=cp)


def _edge_id_for(model: RankModel, u: int, v: int) -> int:
    graph = getattr(model.view, "graph", None)
    if graph is None:
        access = getattr(model.view, "access", None)
        graph = getattr(access, "graph", None)
    if graph is None:
        return -1
    row = graph.neighbors(u)
    lo = graph.indptr[u]
    i = int(np.searchsorted(row, v))
    if i < len(row) and row[i] == v:
        return int(graph.eids[lo + i])
    return -1
