"""Splicing path covers into Hamilton cycles through a reservoir vertex set.

A cover of a vertex-disjoint paths is completed into one cycle by picking,
for each path, a reservoir in-neighbour of its start and a reservoir
out-neighbour of its end (all 2a picks distinct), partitioning the reservoir
into a blocks that pin consecutive picks together, and joining each pinned
pair by a Hamilton path inside its block.  Block paths are found by exact
backtracking search with reachability pruning, so blocks are kept small;
failed blocks trigger a fresh random partition of the reservoir.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    BudgetExhaustedError,
    ConnectorDegreeTooLowError,
    HypothesisViolatedError,
    InvariantViolationError,
    ReservoirMismatchError,
    SameEndpointsError,
    SpliceFailedError,
)
from .graphs import Edge, OrientedGraph
from .pathcovers import DirectedPath, PathCoverFamily


@dataclass(frozen=True)
class HamiltonCycle:
    """Directed Hamilton cycle, canonicalized to start at its smallest vertex.

    Two cycles are equal iff their edge sets are equal.
    """

    order: tuple[int, ...]
    edges: frozenset[Edge]

    @classmethod
    def from_order(cls, seq: Sequence[int]) -> "HamiltonCycle":
        if len(seq) < 3 or len(set(seq)) != len(seq):
            raise InvariantViolationError("cycle must visit >= 3 distinct vertices")
        k = seq.index(min(seq))
        order = tuple(seq[k:]) + tuple(seq[:k])
        n = len(order)
        edges = frozenset((order[i], order[(i + 1) % n]) for i in range(n))
        return cls(order, edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, HamiltonCycle) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)

    def spans(self, vertices: set[int]) -> bool:
        return set(self.order) == vertices

    def contains_segment(self, path: DirectedPath) -> bool:
        """True when the path's vertex sequence appears as a contiguous arc."""
        if len(path.vertices) == 1:
            return path.vertices[0] in self.order
        n = len(self.order)
        pos = {v: i for i, v in enumerate(self.order)}
        i = pos.get(path.vertices[0])
        if i is None:
            return False
        for step, v in enumerate(path.vertices):
            if self.order[(i + step) % n] != v:
                return False
        return True


@dataclass(frozen=True)
class Connectors:
    """Per path index: reservoir in-neighbours of the start vertex and
    reservoir out-neighbours of the end vertex."""

    into_start: tuple[frozenset[int], ...]
    out_of_end: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class ConnectorChoice:
    """The picked entry vertex t_i (before each start) and exit vertex s_i
    (after each end); all 2a vertices distinct."""

    entries: tuple[int, ...]
    exits: tuple[int, ...]


def connectors_from_edges(edges: set[Edge] | frozenset[Edge],
                          paths: Sequence[DirectedPath],
                          reservoir_vertices: Sequence[int]) -> Connectors:
    wset = set(reservoir_vertices)
    into = tuple(frozenset(u for u, v in edges if v == p.start and u in wset)
                 for p in paths)
    out = tuple(frozenset(v for u, v in edges if u == p.end and v in wset)
                for p in paths)
    return Connectors(into, out)


# -- exact Hamilton-path search -----------------------------------------


def hamilton_path_between(f: OrientedGraph, s: int, t: int,
                          budget: int | None = None, seed: int = 0,
                          restarts: int = 4) -> DirectedPath | None:
    """A Hamilton path of f from s to t, or None once the search tree is
    fully explored.

    Backtracking branches on the out-neighbour with the fewest remaining
    out-options, prunes heads from which some unvisited vertex is
    unreachable or cannot reach t, and restarts with reshuffled tie-breaking
    when a budget slice runs out.  Raises BudgetExhaustedError if the budget
    is consumed without either finding a path or completing an exhaustive
    pass.  Vertices are f's local indices.
    """
    n = f.n
    if s == t:
        raise SameEndpointsError(f"endpoints coincide: {s}")
    if not (0 <= s < n and 0 <= t < n):
        raise InvariantViolationError("endpoints outside the graph")
    if n == 1:
        return None
    slices = 1 if budget is None else max(1, restarts)
    per_slice = None if budget is None else max(1, budget // slices)
    spent = 0
    for attempt in range(slices):
        rng = random.Random(f"{seed}:path:{attempt}")
        result, used, cutoff = _bounded_path_search(f, s, t, per_slice, rng)
        spent += used
        if result is not None:
            return DirectedPath(tuple(result))
        if not cutoff:
            return None
    raise BudgetExhaustedError(
        f"no verdict for ({s}, {t}) within {budget} expansions", expansions=spent)


def _bounded_path_search(f: OrientedGraph, s: int, t: int,
                         budget: int | None, rng: random.Random
                         ) -> tuple[list[int] | None, int, bool]:
    """One backtracking pass; returns (path or None, expansions, cutoff?).

    Vertex sets are bitmasks so the per-node reachability pruning stays cheap.
    """
    n = f.n
    out_mask = [0] * n
    in_mask = [0] * n
    for u, v in f.edges:
        out_mask[u] |= 1 << v
        in_mask[v] |= 1 << u
    all_mask = (1 << n) - 1
    visited = 1 << s
    path = [s]
    expansions = 0
    cutoff = False

    def feasible(head: int, unvisited: int) -> bool:
        # every unvisited vertex must be reachable from head through
        # unvisited vertices, and must reach t the same way
        reach = 1 << head
        frontier = reach
        while frontier:
            nxt = 0
            bits = frontier
            while bits:
                b = bits & -bits
                bits ^= b
                nxt |= out_mask[b.bit_length() - 1]
            frontier = nxt & unvisited & ~reach
            reach |= frontier
        if unvisited & ~reach:
            return False
        reach = 1 << t
        frontier = reach
        while frontier:
            nxt = 0
            bits = frontier
            while bits:
                b = bits & -bits
                bits ^= b
                nxt |= in_mask[b.bit_length() - 1]
            frontier = nxt & unvisited & ~reach
            reach |= frontier
        return not (unvisited & ~reach)

    def rec() -> bool:
        nonlocal expansions, cutoff, visited
        head = path[-1]
        if len(path) == n:
            return head == t
        if budget is not None and expansions >= budget:
            cutoff = True
            return False
        expansions += 1
        unvisited = all_mask & ~visited
        if not feasible(head, unvisited):
            return False
        if len(path) == n - 1:
            cands = [t] if out_mask[head] & (1 << t) else []
        else:
            avail = out_mask[head] & unvisited & ~(1 << t)
            cands = []
            while avail:
                b = avail & -avail
                avail ^= b
                cands.append(b.bit_length() - 1)
            rng.shuffle(cands)
            cands.sort(key=lambda w: (out_mask[w] & unvisited).bit_count())
        for w in cands:
            visited |= 1 << w
            path.append(w)
            if rec():
                return True
            path.pop()
            visited &= ~(1 << w)
            if cutoff:
                return False
        return False

    found = rec()
    return (path if found else None), expansions, cutoff


def hamilton_path_any(f: OrientedGraph, budget: int | None = None,
                      seed: int = 0, endpoint_tries: int = 6) -> DirectedPath | None:
    """Best-effort Hamilton path with free endpoints.

    Tries a handful of diverse (start, end) pairs, preferring starts that are
    hard to enter and ends that are hard to leave.
    """
    n = f.n
    if n == 1:
        return DirectedPath((0,))
    rng = random.Random(f"{seed}:any")
    starts = sorted(range(n), key=lambda v: (f.in_degree(v), rng.random()))
    ends = sorted(range(n), key=lambda v: (f.out_degree(v), rng.random()))
    pairs: list[tuple[int, int]] = []
    for i in range(min(endpoint_tries, n)):
        s = starts[i % len(starts)]
        t = next(e for e in ends if e != s)
        if i > 0:
            t = ends[i % len(ends)]
            if t == s:
                t = ends[(i + 1) % len(ends)]
        if (s, t) not in pairs:
            pairs.append((s, t))
    for s, t in pairs:
        try:
            got = hamilton_path_between(f, s, t, budget=budget,
                                        seed=rng.randrange(1 << 30))
        except BudgetExhaustedError:
            got = None
        if got is not None:
            return got
    return None


# -- completing one cover into one cycle ---------------------------------


def _choose_connectors(connectors: Connectors, seed: int | str) -> ConnectorChoice | None:
    """Distinct picks, scarcest endpoint first, with backtracking."""
    a = len(connectors.into_start)
    slots: list[tuple[int, str, list[int]]] = []
    rng = random.Random(f"{seed}:choice")
    for i in range(a):
        slots.append((i, "entry", sorted(connectors.into_start[i])))
        slots.append((i, "exit", sorted(connectors.out_of_end[i])))
    for _, _, cands in slots:
        rng.shuffle(cands)
    slots.sort(key=lambda slot: len(slot[2]))
    entries = [-1] * a
    exits = [-1] * a
    used: set[int] = set()

    def rec(k: int) -> bool:
        if k == len(slots):
            return True
        i, kind, cands = slots[k]
        for w in cands:
            if w in used:
                continue
            used.add(w)
            if kind == "entry":
                entries[i] = w
            else:
                exits[i] = w
            if rec(k + 1):
                return True
            used.remove(w)
        return False

    if not rec(0):
        return None
    return ConnectorChoice(tuple(entries), tuple(exits))


def _block_viable(out_adj: dict[int, set[int]], in_adj: dict[int, set[int]],
                  block: list[int], s: int, t: int) -> bool:
    """Necessary condition for a Hamilton path s -> t inside the block:
    everything reachable from s forwards and from t backwards."""
    bset = set(block)
    for start, adj in ((s, out_adj), (t, in_adj)):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in bset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != bset:
            return False
    return True


def complete_cover_to_cycle(paths: Sequence[DirectedPath], reservoir: OrientedGraph,
                            connectors: Connectors, seed: int | str = 0, retries: int = 20,
                            block_cap: int = 24, path_budget: int | None = 200_000,
                            enforce_margin: bool = True) -> HamiltonCycle:
    """Complete vertex-disjoint paths into one cycle through the reservoir.

    ``reservoir`` is the graph induced on the reservoir vertex set (its label
    map gives the outside names); ``connectors`` lists, per path, which
    reservoir vertices can precede its start / follow its end.  The cycle
    visits every path as a contiguous segment and every reservoir vertex
    exactly once.
    """
    a = len(paths)
    if a == 0:
        raise InvariantViolationError("cover must contain at least one path")
    if len(connectors.into_start) != a or len(connectors.out_of_end) != a:
        raise InvariantViolationError("connector table size differs from cover size")
    w_host = [reservoir.host(v) for v in range(reservoir.n)]
    wset = set(w_host)
    covered: set[int] = set()
    for p in paths:
        if covered & set(p.vertices) or wset & set(p.vertices):
            raise InvariantViolationError("paths overlap each other or the reservoir")
        covered.update(p.vertices)
    for i in range(a):
        extra = (connectors.into_start[i] | connectors.out_of_end[i]) - wset
        if extra:
            raise InvariantViolationError(f"connectors outside reservoir: {sorted(extra)[:3]}")
    if len(wset) < 2 * a:
        raise ReservoirMismatchError(
            f"reservoir of {len(wset)} cannot host {a} blocks (needs >= {2 * a})")
    if enforce_margin and len(wset) < 4 * a:
        raise ReservoirMismatchError(
            f"reservoir of {len(wset)} is tight for {a} blocks (margin wants >= {4 * a})")
    if a * block_cap < len(wset):
        raise ReservoirMismatchError(
            f"{a} blocks of <= {block_cap} cannot absorb {len(wset)} reservoir vertices")
    floor = 2 * a if enforce_margin else 1
    for i in range(a):
        if len(connectors.into_start[i]) < floor:
            raise ConnectorDegreeTooLowError(
                f"start of path {i} has {len(connectors.into_start[i])} reservoir "
                f"in-neighbours, needs {floor}",
                endpoint=paths[i].start, direction="in")
        if len(connectors.out_of_end[i]) < floor:
            raise ConnectorDegreeTooLowError(
                f"end of path {i} has {len(connectors.out_of_end[i])} reservoir "
                f"out-neighbours, needs {floor}",
                endpoint=paths[i].end, direction="out")

    if _choose_connectors(connectors, seed) is None:
        raise SpliceFailedError("no distinct connector choice exists", attempts=0)

    local_of = {h: i for i, h in enumerate(w_host)}
    out_adj = {h: set() for h in w_host}
    in_adj = {h: set() for h in w_host}
    for u, v in reservoir.host_edges():
        out_adj[u].add(v)
        in_adj[v].add(u)
    sizes = [len(wset) // a + (1 if i < len(wset) % a else 0) for i in range(a)]
    if max(sizes) > block_cap:
        raise ReservoirMismatchError("block sizes exceed the cap")
    last_block = None
    for attempt in range(retries):
        # Re-draw the connector choice alongside the reservoir partition:
        # with few blocks the partition alone carries too little freedom.
        choice = _choose_connectors(connectors, f"{seed}:{attempt}")
        pinned_pairs = []  # block i holds exits[i] and entries[(i + 1) % a]
        for i in range(a):
            pinned_pairs.append((choice.exits[i], choice.entries[(i + 1) % a]))
        free = sorted(wset - set(choice.entries) - set(choice.exits))
        rng = random.Random(f"{seed}:blocks:{attempt}")
        blocks: list[list[int]] = []
        for _ in range(12):
            # reachability pre-screen: cheap rejections instead of burning a
            # full search attempt on a hopeless deal
            shuffled = free[:]
            rng.shuffle(shuffled)
            cand: list[list[int]] = []
            pos = 0
            for i in range(a):
                take = sizes[i] - 2
                cand.append([pinned_pairs[i][0], pinned_pairs[i][1]]
                            + shuffled[pos:pos + take])
                pos += take
            if all(_block_viable(out_adj, in_adj, cand[i],
                                 pinned_pairs[i][0], pinned_pairs[i][1])
                   for i in range(a)):
                blocks = cand
                break
        if not blocks:
            last_block = -1
            continue
        intervals: list[tuple[int, ...]] = []
        for i, block in enumerate(blocks):
            sub = reservoir.induced_subgraph([local_of[h] for h in block])
            sub_of = {sub.host(j): j for j in range(sub.n)}
            try:
                got = hamilton_path_between(
                    sub, sub_of[pinned_pairs[i][0]], sub_of[pinned_pairs[i][1]],
                    budget=path_budget, seed=rng.randrange(1 << 30))
            except BudgetExhaustedError:
                got = None
            if got is None:
                last_block = i
                break
            intervals.append(sub.host_path(got.vertices))
        else:
            order: list[int] = []
            for i in range(a):
                order.extend(paths[i].vertices)
                order.extend(intervals[i])
            return HamiltonCycle.from_order(order)
    raise SpliceFailedError(
        f"splice failed after {retries} reservoir partitions",
        block_index=last_block, attempts=retries)


def verify_completed_cycle(cycle: HamiltonCycle, paths: Sequence[DirectedPath],
                           reservoir: OrientedGraph, connectors: Connectors) -> bool:
    """Independent check of a completed cycle against its inputs."""
    expected = set()
    for p in paths:
        expected |= set(p.vertices)
    w_host = [reservoir.host(v) for v in range(reservoir.n)]
    expected |= set(w_host)
    if not cycle.spans(expected):
        return False
    if not all(cycle.contains_segment(p) for p in paths):
        return False
    allowed: set[Edge] = set(reservoir.host_edges())
    for p in paths:
        allowed.update(p.edges())
    for i, p in enumerate(paths):
        allowed.update((w, p.start) for w in connectors.into_start[i])
        allowed.update((p.end, w) for w in connectors.out_of_end[i])
    return cycle.edges <= allowed


# -- completing a family into many edge-disjoint cycles -------------------


@dataclass(frozen=True)
class CompletionFailure:
    index: int
    cause: str


@dataclass
class CompletionOutcome:
    """Cycles completed so far plus the failure (if any) that stopped us."""

    cycles: list[HamiltonCycle]
    failure: CompletionFailure | None = None

    @property
    def complete(self) -> bool:
        return self.failure is None


def complete_family_to_cycles(h: OrientedGraph, u_set: Sequence[int],
                              w_set: Sequence[int], family: PathCoverFamily,
                              slack: int, seed: int = 0, strict: bool = True,
                              retries: int = 20, block_cap: int = 24,
                              path_budget: int | None = 200_000,
                              reservoir_floor: int | None = None) -> CompletionOutcome:
    """Complete each cover of the family into a Hamilton cycle of h, removing
    each finished cycle's edges before the next round.

    U and W partition V(h); covers live on h[U], connectors and reservoir
    edges come from the not-yet-used edges of h.  Strict mode enforces the
    working hypotheses: every U vertex needs more than 2a + slack unused
    edges to W in both directions, and h[W] needs min semi-degree at least
    ``reservoir_floor`` (default: the family size).
    """
    u_sorted = sorted(u_set)
    w_sorted = sorted(w_set)
    uset, wset = set(u_sorted), set(w_sorted)
    if uset & wset or uset | wset != set(range(h.n)):
        raise InvariantViolationError("U and W must partition the vertex set")
    family.validate(universe=uset, host=h)
    t = family.t
    a_bound = family.a
    if strict:
        for u in u_sorted:
            d_out = sum(1 for v in h.out_neighbors[u] if v in wset)
            d_in = sum(1 for v in h.in_neighbors[u] if v in wset)
            if d_out <= 2 * a_bound + slack or d_in <= 2 * a_bound + slack:
                raise HypothesisViolatedError(
                    f"vertex {u} has degrees ({d_in}, {d_out}) towards the "
                    f"reservoir, needs > {2 * a_bound + slack}")
        fw = h.induced_subgraph(w_sorted)
        floor = t if reservoir_floor is None else reservoir_floor
        min_semi = min(min(fw.out_degree(v) for v in range(fw.n)),
                       min(fw.in_degree(v) for v in range(fw.n))) if fw.n else 0
        if min_semi < floor:
            raise HypothesisViolatedError(
                f"reservoir min semi-degree {min_semi} below floor {floor}")

    used: set[Edge] = set()
    cycles: list[HamiltonCycle] = []
    w_index = {v: i for i, v in enumerate(w_sorted)}
    for j, cover in enumerate(family.covers):
        remaining = h.edges - used
        f_j = OrientedGraph(len(w_sorted),
                            {(w_index[x], w_index[y])
                             for x, y in remaining if x in wset and y in wset},
                            labels=tuple(w_sorted), _validated=True)
        connectors = connectors_from_edges(remaining, cover.paths, w_sorted)
        try:
            cycle = complete_cover_to_cycle(
                cover.paths, f_j, connectors, seed=f"{seed}:round:{j}",
                retries=retries, block_cap=block_cap, path_budget=path_budget,
                enforce_margin=strict)
        except (ConnectorDegreeTooLowError, SpliceFailedError,
                ReservoirMismatchError) as exc:
            return CompletionOutcome(cycles, CompletionFailure(j, f"{type(exc).__name__}: {exc}"))
        if not cycle.edges <= remaining:
            return CompletionOutcome(cycles, CompletionFailure(j, "cycle reused an edge; bug"))
        used |= cycle.edges
        cycles.append(cycle)
    return CompletionOutcome(cycles, None)
