"""Oriented-graph and bipartite-graph representations, generators and io.

An oriented graph is an orientation of a simple graph: no loops, and at most
one of (u, v), (v, u) present.  Vertices are dense integers [0, n); subgraph
views carry a ``labels`` tuple mapping their local indices back to the parent
graph, so structures found in a subproblem can be lifted without renumbering
mistakes.  Graph objects are immutable after construction and safe to share.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    AntiparallelPairError,
    DegreeTooLargeError,
    DuplicateEdgeError,
    EvenOrderError,
    FormatError,
    GenerationFailedError,
    LoopEdgeError,
    OverlappingSidesError,
    UnequalSidesError,
    UnknownEdgeError,
    VertexOutOfRangeError,
)

Edge = tuple[int, int]


@dataclass(frozen=True)
class DegreeSummary:
    """Vertex-degree statistics of an oriented graph.

    ``min_semi`` is the smaller of the minimum in- and out-degrees (the
    semi-degree); ``max_semi`` the larger of the two maxima.
    """

    min_out: int
    min_in: int
    max_out: int
    max_in: int
    min_semi: int
    max_semi: int


class OrientedGraph:
    """Immutable simple digraph without antiparallel edge pairs."""

    __slots__ = ("n", "edges", "out_neighbors", "in_neighbors", "labels")

    def __init__(self, n: int, edges: Iterable[Edge], labels: tuple[int, ...] | None = None,
                 _validated: bool = False):
        if n < 1:
            raise VertexOutOfRangeError(f"vertex count must be >= 1, got {n}")
        edge_set = frozenset(edges) if _validated else self._validate(n, edges)
        self.n = n
        self.edges = edge_set
        outs: list[set[int]] = [set() for _ in range(n)]
        ins: list[set[int]] = [set() for _ in range(n)]
        for u, v in edge_set:
            outs[u].add(v)
            ins[v].add(u)
        self.out_neighbors = tuple(frozenset(s) for s in outs)
        self.in_neighbors = tuple(frozenset(s) for s in ins)
        if labels is not None and len(labels) != n:
            raise VertexOutOfRangeError("label map length must equal n")
        self.labels = labels

    @staticmethod
    def _validate(n: int, edges: Iterable[Edge]) -> frozenset[Edge]:
        seen: set[Edge] = set()
        for e in edges:
            u, v = e
            if not (0 <= u < n and 0 <= v < n):
                raise VertexOutOfRangeError(f"edge {e} outside [0, {n})")
            if u == v:
                raise LoopEdgeError(f"loop edge ({u}, {v})")
            if (u, v) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
            if (v, u) in seen:
                raise AntiparallelPairError(f"both ({v}, {u}) and ({u}, {v}) supplied")
            seen.add((u, v))
        return frozenset(seen)

    # -- queries -------------------------------------------------------

    def out_degree(self, v: int) -> int:
        return len(self.out_neighbors[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_neighbors[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def host(self, v: int) -> int:
        """Lift a local vertex index to the parent graph's labels."""
        return v if self.labels is None else self.labels[v]

    def host_path(self, seq: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.host(v) for v in seq)

    def host_edges(self, edges: Iterable[Edge] | None = None) -> set[Edge]:
        src = self.edges if edges is None else edges
        return {(self.host(u), self.host(v)) for u, v in src}

    def induced_subgraph(self, vertices: Iterable[int]) -> "OrientedGraph":
        """Subgraph on ``vertices`` (local indices), labels composed with self's."""
        verts = sorted(set(vertices))
        index = {v: i for i, v in enumerate(verts)}
        edges = {(index[u], index[v]) for u, v in self.edges if u in index and v in index}
        labels = tuple(self.host(v) for v in verts)
        return OrientedGraph(len(verts), edges, labels=labels, _validated=True)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OrientedGraph) and self.n == other.n
                and self.edges == other.edges and self.labels == other.labels)

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.labels))

    def __repr__(self) -> str:
        return f"OrientedGraph(n={self.n}, m={len(self.edges)})"


class BipartiteGraph:
    """Undirected bipartite graph on sides A and B, stored as index pairs.

    Edges are (a, b) pairs of side-local indices.  ``left_labels`` and
    ``right_labels`` optionally record which parent vertices the sides came
    from; for graphs built by :func:`bipartite_between` an edge (a, b) stands
    for the directed parent edge left_labels[a] -> right_labels[b].
    """

    __slots__ = ("left_size", "right_size", "edges", "adj_left", "adj_right",
                 "left_labels", "right_labels")

    def __init__(self, left_size: int, right_size: int, edges: Iterable[Edge],
                 left_labels: tuple[int, ...] | None = None,
                 right_labels: tuple[int, ...] | None = None):
        self.left_size = left_size
        self.right_size = right_size
        seen: set[Edge] = set()
        for a, b in edges:
            if not (0 <= a < left_size and 0 <= b < right_size):
                raise VertexOutOfRangeError(f"bipartite edge ({a}, {b}) out of range")
            if (a, b) in seen:
                raise DuplicateEdgeError(f"duplicate bipartite edge ({a}, {b})")
            seen.add((a, b))
        self.edges = frozenset(seen)
        la: list[set[int]] = [set() for _ in range(left_size)]
        rb: list[set[int]] = [set() for _ in range(right_size)]
        for a, b in self.edges:
            la[a].add(b)
            rb[b].add(a)
        self.adj_left = tuple(frozenset(s) for s in la)
        self.adj_right = tuple(frozenset(s) for s in rb)
        self.left_labels = left_labels
        self.right_labels = right_labels

    @property
    def m(self) -> int:
        """Common side size; only defined when the sides are equal."""
        if self.left_size != self.right_size:
            raise UnequalSidesError(
                f"sides have sizes {self.left_size} and {self.right_size}")
        return self.left_size

    def degree_left(self, a: int) -> int:
        return len(self.adj_left[a])

    def degree_right(self, b: int) -> int:
        return len(self.adj_right[b])

    def min_degree(self) -> int:
        degs = [len(s) for s in self.adj_left] + [len(s) for s in self.adj_right]
        return min(degs) if degs else 0

    def max_degree(self) -> int:
        degs = [len(s) for s in self.adj_left] + [len(s) for s in self.adj_right]
        return max(degs) if degs else 0

    def host_edge(self, edge: Edge) -> Edge:
        a, b = edge
        u = a if self.left_labels is None else self.left_labels[a]
        v = b if self.right_labels is None else self.right_labels[b]
        return (u, v)

    def directed_host_edges(self) -> set[Edge]:
        """The parent-graph directed edges this bipartite graph records."""
        return {self.host_edge(e) for e in self.edges}

    def complement(self) -> "BipartiteGraph":
        edges = {(a, b) for a in range(self.left_size) for b in range(self.right_size)
                 if (a, b) not in self.edges}
        return BipartiteGraph(self.left_size, self.right_size, edges,
                              self.left_labels, self.right_labels)

    def __repr__(self) -> str:
        return (f"BipartiteGraph({self.left_size}+{self.right_size}, "
                f"m_edges={len(self.edges)})")


# -- construction -----------------------------------------------------


def build_oriented(n: int, edges: Iterable[Edge]) -> OrientedGraph:
    """Validate and build an oriented graph on vertex set [0, n)."""
    return OrientedGraph(n, edges)


def rotational_tournament(n: int) -> OrientedGraph:
    """The (n-1)/2-regular tournament with edges i -> i + j (mod n)."""
    if n % 2 == 0:
        raise EvenOrderError(f"rotational tournament needs odd n, got {n}")
    if n < 3:
        raise VertexOutOfRangeError("need n >= 3")
    half = (n - 1) // 2
    edges = {(i, (i + j) % n) for i in range(n) for j in range(1, half + 1)}
    return OrientedGraph(n, edges, _validated=True)


def random_tournament(n: int, seed: int) -> OrientedGraph:
    """Each unordered pair oriented uniformly at random."""
    rng = random.Random(seed)
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            edges.add((u, v) if rng.random() < 0.5 else (v, u))
    return OrientedGraph(n, edges, _validated=True)


def random_regular_oriented(n: int, r: int, seed: int, rounds_budget: int = 100) -> OrientedGraph:
    """Random r-regular oriented graph as a union of r permutation digraphs.

    Each round adds a permutation digraph v -> sigma(v) chosen by a randomized
    matching on the still-available pairs (no loops, no reuse, no antiparallel
    conflicts).  A round with no feasible permutation aborts the attempt; the
    whole construction restarts with a derived seed, up to ``rounds_budget``
    attempts.
    """
    if r > (n - 1) // 2:
        raise DegreeTooLargeError(f"r={r} exceeds (n-1)/2 for n={n}")
    for attempt in range(rounds_budget):
        rng = random.Random(f"{seed}:regular:{attempt}")
        edges: set[Edge] = set()
        ok = True
        for _ in range(r):
            sigma = _random_conflict_free_permutation(n, edges, rng)
            if sigma is None:
                ok = False
                break
            for u in range(n):
                edges.add((u, sigma[u]))
        if ok:
            return OrientedGraph(n, edges, _validated=True)
    raise GenerationFailedError(
        f"could not build {r}-regular oriented graph on {n} vertices", seed=seed)


def _random_conflict_free_permutation(n: int, edges: set[Edge],
                                      rng: random.Random) -> list[int] | None:
    """Random permutation sigma with sigma(v) != v and (v, sigma(v)),
    (sigma(v), v) both unused; None if no such permutation exists."""
    avail = [[w for w in range(n)
              if w != v and (v, w) not in edges and (w, v) not in edges]
             for v in range(n)]
    for row in avail:
        rng.shuffle(row)
    match_of_w = [-1] * n
    sigma = [-1] * n

    def augment(v: int, visited: set[int]) -> bool:
        for w in avail[v]:
            if w in visited:
                continue
            visited.add(w)
            if match_of_w[w] == -1 or augment(match_of_w[w], visited):
                match_of_w[w] = v
                sigma[v] = w
                return True
        return False

    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        if not augment(v, set()):
            return None
    return sigma


def random_oriented(kind: str, n: int, seed: int, r: int | None = None) -> OrientedGraph:
    """Generate a random oriented graph: kind "tournament" or "regular".

    Deterministic for a fixed seed.
    """
    if kind == "tournament":
        return random_tournament(n, seed)
    if kind == "regular":
        if r is None:
            raise ValueError("regular kind requires r")
        return random_regular_oriented(n, r, seed)
    raise ValueError(f"unknown kind {kind!r}")


# -- accounting and subgraphs -----------------------------------------


def degree_summary(g: OrientedGraph) -> DegreeSummary:
    outs = [g.out_degree(v) for v in range(g.n)]
    ins = [g.in_degree(v) for v in range(g.n)]
    return DegreeSummary(
        min_out=min(outs), min_in=min(ins),
        max_out=max(outs), max_in=max(ins),
        min_semi=min(min(outs), min(ins)),
        max_semi=max(max(outs), max(ins)),
    )


def bipartite_between(g: OrientedGraph, xs: Iterable[int], ys: Iterable[int],
                      allow_unequal: bool = False) -> BipartiteGraph:
    """Bipartite graph of the g-edges directed from X to Y.

    X and Y are given in g's local indices and become the left/right label
    maps of the result, preserving the supplied order.  Edge (a, b) of the
    result stands for the directed edge xs[a] -> ys[b].
    """
    xl = list(xs)
    yl = list(ys)
    if set(xl) & set(yl):
        raise OverlappingSidesError("X and Y intersect")
    if len(xl) != len(yl) and not allow_unequal:
        raise UnequalSidesError(f"|X|={len(xl)} != |Y|={len(yl)}")
    y_index = {v: j for j, v in enumerate(yl)}
    edges = set()
    for a, u in enumerate(xl):
        for v in g.out_neighbors[u]:
            j = y_index.get(v)
            if j is not None:
                edges.add((a, j))
    return BipartiteGraph(len(xl), len(yl), edges,
                          left_labels=tuple(g.host(v) for v in xl),
                          right_labels=tuple(g.host(v) for v in yl))


def remove_edges(g: OrientedGraph, removed: Iterable[Edge]) -> OrientedGraph:
    rem = set(removed)
    unknown = rem - g.edges
    if unknown:
        raise UnknownEdgeError(f"{len(unknown)} edges not in graph, e.g. {min(unknown)}")
    return OrientedGraph(g.n, g.edges - rem, labels=g.labels, _validated=True)


# -- edge-list io ------------------------------------------------------
#
# Format: header "og <n> <m>", then m lines "<u> <v>" for directed u -> v.


def write_edge_list(g: OrientedGraph) -> str:
    lines = [f"og {g.n} {len(g.edges)}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> OrientedGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "og":
        raise FormatError(f"bad header {lines[0]!r}; expected 'og <n> <m>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError as exc:
        raise FormatError(f"bad header numbers in {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise FormatError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad edge line {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise FormatError(f"bad edge line {ln!r}") from exc
    return build_oriented(n, edges)
