"""Bipartite matchings, r-factors, matching families, and reg() for digraphs.

Factor feasibility is decided by max-flow; the literal subset inequality of
the Gale-Ryser criterion is kept as an independent exponential oracle for
cross-validation.  Matching families mirror the construction "embed in a
regular supergraph, split it into perfect matchings, restrict to the original
edges" with all quotas checked on the actual output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    GenerationFailedError,
    HypothesisViolatedError,
    NoComplementFactorError,
    NoFactorError,
    NotRegularError,
    QuotaUnreachableError,
    ROutOfRangeError,
    TooLargeError,
    UnknownEdgeError,
)
from .flows import Dinic
from .graphs import BipartiteGraph, Edge, OrientedGraph

GALE_RYSER_CAP = 12
MATCHING_COUNT_CAP = 10


@dataclass(frozen=True)
class Matching:
    """Set of bipartite edges, no two sharing an endpoint."""

    pairs: frozenset[Edge]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def __post_init__(self):
        lefts = [a for a, _ in self.pairs]
        rights = [b for _, b in self.pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise NotRegularError("matching has repeated endpoints")


@dataclass(frozen=True)
class MatchingFamily:
    """t pairwise edge-disjoint matchings, each of size >= a."""

    matchings: tuple[Matching, ...]
    a: int
    t: int

    def validate(self) -> None:
        from .errors import InvariantViolationError
        if len(self.matchings) != self.t:
            raise InvariantViolationError("family length differs from t")
        seen: set[Edge] = set()
        for mt in self.matchings:
            if mt.size < self.a:
                raise InvariantViolationError(f"matching of size {mt.size} below quota {self.a}")
            if seen & mt.pairs:
                raise InvariantViolationError("matchings share an edge")
            seen |= mt.pairs

    def union_pairs(self) -> set[Edge]:
        out: set[Edge] = set()
        for mt in self.matchings:
            out |= mt.pairs
        return out


@dataclass(frozen=True)
class FactorCertificate:
    """An r-regular spanning subgraph, bipartite or oriented."""

    r: int
    edges: frozenset[Edge]
    kind: str  # "bipartite" | "oriented"
    regular: bool = True


# -- generic matching machinery ----------------------------------------


def maximum_bipartite_matching(left_size: int, right_size: int,
                               adj: Sequence[Sequence[int]],
                               scan_order: Sequence[int] | None = None) -> list[int]:
    """Kuhn's augmenting-path maximum matching.

    ``adj[a]`` lists the right vertices reachable from left vertex a, in the
    order the search should try them; returns match_left with -1 for
    unmatched left vertices.  Fully deterministic for fixed inputs.
    """
    match_left = [-1] * left_size
    match_right = [-1] * right_size
    order = range(left_size) if scan_order is None else scan_order

    def augment(a: int, visited: list[bool]) -> bool:
        for b in adj[a]:
            if visited[b]:
                continue
            visited[b] = True
            if match_right[b] == -1 or augment(match_right[b], visited):
                match_right[b] = a
                match_left[a] = b
                return True
        return False

    for a in order:
        if match_left[a] == -1:
            augment(a, [False] * right_size)
    return match_left


def maximum_matching_of(b: BipartiteGraph, rng: random.Random | None = None) -> Matching:
    """A maximum matching of b; neighbour order shuffled when rng is given."""
    adj = [sorted(b.adj_left[a]) for a in range(b.left_size)]
    if rng is not None:
        for row in adj:
            rng.shuffle(row)
    match_left = maximum_bipartite_matching(b.left_size, b.right_size, adj)
    return Matching(frozenset((a, mb) for a, mb in enumerate(match_left) if mb != -1))


# -- r-factors in bipartite graphs -------------------------------------


def _factor_flow(b: BipartiteGraph, r: int) -> tuple[Dinic, dict[int, Edge], int]:
    m = b.m
    net = Dinic(2 * m + 2)
    src, snk = 2 * m, 2 * m + 1
    for a in range(m):
        net.add_edge(src, a, r)
    for bb in range(m):
        net.add_edge(m + bb, snk, r)
    eids: dict[int, Edge] = {}
    for a, bb in sorted(b.edges):
        eids[net.add_edge(a, m + bb, 1)] = (a, bb)
    value = net.max_flow(src, snk)
    return net, eids, value


def has_bipartite_r_factor(b: BipartiteGraph, r: int) -> bool:
    """True iff b contains an r-regular spanning subgraph (flow criterion)."""
    m = b.m
    if not 0 <= r <= m:
        raise ROutOfRangeError(f"r={r} outside [0, {m}]")
    if r == 0:
        return True
    _, _, value = _factor_flow(b, r)
    return value == r * m


def gale_ryser_oracle(b: BipartiteGraph, r: int) -> bool:
    """Literal subset criterion: e(X, Y) >= r(|X| + |Y| - m) for all X, Y.

    Exponential in m; the independent cross-check for the flow route.
    """
    m = b.m
    if m > GALE_RYSER_CAP:
        raise TooLargeError(f"m={m} exceeds oracle cap {GALE_RYSER_CAP}")
    if not 0 <= r <= m:
        raise ROutOfRangeError(f"r={r} outside [0, {m}]")
    nmask = [0] * m
    for a, bb in b.edges:
        nmask[bb] |= 1 << a
    for x_mask in range(1 << m):
        x_size = x_mask.bit_count()
        cnt = [(nmask[bb] & x_mask).bit_count() for bb in range(m)]
        # Walk all Y in Gray-code order, updating e(X, Y) one vertex at a time.
        e = 0
        y_size = 0
        in_y = [False] * m
        if e < r * (x_size + y_size - m):
            return False
        for k in range(1, 1 << m):
            bit = (k & -k).bit_length() - 1
            if in_y[bit]:
                in_y[bit] = False
                e -= cnt[bit]
                y_size -= 1
            else:
                in_y[bit] = True
                e += cnt[bit]
                y_size += 1
            if e < r * (x_size + y_size - m):
                return False
    return True


def extract_bipartite_r_factor(b: BipartiteGraph, r: int) -> FactorCertificate:
    """An r-regular spanning subgraph of b, found by integral max-flow."""
    m = b.m
    if not 0 <= r <= m:
        raise ROutOfRangeError(f"r={r} outside [0, {m}]")
    if r == 0:
        return FactorCertificate(0, frozenset(), "bipartite")
    net, eids, value = _factor_flow(b, r)
    if value != r * m:
        raise NoFactorError(f"no {r}-factor (flow {value} < {r * m})")
    chosen = frozenset(edge for eid, edge in eids.items() if net.flow_on(eid) == 1)
    return FactorCertificate(r, chosen, "bipartite")


def almost_regular_factor(b: BipartiteGraph, alpha: float, xi: float) -> FactorCertificate:
    """An (alpha*m)-factor of an almost-regular dense bipartite graph.

    Hypothesis, checked: alpha >= 1/2 and
    alpha*m + xi <= min degree <= max degree <= alpha*m + xi + xi^2/m.
    """
    m = b.m
    am = alpha * m
    r = round(am)
    if abs(am - r) > 1e-9:
        raise HypothesisViolatedError(f"alpha*m = {am} is not integral")
    if alpha < 0.5 - 1e-12:
        raise HypothesisViolatedError(f"alpha={alpha} < 1/2")
    if xi < 0:
        raise HypothesisViolatedError(f"xi={xi} < 0")
    lo, hi = b.min_degree(), b.max_degree()
    if lo < am + xi - 1e-9:
        raise HypothesisViolatedError(f"min degree {lo} < alpha*m + xi = {am + xi}")
    if hi > am + xi + xi * xi / m + 1e-9:
        raise HypothesisViolatedError(
            f"max degree {hi} > alpha*m + xi + xi^2/m = {am + xi + xi * xi / m}")
    try:
        return extract_bipartite_r_factor(b, r)
    except NoFactorError as exc:
        raise NoFactorError(
            "hypothesis held but extraction failed; this is a bug") from exc


def embed_in_regular(b: BipartiteGraph, d: int, xi: float,
                     enforce_window: bool = True) -> BipartiteGraph:
    """A d-regular supergraph of b on the same sides.

    By default the degree window d - xi - xi^2/m <= min degree <=
    max degree <= d - xi is required.  For d <= m/2 the supergraph comes
    from complementing an (m-d)-factor of the complement graph; for larger d
    the missing edges are found directly by a degree-demand flow.  With
    ``enforce_window=False`` any d in [max degree, m] is accepted and only
    the demand flow decides feasibility.
    """
    m = b.m
    lo, hi = b.min_degree(), b.max_degree()
    if d > m:
        raise HypothesisViolatedError(f"d={d} > m={m}")
    if enforce_window:
        if hi > d - xi + 1e-9:
            raise HypothesisViolatedError(f"max degree {hi} > d - xi = {d - xi}")
        if lo < d - xi - xi * xi / m - 1e-9:
            raise HypothesisViolatedError(
                f"min degree {lo} < d - xi - xi^2/m = {d - xi - xi * xi / m}")
    elif d < hi:
        raise HypothesisViolatedError(f"d={d} below max degree {hi}")

    if enforce_window and d <= m // 2:
        comp = b.complement()
        try:
            anti = extract_bipartite_r_factor(comp, m - d)
        except NoFactorError as exc:
            raise NoComplementFactorError(
                f"complement has no {m - d}-factor despite hypothesis") from exc
        edges = {(a, bb) for a in range(m) for bb in range(m)} - anti.edges
        return BipartiteGraph(m, m, edges, b.left_labels, b.right_labels)

    # Demand flow: vertex v still needs d - deg(v) extra edges, all from the
    # complement of b.
    need_left = [d - b.degree_left(a) for a in range(m)]
    need_right = [d - b.degree_right(bb) for bb in range(m)]
    net = Dinic(2 * m + 2)
    src, snk = 2 * m, 2 * m + 1
    for a in range(m):
        net.add_edge(src, a, need_left[a])
    for bb in range(m):
        net.add_edge(m + bb, snk, need_right[bb])
    eids: dict[int, Edge] = {}
    for a in range(m):
        for bb in range(m):
            if (a, bb) not in b.edges:
                eids[net.add_edge(a, m + bb, 1)] = (a, bb)
    demand = sum(need_left)
    if net.max_flow(src, snk) != demand:
        raise NoComplementFactorError(f"no {d}-regular supergraph exists")
    added = {edge for eid, edge in eids.items() if net.flow_on(eid) == 1}
    return BipartiteGraph(m, m, set(b.edges) | added, b.left_labels, b.right_labels)


def pm_decompose_regular(b: BipartiteGraph) -> list[Matching]:
    """Split a d-regular bipartite graph into d disjoint perfect matchings."""
    m = b.m
    degs = {b.degree_left(a) for a in range(m)} | {b.degree_right(bb) for bb in range(m)}
    if len(degs) != 1:
        raise NotRegularError(f"degrees {sorted(degs)} are not uniform")
    d = degs.pop()
    adj = [sorted(b.adj_left[a]) for a in range(m)]
    out: list[Matching] = []
    for _ in range(d):
        match_left = maximum_bipartite_matching(m, m, adj)
        if any(mb == -1 for mb in match_left):
            raise NoFactorError("regular graph lost its perfect matching; bug")
        pairs = frozenset((a, mb) for a, mb in enumerate(match_left))
        out.append(Matching(pairs))
        for a, mb in enumerate(match_left):
            adj[a].remove(mb)
    return out


def count_matchings_with_few_special(b: BipartiteGraph, special: set[Edge],
                                     ell: int) -> tuple[int, int]:
    """Exact perfect-matching counts: (total, those with <= ell special edges)."""
    m = b.m
    if m > MATCHING_COUNT_CAP:
        raise TooLargeError(f"m={m} exceeds cap {MATCHING_COUNT_CAP}")
    unknown = set(special) - set(b.edges)
    if unknown:
        raise UnknownEdgeError(f"special edges not in graph: {sorted(unknown)[:3]}")
    # dp[(mask, s)] = matchings of A[0:popcount(mask)] onto B-set mask using
    # s special edges.
    dp: dict[tuple[int, int], int] = {(0, 0): 1}
    for a in range(m):
        nxt: dict[tuple[int, int], int] = {}
        for (mask, s), ways in dp.items():
            for bb in b.adj_left[a]:
                bit = 1 << bb
                if mask & bit:
                    continue
                key = (mask | bit, s + ((a, bb) in special))
                nxt[key] = nxt.get(key, 0) + ways
        dp = nxt
    total = sum(dp.values())
    with_few = sum(ways for (_, s), ways in dp.items() if s <= ell)
    return total, with_few


def sample_matching_family(b: BipartiteGraph, a: int, t: int, xi: float,
                           seed: int | str) -> tuple[MatchingFamily, int]:
    """t edge-disjoint matchings of size >= a, plus the union's min degree.

    Embeds b in the smallest feasible regular supergraph, splits the
    supergraph into perfect matchings, restricts each to E(b) in a
    seed-shuffled order, and keeps the first t restrictions meeting the
    quota.  Raises QuotaUnreachableError (carrying the achieved family) when
    fewer than t qualify.
    """
    m = b.m
    lo, hi = b.min_degree(), b.max_degree()
    if hi > lo + xi + 1e-9:
        raise HypothesisViolatedError(f"degree spread {hi - lo} exceeds slack {xi}")
    supergraph = None
    for d in range(hi, m + 1):
        try:
            supergraph = embed_in_regular(b, d, xi, enforce_window=False)
            break
        except NoComplementFactorError:
            continue
    if supergraph is None:
        raise NoComplementFactorError("no regular supergraph up to degree m; bug")
    pms = pm_decompose_regular(supergraph)
    rng = random.Random(f"{seed}:family")
    rng.shuffle(pms)
    kept: list[Matching] = []
    for pm in pms:
        restricted = Matching(frozenset(pm.pairs & b.edges))
        if restricted.size >= a:
            kept.append(restricted)
        if len(kept) == t:
            break
    family = MatchingFamily(tuple(kept), a=a, t=len(kept))
    union = family.union_pairs()
    deg: dict[tuple[str, int], int] = {}
    for aa, bb in union:
        deg[("a", aa)] = deg.get(("a", aa), 0) + 1
        deg[("b", bb)] = deg.get(("b", bb), 0) + 1
    min_union = 0 if not kept else min(
        min(deg.get(("a", v), 0) for v in range(m)),
        min(deg.get(("b", v), 0) for v in range(m)))
    if len(kept) < t:
        raise QuotaUnreachableError(
            f"only {len(kept)} of {t} matchings met quota {a}",
            achieved=len(kept), partial=(family, min_union))
    return family, min_union


# -- factors of oriented graphs ----------------------------------------


def _oriented_factor_flow(g: OrientedGraph, r: int) -> tuple[Dinic, dict[int, Edge], int]:
    n = g.n
    net = Dinic(2 * n + 2)
    src, snk = 2 * n, 2 * n + 1
    for v in range(n):
        net.add_edge(src, v, r)          # out-copies supply r
        net.add_edge(n + v, snk, r)      # in-copies demand r
    eids: dict[int, Edge] = {}
    for u, v in sorted(g.edges):
        eids[net.add_edge(u, n + v, 1)] = (u, v)
    value = net.max_flow(src, snk)
    return net, eids, value


def has_oriented_r_factor(g: OrientedGraph, r: int) -> bool:
    if r == 0:
        return True
    _, _, value = _oriented_factor_flow(g, r)
    return value == r * g.n


def oriented_reg(g: OrientedGraph) -> int:
    """Largest r for which g has a spanning sub-digraph with all in/out
    degrees exactly r.  Monotone in r, so binary search over flow tests."""
    hi = min(min(g.out_degree(v) for v in range(g.n)),
             min(g.in_degree(v) for v in range(g.n)))
    lo = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if has_oriented_r_factor(g, mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def extract_oriented_r_factor(g: OrientedGraph, r: int) -> FactorCertificate:
    """A spanning sub-digraph with every in/out-degree exactly r."""
    if r == 0:
        return FactorCertificate(0, frozenset(), "oriented")
    net, eids, value = _oriented_factor_flow(g, r)
    if value != r * g.n:
        raise NoFactorError(f"graph has no {r}-factor")
    chosen = frozenset(edge for eid, edge in eids.items() if net.flow_on(eid) == 1)
    return FactorCertificate(r, chosen, "oriented")


def is_oriented_r_factor(g: OrientedGraph, cert: FactorCertificate) -> bool:
    if not cert.edges <= g.edges:
        return False
    outs = {v: 0 for v in range(g.n)}
    ins = {v: 0 for v in range(g.n)}
    for u, v in cert.edges:
        outs[u] += 1
        ins[v] += 1
    return all(outs[v] == cert.r and ins[v] == cert.r for v in range(g.n))


# -- test-instance generator -------------------------------------------


def random_regular_bipartite(m: int, d: int, seed: int,
                             rounds_budget: int = 100) -> BipartiteGraph:
    """Random d-regular bipartite graph as a union of d disjoint perfect
    matchings, retrying with derived seeds when a round gets stuck."""
    if d > m:
        raise ROutOfRangeError(f"d={d} > m={m}")
    for attempt in range(rounds_budget):
        rng = random.Random(f"{seed}:bipartite:{attempt}")
        edges: set[Edge] = set()
        ok = True
        for _ in range(d):
            adj = [[bb for bb in range(m) if (aa, bb) not in edges] for aa in range(m)]
            for row in adj:
                rng.shuffle(row)
            match_left = maximum_bipartite_matching(m, m, adj)
            if any(mb == -1 for mb in match_left):
                ok = False
                break
            for aa, mb in enumerate(match_left):
                edges.add((aa, mb))
        if ok:
            return BipartiteGraph(m, m, edges)
    raise GenerationFailedError(f"no {d}-regular bipartite graph on {m}+{m}", seed=seed)
