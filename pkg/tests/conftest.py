"""Shared test helpers: planted splice instances and independent oracles."""

import random

from hamdec.assembly import connectors_from_edges
from hamdec.graphs import OrientedGraph, build_oriented
from hamdec.pathcovers import DirectedPath


def reservoir_view(host, w_vertices):
    """Induced subgraph on w_vertices with labels pointing back to host."""
    w = sorted(w_vertices)
    idx = {v: i for i, v in enumerate(w)}
    edges = {(idx[u], idx[v]) for u, v in host.edges if u in idx and v in idx}
    return OrientedGraph(len(w), edges, labels=tuple(w), _validated=True)


def plant_completable_instance(seed, w_size, a):
    """Random splice instance that contains a completion by construction.

    Vertices [0, P) form a disjoint paths, [P, P + w_size) the reservoir.  A
    cyclic order visiting every path as a segment with reservoir runs of
    length >= 2 is planted; every other vertex pair is oriented at random.
    Returns (host, paths, reservoir, connectors).
    """
    assert w_size >= 2 * a
    rng = random.Random(f"planted:{seed}")
    lens = [rng.choice((1, 2, 3)) for _ in range(a)]
    total = sum(lens)
    paths = []
    v = 0
    for length in lens:
        paths.append(DirectedPath(tuple(range(v, v + length))))
        v += length
    n = total + w_size
    w = list(range(total, n))
    runs = [2] * a
    for _ in range(w_size - 2 * a):
        runs[rng.randrange(a)] += 1
    wperm = w[:]
    rng.shuffle(wperm)
    order = []
    pos = 0
    for i in range(a):
        order.extend(paths[i].vertices)
        order.extend(wperm[pos:pos + runs[i]])
        pos += runs[i]
    planted = {(order[i], order[(i + 1) % n]) for i in range(n)}
    edges = set()
    for x in range(n):
        for y in range(x + 1, n):
            if (x, y) in planted:
                edges.add((x, y))
            elif (y, x) in planted:
                edges.add((y, x))
            else:
                edges.add((x, y) if rng.random() < 0.5 else (y, x))
    host = build_oriented(n, edges)
    reservoir = reservoir_view(host, w)
    connectors = connectors_from_edges(host.edges, tuple(paths), w)
    return host, tuple(paths), reservoir, connectors


def bruteforce_completable(paths, reservoir, connectors, node_cap=500_000):
    """Exhaustive check that some completion exists: a cyclic arrangement of
    all paths and reservoir vertices where paths appear as segments, each
    reservoir run has length >= 2, and every join is an available edge.

    Independent of the splicing code: a plain DFS over the contracted
    digraph.  Returns True / False, or None when node_cap is hit.
    """
    a = len(paths)
    w = [reservoir.host(v) for v in range(reservoir.n)]
    w_edges = reservoir.host_edges()
    succ = {v: set() for v in w}
    for u, v in w_edges:
        succ[u].add(v)
    enter = {i: set(connectors.into_start[i]) for i in range(a)}   # w -> path i
    leave = {i: set(connectors.out_of_end[i]) for i in range(a)}   # path i -> w

    w_set = set(w)
    budget = [node_cap]

    def dfs(visited_paths, visited_w, head, run_len):
        """head: reservoir vertex at the tip of the current run."""
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        if run_len >= 2:
            if len(visited_paths) == a and visited_w == w_set and head in enter[0]:
                return True  # close the cycle back into path 0
            for nxt in range(1, a):
                if nxt in visited_paths or head not in enter[nxt]:
                    continue
                for w2 in sorted(leave[nxt]):
                    if w2 in visited_w:
                        continue
                    res = dfs(visited_paths | {nxt}, visited_w | {w2}, w2, 1)
                    if res:
                        return True
                    if res is None:
                        return None
        for w2 in sorted(succ[head]):
            if w2 not in visited_w:
                res = dfs(visited_paths, visited_w | {w2}, w2, run_len + 1)
                if res:
                    return True
                if res is None:
                    return None
        return False

    # anchor: the cycle is read starting with path 0's run
    for w0 in sorted(leave[0]):
        res = dfs({0}, {w0}, w0, 1)
        if res:
            return True
        if res is None:
            return None
    return False
