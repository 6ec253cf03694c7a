import itertools
import random

import pytest

from hamdec.assembly import (
    CompletionOutcome,
    Connectors,
    HamiltonCycle,
    complete_cover_to_cycle,
    complete_family_to_cycles,
    connectors_from_edges,
    hamilton_path_between,
    verify_completed_cycle,
)
from hamdec.errors import (
    BudgetExhaustedError,
    ConnectorDegreeTooLowError,
    InvariantViolationError,
    SameEndpointsError,
)
from hamdec.graphs import build_oriented, random_oriented, rotational_tournament
from hamdec.pathcovers import DirectedPath, PathCover, PathCoverFamily


def ham_path_exists_bruteforce(g, s, t):
    rest = [v for v in range(g.n) if v not in (s, t)]
    for perm in itertools.permutations(rest):
        seq = (s,) + perm + (t,)
        if all(g.has_edge(seq[i], seq[i + 1]) for i in range(len(seq) - 1)):
            return True
    return False


# -- HamiltonCycle ---------------------------------------------------------

def test_cycle_canonical_rotation_and_equality():
    c1 = HamiltonCycle.from_order([2, 0, 1])
    c2 = HamiltonCycle.from_order([1, 2, 0])
    assert c1.order[0] == 0
    assert c1 == c2 and len({c1, c2}) == 1
    c3 = HamiltonCycle.from_order([0, 2, 1])
    assert c1 != c3


def test_cycle_segment_containment():
    c = HamiltonCycle.from_order([0, 1, 2, 3, 4])
    assert c.contains_segment(DirectedPath((3, 4, 0)))
    assert c.contains_segment(DirectedPath((2,)))
    assert not c.contains_segment(DirectedPath((1, 0)))


# -- hamilton_path_between ---------------------------------------------------

def test_path_search_triangle():
    g = rotational_tournament(3)
    p = hamilton_path_between(g, 0, 2)
    assert p.vertices == (0, 1, 2)


def test_path_search_single_edge_not_found():
    g = build_oriented(2, [(0, 1)])
    assert hamilton_path_between(g, 1, 0) is None
    assert hamilton_path_between(g, 0, 1).vertices == (0, 1)


def test_path_search_same_endpoints():
    g = rotational_tournament(3)
    with pytest.raises(SameEndpointsError):
        hamilton_path_between(g, 1, 1)


def test_path_search_all_pairs_rotational7():
    g = rotational_tournament(7)
    for s in range(7):
        for t in range(7):
            if s == t:
                continue
            p = hamilton_path_between(g, s, t)
            assert p is not None
            assert p.vertices[0] == s and p.vertices[-1] == t
            assert sorted(p.vertices) == list(range(7))
            assert all(g.has_edge(u, v) for u, v in p.edges())


def test_path_search_matches_bruteforce():
    for seed in range(60):
        rng = random.Random(seed)
        n = rng.randint(2, 8)
        g = random_oriented("tournament", n, seed=seed) if rng.random() < 0.5 else \
            build_oriented(n, {(u, v) for u in range(n) for v in range(n)
                               if u < v and rng.random() < 0.4})
        s, t = rng.sample(range(n), 2)
        found = hamilton_path_between(g, s, t, seed=seed)
        assert (found is not None) == ham_path_exists_bruteforce(g, s, t)


def test_path_search_budget_exhaustion():
    g = rotational_tournament(9)
    with pytest.raises(BudgetExhaustedError):
        hamilton_path_between(g, 0, 1, budget=2)


# -- complete_cover_to_cycle ---------------------------------------------------

def spliced_instance():
    # one path 0 -> 1, reservoir {2, 3, 4} carrying a directed triangle
    from hamdec.graphs import OrientedGraph
    paths = (DirectedPath((0, 1)),)
    reservoir = OrientedGraph(3, {(0, 1), (1, 2), (2, 0)}, labels=(2, 3, 4), _validated=True)
    connectors = Connectors(
        into_start=(frozenset({4}),),   # 4 -> 0
        out_of_end=(frozenset({2}),),   # 1 -> 2
    )
    return paths, reservoir, connectors


def test_complete_single_path_unique_splice():
    paths, reservoir, connectors = spliced_instance()
    cycle = complete_cover_to_cycle(paths, reservoir, connectors,
                                    enforce_margin=False)
    assert cycle == HamiltonCycle.from_order([0, 1, 2, 3, 4])
    assert verify_completed_cycle(cycle, paths, reservoir, connectors)


def test_complete_rejects_empty_cover():
    _, reservoir, _ = spliced_instance()
    with pytest.raises(InvariantViolationError):
        complete_cover_to_cycle((), reservoir, Connectors((), ()))


def test_complete_rejects_missing_connectors():
    paths, reservoir, _ = spliced_instance()
    bad = Connectors(into_start=(frozenset(),), out_of_end=(frozenset({2}),))
    with pytest.raises(ConnectorDegreeTooLowError) as exc:
        complete_cover_to_cycle(paths, reservoir, bad, enforce_margin=False)
    assert exc.value.direction == "in"


from conftest import bruteforce_completable, plant_completable_instance, reservoir_view


def test_complete_randomized_planted_instances():
    attempts = successes = 0
    for seed in range(30):
        rng = random.Random(1000 + seed)
        a = rng.randint(1, 3)
        w_size = rng.randint(max(8, 4 * a), 20)
        host, paths, reservoir, connectors = plant_completable_instance(seed, w_size, a)
        if any(len(c) < 2 * a for c in connectors.into_start + connectors.out_of_end):
            continue
        attempts += 1
        try:
            cycle = complete_cover_to_cycle(paths, reservoir, connectors, seed=seed)
        except Exception:
            continue
        assert verify_completed_cycle(cycle, paths, reservoir, connectors)
        successes += 1
    assert attempts >= 20
    assert successes >= attempts * 0.9


def test_bruteforce_oracle_confirms_planted_instances():
    for seed in range(10):
        _, paths, reservoir, connectors = plant_completable_instance(seed, 10, 2)
        assert bruteforce_completable(paths, reservoir, connectors) is True


# -- complete_family_to_cycles ---------------------------------------------------

def family_instance():
    """12-vertex host: U = 0..7 with two edge-disjoint covers, W = 8..11."""
    host = random_oriented("tournament", 12, seed=42)
    u = list(range(8))
    w = list(range(8, 12))
    return host, u, w


def greedy_cover_of(host, u_set, banned, rng):
    """A cover of u_set avoiding banned edges: greedy path growth."""
    unused = [v for v in u_set]
    rng.shuffle(unused)
    paths = []
    while unused:
        v = unused.pop()
        seq = [v]
        while True:
            nxts = [w for w in host.out_neighbors[seq[-1]]
                    if w in unused and (seq[-1], w) not in banned]
            if not nxts:
                break
            w = rng.choice(nxts)
            unused.remove(w)
            seq.append(w)
        paths.append(DirectedPath(tuple(seq)))
    return PathCover(tuple(paths))


def test_complete_family_two_covers():
    host, u, w = family_instance()
    rng = random.Random(7)
    cover1 = greedy_cover_of(host, u, set(), rng)
    cover2 = greedy_cover_of(host, u, cover1.edges(), rng)
    a = max(cover1.size, cover2.size)
    family = PathCoverFamily((cover1, cover2), a=a, t=2)
    outcome = complete_family_to_cycles(host, u, w, family, slack=0,
                                        seed=3, strict=False)
    assert isinstance(outcome, CompletionOutcome)
    # every completed cycle is Hamilton on the host and edge-disjoint
    seen = set()
    for i, cyc in enumerate(outcome.cycles):
        assert cyc.spans(set(range(12)))
        assert cyc.edges <= host.edges
        assert not (seen & cyc.edges)
        seen |= cyc.edges
        for p in family.covers[i].paths:
            assert cyc.contains_segment(p)


def test_complete_family_rejects_overlapping_covers():
    host, u, w = family_instance()
    rng = random.Random(9)
    cover = greedy_cover_of(host, u, set(), rng)
    family = PathCoverFamily((cover, cover), a=cover.size, t=2)
    with pytest.raises(InvariantViolationError):
        complete_family_to_cycles(host, u, w, family, slack=0, seed=0, strict=False)


def test_complete_family_t1_matches_single_completion():
    host, u, w = family_instance()
    rng = random.Random(11)
    cover = greedy_cover_of(host, u, set(), rng)
    family = PathCoverFamily((cover,), a=cover.size, t=1)
    outcome = complete_family_to_cycles(host, u, w, family, slack=0,
                                        seed=5, strict=False)
    if outcome.cycles:
        reservoir = reservoir_view(host, w)
        connectors = connectors_from_edges(host.edges, cover.paths, w)
        assert outcome.cycles[0].spans(set(range(12)))
        assert verify_completed_cycle(outcome.cycles[0], cover.paths,
                                      reservoir, connectors)
