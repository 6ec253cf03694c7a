import itertools
import random

import pytest

from hamdec.errors import (
    HypothesisViolatedError,
    NoFactorError,
    NotRegularError,
    QuotaUnreachableError,
    ROutOfRangeError,
    TooLargeError,
)
from hamdec.factors import (
    count_matchings_with_few_special,
    embed_in_regular,
    extract_bipartite_r_factor,
    extract_oriented_r_factor,
    gale_ryser_oracle,
    has_bipartite_r_factor,
    almost_regular_factor,
    is_oriented_r_factor,
    oriented_reg,
    pm_decompose_regular,
    random_regular_bipartite,
    sample_matching_family,
)
from hamdec.graphs import BipartiteGraph, build_oriented, random_oriented, rotational_tournament


def complete_bipartite(m):
    return BipartiteGraph(m, m, {(a, b) for a in range(m) for b in range(m)})


def eight_cycle():
    # C8 as a bipartite graph with sides of 4: a_i ~ b_i and a_i ~ b_{i-1}
    edges = {(i, i) for i in range(4)} | {(i, (i - 1) % 4) for i in range(4)}
    return BipartiteGraph(4, 4, edges)


def random_bipartite(m, p, rng):
    edges = {(a, b) for a in range(m) for b in range(m) if rng.random() < p}
    return BipartiteGraph(m, m, edges)


def check_regular_subgraph(b, cert, r):
    assert cert.edges <= b.edges
    for a in range(b.m):
        assert sum(1 for (x, _) in cert.edges if x == a) == r
    for bb in range(b.m):
        assert sum(1 for (_, y) in cert.edges if y == bb) == r


# -- existence: flow route vs literal inequality oracle -----------------

def test_has_factor_trivial_cases():
    assert has_bipartite_r_factor(complete_bipartite(3), 3)
    pm = BipartiteGraph(3, 3, {(i, i) for i in range(3)})
    assert not has_bipartite_r_factor(pm, 2)
    assert has_bipartite_r_factor(eight_cycle(), 1)
    with pytest.raises(ROutOfRangeError):
        has_bipartite_r_factor(pm, 4)


def test_oracle_trivial_cases():
    assert gale_ryser_oracle(complete_bipartite(3), 3)
    pm = BipartiteGraph(3, 3, {(i, i) for i in range(3)})
    assert not gale_ryser_oracle(pm, 2)  # X=A, Y=B gives 3 < 2*3
    with pytest.raises(TooLargeError):
        gale_ryser_oracle(complete_bipartite(13), 1)


def test_flow_matches_oracle_on_random_instances():
    rng = random.Random(20240601)
    checked = 0
    for _ in range(60):
        m = rng.randint(1, 6)
        b = random_bipartite(m, rng.random(), rng)
        for r in range(m + 1):
            assert has_bipartite_r_factor(b, r) == gale_ryser_oracle(b, r)
            checked += 1
    assert checked >= 200


# -- extraction ---------------------------------------------------------

def test_extract_perfect_matching_from_complete():
    b = complete_bipartite(3)
    cert = extract_bipartite_r_factor(b, 1)
    check_regular_subgraph(b, cert, 1)
    assert len(cert.edges) == 3


def test_extract_unique_two_factor():
    edges = {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)}
    b = BipartiteGraph(4, 4, edges)
    cert = extract_bipartite_r_factor(b, 2)
    assert cert.edges == frozenset(edges)


def test_extract_two_factor_of_complete():
    b = complete_bipartite(4)
    cert = extract_bipartite_r_factor(b, 2)
    check_regular_subgraph(b, cert, 2)
    assert len(cert.edges) == 8


def test_extract_raises_without_factor():
    pm = BipartiteGraph(3, 3, {(i, i) for i in range(3)})
    with pytest.raises(NoFactorError):
        extract_bipartite_r_factor(pm, 2)


# -- almost-regular factor ----------------------------------------------

def test_almost_regular_factor_identity_cases():
    two_cycles = BipartiteGraph(4, 4, {(0, 0), (0, 1), (1, 0), (1, 1),
                                       (2, 2), (2, 3), (3, 2), (3, 3)})
    cert = almost_regular_factor(two_cycles, alpha=0.5, xi=0)
    assert cert.edges == two_cycles.edges

    km = complete_bipartite(4)
    minus_pm = BipartiteGraph(4, 4, set(km.edges) - {(i, i) for i in range(4)})
    cert = almost_regular_factor(minus_pm, alpha=0.75, xi=0)
    assert cert.edges == minus_pm.edges


def test_almost_regular_factor_with_slack():
    b = random_regular_bipartite(6, 4, seed=9)
    cert = almost_regular_factor(b, alpha=0.5, xi=1)
    check_regular_subgraph(b, cert, 3)


def test_almost_regular_factor_hypothesis_errors():
    b = complete_bipartite(3)
    with pytest.raises(HypothesisViolatedError):
        almost_regular_factor(b, alpha=0.4, xi=0.2)  # alpha below 1/2
    with pytest.raises(HypothesisViolatedError):
        almost_regular_factor(b, alpha=0.5, xi=0.5)  # alpha*m not integral


# -- embedding into a regular supergraph ---------------------------------

def test_embed_identity_when_already_regular():
    b = eight_cycle()
    h = embed_in_regular(b, d=2, xi=0)
    assert h.edges == b.edges


def test_embed_perfect_matching_in_two_regular():
    pm = BipartiteGraph(3, 3, {(i, i) for i in range(3)})
    # window: d - xi - xi^2/m = 2 - 1 - 1/3 <= 1 <= 2 - 1; d > m/2 takes the
    # demand-flow route automatically
    h = embed_in_regular(pm, d=2, xi=1)
    assert pm.edges <= h.edges
    assert h.min_degree() == h.max_degree() == 2


def test_embed_rejects_degree_above_window():
    b = complete_bipartite(4)  # degree 4 > d - xi
    with pytest.raises(HypothesisViolatedError):
        embed_in_regular(b, d=2, xi=1)


def test_embed_relaxed_covers_dense_graphs():
    rng = random.Random(5)
    b = random_bipartite(6, 0.7, rng)
    d = b.max_degree()
    h = embed_in_regular(b, d=d, xi=0, enforce_window=False)
    assert b.edges <= h.edges
    assert h.min_degree() == h.max_degree() == d


# -- perfect-matching decompositions -------------------------------------

def test_pm_decompose_complete():
    ms = pm_decompose_regular(complete_bipartite(3))
    assert len(ms) == 3
    union = set()
    for mt in ms:
        assert mt.size == 3
        assert not (union & mt.pairs)
        union |= mt.pairs
    assert union == set(complete_bipartite(3).edges)


def test_pm_decompose_eight_cycle():
    ms = pm_decompose_regular(eight_cycle())
    assert len(ms) == 2
    assert {frozenset(mt.pairs) for mt in ms} == {
        frozenset({(i, i) for i in range(4)}),
        frozenset({(i, (i - 1) % 4) for i in range(4)}),
    }


def test_pm_decompose_one_regular_returns_itself():
    pm = BipartiteGraph(3, 3, {(0, 1), (1, 2), (2, 0)})
    ms = pm_decompose_regular(pm)
    assert len(ms) == 1 and ms[0].pairs == pm.edges


def test_pm_decompose_rejects_irregular():
    with pytest.raises(NotRegularError):
        pm_decompose_regular(BipartiteGraph(2, 2, {(0, 0), (0, 1), (1, 0)}))


def test_pm_decompose_random_regular_instances():
    for seed in range(5):
        m, d = 7, 4
        b = random_regular_bipartite(m, d, seed=seed)
        ms = pm_decompose_regular(b)
        assert len(ms) == d
        union = set()
        for mt in ms:
            assert mt.size == m
            assert not (union & mt.pairs)
            union |= mt.pairs
        assert union == set(b.edges)


# -- counting matchings with special edges --------------------------------

def count_matchings_bruteforce(b, special, ell):
    m = b.m
    total = with_few = 0
    for perm in itertools.permutations(range(m)):
        pairs = [(a, perm[a]) for a in range(m)]
        if all(p in b.edges for p in pairs):
            total += 1
            if sum(1 for p in pairs if p in special) <= ell:
                with_few += 1
    return total, with_few


def test_count_matchings_trivial():
    b = complete_bipartite(3)
    assert count_matchings_with_few_special(b, set(), 0) == (6, 6)
    assert count_matchings_with_few_special(b, set(b.edges), 2) == (6, 0)
    with pytest.raises(TooLargeError):
        count_matchings_with_few_special(complete_bipartite(11), set(), 0)


def test_count_matchings_matches_bruteforce():
    rng = random.Random(77)
    for seed in range(8):
        b = random_regular_bipartite(6, 3, seed=seed)
        special = set(rng.sample(sorted(b.edges), 4))
        got = count_matchings_with_few_special(b, special, 1)
        assert got == count_matchings_bruteforce(b, special, 1)


# -- matching families ----------------------------------------------------

def test_family_regular_no_slack_is_full_decomposition():
    b = random_regular_bipartite(8, 3, seed=1)
    family, min_deg = sample_matching_family(b, a=8, t=3, xi=0, seed=4)
    family.validate()
    assert family.t == 3
    assert family.union_pairs() == set(b.edges)
    assert min_deg == 3


def test_family_quota_unreachable_reports_achieved():
    b = random_regular_bipartite(8, 3, seed=1)
    with pytest.raises(QuotaUnreachableError) as exc:
        sample_matching_family(b, a=8, t=4, xi=0, seed=4)
    assert exc.value.achieved == 3


def test_family_on_almost_regular_graph():
    # 7-regular on 20+20 with half a perfect matching removed: degrees 6/7.
    base = random_regular_bipartite(20, 7, seed=3)
    pm = pm_decompose_regular(base)[0]
    dropped = {p for p in pm.pairs if p[0] < 10}
    b = BipartiteGraph(20, 20, set(base.edges) - dropped)
    assert (b.min_degree(), b.max_degree()) == (6, 7)
    family, min_deg = sample_matching_family(b, a=18, t=4, xi=1, seed=12)
    family.validate()
    assert family.t == 4
    assert all(mt.size >= 18 for mt in family.matchings)
    # reported union degree must match an independent recount
    union = family.union_pairs()
    degs = [sum(1 for (a, _) in union if a == v) for v in range(20)]
    degs += [sum(1 for (_, bb) in union if bb == v) for v in range(20)]
    assert min_deg == min(degs)


def test_family_rejects_wide_degree_spread():
    b = BipartiteGraph(3, 3, {(0, 0), (0, 1), (0, 2), (1, 0)})
    with pytest.raises(HypothesisViolatedError):
        sample_matching_family(b, a=1, t=1, xi=0, seed=0)


# -- reg() and oriented factors -------------------------------------------

def bruteforce_oriented_reg(g):
    """Max r by backtracking: pick r out-neighbours per vertex so that every
    vertex also receives exactly r."""
    def feasible(r):
        if r == 0:
            return True
        need_in = [r] * g.n
        outs = [sorted(g.out_neighbors[v]) for v in range(g.n)]

        def rec(v):
            if v == g.n:
                return all(x == 0 for x in need_in)
            cands = [w for w in outs[v] if need_in[w] > 0]
            if len(cands) < r:
                return False
            for combo in itertools.combinations(cands, r):
                for w in combo:
                    need_in[w] -= 1
                # remaining vertices must still be able to supply enough
                if rec(v + 1):
                    return True
                for w in combo:
                    need_in[w] += 1
            return False

        return rec(0)

    r = 0
    while feasible(r + 1):
        r += 1
    return r


def test_reg_of_rotational_tournaments():
    for n in (3, 5, 7, 9):
        assert oriented_reg(rotational_tournament(n)) == (n - 1) // 2


def test_reg_of_transitive_tournament():
    g = build_oriented(3, [(0, 1), (0, 2), (1, 2)])
    assert oriented_reg(g) == 0


def test_reg_matches_bruteforce_on_random_tournaments():
    for seed in range(6):
        g = random_oriented("tournament", 6, seed=seed)
        assert oriented_reg(g) == bruteforce_oriented_reg(g)
    for seed in range(2):
        g = random_oriented("tournament", 7, seed=seed)
        assert oriented_reg(g) == bruteforce_oriented_reg(g)


def test_reg_monotone_under_edge_addition():
    rng = random.Random(9)
    for seed in range(5):
        g = random_oriented("tournament", 7, seed=seed)
        edges = sorted(g.edges)
        rng.shuffle(edges)
        sub = build_oriented(g.n, edges[: len(edges) // 2])
        assert oriented_reg(sub) <= oriented_reg(g)


def test_extract_oriented_factor():
    g = rotational_tournament(5)
    whole = extract_oriented_r_factor(g, 2)
    assert whole.edges == g.edges
    one = extract_oriented_r_factor(g, 1)
    assert is_oriented_r_factor(g, one)
    with pytest.raises(NoFactorError):
        extract_oriented_r_factor(rotational_tournament(3), 2)
