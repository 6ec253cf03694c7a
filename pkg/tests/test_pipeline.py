import pytest

from hamdec.errors import TooLargeError
from hamdec.graphs import build_oriented, random_oriented, rotational_tournament
from hamdec.pipeline import (
    DecompositionCertificate,
    RunConfig,
    approximate_decomposition,
    graph_digest,
    sandwich_experiment,
    verify_certificate,
)
from hamdec.assembly import HamiltonCycle


def test_triangle_full_decomposition():
    g = rotational_tournament(3)
    cert, report = approximate_decomposition(g, RunConfig(seed=1))
    assert cert.k == cert.reg == 1
    assert not cert.leftover
    assert verify_certificate(g, cert) == (True, None)


def test_transitive_tournament_reg_zero():
    g = build_oriented(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    cert, report = approximate_decomposition(g, RunConfig(seed=1))
    assert cert.reg == 0 and cert.k == 0
    assert cert.leftover == g.edges
    assert verify_certificate(g, cert) == (True, None)


def test_rotational5_with_completion_stage():
    g = rotational_tournament(5)
    cert, report = approximate_decomposition(g, RunConfig(seed=0))
    assert verify_certificate(g, cert) == (True, None)
    # reg = 2 and the unique decomposition exists; the tiny-leftover exact
    # stage should finish the job whenever the first cycle leaves a 1-factor
    assert cert.k >= 1


def test_random_regular_instance():
    g = random_oriented("regular", 21, seed=5, r=6)
    cert, report = approximate_decomposition(g, RunConfig(seed=3))
    assert verify_certificate(g, cert) == (True, None)
    assert 0 <= cert.k <= cert.reg


def test_determinism_of_certificates():
    g = rotational_tournament(25)
    c1, _ = approximate_decomposition(g, RunConfig(seed=9))
    c2, _ = approximate_decomposition(g, RunConfig(seed=9))
    assert c1 == c2
    c3, _ = approximate_decomposition(g, RunConfig(seed=10))
    assert c1.graph_sha256 == c3.graph_sha256


def test_certificate_json_roundtrip():
    g = rotational_tournament(11)
    cert, _ = approximate_decomposition(g, RunConfig(seed=2))
    doc = cert.to_json()
    back = DecompositionCertificate.from_json(doc)
    assert back == cert
    assert verify_certificate(g, back) == (True, None)


def test_verify_catches_edge_reuse():
    g = rotational_tournament(5)
    cyc = HamiltonCycle.from_order([0, 1, 2, 3, 4])
    cert = DecompositionCertificate(
        5, graph_digest(g), (cyc, cyc),
        frozenset(g.edges) - cyc.edges, 2)
    ok, violation = verify_certificate(g, cert)
    assert not ok and violation == "EdgeReuse"


def test_verify_catches_non_hamiltonian():
    g = rotational_tournament(5)
    bad = HamiltonCycle.from_order([0, 1, 2])  # misses two vertices
    cert = DecompositionCertificate(5, graph_digest(g), (bad,),
                                    frozenset(g.edges), 2)
    ok, violation = verify_certificate(g, cert)
    assert not ok and violation == "NotHamiltonian"


def test_verify_catches_hash_and_leftover_mismatch():
    g = rotational_tournament(5)
    cert, _ = approximate_decomposition(g, RunConfig(seed=0))
    wrong_hash = DecompositionCertificate(5, "0" * 64, cert.cycles,
                                          cert.leftover, cert.reg)
    assert verify_certificate(g, wrong_hash) == (False, "GraphHashMismatch")
    if cert.leftover:
        short = DecompositionCertificate(5, cert.graph_sha256, cert.cycles,
                                         frozenset(), cert.reg)
        assert verify_certificate(g, short)[1] == "LeftoverMismatch"


def test_partial_failure_certificates_still_verify():
    # fuzz across seeds and sizes: every emitted certificate verifies
    for seed in range(4):
        for n in (9, 13, 17):
            g = random_oriented("tournament", n, seed=seed)
            cert, report = approximate_decomposition(g, RunConfig(seed=seed))
            assert verify_certificate(g, cert) == (True, None)
            assert cert.k <= cert.reg


def test_pipeline_preconditions():
    g = rotational_tournament(11)
    with pytest.raises(TooLargeError):
        approximate_decomposition(g, RunConfig(max_n=5))
    from hamdec.errors import HypothesisViolatedError
    with pytest.raises(HypothesisViolatedError):
        approximate_decomposition(g, RunConfig(min_semi_floor=6))


def test_sandwich_values():
    bounds3, payload3 = sandwich_experiment(3)
    assert payload3["exact_count"] == 1
    assert payload3["upper_log"] == pytest.approx(0.0)
    assert payload3["holds"]

    bounds5, payload5 = sandwich_experiment(5)
    assert payload5["exact_count"] == 1
    assert payload5["lower_log"] == pytest.approx(0.0)
    assert bounds5.upper.value() == pytest.approx(2 ** 2.5)

    bounds7, payload7 = sandwich_experiment(7)
    assert payload7["exact_count"] == 1
    assert payload7["holds"]

    with pytest.raises(TooLargeError):
        sandwich_experiment(9)
