"""End-to-end driver: extract a maximum regular factor, split into
subproblems, build path-cover families, splice covers into edge-disjoint
Hamilton cycles, and emit a verifiable certificate.

The partition route mirrors the large-n construction and is attempted
whenever K^3 subproblems fit; at the sizes this package targets its
per-subproblem densities are usually too thin to complete cycles, so a
direct stage then runs the same cover-and-reservoir machinery on the whole
residual graph, with covers found by exact search.  A final completion
stage optionally decomposes a tiny regular leftover by exact backtracking.
Certificates are re-verified from scratch before being returned.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from typing import Any

from .assembly import (
    HamiltonCycle,
    complete_cover_to_cycle,
    complete_family_to_cycles,
    connectors_from_edges,
    hamilton_path_any,
    hamilton_path_between,
)
from .counting import (
    BoundReport,
    LogCount,
    count_hamilton_decompositions_exact,
    count_hamilton_decompositions_ordered,
    decomposition_upper_bound,
    find_hamilton_decomposition,
)
from .errors import (
    BudgetExhaustedError,
    HamdecError,
    InvariantViolationError,
    HypothesisViolatedError,
    KTooLargeError,
    TooLargeError,
)
from .factors import extract_oriented_r_factor, oriented_reg
from .graphs import Edge, OrientedGraph, rotational_tournament, write_edge_list
from .partition import build_partition
from .pathcovers import (
    DirectedPath,
    PathCover,
    build_path_cover_family,
    lift_path_cover_family,
)


@dataclass
class RunConfig:
    """Desk-scale knobs standing in for the asymptotic parameter bindings."""

    k: int | None = None          # partition arity; derived from n when None
    eps: float = 0.3
    b: int = 4                    # parts per path-cover construction
    a: int | None = None          # cover size bound; derived when None
    t: int | None = None          # covers requested per subproblem; derived when None
    block_cap: int = 24
    partition_retries: int = 3
    splice_retries: int = 20
    path_budget: int = 20_000
    seed: int = 0
    completion_stage: str = "exact-backtracking"   # "none" | "exact-backtracking"
    direct_stage: bool = True
    w_fraction: float = 0.45      # direct-stage reservoir share of n
    direct_failure_budget: int = 2
    max_cycles: int | None = None
    max_n: int = 2000
    min_semi_floor: int = 0

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.b < 2 or self.b % 2:
            raise ValueError(f"b must be even and >= 2, got {self.b}")
        if self.completion_stage not in ("none", "exact-backtracking"):
            raise ValueError(f"unknown completion stage {self.completion_stage!r}")

    def partition_k(self, n: int) -> int:
        if self.k is not None:
            return self.k
        return 2 if n < 500 else 3


@dataclass(frozen=True)
class DecompositionCertificate:
    """Verified family of edge-disjoint Hamilton cycles plus the unused rest."""

    n: int
    graph_sha256: str
    cycles: tuple[HamiltonCycle, ...]
    leftover: frozenset[Edge]
    reg: int

    @property
    def k(self) -> int:
        return len(self.cycles)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "graph_sha256": self.graph_sha256,
            "cycles": [list(c.order) for c in self.cycles],
            "leftover": sorted([u, v] for u, v in self.leftover),
            "reg": self.reg,
            "k": self.k,
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "DecompositionCertificate":
        cycles = tuple(HamiltonCycle.from_order(seq) for seq in doc["cycles"])
        leftover = frozenset((int(u), int(v)) for u, v in doc["leftover"])
        cert = cls(n=int(doc["n"]), graph_sha256=str(doc["graph_sha256"]),
                   cycles=cycles, leftover=leftover, reg=int(doc["reg"]))
        if cert.k != int(doc["k"]):
            raise InvariantViolationError("certificate k field disagrees with cycles")
        return cert


@dataclass
class RunReport:
    n: int = 0
    reg: int = 0
    k: int = 0
    seed: int = 0
    stages: list[dict[str, Any]] = field(default_factory=list)
    subproblems: list[dict[str, Any]] = field(default_factory=list)
    hard_failures: list[str] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.k / self.reg if self.reg else 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n, "reg": self.reg, "k": self.k,
            "ratio": self.ratio, "seed": self.seed,
            "stages": self.stages, "subproblems": self.subproblems,
            "hard_failures": self.hard_failures,
        }


def graph_digest(g: OrientedGraph) -> str:
    return hashlib.sha256(write_edge_list(g).encode("ascii")).hexdigest()


# -- certificate verification -------------------------------------------


def verify_certificate(g: OrientedGraph, cert: DecompositionCertificate
                       ) -> tuple[bool, str | None]:
    """Re-check every certificate invariant from scratch; returns
    (ok, first violation)."""
    if cert.n != g.n:
        return False, "SizeMismatch"
    if cert.graph_sha256 != graph_digest(g):
        return False, "GraphHashMismatch"
    vertices = set(range(g.n))
    used: set[Edge] = set()
    for cyc in cert.cycles:
        if not cyc.spans(vertices):
            return False, "NotHamiltonian"
        if not cyc.edges <= g.edges:
            return False, "UnknownEdge"
        if used & cyc.edges:
            return False, "EdgeReuse"
        used |= cyc.edges
    if cert.leftover & used:
        return False, "LeftoverOverlap"
    if not cert.leftover <= g.edges:
        return False, "UnknownEdge"
    if used | cert.leftover != g.edges:
        return False, "LeftoverMismatch"
    if cert.reg != oriented_reg(g):
        return False, "RegMismatch"
    if cert.k > cert.reg:
        return False, "TooManyCycles"
    return True, None


# -- the pipeline ---------------------------------------------------------


def _partition_stage(g: OrientedGraph, factor, config: RunConfig, used: set[Edge],
                     cycles: list[HamiltonCycle], report: RunReport) -> None:
    n = g.n
    k = config.partition_k(n)
    try:
        specs, preport = build_partition(g, factor, k=k, eps=config.eps,
                                         seed=config.seed,
                                         retry_budget=config.partition_retries)
    except KTooLargeError as exc:
        report.stages.append({"name": "partition", "skipped": str(exc)})
        return
    report.stages.append({
        "name": "partition", "k": k, "retries": preport.retries,
        "properties_met": preport.properties_met,
        "target_inner_degree": preport.stats.target_inner_degree,
    })
    for spec in specs:
        row: dict[str, Any] = {"index": spec.index}
        inner = spec.inner_graph
        m_u = inner.n
        if config.b > m_u // 2 or not spec.inner_edges:
            row["skipped"] = "inner graph too small"
            report.subproblems.append(row)
            continue
        outs = [inner.out_degree(v) for v in range(m_u)]
        ins = [inner.in_degree(v) for v in range(m_u)]
        spread = max(max(outs), max(ins)) - min(min(outs), min(ins))
        a_bound = config.a if config.a is not None else max(1, len(spec.w_vertices) // 4)
        t_goal = config.t if config.t is not None else 2
        try:
            family, min_union = build_path_cover_family(
                inner, b=config.b, a=a_bound, t=t_goal, xi=spread,
                seed=f"{config.seed}:covers:{spec.index}")
        except HamdecError as exc:
            row["family_error"] = f"{type(exc).__name__}: {exc}"
            report.subproblems.append(row)
            continue
        row["covers"] = family.t
        row["union_min_semi_degree"] = min_union
        if family.t == 0:
            report.subproblems.append(row)
            continue
        lifted = lift_path_cover_family(family, inner)
        outcome = complete_family_to_cycles(
            spec.combined_graph(n), spec.u_vertices, spec.w_vertices, lifted,
            slack=0, seed=f"{config.seed}:splice:{spec.index}", strict=False,
            retries=config.splice_retries, block_cap=config.block_cap,
            path_budget=config.path_budget)
        row["cycles"] = len(outcome.cycles)
        if outcome.failure is not None:
            row["failure"] = outcome.failure.cause
        for cyc in outcome.cycles:
            if cyc.edges & used or not cyc.edges <= g.edges:
                row["dropped"] = "cycle clashed with used edges"
                continue
            used |= cyc.edges
            cycles.append(cyc)
        report.subproblems.append(row)


def _extract_cycle_exact(residual: OrientedGraph, budget: int, seed: int | str
                         ) -> HamiltonCycle | None:
    """One Hamilton cycle of the residual graph by exact search through its
    lowest-labelled active vertex."""
    anchors = [v for v in range(residual.n) if residual.out_neighbors[v]]
    if not anchors:
        return None
    v0 = anchors[0]
    for w in sorted(residual.out_neighbors[v0]):
        try:
            path = hamilton_path_between(residual, w, v0, budget=budget, seed=0)
        except BudgetExhaustedError:
            path = None
        if path is not None:
            return HamiltonCycle.from_order(path.vertices)
    return None


def _direct_stage(g: OrientedGraph, factor, config: RunConfig, used: set[Edge],
                  cycles: list[HamiltonCycle], report: RunReport) -> None:
    n = g.n
    rounds = 0
    failures = 0
    if n < 12:
        while config.max_cycles is None or len(cycles) < config.max_cycles:
            residual = OrientedGraph(n, g.edges - used, _validated=True)
            cyc = _extract_cycle_exact(residual, config.path_budget,
                                       f"{config.seed}:extract:{rounds}")
            if cyc is None:
                break
            used |= cyc.edges
            cycles.append(cyc)
            rounds += 1
        report.stages.append({"name": "direct", "mode": "cycle-extraction",
                              "rounds": rounds})
        return

    w_size = min(n - 2, max(8, round(n * config.w_fraction)))
    blocks = max(1, -(w_size // -config.block_cap))
    reroll = 0
    consecutive = 0
    rng = random.Random(f"{config.seed}:direct")
    w_vertices = sorted(rng.sample(range(n), w_size))
    while consecutive <= config.direct_failure_budget:
        if config.max_cycles is not None and len(cycles) >= config.max_cycles:
            break
        wset = set(w_vertices)
        u_vertices = sorted(set(range(n)) - wset)
        # Covers come from the whole residual: flow-extracted factors carry
        # layered structure that starves the exact path search.
        inner_rem = {(u, v) for u, v in g.edges - used
                     if u not in wset and v not in wset}
        u_index = {v: i for i, v in enumerate(u_vertices)}
        u_graph = OrientedGraph(len(u_vertices),
                                {(u_index[u], u_index[v]) for u, v in inner_rem},
                                labels=tuple(u_vertices), _validated=True)
        path = hamilton_path_any(u_graph, budget=config.path_budget,
                                 seed=rng.randrange(1 << 30))
        if path is None:
            failures += 1
            consecutive += 1
            reroll += 1
            w_vertices = sorted(rng.sample(range(n), w_size))
            continue
        host_path = u_graph.host_path(path.vertices)
        cover = _cut_into_segments(host_path, blocks)
        residual = g.edges - used
        w_index = {v: i for i, v in enumerate(w_vertices)}
        reservoir = OrientedGraph(
            len(w_vertices),
            {(w_index[u], w_index[v]) for u, v in residual
             if u in w_index and v in w_index},
            labels=tuple(w_vertices), _validated=True)
        connectors = connectors_from_edges(residual, cover.paths, w_vertices)
        try:
            cyc = complete_cover_to_cycle(
                cover.paths, reservoir, connectors,
                seed=f"{config.seed}:directsplice:{rounds}:{reroll}",
                retries=config.splice_retries, block_cap=config.block_cap,
                path_budget=config.path_budget, enforce_margin=False)
        except HamdecError:
            failures += 1
            consecutive += 1
            reroll += 1
            w_vertices = sorted(rng.sample(range(n), w_size))
            continue
        if cyc.edges & used or not cyc.edges <= g.edges:
            failures += 1
            consecutive += 1
            continue
        used |= cyc.edges
        cycles.append(cyc)
        rounds += 1
        consecutive = 0
    report.stages.append({"name": "direct", "mode": "reservoir", "rounds": rounds,
                          "failures": failures, "w_size": w_size, "blocks": blocks})


def _cut_into_segments(path: tuple[int, ...], pieces: int) -> PathCover:
    pieces = max(1, min(pieces, len(path)))
    size = len(path) // pieces
    extra = len(path) % pieces
    segs = []
    pos = 0
    for i in range(pieces):
        take = size + (1 if i < extra else 0)
        segs.append(DirectedPath(tuple(path[pos:pos + take])))
        pos += take
    return PathCover(tuple(segs))


def _completion_stage(g: OrientedGraph, config: RunConfig, used: set[Edge],
                      cycles: list[HamiltonCycle], report: RunReport) -> None:
    leftover = g.edges - used
    if not leftover:
        return
    outs = [0] * g.n
    ins = [0] * g.n
    for u, v in leftover:
        outs[u] += 1
        ins[v] += 1
    degs = set(outs) | set(ins)
    if len(degs) != 1:
        report.stages.append({"name": "completion", "skipped": "leftover not regular"})
        return
    rho = degs.pop()
    if rho == 0 or rho > 2 or g.n > 12:
        report.stages.append({"name": "completion",
                              "skipped": f"leftover degree {rho}, n {g.n} beyond caps"})
        return
    leftover_graph = OrientedGraph(g.n, leftover, _validated=True)
    found = find_hamilton_decomposition(leftover_graph)
    if found is None:
        report.stages.append({"name": "completion", "found": 0})
        return
    for order in found:
        cyc = HamiltonCycle.from_order(order)
        used |= cyc.edges
        cycles.append(cyc)
    report.stages.append({"name": "completion", "found": len(found)})


def approximate_decomposition(g: OrientedGraph, config: RunConfig | None = None
                              ) -> tuple[DecompositionCertificate, RunReport]:
    """Greedily build verified edge-disjoint Hamilton cycles of g.

    Returns the certificate together with a per-stage report; on internal
    stage failures whatever cycles were completed are still certified.
    """
    config = config or RunConfig()
    if g.n > config.max_n:
        raise TooLargeError(f"n={g.n} exceeds the configured budget {config.max_n}")
    min_semi = min(min(g.out_degree(v) for v in range(g.n)),
                   min(g.in_degree(v) for v in range(g.n)))
    if min_semi < config.min_semi_floor:
        raise HypothesisViolatedError(
            f"min semi-degree {min_semi} below the configured floor "
            f"{config.min_semi_floor}")
    report = RunReport(n=g.n, seed=config.seed)
    t0 = time.perf_counter()
    reg = oriented_reg(g)
    report.reg = reg
    digest = graph_digest(g)
    if reg == 0:
        cert = DecompositionCertificate(g.n, digest, (), frozenset(g.edges), 0)
        report.stages.append({"name": "reg", "reg": 0, "seconds": time.perf_counter() - t0})
        return cert, report
    factor = extract_oriented_r_factor(g, reg)
    report.stages.append({"name": "reg", "reg": reg, "seconds": time.perf_counter() - t0})

    used: set[Edge] = set()
    cycles: list[HamiltonCycle] = []
    for stage in (_partition_stage, _direct_stage, _completion_stage):
        if stage is _direct_stage and not config.direct_stage:
            continue
        if stage is _completion_stage and config.completion_stage == "none":
            continue
        t1 = time.perf_counter()
        try:
            if stage is _completion_stage:
                stage(g, config, used, cycles, report)
            else:
                stage(g, factor, config, used, cycles, report)
        except HamdecError as exc:
            report.hard_failures.append(f"{stage.__name__}: {type(exc).__name__}: {exc}")
        if report.stages:
            report.stages[-1].setdefault("seconds", time.perf_counter() - t1)

    cycles_sorted = tuple(sorted(cycles, key=lambda c: c.order))
    cert = DecompositionCertificate(g.n, digest, cycles_sorted,
                                    frozenset(g.edges - used), reg)
    report.k = cert.k
    ok, violation = verify_certificate(g, cert)
    if not ok:
        raise InvariantViolationError(f"emitted certificate failed self-check: {violation}")
    return cert, report


# -- decomposition-count sandwich at tiny sizes ---------------------------


def sandwich_experiment(n: int) -> tuple[BoundReport, dict[str, Any]]:
    """Exact decomposition count of the rotational tournament, sandwiched
    between a constructive lower bound and the iterated matching bound."""
    if n not in (3, 5, 7):
        raise TooLargeError(f"sandwich runs at n in {{3, 5, 7}}, got {n}")
    g = rotational_tournament(n)
    r = (n - 1) // 2
    exact = count_hamilton_decompositions_exact(g)
    cross = count_hamilton_decompositions_ordered(g)
    if exact.exact != cross.exact:
        raise InvariantViolationError(
            f"enumeration strategies disagree: {exact.exact} vs {cross.exact}")
    constructed = find_hamilton_decomposition(g)
    lower = LogCount.from_int(1 if constructed is not None else 0)
    upper = decomposition_upper_bound(n, r)
    bounds = BoundReport(lower=lower, exact=exact, upper=upper,
                         methods=("constructive-search", "canonical-backtracking",
                                  "iterated-matching-bound"))
    if not bounds.holds(tol=1e-9):
        raise InvariantViolationError(f"sandwich failed at n={n}")
    payload = {
        "n": n, "r": r,
        "lower_log": None if lower.is_zero else lower.log,
        "exact_log": None if exact.is_zero else exact.log,
        "upper_log": upper.log,
        "exact_count": exact.exact,
        "holds": bounds.holds(tol=1e-9),
    }
    return bounds, payload


def bounds_payload(n: int, r: int) -> dict[str, Any]:
    upper = decomposition_upper_bound(n, r)
    return {"n": n, "r": r, "lower_log": None, "exact_log": None,
            "upper_log": upper.log}


def certificate_to_text(cert: DecompositionCertificate) -> str:
    return json.dumps(cert.to_json(), indent=2) + "\n"
