"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input/usage error,
3 stage failure with partial output.  The HAMDEC_SEED environment variable
supplies a default seed; an explicit --seed wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .counting import (
    count_hamilton_cycles_exact,
    count_hamilton_decompositions_exact,
    decomposition_upper_bound,
)
from .errors import HamdecError
from .factors import extract_oriented_r_factor, oriented_reg
from .graphs import (
    OrientedGraph,
    random_oriented,
    read_edge_list,
    rotational_tournament,
    write_edge_list,
)
from .pipeline import (
    DecompositionCertificate,
    RunConfig,
    approximate_decomposition,
    bounds_payload,
    sandwich_experiment,
    verify_certificate,
)


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HAMDEC_SEED")
    return int(env) if env else 0


def _read_graph(path: str) -> OrientedGraph:
    text = sys.stdin.read() if path == "-" else open(path, "r", encoding="ascii").read()
    return read_edge_list(text)


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(doc, out: str | None) -> None:
    _write_text(json.dumps(doc, indent=2) + "\n", out)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamdec",
                                 description="Edge-disjoint Hamilton cycles in oriented graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a graph as an edge list")
    g.add_argument("--kind", choices=("rotational", "tournament", "regular"),
                   default="rotational")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, default=None, help="degree for --kind regular")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", default=None)

    r = sub.add_parser("reg", help="print the maximum regular factor degree")
    r.add_argument("graph")

    f = sub.add_parser("factor", help="emit an r-factor as an edge list")
    f.add_argument("graph")
    f.add_argument("--r", type=int, required=True)
    f.add_argument("--out", default=None)

    d = sub.add_parser("decompose", help="run the decomposition pipeline")
    d.add_argument("graph")
    d.add_argument("--eps", type=float, default=0.3)
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--k", type=int, default=None, help="partition arity K")
    d.add_argument("--b", type=int, default=4, help="path-cover part count")
    d.add_argument("--completion", choices=("none", "exact-backtracking"),
                   default="exact-backtracking")
    d.add_argument("--no-direct", action="store_true",
                   help="skip the direct completion stage")
    d.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="check a certificate against a graph")
    v.add_argument("graph")
    v.add_argument("certificate")

    b = sub.add_parser("bounds", help="counting bounds for an (n, r)-regular graph")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--r", type=int, required=True)

    c = sub.add_parser("count-exact", help="exact cycle/decomposition counts")
    c.add_argument("graph")
    c.add_argument("--what", choices=("cycles", "decompositions"),
                   default="decompositions")

    s = sub.add_parser("sandwich", help="decomposition-count sandwich at tiny n")
    s.add_argument("--n", type=int, required=True, choices=(3, 5, 7))
    return ap


def cli_main(argv: Sequence[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except HamdecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "generate":
        seed = _default_seed(args.seed)
        if args.kind == "rotational":
            g = rotational_tournament(args.n)
        else:
            g = random_oriented(args.kind, args.n, seed=seed, r=args.r)
        _write_text(write_edge_list(g), args.out)
        return 0

    if args.command == "reg":
        g = _read_graph(args.graph)
        print(oriented_reg(g))
        return 0

    if args.command == "factor":
        g = _read_graph(args.graph)
        cert = extract_oriented_r_factor(g, args.r)
        sub = OrientedGraph(g.n, cert.edges, _validated=True)
        _write_text(write_edge_list(sub), args.out)
        return 0

    if args.command == "decompose":
        g = _read_graph(args.graph)
        config = RunConfig(k=args.k, eps=args.eps, b=args.b,
                           seed=_default_seed(args.seed),
                           completion_stage=args.completion,
                           direct_stage=not args.no_direct)
        cert, report = approximate_decomposition(g, config)
        _emit_json({"certificate": cert.to_json(), "report": report.to_json()},
                   args.out)
        return 3 if report.hard_failures else 0

    if args.command == "verify":
        g = _read_graph(args.graph)
        with open(args.certificate, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        cert = DecompositionCertificate.from_json(
            doc["certificate"] if "certificate" in doc else doc)
        ok, violation = verify_certificate(g, cert)
        if ok:
            print("certificate ok")
            return 0
        print(f"certificate invalid: {violation}", file=sys.stderr)
        return 1

    if args.command == "bounds":
        _emit_json(bounds_payload(args.n, args.r), None)
        return 0

    if args.command == "count-exact":
        g = _read_graph(args.graph)
        if args.what == "cycles":
            lc = count_hamilton_cycles_exact(g)
        else:
            lc = count_hamilton_decompositions_exact(g)
        r = oriented_reg(g)
        upper = decomposition_upper_bound(n=g.n, r=r) if (
            args.what == "decompositions" and r >= 1) else None
        _emit_json({"n": g.n, "r": r, "what": args.what, "exact": lc.exact,
                    "lower_log": None if lc.is_zero else lc.log,
                    "exact_log": None if lc.is_zero else lc.log,
                    "upper_log": None if upper is None else upper.log}, None)
        return 0

    if args.command == "sandwich":
        _, payload = sandwich_experiment(args.n)
        _emit_json(payload, None)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
