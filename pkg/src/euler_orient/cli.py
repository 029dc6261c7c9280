"""Command-line front end: ``euler-orient {gen,count,estimate,mc,verify}``.

Every JSON document carries the manifest that produced it; rerunning with
the same manifest reproduces the same bytes, whatever ``--threads`` is.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapExceeded, EdgeListError, HypothesisError, VerificationError
from .estimator import build_report
from .exact import DEFAULT_EDGE_CAP, DEFAULT_FRONTIER_CAP, eo_count_backtrack, eo_count_dp
from .graph import (
    Graph,
    circulant,
    complete,
    complete_bipartite,
    cycle,
    is_connected,
    parse_edge_list,
    random_even_graph,
)
from .lemmas import builtin_corpus, named_families, run_suite
from .montecarlo import DEFAULT_EPSILON, gaussian_norm_check, mc_Int_gaussian, mc_S_uniform
from .spectral import algebraic_connectivity

log = logging.getLogger("euler_orient")

SCHEMA_VERSION = 1
DEFAULT_REJECTION_CAP = 1000

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_CAP = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- generator specs ----------------------------------------------------------------------


def graph_from_spec(spec: str, seed: int = 0, rejection_cap: int = DEFAULT_REJECTION_CAP) -> Graph:
    """Build a graph from ``complete:n``, ``bipartite:a,b``, ``cycle:n``,
    ``circulant:n:s1,s2,...`` or ``random:n:toggles[:gamma_min]``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "complete":
            return complete(int(rest))
        if kind == "bipartite":
            a, b = rest.split(",")
            return complete_bipartite(int(a), int(b))
        if kind == "cycle":
            return cycle(int(rest))
        if kind == "circulant":
            n, offsets = rest.split(":")
            return circulant(int(n), [int(s) for s in offsets.split(",")])
        if kind == "random":
            parts = rest.split(":")
            n, toggles = int(parts[0]), int(parts[1])
            if len(parts) == 2:
                return random_even_graph(n, toggles, seed)
            if len(parts) != 3:
                raise UsageError(f"bad random spec {spec!r}")
            gamma_min = float(parts[2])
            for attempt in range(rejection_cap):
                sub = seed if attempt == 0 else int(
                    np.random.default_rng([seed, attempt]).integers(2**31))
                g = random_even_graph(n, toggles, sub)
                if is_connected(g) and algebraic_connectivity(g) / n >= gamma_min:
                    return g
            raise CapExceeded(f"no graph with gamma >= {gamma_min} in {rejection_cap} attempts")
    except (TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad generator spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown generator kind {kind!r} in {spec!r}")


def load_graph(source: str, seed: int = 0) -> tuple[Graph, dict]:
    """A graph from a file path, ``-`` for stdin, or a generator spec prefixed with ``gen:``."""
    if source.startswith("gen:"):
        return graph_from_spec(source[4:], seed), {"generator": source[4:]}
    text = sys.stdin.read() if source == "-" else Path(source).read_text(encoding="ascii")
    digest = hashlib.sha256(text.encode("ascii")).hexdigest()
    return parse_edge_list(text), {"path": source, "sha256": digest}


# -- output -----------------------------------------------------------------------------


def _manifest(args, **extra) -> dict:
    m = {"subcommand": args.command, "tool_version": __version__}
    for key in ("seed", "samples", "epsilon", "methods", "suite", "method", "format"):
        if getattr(args, key, None) is not None:
            m[key] = getattr(args, key)
    m["out"] = getattr(args, "out", None)
    m.update(extra)
    return m


def _document(manifest: dict, result) -> dict:
    return {"schema_version": SCHEMA_VERSION, "manifest": manifest, "result": result}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2) + "\n", out)


def _emit_csv(rows: list[dict], out: str | None) -> None:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v
                             for k, v in row.items()})
    _emit(buf.getvalue(), out)


def _caps(args) -> tuple[int, int]:
    if args.edge_cap != DEFAULT_EDGE_CAP:
        log.warning("edge cap overridden: %d (default %d); runtime may explode",
                    args.edge_cap, DEFAULT_EDGE_CAP)
    if args.frontier_cap != DEFAULT_FRONTIER_CAP:
        log.warning("frontier cap overridden: %d (default %d); memory may explode",
                    args.frontier_cap, DEFAULT_FRONTIER_CAP)
    return args.edge_cap, args.frontier_cap


# -- subcommands --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.rejection_cap != DEFAULT_REJECTION_CAP:
        log.warning("rejection cap overridden: %d (default %d)",
                    args.rejection_cap, DEFAULT_REJECTION_CAP)
    g = graph_from_spec(args.spec, args.seed, args.rejection_cap)
    manifest = _manifest(args, spec=args.spec)
    header = f"# manifest: {json.dumps(manifest, sort_keys=True)}\n"
    _emit(header + g.to_edge_list(), args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    g, source = load_graph(args.input, args.seed)
    edge_cap, frontier_cap = _caps(args)
    bt = eo_count_backtrack(g, edge_cap, threads=args.threads)
    dp = eo_count_dp(g, frontier_cap)
    result = {"n": g.n, "m": g.m, "eo_backtrack": bt, "eo_dp": dp, "agree": bt == dp}
    manifest = _manifest(args, input=source, edge_cap=edge_cap, frontier_cap=frontier_cap)
    if args.format == "csv":
        _emit_csv([result], args.out)
    else:
        _emit_json(_document(manifest, result), args.out)
    if bt != dp:
        log.error("exact counters disagree: backtrack=%d dp=%d", bt, dp)
        return EXIT_VIOLATION
    return EXIT_OK


def _exact_for_estimate(g: Graph, edge_cap: int, frontier_cap: int) -> int | None:
    if g.m > edge_cap:
        return None
    try:
        return eo_count_dp(g, frontier_cap)
    except CapExceeded:
        return eo_count_backtrack(g, edge_cap)


def cmd_estimate(args) -> int:
    g, source = load_graph(args.input, args.seed)
    edge_cap, frontier_cap = _caps(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    allowed = {"theta", "mckay_kn", "isaev_knn", "bounds"}
    unknown = [m for m in methods if m not in allowed]
    if unknown:
        raise UsageError(f"unknown methods {unknown}; choose from {sorted(allowed)}")
    exact = _exact_for_estimate(g, edge_cap, frontier_cap)
    graph_id = source.get("generator") or source.get("path", "")
    reports = []
    for method in methods:
        reports.extend(r.to_json() for r in build_report(g, method, graph_id, exact))
    if args.format == "csv":
        _emit_csv(reports, args.out)
    else:
        manifest = _manifest(args, input=source, edge_cap=edge_cap)
        _emit_json(_document(manifest, reports), args.out)
    return EXIT_OK


def cmd_mc(args) -> int:
    g, source = load_graph(args.input, args.seed)
    if args.method == "uniform_S":
        res = mc_S_uniform(g, args.samples, args.seed, threads=args.threads)
    elif args.method == "gaussian_Int":
        res = mc_Int_gaussian(g, args.samples, args.seed, args.epsilon, threads=args.threads)
    else:
        res = gaussian_norm_check(g, args.a, args.samples, args.seed, args.box,
                                  threads=args.threads)
    manifest = _manifest(args, input=source)
    if args.method == "gaussian_norm":
        manifest.update(a=args.a, box=args.box)
    if args.format == "csv":
        _emit_csv([res.to_json()], args.out)
    else:
        _emit_json(_document(manifest, res.to_json()), args.out)
    return EXIT_OK


def _load_corpus(entries: list[str] | None, seed: int) -> tuple[list[tuple[str, Graph]], list]:
    if not entries:
        return builtin_corpus(seed) + named_families(), ["builtin"]
    corpus = []
    described = []
    for entry in entries:
        g, source = load_graph(entry, seed)
        corpus.append((entry, g))
        described.append(source)
    return corpus, described


def cmd_verify(args) -> int:
    corpus, described = _load_corpus(args.corpus, args.seed)
    reports = run_suite(args.suite, corpus, args.seed, threads=args.threads)
    payload = [r.to_json() for r in reports]
    manifest = _manifest(args, corpus=described)
    if args.format == "csv":
        _emit_csv([{k: v for k, v in p.items() if k != "counterexamples"} for p in payload],
                  args.out)
    else:
        _emit_json(_document(manifest, payload), args.out)
    failing = [r for r in reports if r.violations]
    if failing:
        out_dir = Path(args.counterexample_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for r in failing:
            for i, cx in enumerate(r.counterexamples):
                stem = out_dir / f"{r.lemma}-{i:03d}"
                if "graph" in cx:
                    stem.with_suffix(".txt").write_text(cx["graph"], encoding="ascii")
                stem.with_suffix(".json").write_text(json.dumps(cx, indent=2) + "\n")
        log.error("%d suite(s) reported violations; counterexamples in %s",
                  len(failing), out_dir)
        return EXIT_VIOLATION
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("EULER_ORIENT_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="euler-orient", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker threads (default $EULER_ORIENT_THREADS or 1)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def caps(p):
        p.add_argument("--edge-cap", type=int, default=DEFAULT_EDGE_CAP)
        p.add_argument("--frontier-cap", type=int, default=DEFAULT_FRONTIER_CAP)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("spec", help="complete:n | bipartite:a,b | cycle:n | circulant:n:s1,s2 | "
                                "random:n:toggles[:gamma_min]")
    p.add_argument("--rejection-cap", type=int, default=DEFAULT_REJECTION_CAP)
    common(p)
    p.set_defaults(func=cmd_gen, format=None)

    p = sub.add_parser("count", help="exact Eulerian orientation counts")
    p.add_argument("--in", dest="input", required=True,
                   help="edge-list file, '-' for stdin, or gen:<spec>")
    common(p)
    caps(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("estimate", help="closed-form estimates and bounds")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--methods", default="theta",
                   help="comma list from theta,mckay_kn,isaev_knn,bounds")
    common(p)
    caps(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mc", help="Monte Carlo estimates")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=("uniform_S", "gaussian_Int", "gaussian_norm"),
                   default="gaussian_Int")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--a", type=float, default=0.5, help="gaussian_norm exponent scale")
    p.add_argument("--box", type=float, default=None, help="gaussian_norm box half-width")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="run lemma verification suites")
    p.add_argument("--suite", default="all",
                   choices=("fiedler", "condition", "invnorm", "detdrop", "layering",
                            "cosbound", "gaussbound", "all"))
    p.add_argument("--corpus", nargs="*", default=None,
                   help="edge-list files or gen:<spec> entries (default: built-in corpus)")
    p.add_argument("--counterexample-dir", default="counterexamples")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        log.error("--threads must be at least 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except CapExceeded as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except VerificationError as exc:
        log.error("%s", exc)
        return EXIT_VIOLATION
    except (UsageError, EdgeListError, HypothesisError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
