"""``cstar`` command line front end.

Exit status: 0 success, 2 validation failure (a report is still written),
3 malformed graph file, 4 Fock basis above the resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import asdict

from . import __version__
from .bratteli import cuntz_core_bratteli, to_dot, toeplitz_core_bratteli
from .fock_sim import BasisTooLarge, FockSpace, relation_checks, trace_moments
from .free_laws import BACKWARD, FORWARD, EdgeLawParams, density_samples, edge_law, loop_law, vn_structure
from .graph_core import DisconnectedGraphError, GraphValidationError, directify, perron_data, validate
from .graphfile import FORMAT_VERSION, SchemaError, load_graph, validate_report
from .int_linalg import k_theory_cuntz_krieger, k_theory_free_graph
from .kms import WordSyntaxError, format_word, is_perron, kms_report, kms_weight, word_from_text

EXIT_OK, EXIT_INVALID, EXIT_SCHEMA, EXIT_RESOURCE = 0, 2, 3, 4


class ValidationFailure(Exception):
    pass


def _weighted(g, args):
    if args.fp:
        return g.with_weights(perron_data(g).weighting)
    if g.weights is None:
        raise ValidationFailure("this command needs vertex weights; add them to the file or pass --fp")
    return g


def cmd_directify(g, args):
    d = directify(g)
    return {"vertices": list(d.vertices), "dedges": [asdict(de) for de in d.dedges]}, True


def cmd_validate(g, args):
    return asdict(validate(g)), True


def cmd_fp(g, args):
    p = perron_data(g)
    return {"eigenvalue": p.eigenvalue, "weighting": p.weighting, "base_vertex": g.base_vertex}, True


def cmd_ktheory(g, args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        kt = k_theory_cuntz_krieger(g) if args.algebra == "ck" else k_theory_free_graph(g)
    report = {"algebra": args.algebra, **kt.to_json()}
    report["warnings"] = [str(w.message) for w in caught]
    return report, True


def cmd_verify(g, args):
    if args.fp:
        g = _weighted(g, args)
    space = FockSpace(g, args.depth)
    checks = relation_checks(space)
    passed = all(c.passed for c in checks)
    return {
        "depth": args.depth,
        "basis_size": len(space),
        "passed": passed,
        "checks": [c.to_json() for c in checks],
    }, passed


def cmd_moments(g, args):
    g = _weighted(g, args)
    depth = args.upto // 2 if args.depth is None else args.depth
    space = FockSpace(g, depth)
    values = trace_moments(space, args.edge, args.upto)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "moment"])
    for n, v in enumerate(values):
        writer.writerow([n, repr(float(v))])
    return buf.getvalue(), True


def _edge_laws(g, edge_id):
    edge = g.edge.get(edge_id)
    if edge is None:
        raise ValidationFailure(f"unknown edge {edge_id!r}")
    mu = g.weights
    if edge.is_loop:
        return "loop", {"loop": loop_law(mu[edge.ends[0]])}
    p = EdgeLawParams.from_masses(mu[edge.ends[0]], mu[edge.ends[1]])
    case = "equal_mass" if p.a2 == 1 else "unequal_mass"
    return case, {FORWARD: edge_law(p, FORWARD), BACKWARD: edge_law(p, BACKWARD)}


def cmd_laws(g, args):
    g = _weighted(g, args)
    case, laws = _edge_laws(g, args.edge)
    if args.csv:
        law = laws.get("loop") or laws[args.orientation]
        x, f = density_samples(law, 512)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "density"])
            for xi, fi in zip(x, f):
                writer.writerow([repr(float(xi)), repr(float(fi))])
    return {"edge": args.edge, "case": case, "laws": {k: v.to_json() for k, v in laws.items()}}, True


def cmd_structure(g, args):
    g = _weighted(g, args)
    return vn_structure(g).to_json(), True


def cmd_bratteli(g, args):
    if args.variant == "cuntz":
        d = cuntz_core_bratteli(g, args.depth)
    else:
        d = toeplitz_core_bratteli(g, args.depth, args.variant)
    d.check_consistency()
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(to_dot(d))
    return d.to_json(), True


def cmd_kms(g, args):
    g = _weighted(g, args)
    p = perron_data(g)
    lam = p.eigenvalue
    beta = None if args.beta == "auto" else float(args.beta)
    w = word_from_text(g, args.word)
    report = kms_report(g, lam, g.weights, beta)
    perron = is_perron(g, lam, g.weights)
    value = kms_weight(w, lam, g.weights)
    out = {
        "word": format_word(w),
        "value": float(value),
        "grade": w.grade,
        "perron": perron,
        **report.to_json(),
    }
    ok = perron and report.max_residual <= 1e-10
    return out, ok


COMMANDS = {
    "directify": cmd_directify,
    "validate": cmd_validate,
    "fp": cmd_fp,
    "ktheory": cmd_ktheory,
    "verify": cmd_verify,
    "moments": cmd_moments,
    "laws": cmd_laws,
    "structure": cmd_structure,
    "bratteli": cmd_bratteli,
    "kms": cmd_kms,
}


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstar", description="Graph C*-algebra invariants")
    parser.add_argument(
        "--version", action="version", version=f"cstar {__version__} (graph format v{FORMAT_VERSION})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("graph", help="graph JSON file")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        p.add_argument("--fp", action="store_true", help="use the Frobenius-Perron weighting")
        return p

    add("directify", "directed double with op involution")
    add("validate", "connectivity and excluded-case classification")
    add("fp", "Perron eigenvalue and normalized weighting")
    p = add("ktheory", "K-groups of the Cuntz-Krieger or free graph algebra")
    p.add_argument("--algebra", choices=["ck", "free"], default="ck")
    p = add("verify", "check the Toeplitz-Cuntz-Krieger relations on the truncated Fock space")
    p.add_argument("--depth", type=_nonneg, required=True)
    p = add("moments", "trace moments Tr(T_e^n) as CSV")
    p.add_argument("--edge", required=True)
    p.add_argument("--upto", type=_nonneg, required=True)
    p.add_argument("--depth", type=_nonneg, help="Fock depth (default: upto // 2)")
    p = add("laws", "spectral laws of an edge generator")
    p.add_argument("--edge", required=True)
    p.add_argument("--orientation", choices=[FORWARD, BACKWARD], default=FORWARD)
    p.add_argument("--csv", help="write 512 density samples (x, density) here")
    add("structure", "von Neumann structure report")
    p = add("bratteli", "Bratteli diagram of a core")
    p.add_argument("--variant", choices=["cuntz", "compressed", "zero"], default="cuntz")
    p.add_argument("--depth", type=_nonneg, required=True)
    p.add_argument("--dot", help="also write Graphviz DOT here")
    p = add("kms", "KMS weight of a word and KMS residuals")
    p.add_argument("--word", required=True, help='e.g. "S(e1) S*(e1)" or "P(a) - 1/2 S(e) S*(e)"')
    p.add_argument("--beta", default="auto", help="inverse temperature, or 'auto' for ln(lambda)")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(report) -> str:
    return json.dumps(report, indent=2) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        g = load_graph(args.graph)
    except SchemaError as exc:
        print(f"schema error at {exc}", file=sys.stderr)
        _emit(_dump({"error": "schema", "message": str(exc)}), args.output)
        return EXIT_SCHEMA
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCHEMA
    try:
        report, ok = COMMANDS[args.command](g, args)
    except BasisTooLarge as exc:
        _emit(_dump({"error": "resource", "message": str(exc), "basis_size": exc.size}), args.output)
        return EXIT_RESOURCE
    except (ValidationFailure, DisconnectedGraphError, GraphValidationError, WordSyntaxError, KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        _emit(_dump({"error": "validation", "message": str(msg)}), args.output)
        return EXIT_INVALID
    if isinstance(report, str):
        _emit(report, args.output)
    else:
        validate_report(args.command, report)
        _emit(_dump(report), args.output)
    return EXIT_OK if ok else EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
