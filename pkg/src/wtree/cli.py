"""``wtree`` command-line interface.

Exit status: 0 on success, 1 on a domain or usage error, 2 when a
verification suite finds counterexamples.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

from .blowup import BlowupError, ChartVerificationError, blowup_charts, run_pipeline
from .enumeration import lambda_staged, lambda_trees, sim_classes
from .equations import EquationError, phi_bracket, phi_direct, phi_inductive
from .ops import (
    DualGraph,
    TreeOperationError,
    advance,
    collapse,
    mon,
    prune,
    reduce_dual_graph,
    terminalize,
)
from .tree import BracketParseError, WeightedTree, canonical_form, classify, parse, to_bracket
from .verify import SUITES, run_suite

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)

    parser = _Parser(prog="wtree", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tree_source(p: argparse.ArgumentParser) -> None:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--tree", help="tree in bracket notation")
        src.add_argument("--file", help="file with one bracket string per line")

    p = sub.add_parser("parse", parents=[common], help="parse and show the vertex table")
    tree_source(p)
    p = sub.add_parser("print", parents=[common], help="print in canonical sibling order")
    tree_source(p)
    p.add_argument("--show-zero", action="store_true", help="print zero weights too")
    p = sub.add_parser("classify", parents=[common], help="stability, trunk and branch data")
    tree_source(p)
    p = sub.add_parser("op", parents=[common], help="apply a tree operation")
    p.add_argument("operation", choices=["prune", "collapse", "advance", "terminalize"])
    tree_source(p)
    p.add_argument("--vertex", help="vertex label or id")
    p = sub.add_parser("mon", parents=[common], help="monoidal transforms")
    tree_source(p)
    p = sub.add_parser("enumerate", parents=[common], help="stable trees of weight d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--literal-staging", action="store_true", help="drop path trees between stages")
    p.add_argument("--classes", action="store_true", help="group by unweighted shape")
    p = sub.add_parser("phi", parents=[common], help="local equation system")
    tree_source(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--method", choices=["direct", "inductive", "bracket"], default="direct")
    p = sub.add_parser("blowup", parents=[common], help="verified blowup charts")
    tree_source(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--chart", type=int)
    p = sub.add_parser("pipeline", parents=[common], help="all blowup stages for weight d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--literal-staging", action="store_true")
    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, default=2)
    p = sub.add_parser("dual", parents=[common], help="reduce a genus-one dual graph (JSON file)")
    p.add_argument("--file", required=True)
    return parser


def _trees(args: argparse.Namespace) -> list[tuple[str, WeightedTree]]:
    if args.tree is not None:
        return [(args.tree, parse(args.tree))]
    with open(args.file, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    return [(line, parse(line)) for line in lines]


def _positive(name: str, value: int | None) -> None:
    if value is not None and value < 1:
        raise UsageError(f"--{name} must be a positive integer")


# Each handler returns (json payload, text lines, exit status).
Result = tuple[Any, list[str], int]


def _per_tree(args: argparse.Namespace, fn: Callable[[WeightedTree], tuple[Any, list[str]]]) -> Result:
    payloads, lines = [], []
    for _, t in _trees(args):
        payload, text = fn(t)
        payloads.append(payload)
        lines.extend(text)
    return (payloads[0] if args.tree is not None else payloads), lines, 0


def cmd_parse(args: argparse.Namespace) -> Result:
    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        rows = [
            {
                "id": v,
                "label": t.label[v],
                "weight": t.weight[v],
                "parent": t.parent.get(v),
                "depth": t.depth(v),
            }
            for v in t.vertices
        ]
        text = [to_bracket(t)] + [
            f"  {r['id']}: label={r['label']} weight={r['weight']} parent={r['parent'] or '-'}"
            for r in rows
        ]
        return {"tree": t.to_json(), "vertices": rows, "total_weight": t.total_weight}, text

    return _per_tree(args, one)


def cmd_print(args: argparse.Namespace) -> Result:
    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        s = to_bracket(t, show_zero_weights=args.show_zero)
        return {"tree": s, "canonical": canonical_form(t)}, [s]

    return _per_tree(args, one)


def cmd_classify(args: argparse.Namespace) -> Result:
    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        info = classify(t)
        payload = {"tree": to_bracket(t), **info.to_json()}
        text = [to_bracket(t)] + [f"  {k}: {v}" for k, v in info.to_json().items()]
        return payload, text

    return _per_tree(args, one)


def cmd_op(args: argparse.Namespace) -> Result:
    if args.operation != "terminalize" and args.vertex is None:
        raise UsageError(f"op {args.operation} needs --vertex")

    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        if args.operation == "terminalize":
            out = terminalize(t)
        else:
            fn = {"prune": prune, "collapse": collapse, "advance": advance}[args.operation]
            out = fn(t, t.find(args.vertex))
        return {"tree": to_bracket(out), "canonical": canonical_form(out)}, [to_bracket(out)]

    return _per_tree(args, one)


def cmd_mon(args: argparse.Namespace) -> Result:
    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        out = [to_bracket(m) for m in mon(t)]
        return {"tree": to_bracket(t), "mon": out}, out or ["(empty: path tree)"]

    return _per_tree(args, one)


def cmd_enumerate(args: argparse.Namespace) -> Result:
    _positive("d", args.d)
    if args.k is None:
        if args.literal_staging:
            raise UsageError("--literal-staging needs --k")
        trees = lambda_trees(args.d)
    else:
        if not 1 <= args.k <= args.d:
            raise UsageError(f"--k must lie in [1, {args.d}]")
        trees = lambda_staged(args.d, args.k, literal=args.literal_staging)
    forms = trees.forms()
    if args.count_only:
        return {"d": args.d, "k": args.k, "count": len(forms)}, [str(len(forms))], 0
    payload: dict[str, Any] = {"d": args.d, "k": args.k, "count": len(forms), "trees": forms}
    lines = list(forms)
    if args.classes:
        classes = [[canonical_form(t) for t in group] for group in sim_classes(trees)]
        payload["classes"] = classes
        lines = [" ~ ".join(group) for group in classes]
    return payload, lines, 0


def cmd_phi(args: argparse.Namespace) -> Result:
    _positive("n", args.n)
    payloads, lines = [], []
    for text, t in _trees(args):
        if args.method == "bracket":
            system = phi_bracket(text, args.n)
        else:
            system = (phi_direct if args.method == "direct" else phi_inductive)(t, args.n)
        payloads.append({"tree": to_bracket(t), "method": args.method, **system.to_json()})
        lines.extend(f"e={e}: {p.to_text()}" for e, p in enumerate(system, start=1))
    return (payloads[0] if args.tree is not None else payloads), lines, 0


def cmd_blowup(args: argparse.Namespace) -> Result:
    _positive("n", args.n)

    def one(t: WeightedTree) -> tuple[Any, list[str]]:
        charts = blowup_charts(t, args.n)
        if args.chart is not None:
            if not 1 <= args.chart <= len(charts):
                raise UsageError(f"--chart must lie in [1, {len(charts)}]")
            charts = [charts[args.chart - 1]]
        text = []
        for c in charts:
            text.append(f"chart {c.chart_index} (u_{c.chart_vertex} = 1) -> {to_bracket(c.matched_tree)}")
            text.extend(f"  e={e}: {p.to_text()}" for e, p in enumerate(c.raw_system, start=1))
            text.append(f"  normalization ({c.normalization_kind}):")
            text.extend(
                f"    {v.name} -> {p.to_text()}"
                for v, p in sorted(c.normalization.items(), key=lambda kv: kv[0].sort_key)
            )
        return {"source": to_bracket(t), "charts": [c.to_json() for c in charts]}, text

    return _per_tree(args, one)


def cmd_pipeline(args: argparse.Namespace) -> Result:
    _positive("d", args.d)
    _positive("n", args.n)
    report = run_pipeline(args.d, args.n, literal=args.literal_staging)
    lines = [f"d={report.d} n={report.n}: {len(report.initial)} initial trees"]
    for stage in report.stages:
        lines.append(
            f"stage k={stage.k}: {len(stage.survivors)} kept, {len(stage.blown)} blown up, "
            f"{len(stage.members)} members"
        )
        for b in stage.blown:
            matched = ", ".join(canonical_form(c.matched_tree) for c in b.charts)
            lines.append(f"  {canonical_form(b.source)} -> {matched}")
    lines.append(f"charts verified: {report.charts_verified}")
    for term in report.terminal:
        cert = term.certificate
        shape = "none" if cert is None else "*".join(v.name for v in cert.monomial) or "1"
        lines.append(f"final {canonical_form(term.tree)}: monomial {shape}")
    return report.to_json(), lines, 0 if report.certificates_total else 2


def cmd_verify(args: argparse.Namespace) -> Result:
    _positive("d", args.d)
    _positive("n", args.n)
    res = run_suite(args.suite, args.d, args.n)
    status = "PASS" if res.ok else "FAIL"
    lines = [
        f"{'suite':<10} {'d':>3} {'n':>3} {'checked':>8} {'failed':>7}  status",
        f"{res.name:<10} {res.d:>3} {res.n:>3} {res.checked:>8} {len(res.counterexamples):>7}  {status}",
    ]
    lines.extend(f"  counterexample: {c}" for c in res.counterexamples)
    return res.to_json(), lines, 0 if res.ok else 2


def cmd_dual(args: argparse.Namespace) -> Result:
    with open(args.file, encoding="utf-8") as fh:
        graph = DualGraph.from_json(json.load(fh))
    t = reduce_dual_graph(graph)
    return {"tree": to_bracket(t), "canonical": canonical_form(t)}, [to_bracket(t)], 0


HANDLERS: dict[str, Callable[[argparse.Namespace], Result]] = {
    "parse": cmd_parse,
    "print": cmd_print,
    "classify": cmd_classify,
    "op": cmd_op,
    "mon": cmd_mon,
    "enumerate": cmd_enumerate,
    "phi": cmd_phi,
    "blowup": cmd_blowup,
    "pipeline": cmd_pipeline,
    "verify": cmd_verify,
    "dual": cmd_dual,
}

DOMAIN_ERRORS = (
    BracketParseError,
    TreeOperationError,
    EquationError,
    BlowupError,
    KeyError,
    ValueError,
    OSError,
)


def _error_payload(exc: BaseException) -> dict[str, Any]:
    err: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc).strip("'\"")}
    if isinstance(exc, BracketParseError):
        err["message"] = exc.message
        err["position"] = exc.pos
    return {"error": err}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json" if "--format=json" in argv or _flag_value(argv, "--format") == "json" else "text"
    try:
        args = build_parser().parse_args(argv)
        fmt = getattr(args, "format", "text")
        payload, lines, status = HANDLERS[args.command](args)
    except UsageError as exc:
        _emit_error(exc, fmt)
        return 1
    except ChartVerificationError as exc:
        # a failed chart identity is a verification failure, not bad input
        _emit_error(exc, fmt)
        return 2
    except DOMAIN_ERRORS as exc:
        _emit_error(exc, fmt)
        return 1
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return status


def _flag_value(argv: list[str], flag: str) -> str | None:
    for i, a in enumerate(argv[:-1]):
        if a == flag:
            return argv[i + 1]
    return None


def _emit_error(exc: BaseException, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(_error_payload(exc), indent=2) + "\n")
    else:
        sys.stderr.write(f"wtree: error: {_error_payload(exc)['error']['message']}\n")


if __name__ == "__main__":
    raise SystemExit(main())
