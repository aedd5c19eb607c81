"""Command-line interface.

Every run produces a report ``{command, query, verdict, certificate, details,
stats}``. Exit codes: 0 positive verdict, 1 negative or absent, 2 usage or
cap error, 3 unknown (search budget exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from kaleido import factorization as fz
from kaleido import metric, quasigroup, splitting, transversal
from kaleido.group_core import (
    AbelianGroupSpec,
    GSpace,
    Partition,
    as_config,
    cayley_space,
    parse_group_spec,
)
from kaleido.search import Budget, CapExceeded, SearchBudgetExceeded

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3
POSITIVE = {"success", "holds"}
NEGATIVE = {"absent", "fails"}


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    query: dict
    verdict: str
    certificate: dict | None = None
    details: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    output: str = field(default="text", repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "query": self.query,
            "verdict": self.verdict,
            "certificate": self.certificate,
            "details": self.details,
            "stats": self.stats,
        }

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"verdict: {self.verdict}"]
        for k, v in self.query.items():
            if k != "space":
                lines.append(f"query.{k}: {json.dumps(v)}")
        for k, v in self.details.items():
            lines.append(f"{k}: {json.dumps(v)}")
        if self.certificate is not None:
            lines.append(f"certificate: {json.dumps(self.certificate)}")
        for k, v in self.stats.items():
            lines.append(f"stats.{k}: {v}")
        return "\n".join(lines)

    @property
    def exit_code(self) -> int:
        if self.verdict in POSITIVE:
            return EXIT_POSITIVE
        if self.verdict in NEGATIVE:
            return EXIT_NEGATIVE
        if self.verdict == "unknown":
            return EXIT_UNKNOWN
        return EXIT_USAGE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers


def parse_int_list(text: str, what: str = "--set") -> list[int]:
    out = []
    for tok in text.replace(" ", "").split(","):
        if tok == "":
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise UsageError(f"{what}: {tok!r} is not an integer") from None
    if not out:
        raise UsageError(f"{what}: empty list")
    return out


def _group(args) -> AbelianGroupSpec:
    if not args.group:
        raise UsageError("this command needs --group SPEC (e.g. --group C4xC2)")
    try:
        return parse_group_spec(args.group)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _space(args) -> tuple[GSpace, dict]:
    if args.space:
        try:
            space = GSpace.load(args.space)
        except OSError as exc:
            raise UsageError(f"--space: cannot read {args.space!r}: {exc.strerror}") from None
        except (ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"--space {args.space!r}: {exc}") from None
        return space, {"space": space.to_json()}
    spec = _group(args)
    return cayley_space(spec), {"group": str(spec), "space": cayley_space(spec).to_json()}


def _subset(args, n: int, offset: int = 0) -> tuple[int, ...]:
    if not args.set:
        raise UsageError("this command needs --set a,b,c")
    vals = [v - offset for v in parse_int_list(args.set)]
    try:
        return as_config(vals, n)
    except ValueError as exc:
        raise UsageError(f"--set {args.set!r}: {exc}") from None


def _read(path: str, flag: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path!r}: {exc.strerror}") from None


def _orders(text: str) -> list[int]:
    if text.strip().upper().startswith("C"):
        try:
            return list(parse_group_spec(text).orders)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    orders = parse_int_list(text, "group type")
    for n in orders:
        if n < 2:
            raise UsageError(f"group type: factor {n} is below 2")
    return orders


def _branching(text: str) -> metric.UltrametricSpec:
    try:
        return metric.UltrametricSpec(tuple(parse_int_list(text, "branching")))
    except ValueError as exc:
        raise UsageError(f"branching {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_kaleido(args, budget) -> Report:
    space, query = _space(args)
    a = _subset(args, space.point_count)
    query["set"] = list(a)
    if args.action == "find":
        chi = transversal.find_kaleidoscopic_coloring(space, a, budget)
        if chi is None:
            return Report("kaleido find", query, "absent")
        cert = {"type": "coloring", **chi.to_json()}
        return Report("kaleido find", query, "success", cert, {"classes": [list(c) for c in chi.classes()]})
    if not args.coloring:
        raise UsageError("kaleido check needs --coloring c0,c1,...")
    colors = parse_int_list(args.coloring, "--coloring")
    chi = transversal.Coloring(tuple(colors), len(a))
    defects = transversal.kaleidoscopic_defects(space, a, chi)
    cert = {"type": "coloring", **chi.to_json()}
    if defects:
        return Report("kaleido check", query, "fails", None, {"reasons": defects})
    return Report("kaleido check", query, "success", cert)


def cmd_factorize(args, budget) -> Report:
    spec = _group(args)
    a = _subset(args, spec.order)
    query = {"group": str(spec), "set": list(a)}
    name = f"factorize {args.action}"
    if args.action == "check":
        if not args.other:
            raise UsageError("factorize check needs --other b0,b1,...")
        try:
            b = as_config(parse_int_list(args.other, "--other"), spec.order)
        except ValueError as exc:
            raise UsageError(f"--other {args.other!r}: {exc}") from None
        query["other"] = list(b)
        cert = fz.FactorizationCertificate(a, b, spec)
        if fz.is_factorization(spec, a, b):
            return Report(name, query, "success", cert.to_json())
        return Report(name, query, "fails")
    if args.action == "complement":
        b = fz.find_complement(spec, a, budget)
        if b is None:
            return Report(name, query, "absent")
        details = {"subset": list(a), "complement": list(b), "periodic": fz.is_periodic(spec, a)}
        return Report(name, query, "success", fz.FactorizationCertificate(a, b, spec).to_json(), details)
    if args.action == "periodic":
        g = fz.is_periodic(spec, a)
        if g is None:
            return Report(name, query, "absent")
        cert = {"type": "period", "group": str(spec), "subset": list(a), "period": g}
        return Report(name, query, "success", cert, {"periodic": g, "residues": list(spec.residues(g))})
    pair = fz.is_doubly_complemented(spec, a, budget)
    if pair is None:
        return Report(name, query, "absent")
    b, c = pair
    cert = {"type": "double_factorization", "group": str(spec), "a": list(a), "b": list(b), "c": list(c)}
    return Report(name, query, "success", cert)


def cmd_hajos(args, budget) -> Report:
    name = f"hajos {args.action}"
    if args.action == "classify":
        if not args.type:
            raise UsageError("hajos classify needs a group type, e.g. 8,3")
        orders = _orders(args.type)
        query = {"orders": orders}
        hit = fz.hajos_family(orders)
        if hit is None:
            return Report(name, query, "fails")
        family, assignment = hit
        cert = {"type": "hajos_family", "orders": orders, "family": family, "assignment": assignment}
        return Report(name, query, "holds", cert)
    spec = _group(args)
    query = {"group": str(spec)}
    if args.action == "brute":
        result = fz.hajos_brute(spec, cap=args.cap or fz.HAJOS_CAP, budget=budget)
    else:
        result = fz.hajos_check(spec, args.action, cap=args.cap or fz.SEMI_CAP, budget=budget)
    if result.holds:
        cert = {"type": "exhaustive", "group": str(spec), "property": args.action}
        return Report(name, query, "holds", cert)
    cert = result.counterexample.to_json()
    cert["property"] = args.action
    return Report(name, query, "fails", cert)


def cmd_split(args, budget) -> Report:
    space, query = _space(args)
    cap = args.cap or splitting.DEFAULT_LATTICE_CAP
    if args.action == "check":
        k = _subset(args, space.point_count)
        query["set"] = list(k)
        chain = splitting.is_splittable(space, k, cap=cap)
        if chain is None:
            return Report("split check", query, "absent")
        return Report("split check", query, "success", chain.to_json())
    sets = splitting.generate_splittable(space, cap=cap)
    from kaleido.group_core import congruences

    lattice = congruences(space)
    entries = [
        {"subset": list(k), "chain": splitting.is_splittable(space, k, lattice=lattice).to_json()}
        for k in sets
    ]
    cert = {"type": "splittable_list", "entries": entries}
    return Report("split generate", query, "success", cert, {"count": len(sets)})


def cmd_ultra(args, budget) -> Report:
    if not args.branching:
        raise UsageError(f"ultra {args.action} needs a branching vector, e.g. 2,2")
    spec = _branching(args.branching)
    query = {"branching": list(spec.branching)}
    if args.action == "chain":
        chain = metric.epsilon_chain(spec)
        cert = {"type": "partition_chain", "partitions": [p.to_json() for p in chain]}
        return Report("ultra chain", query, "success", cert, {"block_counts": [len(p) for p in chain]})
    report = metric.verify_ultrametric_splittability(spec, cap=args.cap or metric.ULTRA_CAP)
    details = {"subsets_checked": report.subsets_checked, "kaleidoscopic": len(report.entries),
               "violations": len(report.violations)}
    return Report("ultra verify", query, "holds" if report.passed else "fails", report.to_json(), details)


def cmd_rigid(args, budget) -> Report:
    if args.points:
        text = _read(args.points, "--points")
    elif args.inline:
        text = args.inline
    else:
        raise UsageError("rigid check needs --points FILE or --inline 'x y; x y; ...'")
    try:
        k = metric.PlanarPointSet.parse(text)
        rigid, witness = metric.rigidity_check(k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    query = {"points": [[str(x), str(y)] for x, y in k.points]}
    if rigid:
        return Report("rigid check", query, "holds", {"type": "exhaustive", "property": "rigid"})
    return Report("rigid check", query, "fails", witness.to_json())


def cmd_latin(args, budget) -> Report:
    name = f"latin {args.action}"
    if args.action == "complete":
        if not args.rect:
            raise UsageError("latin complete needs --rect FILE")
        try:
            rect = quasigroup.PartialRectangle.parse(_read(args.rect, "--rect"))
        except ValueError as exc:
            raise UsageError(f"--rect: {exc}") from None
        query = {"n": rect.n, "rectangle": rect.symbols()}
        square = quasigroup.complete_rectangle(rect, rng=args.seed)
        if square is None:
            return Report(name, query, "absent", None, {"ryser": False})
        return Report(name, query, "success", {"type": "latin_square", "rows": square.symbols()})

    if args.action == "example9":
        rect = quasigroup.order9_rectangle()
        square = quasigroup.complete_rectangle(rect, rng=args.seed)
        query = {"n": rect.n, "rectangle": rect.symbols()}
        if not args.check_kaleido:
            return Report(name, query, "success", {"type": "latin_square", "rows": square.symbols()})
    else:
        if not args.square:
            raise UsageError("latin check needs --square FILE")
        try:
            square = quasigroup.LatinSquare.parse(_read(args.square, "--square"))
        except ValueError as exc:
            raise UsageError(f"--square: {exc}") from None
        query = {}
        if not args.set:
            return Report(name, {"n": square.n}, "success", {"type": "latin_square", "rows": square.symbols()})

    a = _subset(args, square.n, offset=1)
    query.update({"square": square.symbols(), "set": [x + 1 for x in a]})
    flags = quasigroup.quasi_classify_subset(square, a, budget)
    chi = quasigroup.quasi_kaleidoscopic(square, a, budget)
    details = flags.to_json()
    details["kaleidoscopic"] = chi is not None
    if chi is None:
        return Report(name, query, "absent", None, details)
    return Report(name, query, "success", {"type": "quasi_coloring", **chi.to_json()}, details)


# ---------------------------------------------------------------------------
# certificate re-verification


def verify_report(data: dict) -> bool:
    """Re-check the certificate embedded in a report; never searches.

    Raises ``ValueError`` when there is nothing to check.
    """
    cert = data.get("certificate")
    query = data.get("query") or {}
    if not cert:
        raise ValueError(f"report with verdict {data.get('verdict')!r} carries no certificate")
    kind = cert.get("type")
    if kind == "exhaustive":
        raise ValueError("exhaustive verdicts carry no re-checkable witness")

    if kind == "coloring":
        space = GSpace.from_json(query["space"])
        chi = transversal.Coloring.from_json(cert)
        return transversal.verify_kaleidoscopic(space, query["set"], chi)
    if kind == "factorization":
        spec = parse_group_spec(cert["group"])
        ok = fz.is_factorization(spec, cert["a"], cert["b"])
        if cert.get("property") == "brute":
            ok = ok and fz.is_periodic(spec, cert["a"]) is None and fz.is_periodic(spec, cert["b"]) is None
        elif cert.get("property") in ("semi", "demi"):
            ok = ok and fz.is_periodic(spec, cert["a"]) is None
        return ok
    if kind == "period":
        spec = parse_group_spec(cert["group"])
        a = as_config(cert["subset"], spec.order)
        g = int(cert["period"])
        return 0 < g < spec.order and spec.translate(a, g) == a
    if kind == "double_factorization":
        spec = parse_group_spec(cert["group"])
        return fz.is_factorization(spec, cert["a"], cert["b"]) and fz.is_factorization(
            spec, cert["b"], cert["c"]
        )
    if kind == "hajos_family":
        return fz.verify_family_embedding(cert["orders"], cert["family"], cert["assignment"])
    if kind == "chain":
        space = GSpace.from_json(query["space"])
        chain = splitting.SplittingChain.from_json(cert)
        return not splitting.chain_defects(space, query["set"], chain)
    if kind == "splittable_list":
        space = GSpace.from_json(query["space"])
        return all(
            not splitting.chain_defects(space, e["subset"], splitting.SplittingChain.from_json(e["chain"]))
            for e in cert["entries"]
        )
    if kind == "ultra_report":
        spec = metric.UltrametricSpec(tuple(cert["branching"]))
        space = metric.ultrametric_space(spec)
        chain = metric.epsilon_chain(spec)
        for e in cert["kaleidoscopic"]:
            chi = transversal.Coloring.from_json(e["coloring"])
            if not transversal.verify_kaleidoscopic(space, e["subset"], chi):
                return False
            steps = [splitting.relative_position(e["subset"], x, y) for x, y in zip(chain, chain[1:])]
            if steps != e["steps"]:
                return False
        return not cert["violations"]
    if kind == "partition_chain":
        spec = metric.UltrametricSpec(tuple(query["branching"]))
        space = metric.ultrametric_space(spec)
        parts = [Partition(tuple(tuple(b) for b in p)) for p in cert["partitions"]]
        return all(p.is_invariant(space) for p in parts) and all(
            x.refines(y) for x, y in zip(parts, parts[1:])
        )
    if kind == "rigidity_witness":
        k = metric.PlanarPointSet(tuple(tuple(p) for p in query["points"]))
        return metric.verify_rigidity_witness(k, metric.RigidityWitness.from_json(cert))
    if kind == "latin_square":
        square = quasigroup.LatinSquare.from_symbols(cert["rows"])
        if "rectangle" in query:
            rect = quasigroup.PartialRectangle.from_symbols(query["n"], query["rectangle"])
            return quasigroup.extends(square, rect)
        return True
    if kind == "quasi_coloring":
        square = quasigroup.LatinSquare.from_symbols(query["square"])
        chi = transversal.Coloring.from_json(cert)
        return quasigroup.verify_quasi_kaleidoscopic(square, [x - 1 for x in query["set"]], chi)
    raise ValueError(f"unknown certificate type {kind!r}")


def cmd_verify(args, budget) -> Report:
    text = _read(args.report, "verify")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"verify: {args.report!r} is not JSON ({exc.msg})") from None
    try:
        ok = verify_report(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"verify: certificate and query do not match ({exc})") from None
    except ValueError as exc:
        raise UsageError(f"verify: {exc}") from None
    query = {"report": args.report, "certificate_type": data["certificate"]["type"]}
    return Report("verify", query, "success" if ok else "fails")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--budget", type=int, default=None, help="node budget for searches")
    common.add_argument("--space", help="G-space JSON file")
    common.add_argument("--group", help="abelian group type, e.g. C4xC2")
    common.add_argument("--set", help="comma-separated points")
    common.add_argument("--cap", type=int, default=None, help="override the exhaustive size cap")

    parser = _Parser(prog="kaleido", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("kaleido", help="kaleidoscopic colorings")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s.add_parser("find", parents=[common])
    s.add_parser("check", parents=[common]).add_argument("--coloring")
    p.set_defaults(func=cmd_kaleido)

    p = sub.add_parser("factorize", help="factorizations of abelian groups")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s.add_parser("check", parents=[common]).add_argument("--other")
    for action in ("complement", "periodic", "doubly"):
        s.add_parser(action, parents=[common])
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("hajos", help="Hajós properties")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action in ("brute", "semi", "demi"):
        s.add_parser(action, parents=[common])
    s.add_parser("classify", parents=[common]).add_argument("type", nargs="?")
    p.set_defaults(func=cmd_hajos)

    p = sub.add_parser("split", help="splittable configurations")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s.add_parser("check", parents=[common])
    s.add_parser("generate", parents=[common])
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("ultra", help="ultrametric trees")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action in ("verify", "chain"):
        s.add_parser(action, parents=[common]).add_argument("branching", nargs="?")
    p.set_defaults(func=cmd_ultra)

    p = sub.add_parser("rigid", help="rigidity of planar point sets")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = s.add_parser("check", parents=[common])
    c.add_argument("--points", help="file with one 'x y' rational pair per line")
    c.add_argument("--inline", help="points as 'x y; x y; ...'")
    p.set_defaults(func=cmd_rigid)

    p = sub.add_parser("latin", help="Latin squares and quasigroups")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = s.add_parser("complete", parents=[common])
    c.add_argument("--rect")
    c.add_argument("--seed", type=int)
    s.add_parser("check", parents=[common]).add_argument("--square")
    c = s.add_parser("example9", parents=[common])
    c.add_argument("--check-kaleido", action="store_true")
    c.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_latin)

    p = sub.add_parser("verify", parents=[common], help="re-check a saved JSON report")
    p.add_argument("report")
    p.set_defaults(func=cmd_verify, action=None)
    return parser


def run(argv: Sequence[str]) -> tuple[int, Report]:
    argv = list(argv)
    started = time.perf_counter()
    budget = None
    output = "json" if "json" in argv else "text"
    try:
        args = build_parser().parse_args(argv)
        output = args.format
        budget = Budget(args.budget)
        report = args.func(args, budget)
    except UsageError as exc:
        report = Report(" ".join(argv[:2]), {"argv": argv}, "error", details={"error": str(exc)})
    except CapExceeded as exc:
        report = Report(" ".join(argv[:2]), {"argv": argv}, "error", details={"error": f"cap exceeded: {exc}"})
    except SearchBudgetExceeded as exc:
        report = Report(" ".join(argv[:2]), {"argv": argv}, "unknown", details={"error": str(exc)})
    report.output = output
    report.stats = {
        "nodes": budget.nodes if budget is not None else 0,
        "elapsed": round(time.perf_counter() - started, 6),
    }
    return report.exit_code, report


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run(argv)
    if report.output == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.to_text())
    if report.verdict == "error":
        print(f"kaleido: error: {report.details.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
