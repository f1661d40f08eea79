"""Command-line entry point: ``kgraphlab <command> --graph g.kg ...``.

Every command prints one JSON document on stdout and a one-line summary on
stderr. Exit status: 0 when everything requested passes, 1 when a verification
fails, 2 on input or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import alignment, cocycle, ideals, satiation, toeplitz
from .errors import BoundTooSmall, KGraphError, ParseError, UnknownCommand
from .kgraph import KGraph, dleq, labels, load_kgraph, parse_degree

SCHEMA = "kgraphlab/1"


@dataclass
class RunConfig:
    command: str
    graph: str
    cocycle: str = "trivial"
    bound: tuple[int, ...] | None = None
    margin: tuple[int, ...] | None = None
    output: str | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace, g: KGraph) -> "RunConfig":
        bound = _degree(g, getattr(args, "bound", None), "bound")
        margin = _degree(g, getattr(args, "margin", None), "margin")
        if bound is not None and margin is None:
            margin = tuple(0 for _ in bound)
        if margin is not None and bound is not None and not dleq(margin, bound):
            raise BoundTooSmall(f"margin {list(margin)} exceeds bound {list(bound)}")
        return cls(args.command, args.graph, getattr(args, "cocycle", "trivial"),
                   bound, margin, args.output)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UnknownCommand(message)


def _cocycle(g: KGraph, text: str, validate: bool = True) -> cocycle.Cocycle:
    if text == "trivial":
        return cocycle.trivial_cocycle(g)
    if text.startswith("theta="):
        try:
            theta = float(text[len("theta="):])
        except ValueError:
            raise ParseError(f"bad cocycle argument {text!r}") from None
        return cocycle.rotation_cocycle(g, theta)
    if text.startswith("table="):
        return cocycle.load_table_cocycle(g, text[len("table="):], validate)
    raise ParseError(f"cocycle must be trivial, theta=<x> or table=<file>, got {text!r}")


def _degree(g: KGraph, text: str | None, what: str):
    if text is None:
        return None
    d = parse_degree(text)
    if len(d) != g.k:
        raise ParseError(f"{what} {text!r} needs {g.k} coordinates")
    return d


def _relations(g: KGraph, path: str | None):
    if not path:
        return frozenset()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return satiation.collection(g, data)


def _chain(g: KGraph, text: str):
    return [g.parse_paths(part) for part in text.split(";")]


# ---------------------------------------------------------------- commands

def cmd_validate(g, a):
    return {"valid": True, "graph": g.describe()}, True, "graph is a valid k-graph"


def cmd_paths(g, a):
    if a.degree:
        ps = g.paths_of_degree(_degree(g, a.degree, "degree"), a.vertex)
    else:
        ps = g.paths_up_to(a.cfg.bound, a.vertex)
    return {"paths": labels(ps), "size": len(ps)}, True, f"{len(ps)} paths"


def cmd_mce(g, a):
    mu, nu = g.parse_path(a.mu), g.parse_path(a.nu)
    res = alignment.mce(mu, nu)
    pairs = [[p.alpha.label, p.beta.label] for p in sorted(alignment.lambda_min(mu, nu))]
    return ({"query": {"mu": mu.label, "nu": nu.label}, "result": labels(res),
             "lambda_min": pairs, "size": len(res)}, True, f"{len(res)} minimal common extensions")


def cmd_ext(g, a):
    mu, E = g.parse_path(a.mu), g.parse_paths(a.set)
    res = alignment.ext(mu, E)
    return ({"query": {"mu": mu.label, "set": labels(E)}, "result": labels(res),
             "size": len(res)}, True, f"Ext has {len(res)} elements")


def cmd_pi(g, a):
    E = g.parse_paths(a.set)
    pi = alignment.pi_closure(E)
    classes = [[list(n), v, [p.label for p in ps]] for (n, v), ps in sorted(pi.classes().items())]
    return ({"query": {"set": labels(E)}, "result": labels(pi.elements), "size": len(pi),
             "classes": classes}, True, f"closure has {len(pi)} elements")


def cmd_vee(g, a):
    E = g.parse_paths(a.set)
    res = alignment.vee_closure(E)
    return ({"query": {"set": labels(E)}, "result": labels(res), "size": len(res)},
            True, f"vee closure has {len(res)} elements")


def cmd_fe(g, a):
    D = a.cfg.bound
    res = satiation.canonical(satiation.enumerate_fe(g, a.vertex, D, a.max_size))
    return ({"vertex": a.vertex, "bound": list(D), "max_size": a.max_size,
             "result": [X.labels() for X in res], "size": len(res)},
            True, f"{len(res)} exhaustive sets within bound")


def cmd_satiate(g, a):
    D = a.cfg.bound
    res = satiation.satiate(_relations(g, a.relations), D)
    check = satiation.is_satiated(res.derived, D)
    out = res.to_dict()
    out["is_satiated"] = check.to_dict()
    return out, bool(check), f"{len(res.derived)} sets derived, {res.dropped} over-bound dropped"


def cmd_cocycle_check(g, a):
    D = a.cfg.bound
    c = _cocycle(g, a.cocycle, validate=False)
    rep = cocycle.check_cocycle_identity(c, g, D)
    out = rep.to_dict()
    out["cocycle"] = c.describe()
    return out, rep.passed, f"cocycle identity residual {rep.max_residual:.3g}"


def _family(g, a):
    D = a.cfg.bound
    M = a.cfg.margin
    return toeplitz.build_family(g, _cocycle(g, a.cocycle), D, M)


def cmd_verify_tck(g, a):
    fam = _family(g, a)
    rep = toeplitz.verify_tck(fam)
    out = rep.to_dict()
    if a.dump:
        out["dump"] = {p: fam.T(g.parse_path(p)).to_json() for p in a.dump.split(",")}
    return out, rep.passed, f"max TCK residual {rep.max_residual():.3g}"


def cmd_core(g, a):
    fam = _family(g, a)
    pi = alignment.pi_closure(g.parse_paths(a.set))
    blocks = toeplitz.core_blocks(fam, pi)
    cross = toeplitz.block_orthogonality_residual(fam, blocks)
    forms = max((toeplitz.theta_forms_residual(fam, x, y, pi) for x, y in pi.pairs()), default=0.0)
    worst = max([cross, forms] + [max(b.m1_residual, b.m2_residual) for b in blocks])
    ok = worst <= toeplitz.REL_TOL
    return ({"closure": labels(pi.elements), "blocks": [b.to_dict() for b in blocks],
             "cross_block_residual": cross, "alternate_forms_residual": forms, "pass": ok},
            ok, f"{len(blocks)} blocks, worst residual {worst:.3g}")


def cmd_ladder(g, a):
    D = a.cfg.bound
    M = a.cfg.margin
    rep = toeplitz.omega_ladder(g, _cocycle(g, a.b), _cocycle(g, a.c), _chain(g, a.chain), D, M)
    return rep.to_dict(), rep.passed, f"ladder residual {rep.max_residual():.3g}"


def cmd_ideals(g, a):
    D = a.cfg.bound
    pairs = ideals.enumerate_ideal_pairs(g, _relations(g, a.relations), D, a.max_size)
    return ({"bound": list(D), "pairs": [p.to_dict() for p in pairs], "size": len(pairs)},
            True, f"{len(pairs)} ideal pairs within bound")


def cmd_witness(g, a):
    D = a.cfg.bound
    avoid = g.parse_paths(a.avoid) if a.avoid else []
    w = ideals.boundary_prefix_witness(g, _relations(g, a.relations), a.vertex, avoid, D)
    if w is None:
        return {"found": False, "bound": list(D)}, False, "no witness within bound"
    fam = toeplitz.build_family(g, _cocycle(g, a.cocycle), D, tuple(0 for _ in D))
    norms = ideals.witness_norms(fam, w, avoid)
    ok = all(abs(n - 1) <= 1e-12 for _, n in norms)
    return ({"found": True, "bound": list(D), "witness": w.to_dict(),
             "norms": [[list(q), n] for q, n in norms], "pass": ok},
            ok, f"witness {w.path.label} of degree {list(w.degree)}")


def cmd_quotient(g, a):
    H = [v for v in a.hereditary.split(",") if v]
    q = ideals.quotient_graph(g, H)
    return ({"H": sorted(H), "graph": q.describe(), "text": q.to_text()},
            True, f"quotient has {len(q.vertices)} vertices")


COMMANDS = {
    "validate": cmd_validate, "paths": cmd_paths, "mce": cmd_mce, "ext": cmd_ext,
    "pi": cmd_pi, "vee": cmd_vee, "fe": cmd_fe, "satiate": cmd_satiate,
    "cocycle-check": cmd_cocycle_check, "verify-tck": cmd_verify_tck, "core": cmd_core,
    "ladder": cmd_ladder, "ideals": cmd_ideals, "witness": cmd_witness, "quotient": cmd_quotient,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kgraphlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, *opts):
        sp = sub.add_parser(name)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--output")
        for o in opts:
            o(sp)
        return sp

    bound = lambda sp: sp.add_argument("--bound", required=True)
    margin = lambda sp: sp.add_argument("--margin")
    coc = lambda sp: sp.add_argument("--cocycle", default="trivial")
    rel = lambda sp: sp.add_argument("--relations")
    pset = lambda sp: sp.add_argument("--set", required=True)
    maxsize = lambda sp: sp.add_argument("--max-size", type=int, default=2)

    add("validate")
    sp = add("paths", lambda sp: sp.add_argument("--bound"))
    sp.add_argument("--vertex")
    sp.add_argument("--degree")
    sp = add("mce")
    sp.add_argument("--mu", required=True)
    sp.add_argument("--nu", required=True)
    sp = add("ext", pset)
    sp.add_argument("--mu", required=True)
    add("pi", pset)
    add("vee", pset)
    sp = add("fe", bound, maxsize)
    sp.add_argument("--vertex", required=True)
    add("satiate", bound, rel)
    add("cocycle-check", bound, coc)
    sp = add("verify-tck", bound, margin, coc)
    sp.add_argument("--dump", help="comma-separated paths whose operators to include")
    add("core", bound, margin, coc, pset)
    sp = add("ladder", bound, margin)
    sp.add_argument("--b", default="trivial")
    sp.add_argument("--c", default="trivial")
    sp.add_argument("--chain", required=True, help="sets separated by ';', e.g. 'v;v,e;v,e,f'")
    add("ideals", bound, rel, maxsize)
    sp = add("witness", bound, rel, coc)
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--avoid", default="")
    sp = add("quotient")
    sp.add_argument("--hereditary", required=True)
    return p


def _emit(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    output = None
    try:
        args = build_parser().parse_args(argv)
        output = args.output
        g = load_kgraph(args.graph)
        args.cfg = RunConfig.from_args(args, g)
        if args.command == "paths" and not (args.bound or args.degree):
            raise ParseError("paths needs --bound or --degree")
        doc, ok, summary = COMMANDS[args.command](g, args)
    except KGraphError as err:
        cmd = argv[0] if argv else None
        _emit({"schema": SCHEMA, "command": cmd, "pass": False, **err.to_dict()}, output)
        print(f"kgraphlab: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        _emit({"schema": SCHEMA, "command": argv[0] if argv else None, "pass": False,
               "error": "OSError", "message": str(err)}, output)
        print(f"kgraphlab: {err}", file=sys.stderr)
        return 2
    doc = {"schema": SCHEMA, "command": args.command, "graph_file": args.graph, **doc}
    doc.setdefault("pass", ok)
    _emit(doc, output)
    print(f"kgraphlab {args.command}: {'ok' if ok else 'FAIL'}: {summary}", file=sys.stderr)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
