"""Command-line interface: ``fnmnet <command> ...``.

Exit codes: 0 success or positive verdict, 1 usage error, 2 input error,
3 negative verdict (not equivalent, unbounded, round-trip mismatch, law
counterexample, ill-formed term), 4 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .equiv import (
    EquivConfig,
    SpRelation,
    check_sp_relation,
    interleaving_bisim,
    linking_to_json,
    sp_bisim,
    step_bisim,
)
from .errors import FnmNetError, FnmSyntaxError, ResourceError
from .fnm.checks import well_formed_violations
from .fnm.parser import parse_program
from .fnm.syntax import show
from .netsem import Semantics, net_of
from .petri import (
    DEFAULT_REACH_CAP,
    Net,
    Transition,
    dynamic_subnet,
    format_marking,
    is_bounded,
    net_from_json,
    net_to_dict,
    net_to_dot,
    parse_marking,
    static_subnet,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NEGATIVE, EXIT_RESOURCE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; usage errors are 1 here
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


class InputError(FnmNetError):
    pass


def _load_net(path: str) -> Net:
    return net_from_json(_read(path))


def _load_program(path: str):
    prog = parse_program(_read(path))
    if prog.term is None:
        raise FnmSyntaxError(f"{path}: no main term", 1, 1)
    return prog


def _equiv_config(args) -> EquivConfig:
    return EquivConfig(reach_cap=args.reach_cap, linking_cap=args.linking_cap, max_marking_size=args.max_marking_size)


def _rename(net: Net, names_arg: str | None) -> Net:
    """Apply ``--rename a,b,c`` (names in discovery order) to a net whose places are ``s1, s2, ...``."""
    if not names_arg:
        return net
    names = [s.strip() for s in names_arg.split(",")]
    if len(names) != len(net.places) or len(set(names)) != len(names):
        raise InputError(f"--rename needs {len(net.places)} distinct names, got {len(names)}")
    mp = dict(zip(net.places, names)).__getitem__
    trs = tuple(Transition(t.pre.map(mp), t.label, t.post.map(mp)) for t in net.transitions)
    return Net(tuple(names), trs, net.initial.map(mp))


# -- commands ---------------------------------------------------------------------------------
def cmd_parse(args) -> int:
    prog = _load_program(args.file)
    env = prog.env
    problems = well_formed_violations(prog.term, env)
    sem = Semantics(env)
    if not sem.admissible_marking(sem.dec(prog.term)):
        problems.append("a name occurs both plain and restricted")
    for c in prog.definitions:
        print(f"{c} := {show(env.body(c))}")
    print(f"main = {show(prog.term)}")
    for msg in problems:
        print(f"error: {msg}", file=sys.stderr)
    return EXIT_NEGATIVE if problems else EXIT_OK


def cmd_compile(args) -> int:
    prog = _load_program(args.file)
    net = net_of(prog.term, prog.env, rename=args.rename is not None).net
    net = _rename(net, args.rename)
    _emit(net_to_dot(net) if args.dot else _dump(net_to_dict(net)), args.output)
    return EXIT_OK


def cmd_subnet(args) -> int:
    net = _load_net(args.net)
    m0 = parse_marking(args.marking) if args.marking is not None else None
    sub = dynamic_subnet(net, m0, args.cap) if args.dynamic else static_subnet(net, m0)
    _emit(net_to_dot(sub) if args.dot else _dump(net_to_dict(sub)), args.output)
    return EXIT_OK


def cmd_bounded(args) -> int:
    net = _load_net(args.net)
    m0 = parse_marking(args.marking) if args.marking is not None else None
    ok = is_bounded(net, m0)
    print("bounded" if ok else "unbounded")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_equiv(args) -> int:
    cfg = _equiv_config(args)
    if len(args.inputs) == 2:
        from .compare import term_pair

        p, q = (_load_program(f) for f in args.inputs)
        tp = term_pair(p.term, q.term, p.env, q.env)
        net, m1, m2 = tp.net, tp.m1, tp.m2
    elif len(args.inputs) == 1:
        if args.m1 is None or args.m2 is None:
            raise UsageError("a net file needs both -m1 and -m2")
        net = _load_net(args.inputs[0])
        m1, m2 = parse_marking(args.m1), parse_marking(args.m2)
        for m in (m1, m2):
            unknown = set(m.support()) - set(net.places)
            if unknown:
                raise InputError(f"unknown places in marking: {sorted(unknown)}")
    else:
        raise UsageError("give two .fnm files or one net file")
    links = None
    if args.links:
        links = [tuple(x) for x in json.loads(_read(args.links))]
    if args.kind == "sp":
        res = sp_bisim(net, m1, m2, links=links, config=cfg)
        ok = res.equivalent
        if args.witness and ok:
            _emit(_dump([linking_to_json(l) for l in res.witness]), args.witness)
    elif args.kind == "step":
        ok = step_bisim(net, m1, m2, cfg).equivalent
    else:
        ok = interleaving_bisim(net, m1, m2, cfg).equivalent
    print(f"{args.kind}: {'equivalent' if ok else 'not equivalent'} ({format_marking(m1)} vs {format_marking(m2)})")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_check(args) -> int:
    """Check a link set ``L`` (JSON list of place pairs) as the relation ``L+`` up to a linking size."""
    net = _load_net(args.net)
    links = [tuple(x) for x in json.loads(_read(args.links))]
    ok, cex = check_sp_relation(net, SpRelation.closure(links, args.max_size))
    if ok:
        print("relation is an sp-bisimulation")
        return EXIT_OK
    l, c, t, side = cex
    print(f"transfer fails: linking {linking_to_json(l)}, sub-linking {linking_to_json(c)}, transition {t}, side {side}")
    return EXIT_NEGATIVE


def cmd_translate(args) -> int:
    from .translate import to_fnm

    net = _load_net(args.net)
    m0 = parse_marking(args.marking) if args.marking is not None else None
    _emit(to_fnm(net, m0, clean=args.clean).source(), args.output)
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    from .translate import roundtrip

    net = _load_net(args.net)
    m0 = parse_marking(args.marking) if args.marking is not None else None
    rt = roundtrip(net, m0, clean=args.clean)
    print(_dump(rt.to_dict()))
    return EXIT_OK if rt.iso else EXIT_NEGATIVE


def cmd_laws(args) -> int:
    from .laws import SCHEMATA, LawConfig, report_json, report_table, run_laws

    schemata = args.schema or list(SCHEMATA)
    bad = [s for s in schemata if s not in SCHEMATA]
    if bad:
        raise UsageError(f"unknown schema {bad[0]}; choose from {', '.join(SCHEMATA)}")
    cfg = LawConfig(seed=args.seed, count=args.count, equiv=_equiv_config(args))
    reports = run_laws(schemata, cfg)
    if args.json:
        _emit(report_json(reports), args.output)
    else:
        _emit(report_table(reports), args.output)
    return EXIT_NEGATIVE if any(r.counterexamples for r in reports.values()) else EXIT_OK


# -- argument parsing ------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fnmnet", description="FNM terms, their P/T nets and structure-preserving bisimilarity.")
    ap.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    caps = _Parser(add_help=False)
    caps.add_argument("--reach-cap", type=int, default=DEFAULT_REACH_CAP, help="reachable markings per side")
    caps.add_argument("--linking-cap", type=int, default=200_000, help="candidate linkings for sp")
    caps.add_argument("--max-marking-size", type=int, default=12)

    p = sub.add_parser("parse", help="parse and check an .fnm file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compile", help="build the net of an .fnm file")
    p.add_argument("file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--dot", action="store_true", help="Graphviz output")
    p.add_argument("--rename", nargs="?", const="", default=None, metavar="NAMES",
                   help="short place names s1, s2, ... or the given comma-separated names, in discovery order")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("subnet", help="dynamically or statically reachable subnet")
    p.add_argument("net")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--static", action="store_true")
    kind.add_argument("--dynamic", action="store_true")
    p.add_argument("--cap", type=int, default=DEFAULT_REACH_CAP, help="reachable marking cap for --dynamic")
    p.add_argument("-m", "--marking", help="initial marking place:count,...")
    p.add_argument("--dot", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_subnet)

    p = sub.add_parser("bounded", help="decide boundedness (exit 0 bounded, 3 unbounded)")
    p.add_argument("net")
    p.add_argument("-m", "--marking")
    p.set_defaults(func=cmd_bounded)

    p = sub.add_parser("equiv", parents=[caps], help="compare two terms or two markings of a net")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="A.fnm B.fnm, or NET.json with -m1/-m2")
    p.add_argument("--kind", choices=("sp", "step", "int"), default="sp")
    p.add_argument("-m1", dest="m1")
    p.add_argument("-m2", dest="m2")
    p.add_argument("--witness", metavar="OUT", help="write the sp witness linkings as JSON")
    p.add_argument("--links", metavar="FILE", help="JSON list of place pairs L tried first as L+")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("check", help="check L+ for a link set L up to a linking size")
    p.add_argument("net")
    p.add_argument("--links", required=True, metavar="FILE")
    p.add_argument("--max-size", type=int, default=4)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="net to FNM term")
    p.add_argument("net")
    p.add_argument("-m", "--marking")
    p.add_argument("--clean", action="store_true", help="drop trivial 0 components")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("roundtrip", help="translate and recompile; exit 0 iff isomorphic")
    p.add_argument("net")
    p.add_argument("-m", "--marking")
    p.add_argument("--clean", action="store_true")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("laws", parents=[caps], help="verify axiom schemata on random instances")
    p.add_argument("--schema", action="append", help="schema id (repeatable); default all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_laws, reach_cap=5_000, linking_cap=100_000)
    return ap


def _fail(args_json: bool, code: int, exc: BaseException) -> int:
    kind = {EXIT_USAGE: "usage", EXIT_INPUT: "input", EXIT_RESOURCE: "resource"}[code]
    if args_json:
        print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc), "exit": code}), file=sys.stderr)
    else:
        print(f"fnmnet: {kind} error: {exc}", file=sys.stderr)
    return code


def run(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing command")
        return args.func(args)
    except UsageError as exc:
        return _fail(json_errors, EXIT_USAGE, exc)
    except ResourceError as exc:
        return _fail(json_errors, EXIT_RESOURCE, exc)
    except (FnmNetError, ValueError, json.JSONDecodeError) as exc:
        return _fail(json_errors, EXIT_INPUT, exc)


def main() -> None:
    sys.exit(run())
