"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its runtime.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under output capture) or directly with ``python3 tests/test_acceptance.py``.
"""
import json
import random
import sys
import time
from contextlib import contextmanager
from itertools import permutations
from pathlib import Path

import pytest

from fnmnet.cli import run
from fnmnet.compare import term_pair
from fnmnet.corpus import ALL_TERMS, PC1_NET, PC2_NET, PC_LINKS, SEMICOUNTER_NET, STATIC_ONLY_NET, bounded_pc
from fnmnet.equiv import (
    EquivConfig,
    SpRelation,
    check_sp_relation,
    interleaving_bisim,
    sp_bisim,
    step_bisim,
)
from fnmnet.errors import ResourceError
from fnmnet.fnm import NIL, ConstEnv, Par, Prefix, Sum, inp, parse, parse_term
from fnmnet.gen import TermGen
from fnmnet.laws import SCHEMATA, CongruenceConfig, LawConfig, SideConditionError, check_congruence, instantiate, rewrite, run_laws
from fnmnet.multiset import Multiset
from fnmnet.netsem import decompose, net_of
from fnmnet.petri import Net, Transition, disjoint_union, is_bounded, is_statically_reduced, reach_graph
from fnmnet.translate import roundtrip

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
CFG = EquivConfig(reach_cap=5_000, linking_cap=100_000)


@contextmanager
def criterion(num: int, title: str, limit: float, capsys=None):
    """Time the block, print one PASS/FAIL line and fail if the block raised or ran past ``limit`` seconds."""
    t0 = time.perf_counter()
    err = None
    try:
        yield
    except BaseException as exc:  # report before re-raising
        err = exc
    dt = time.perf_counter() - t0
    ok = err is None and dt < limit
    why = "" if ok else f"  [{type(err).__name__}: {err}]" if err else f"  [over {limit:g}s]"
    line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {dt:8.2f}s  {title}{why}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    if err is not None:
        raise err
    assert dt < limit, line


def compile_json(args, capsys):
    assert run(args) == 0
    return json.loads(capsys.readouterr().out)


# -- 1, 2, 3: golden nets -----------------------------------------------------------------------
def test_c01_semicounter_net(capsys):
    with criterion(1, "semi-counter compiles to 2 places, inc and dec", 1.0, capsys):
        net = compile_json(["compile", str(CORPUS / "semicounter.fnm"), "--rename"], capsys)
        assert net["places"] == ["s1", "s2"]
        assert sorted(net["transitions"], key=lambda t: t["label"]) == [
            {"pre": {"s2": 3}, "label": "dec", "post": {}},
            {"pre": {"s1": 1}, "label": "inc", "post": {"s1": 1, "s2": 1}},
        ]


def test_c02_choice_net(capsys):
    with criterion(2, "a.0 + ~a.0 compiles to 1 place, 3 transitions", 1.0, capsys):
        net = compile_json(["compile", str(CORPUS / "choice.fnm")], capsys)
        assert len(net["places"]) == 1
        s = net["places"][0]
        trs = sorted((t["label"], t["pre"][s], t["post"]) for t in net["transitions"])
        assert trs == [("a", 1, {}), ("tau", 2, {}), ("~a", 1, {})]


def test_c03_subnets(capsys):
    with criterion(3, "dynamic and static subnets of the five-place net", 1.0, capsys):
        dyn = compile_json(["subnet", str(CORPUS / "subnets.json"), "--dynamic"], capsys)
        sta = compile_json(["subnet", str(CORPUS / "subnets.json"), "--static"], capsys)
        assert sorted(dyn["places"]) == ["s1", "s2", "s4"] and len(dyn["transitions"]) == 2
        assert sorted(sta["places"]) == ["s1", "s2", "s4", "s5"] and len(sta["transitions"]) == 3
        assert set(dyn["places"]) <= set(sta["places"])
        key = lambda t: json.dumps(t, sort_keys=True)
        assert {key(t) for t in dyn["transitions"]} <= {key(t) for t in sta["transitions"]}


# -- 4: producer/consumer -----------------------------------------------------------------------
def test_c04_producer_consumer(capsys):
    with criterion(4, "producer/consumer verdicts and the L+ witness", 60.0, capsys):
        u, r1, r2 = disjoint_union(PC1_NET, PC2_NET)
        links = [(r1[a], r2[b]) for a, b in PC_LINKS]
        L = lambda side, d: Multiset({(r1 if side == 1 else r2)[k]: v for k, v in d.items()})
        pairs = [
            ({"P1": 1, "C1": 1}, {"P2": 1, "C2": 1}),
            ({"P1": 2, "C1": 3, "D1": 1}, {"P2": 2, "C2": 3, "D2''": 1}),
            ({"D1": 1, "C1'": 1}, {"D2'": 1, "C2'": 1}),
        ]
        for a, b in pairs:
            assert sp_bisim(u, L(1, a), L(2, b), links=links, config=CFG).equivalent
        ok, cex = check_sp_relation(u, SpRelation.closure(links, 8))
        assert ok, cex
        for budget in (1, 2, 3):
            n1, n2, _ = bounded_pc(budget)
            v, s1, s2 = disjoint_union(n1, n2)
            m1, m2 = n1.initial.map(s1.__getitem__), n2.initial.map(s2.__getitem__)
            res = sp_bisim(v, m1, m2, config=CFG)  # full fixpoint, no link hint
            assert res.equivalent
            assert check_sp_relation(v, SpRelation(res.witness))[0]


# -- shared corpus for 5 and 6 ------------------------------------------------------------------
def _separator():
    ab = Par(Prefix(inp("a"), NIL), Prefix(inp("b"), NIL))
    seq = Sum(Prefix(inp("a"), Prefix(inp("b"), NIL)), Prefix(inp("b"), Prefix(inp("a"), NIL)))
    return ab, seq


def _pair_corpus(n_generated=60, seed=11):
    """Bounded nets of term pairs: a generated term against a rewrite of it or against another term."""
    g = TermGen(seed)
    rng = random.Random(seed)
    cats = ["guarded", "restriction-free", "general", "sequential"]
    out = [term_pair(*_separator(), ConstEnv())]
    i = 0
    while len(out) < n_generated + 1:
        p = g.term(cats[i % 4], 2)
        q = rewrite(p, rng, g.env) if i % 3 else g.term(cats[(i + 1) % 4], 2)
        i += 1
        tp = term_pair(p, q, g.env)
        if is_bounded(tp.net, tp.m1) and is_bounded(tp.net, tp.m2):
            out.append(tp)
    return out


def _verdicts(net, m1, m2):
    try:
        return (
            sp_bisim(net, m1, m2, config=CFG).equivalent,
            step_bisim(net, m1, m2, CFG).equivalent,
            interleaving_bisim(net, m1, m2, CFG).equivalent,
        )
    except ResourceError:
        return None


def test_c05_hierarchy(capsys):
    with criterion(5, "sp implies step implies interleaving on bounded pairs", 300.0, capsys):
        decided = 0
        separators = 0
        for tp in _pair_corpus():
            v = _verdicts(tp.net, tp.m1, tp.m2)
            if v is None:
                continue
            decided += 1
            sp, stp, itl = v
            assert not sp or stp
            assert not stp or itl
            separators += itl and not stp
        assert decided >= 50
        assert separators >= 1


def test_c06_equivalence_relation(capsys):
    with criterion(6, "reflexivity, symmetry and transitivity", 300.0, capsys):
        corpus = _pair_corpus()
        seen = 0
        for tp in corpus:
            for m in reach_graph(tp.net, [tp.net.initial], CFG.reach_cap).markings:
                if seen == 100:
                    break
                assert all(_verdicts(tp.net, m, m))
                seen += 1
        assert seen == 100
        for tp in corpus:
            v = _verdicts(tp.net, tp.m1, tp.m2)
            if v is not None:
                assert _verdicts(tp.net, tp.m2, tp.m1) == v
        g = TermGen(23)
        rng = random.Random(23)
        triples = 0
        chained = 0
        cats = ["guarded", "restriction-free", "general"]
        while triples < 50:
            p = g.term(cats[triples % 3], 2)
            q = rewrite(p, rng, g.env)
            r = rewrite(q, rng, g.env) if triples % 5 else g.term(cats[triples % 3], 2)
            pq = term_pair(p, q, g.env)
            net_r = net_of(r, g.env).net
            u, s1, s2 = disjoint_union(pq.net, net_r, ("x", "y"))
            ms = [pq.m1.map(s1.__getitem__), pq.m2.map(s1.__getitem__), net_r.initial.map(s2.__getitem__)]
            try:
                rel = {(i, j): sp_bisim(u, ms[i], ms[j], config=CFG).equivalent for i in range(3) for j in range(3) if i != j}
            except ResourceError:
                continue
            triples += 1
            for i, j, k in permutations(range(3)):
                if rel[i, j] and rel[j, k]:
                    chained += 1
                    assert rel[i, k]
        assert chained > 0


# -- 7: round trip -----------------------------------------------------------------------------
def _random_reduced_nets(n, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        k = rng.randint(1, 6)
        places = [f"s{i + 1}" for i in range(k)]
        trs = {}
        for _ in range(rng.randint(0, 6)):
            pre = Multiset({s: rng.randint(1, 3) for s in rng.sample(places, rng.randint(1, min(2, k)))})
            post = Multiset({s: rng.randint(1, 3) for s in rng.sample(places, rng.randint(0, min(2, k)))})
            t = Transition(pre, rng.choice(["a", "b", "c", "tau"]), post)
            trs[t.key()] = t
        init = Multiset({s: rng.randint(1, 2) for s in rng.sample(places, rng.randint(1, k))})
        net = Net(tuple(places), tuple(trs.values()), init)
        if is_statically_reduced(net):
            out.append(net)
    return out


def test_c07_roundtrip(capsys):
    with criterion(7, "translate and recompile up to rooted isomorphism", 300.0, capsys):
        nets = [SEMICOUNTER_NET, STATIC_ONLY_NET] + _random_reduced_nets(40)
        assert len(nets) >= 30
        for net in nets:
            assert is_statically_reduced(net)
            rt = roundtrip(net)
            assert rt.iso, rt.mismatch
            assert sorted(rt.bijection) == sorted(net.places)
            assert len(set(rt.bijection.values())) == len(net.places)


# -- 8, 9, 10: laws ----------------------------------------------------------------------------
def test_c08_axiom_soundness(capsys):
    with criterion(8, "every schema sound on 100 seeded instances", 900.0, capsys):
        reports = run_laws(SCHEMATA, LawConfig(seed=0, count=100, equiv=CFG))
        for name, rep in reports.items():
            limited = f" ({rep.resource_limited} resource-limited)" if rep.resource_limited else ""
            with capsys.disabled():
                print(f"\n    {name:<5} {rep.sound}/{rep.instances} sound{limited}", end="")
            assert rep.instances >= 100
            assert rep.counterexamples == []
            assert rep.resource_limited <= rep.instances // 10


def test_c09_guard_necessity(capsys):
    with criterion(9, "0 + 0 against 0 and the identity guards", 1.0, capsys):
        tp = term_pair(parse_term("0 + 0"), NIL, ConstEnv())
        assert tp.m1.size == 1 and tp.m2.size == 0
        assert not sp_bisim(tp.net, tp.m1, tp.m2).equivalent
        assert interleaving_bisim(tp.net, tp.m1, tp.m2).equivalent
        for schema in ("A3", "A4"):
            with pytest.raises(SideConditionError):
                instantiate(schema, {"x": NIL}, ConstEnv())


def test_c10_congruence(capsys):
    with criterion(10, "contexts and recursion preserve sp-bisimilarity", 900.0, capsys):
        rep = check_congruence(CongruenceConfig(seed=0, count=200))
        with capsys.disabled():
            print(f"\n    {rep.pairs} pairs, {rep.distinct} syntactically distinct", end="")
        assert rep.pairs >= 200
        for name, stats in rep.contexts.items():
            assert stats.checked > 0, name
        assert rep.recursion.checked > 0
        assert rep.violations == 0
        assert rep.example is True


# -- 11: multi-party transitions ------------------------------------------------------------------
def test_c11_msync_decomposition(capsys):
    with criterion(11, "multi-party transitions decompose into singleton steps", 300.0, capsys):
        tns = []
        for src in ALL_TERMS.values():
            t, env = parse(src)
            tns.append(net_of(t, env))
        for src in ["(nu h) (nu k) (<h>.<k>.c.0 | ~h.0 | ~k.0)", "(nu a) ((<a>.<a>.b.0 + ~a.0) | ~a.0 | ~a.0)"]:
            tns.append(net_of(parse_term(src), ConstEnv()))
        for seed in range(200):
            g = TermGen(seed)
            tns.append(net_of(g.term(["general", "restriction-free"][seed % 2], 3), g.env))
        multi = 0
        for tn in tns:
            for tr in tn.transitions:
                if tr[0].size > 1:
                    multi += 1
                    assert decompose(tr, tn.sem) is not None, tr
        assert multi >= 20


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
