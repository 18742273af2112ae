"""Axiom schemata for structure-preserving bisimilarity and a soundness harness.

Each schema turns a *binding* of its metavariables into a pair of closed
terms, after checking categories and syntactic side conditions.  Side
conditions that are themselves equivalences (for instance
``x | x1 = x' | x1'``) become proof obligations, discharged with the
checker before the instance counts.  The harness draws random bindings,
discharges obligations and verifies each instance.

Schema identifiers:

* sums ``A1``-``A4``, strong prefix ``S1``-``S3``, constants ``C1``-``C2``,
  parallel ``P1``-``P3``, restriction ``R1``-``R3``;
* preset permutation ``Pr1``-``Pr2`` and postset rearrangement
  ``Ps1``-``Ps4`` for multi-party synchronizations, parametric in the
  number ``n`` of servants.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from .compare import compare_terms
from .equiv import EquivConfig
from .errors import FnmNetError, PreconditionError, ResourceError
from .fnm.checks import (
    admissible,
    bound_names,
    free_names,
    substitute_name,
    substitute_var,
    well_formed,
)
from .fnm.syntax import (
    NIL,
    TAU,
    Action,
    Const,
    ConstEnv,
    Nil,
    Par,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Term,
    Var,
    is_guarded,
    is_restriction_free,
    is_sequential,
    par_components,
    par_of,
    restrict_all,
    show,
    sum_components,
    sum_of,
)
from .gen import GenConfig, TermGen
from .netsem import Semantics

SCHEMATA = (
    "A1", "A2", "A3", "A4", "S1", "S2", "S3", "C1", "C2", "P1", "P2", "P3",
    "R1", "R2", "R3", "Pr1", "Pr2", "Ps1", "Ps2", "Ps3", "Ps4",
)  # fmt: skip

SERVANT_NAMES = ("h", "k", "m")


class SideConditionError(PreconditionError):
    """A binding violates a category constraint or a syntactic side condition."""


@dataclass
class LawInstance:
    schema: str
    lhs: Term
    rhs: Term
    env: ConstEnv
    obligations: list = field(default_factory=list)  # (p, q) pairs that must be sp-bisimilar
    binding: dict = field(default_factory=dict)

    def describe(self) -> dict:
        consts = {}
        for c in self.env.user_names():
            consts[c] = show(self.env.body(c))
        return {"schema": self.schema, "lhs": show(self.lhs), "rhs": show(self.rhs), "constants": consts}


# -- helpers -------------------------------------------------------------------------------
def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise SideConditionError(msg)


def _guarded(t: Term, what: str) -> None:
    _need(isinstance(t, Term) and is_guarded(t), f"{what} must be a guarded term, got {show(t)}")


def _rfree(t: Term, what: str) -> None:
    _need(isinstance(t, Term) and is_restriction_free(t), f"{what} must be restriction-free, got {show(t)}")


def _disjoint(t: Term, names, env: ConstEnv, what: str) -> None:
    clash = free_names(t, env) & set(names)
    _need(not clash, f"free names of {what} must avoid {sorted(names)}, found {sorted(clash)}")


def chain(seq: list, a0: str, x: Term) -> Term:
    """``<a_n>. ... <a_1>.a0.x`` for ``seq = [a_1, ..., a_n]``."""
    t: Term = Prefix(Action("in", a0), x)
    for a in seq:
        t = Strong(Action("in", a), t)
    return t


def servants(names: list, conts: list) -> Term:
    return par_of([Prefix(Action("out", a), x) for a, x in zip(names, conts)])


def _multi(A, summands: list, y: Term, names: list, conts: list, z: Term) -> Term:
    return restrict_all(sorted(set(A)), Par(Par(sum_of(summands + [y]), servants(names, conts)), z))


def _is_perm(d, n: int) -> bool:
    return sorted(d) == list(range(n))


# -- instantiation -------------------------------------------------------------------------
def instantiate(schema: str, b: dict, env: ConstEnv) -> LawInstance:
    """Build both sides of ``schema`` under binding ``b``.

    Raises :class:`SideConditionError` on category or side-condition
    violations.  The result also has to be well formed and admissible.
    """
    obl: list = []
    if schema == "A1":
        for v in "xyz":
            _guarded(b[v], v)
        lhs, rhs = Sum(b["x"], Sum(b["y"], b["z"])), Sum(Sum(b["x"], b["y"]), b["z"])
    elif schema == "A2":
        _guarded(b["x"], "x")
        _guarded(b["y"], "y")
        lhs, rhs = Sum(b["x"], b["y"]), Sum(b["y"], b["x"])
    elif schema in ("A3", "A4"):
        _guarded(b["x"], "x")
        _need(not isinstance(b["x"], Nil), "x must differ from 0")
        lhs = Sum(b["x"], NIL) if schema == "A3" else Sum(b["x"], b["x"])
        rhs = b["x"]
    elif schema == "S1":
        _guarded(b["x"], "x")
        _guarded(b["y"], "y")
        a = Action("in", b["a"])
        lhs, rhs = Strong(a, Sum(b["x"], b["y"])), Sum(Strong(a, b["x"]), Strong(a, b["y"]))
    elif schema == "S2":
        _rfree(b["x"], "x")
        lhs, rhs = Strong(Action("in", b["a"]), Prefix(TAU, b["x"])), Prefix(Action("in", b["a"]), b["x"])
    elif schema == "S3":
        x = b["x"]
        _guarded(x, "x")
        lhs, rhs = Strong(Action("in", b["a"]), x), Sum(NIL, NIL)
        if not (isinstance(x, Nil) or x == Sum(NIL, NIL)):
            obl.append((x, Sum(NIL, NIL)))
    elif schema == "C1":
        c = b["C"]
        lhs, rhs = Const(c), Sum(env.body(c), NIL)
    elif schema == "C2":
        c, p, q, var = b["C"], b["p"], b["q"], b.get("var", "x")
        _guarded(p, "p")
        _need(is_sequential(q), "q must be a sequential term")
        _need(env.body(c) == substitute_var(p, Const(c), var, env), f"{c} is not defined as p{{{c}/{var}}}")
        lhs, rhs = Const(c), q
        obl.append((q, substitute_var(p, q, var, env)))
    elif schema == "P1":
        for v in "xyz":
            _rfree(b[v], v)
        lhs, rhs = Par(b["x"], Par(b["y"], b["z"])), Par(Par(b["x"], b["y"]), b["z"])
    elif schema == "P2":
        _rfree(b["x"], "x")
        _rfree(b["y"], "y")
        lhs, rhs = Par(b["x"], b["y"]), Par(b["y"], b["x"])
    elif schema == "P3":
        _rfree(b["x"], "x")
        lhs, rhs = Par(b["x"], NIL), b["x"]
    elif schema == "R1":
        _need(b["a"] not in free_names(b["x"], env), "a must not be free in x")
        lhs, rhs = Restrict(b["a"], b["x"]), b["x"]
    elif schema == "R2":
        _need(b["a"] != b["b"], "a and b must differ")
        lhs = Restrict(b["a"], Restrict(b["b"], b["x"]))
        rhs = Restrict(b["b"], Restrict(b["a"], b["x"]))
    elif schema == "R3":
        x = b["x"]
        _need(b["b"] not in free_names(x, env) | bound_names(x), "b must be neither free nor bound in x")
        lhs, rhs = Restrict(b["a"], x), Restrict(b["b"], substitute_name(x, b["a"], b["b"], env))
    elif schema in ("Pr1", "Pr2", "Ps1", "Ps2", "Ps3", "Ps4"):
        lhs, rhs = _multi_instance(schema, b, env, obl)
    else:
        raise SideConditionError(f"unknown schema {schema}")
    for side in (lhs, rhs):
        _need(well_formed(side, env), f"instance side {show(side)} is not well formed")
        _need(admissible(side, env), f"instance side {show(side)} is not admissible")
    return LawInstance(schema, lhs, rhs, env, obl, dict(b))


def _multi_instance(schema: str, b: dict, env: ConstEnv, obl: list) -> tuple:
    A = set(b["A"])
    seq = list(b["a"])  # a_1 .. a_n
    a0 = b["a0"]
    zero_based = schema in ("Pr2", "Ps2", "Ps4")
    n = len(seq)
    _need(n >= (0 if schema in ("Ps2", "Ps4") else 1), f"{schema} needs at least one servant")
    servant_names = ([a0] if zero_based else []) + seq
    _need(set(seq) <= A, "a_1..a_n must be restricted")
    if zero_based:
        _need(a0 in A, "a_0 must be restricted")
    else:
        _need(a0 not in A, "a_0 must not be restricted")
    _guarded(b["y"], "y")
    _rfree(b["z"], "z")
    _disjoint(b["y"], servant_names, env, "y")
    _disjoint(b["z"], servant_names, env, "z")
    xs = list(b["xs"])
    _need(len(xs) == len(servant_names), "one servant continuation per servant name")
    for i, xi in enumerate(xs):
        _rfree(xi, f"x_{i}")
    if schema in ("Pr1", "Pr2", "Ps1", "Ps2"):
        _rfree(b["x"], "x")
    if schema == "Pr1":
        d = b["perm"]
        _need(_is_perm(d, n), "perm must be a permutation of the strong prefixes")
        lhs = _multi(A, [chain(seq, a0, b["x"])], b["y"], servant_names, xs, b["z"])
        rhs = _multi(A, [chain([seq[d[i]] for i in range(n)], a0, b["x"])], b["y"], servant_names, xs, b["z"])
    elif schema == "Pr2":
        d = b["perm"]
        full = [a0] + seq
        _need(_is_perm(d, n + 1), "perm must be a permutation of a_0..a_n")
        lhs = _multi(A, [chain(seq, a0, b["x"])], b["y"], servant_names, xs, b["z"])
        perm = [full[d[i]] for i in range(n + 1)]
        rhs = _multi(A, [chain(perm[1:], perm[0], b["x"])], b["y"], servant_names, xs, b["z"])
    elif schema in ("Ps1", "Ps2"):
        xs2 = list(b["xs2"])
        _need(len(xs2) == len(xs), "x' needs as many components as x")
        _rfree(b["x2"], "x'")
        for i, xi in enumerate(xs2):
            _rfree(xi, f"x'_{i}")
        lhs = _multi(A, [chain(seq, a0, b["x"])], b["y"], servant_names, xs, b["z"])
        rhs = _multi(A, [chain(seq, a0, b["x2"])], b["y"], servant_names, xs2, b["z"])
        obl.append((par_of([b["x"]] + xs), par_of([b["x2"]] + xs2)))
    else:  # Ps3, Ps4
        ys = list(b["ys"])
        _need(len(ys) >= 1, "at least one alternative continuation")
        for j, yj in enumerate(ys):
            _rfree(yj, f"y_{j}")
        ws = list(b["ws"])
        _need(len(ws) == len(xs), "w needs one component per servant")
        _rfree(b["w"], "w")
        for i, wi in enumerate(ws):
            _rfree(wi, f"w_{i}")
        lhs = _multi(A, [chain(seq, a0, yj) for yj in ys], b["y"], servant_names, xs, b["z"])
        rhs = _multi(A, [chain(seq, a0, Par(yj, b["w"])) for yj in ys], b["y"], servant_names, ws, b["z"])
        obl.append((par_of(xs), Par(b["w"], par_of(ws))))
    return lhs, rhs


# -- verification -----------------------------------------------------------------------------------
SOUND, COUNTEREXAMPLE, RESOURCE = "sound", "counterexample", "resource-limit"


def sp_verdict(p: Term, q: Term, env: ConstEnv, config: EquivConfig | None = None, sem: Semantics | None = None) -> str:
    try:
        return SOUND if compare_terms(p, q, env, "sp", config=config, sem=sem) else COUNTEREXAMPLE
    except ResourceError:
        return RESOURCE


def discharge(inst: LawInstance, config: EquivConfig | None = None, sem: Semantics | None = None) -> str:
    """Check the semantic side conditions: ``sound`` when all hold, otherwise the failing verdict."""
    for p, q in inst.obligations:
        v = sp_verdict(p, q, inst.env, config, sem)
        if v != SOUND:
            return v
    return SOUND


def verify_instance(inst: LawInstance, config: EquivConfig | None = None, sem: Semantics | None = None) -> str:
    """``sound`` if both sides are sp-bisimilar, ``counterexample`` if not, ``resource-limit`` if a cap is hit."""
    return sp_verdict(inst.lhs, inst.rhs, inst.env, config, sem)


# -- random bindings ------------------------------------------------------------------------------------
@dataclass
class LawConfig:
    """Harness parameters.  ``size`` bounds generated terms, ``n_values`` the servant counts."""

    seed: int = 0
    count: int = 100
    size: int = 2
    n_values: tuple = (1, 2, 3)
    max_attempts: int = 20
    gen: GenConfig = field(default_factory=GenConfig)
    equiv: EquivConfig = field(default_factory=lambda: EquivConfig(reach_cap=5_000, linking_cap=100_000))


def _split(rng: random.Random, items: list, k: int) -> list:
    groups: list = [[] for _ in range(k)]
    for it in items:
        groups[rng.randrange(k)].append(it)
    return groups


class BindingGen:
    """Draws random bindings for every schema from a :class:`TermGen`."""

    def __init__(self, g: TermGen, cfg: LawConfig):
        self.g = g
        self.rng = g.rng
        self.cfg = cfg

    def t(self, cat: str, names: tuple | None = None, size: int | None = None) -> Term:
        return self.g.term(cat, self.cfg.size if size is None else size, names)

    def nonzero(self, cat: str) -> Term:
        for _ in range(50):
            x = self.t(cat)
            if not isinstance(x, Nil):
                return x
        return Prefix(Action("in", "a"), NIL)

    def binding(self, schema: str) -> dict:
        r, g = self.rng, self.g
        acts = g.cfg.actions
        if schema == "A1":
            return {v: self.t("guarded") for v in "xyz"}
        if schema == "A2":
            return {v: self.t("guarded") for v in "xy"}
        if schema in ("A3", "A4"):
            return {"x": self.nonzero("guarded")}
        if schema == "S1":
            return {"a": g.name(), "x": self.t("strong"), "y": self.t("strong")}
        if schema == "S2":
            return {"a": g.name(), "x": g.cont(self.cfg.size, tuple(g.pool), tuple(g.pool))}
        if schema == "S3":
            choice = r.random()
            if choice < 0.2:
                x = NIL
            elif choice < 0.4:
                x = Sum(NIL, NIL)
            else:
                x = self.t("strong")
            return {"a": g.name(), "x": x}
        if schema == "C1":
            if r.random() < 0.5 and g.pool:
                return {"C": r.choice(g.pool)}
            return {"C": g.new_constant(self.cfg.size)}
        if schema == "C2":
            return self._c2()
        if schema == "P1":
            return {v: self.t("restriction-free") for v in "xyz"}
        if schema == "P2":
            return {v: self.t("restriction-free") for v in "xy"}
        if schema == "P3":
            return {"x": self.t("restriction-free")}
        if schema == "R1":
            x = self.t("general")
            free = free_names(x, g.env)
            unused = [a for a in acts + ("d",) if a not in free]
            return {"a": r.choice(unused) if unused else "d", "x": x}
        if schema == "R2":
            a, b = r.sample(acts, 2)
            return {"a": a, "b": b, "x": self.t("general")}
        if schema == "R3":
            x = self.t("general")
            avoid = free_names(x, g.env) | bound_names(x)
            bs = [c for c in ("d", "e", "f") + acts if c not in avoid]
            return {"a": r.choice(acts), "b": bs[0], "x": x}
        return self._multi(schema)

    def _c2(self) -> dict:
        g, r = self.g, self.rng
        p = g.open_guarded(self.cfg.size + 1, "x")
        c = g.fresh_const_name("R")
        g.env.define(c, substitute_var(p, Const(c), "x", g.env))
        mode = r.random()
        if mode < 0.4:
            # a second constant defined by a reshuffled body
            d = g.fresh_const_name("R")
            parts = _shuffle_sum(p, r)
            g.env.define(d, substitute_var(parts, Const(d), "x", g.env))
            q: Term = Const(d)
        elif mode < 0.8:
            q = substitute_var(p, Const(c), "x", g.env)  # one unfolding
        else:
            q = self.t("sequential")
        return {"C": c, "p": p, "q": q, "var": "x"}

    def _multi(self, schema: str) -> dict:
        g, r = self.g, self.rng
        zero_based = schema in ("Pr2", "Ps2", "Ps4")
        n = r.choice(self.cfg.n_values)
        seq = [r.choice(SERVANT_NAMES) for _ in range(n)]
        A = set(seq)
        if zero_based:
            a0 = r.choice(SERVANT_NAMES)
            A.add(a0)
        else:
            a0 = g.name()
        if r.random() < 0.2:
            A.add(r.choice([a for a in g.cfg.actions if a != a0]))
        snames = ([a0] if zero_based else []) + seq
        visible = g.cfg.actions
        mixed = visible + tuple(sorted(A))
        y = self.t("guarded", visible, size=1)
        z = self.t("restriction-free", visible, size=1) if r.random() < 0.6 else NIL
        xs = [self.t("restriction-free", mixed if r.random() < 0.3 else visible, size=1) for _ in snames]
        b = {"A": sorted(A), "a": seq, "a0": a0, "y": y, "z": z, "xs": xs}
        if schema in ("Pr1", "Pr2", "Ps1", "Ps2"):
            b["x"] = self.t("restriction-free", visible, size=1)
        if schema == "Pr1":
            b["perm"] = r.sample(range(n), n)
        elif schema == "Pr2":
            b["perm"] = r.sample(range(n + 1), n + 1)
        elif schema in ("Ps1", "Ps2"):
            comps = [c for t in [b["x"]] + xs for c in _par_parts(t)]
            groups = _split(r, comps, len(xs) + 1)
            b["x2"] = par_of(groups[0])
            b["xs2"] = [par_of(gr) for gr in groups[1:]]
        elif schema in ("Ps3", "Ps4"):
            k = r.randint(1, 2)
            b["ys"] = [self.t("restriction-free", visible, size=1) for _ in range(k)]
            moved, ws = [], []
            for xi in xs:
                keep = []
                for c in _par_parts(xi):
                    (moved if r.random() < 0.5 else keep).append(c)
                ws.append(par_of(keep))
            b["w"] = par_of(moved)
            b["ws"] = ws
        return b


def _par_parts(t: Term) -> list:
    if isinstance(t, Par):
        return _par_parts(t.left) + _par_parts(t.right)
    return [] if isinstance(t, Nil) else [t]


def _shuffle_sum(p: Term, r: random.Random) -> Term:
    parts = []

    def flat(t):
        if isinstance(t, Sum):
            flat(t.left)
            flat(t.right)
        else:
            parts.append(t)

    flat(p)
    r.shuffle(parts)
    return sum_of(parts)


# -- harness -----------------------------------------------------------------------------------------------
@dataclass
class SchemaReport:
    instances: int = 0
    sound: int = 0
    counterexamples: list = field(default_factory=list)
    resource_limited: int = 0
    rejected: int = 0  # bindings that failed a side condition

    def to_dict(self) -> dict:
        return asdict(self)


def run_schema(schema: str, cfg: LawConfig) -> SchemaReport:
    """Verify ``cfg.count`` valid random instances of ``schema``.

    Resource-limited instances count towards ``instances`` and are reported
    in ``resource_limited``; bindings rejected by a side condition do not.
    """
    rep = SchemaReport()
    seed = cfg.seed * 1_000_003 + SCHEMATA.index(schema) if schema in SCHEMATA else cfg.seed
    rng = random.Random(seed)
    attempts = 0
    g = None
    while rep.instances < cfg.count and attempts < cfg.count * cfg.max_attempts:
        attempts += 1
        if g is None or attempts % 10 == 1:
            g = TermGen(rng, cfg.gen)  # fresh constant pool every few instances
            sem = Semantics(g.env)
            bg = BindingGen(g, cfg)
        try:
            inst = instantiate(schema, bg.binding(schema), g.env)
        except (SideConditionError, FnmNetError):
            rep.rejected += 1
            continue
        d = discharge(inst, cfg.equiv, sem)
        if d == COUNTEREXAMPLE:
            rep.rejected += 1
            continue
        rep.instances += 1
        v = RESOURCE if d == RESOURCE else verify_instance(inst, cfg.equiv, sem)
        if v == SOUND:
            rep.sound += 1
        elif v == RESOURCE:
            rep.resource_limited += 1
        else:
            rep.counterexamples.append(inst.describe())
    return rep


def run_laws(schemata=SCHEMATA, cfg: LawConfig | None = None) -> dict:
    cfg = cfg or LawConfig()
    return {s: run_schema(s, cfg) for s in schemata}


def report_json(reports: dict) -> str:
    return json.dumps({k: v.to_dict() for k, v in reports.items()}, indent=2)


def report_table(reports: dict) -> str:
    lines = [f"{'schema':<8}{'instances':>10}{'sound':>8}{'cex':>6}{'limited':>9}{'rejected':>10}"]
    for k, v in reports.items():
        lines.append(
            f"{k:<8}{v.instances:>10}{v.sound:>8}{len(v.counterexamples):>6}{v.resource_limited:>9}{v.rejected:>10}"
        )
    return "\n".join(lines)


# -- congruence ---------------------------------------------------------------------------------------
CONTEXTS = ("strong-prefix", "sum", "prefix", "parallel", "restriction")


@dataclass
class CongruenceConfig:
    """Parameters of :func:`check_congruence`; ``samples`` closing terms per open pair."""

    seed: int = 0
    count: int = 200
    size: int = 2
    samples: int = 3
    max_attempts: int = 20
    gen: GenConfig = field(default_factory=GenConfig)
    equiv: EquivConfig = field(default_factory=lambda: EquivConfig(reach_cap=5_000, linking_cap=100_000))


@dataclass
class ContextStats:
    checked: int = 0
    preserved: int = 0
    violations: list = field(default_factory=list)
    resource_limited: int = 0
    not_applicable: int = 0  # context term rejected (category or well-formedness)


@dataclass
class CongruenceReport:
    pairs: int = 0  # pairs with p ~sp q established
    distinct: int = 0  # established pairs that differ syntactically
    not_applicable: int = 0  # generated pairs that are not sp-bisimilar
    resource_limited: int = 0  # pairs whose equivalence could not be decided
    contexts: dict = field(default_factory=lambda: {c: ContextStats() for c in CONTEXTS})
    recursion: ContextStats = field(default_factory=ContextStats)
    example: bool | None = None  # the p1(x), p2(x) pair and its recursive closures

    @property
    def violations(self) -> int:
        return sum(len(c.violations) for c in self.contexts.values()) + len(self.recursion.violations)

    def to_dict(self) -> dict:
        return asdict(self)


def rewrite(t: Term, r: random.Random, env: ConstEnv) -> Term:
    """A random variant of ``t`` obtained by law-like rewrites at every depth.

    Sums and parallel compositions are flattened and shuffled, a non-zero
    summand may be duplicated, a ``0`` component may be added and a constant
    in sequential position may be unfolded to ``body + 0``.  The variant is
    only a candidate; callers confirm ``t ~sp variant`` with the checker.
    """

    def seq_pos(u: Term) -> Term:
        if isinstance(u, Const) and u.name in env and r.random() < 0.2:
            return Sum(env.body(u.name), NIL)
        return go(u)

    def go(u: Term) -> Term:
        if isinstance(u, Prefix):
            return Prefix(u.act, seq_pos(u.cont) if is_sequential(u.cont) else go(u.cont))
        if isinstance(u, Strong):
            return Strong(u.act, go(u.cont))
        if isinstance(u, Sum):
            parts = [go(v) for v in sum_components(u)]
            r.shuffle(parts)
            nonzero = [v for v in parts if not isinstance(v, Nil)]
            if nonzero and r.random() < 0.3:
                parts.insert(r.randrange(len(parts) + 1), r.choice(nonzero))
            return sum_of(parts)
        if isinstance(u, Par):
            parts = [seq_pos(v) for v in par_components(u)]
            r.shuffle(parts)
            if r.random() < 0.2:
                parts.append(NIL)
            return par_of(parts)
        if isinstance(u, Restrict):
            return Restrict(u.name, go(u.body))
        return u

    return go(t)


def _variant(t: Term, r: random.Random, env: ConstEnv, tries: int = 5) -> Term:
    for _ in range(tries):
        u = rewrite(t, r, env)
        if u != t:
            return u
    return u


def _context_terms(ctx: str, p: Term, q: Term, g: TermGen, size: int) -> tuple | None:
    """``(C[p], C[q])`` for a random instance of context ``ctx``, or ``None`` if it does not apply."""
    r = g.rng
    if ctx == "strong-prefix":
        if not is_guarded(p) or not is_guarded(q):
            return None
        a = Action("in", g.name())
        return Strong(a, p), Strong(a, q)
    if ctx == "sum":
        if not is_guarded(p) or not is_guarded(q):
            return None
        x = g.term("guarded", size)
        return (Sum(p, x), Sum(q, x)) if r.random() < 0.5 else (Sum(x, p), Sum(x, q))
    if ctx == "prefix":
        if not is_restriction_free(p) or not is_restriction_free(q):
            return None
        mu = g.action()
        return Prefix(mu, p), Prefix(mu, q)
    if ctx == "parallel":
        if not is_restriction_free(p) or not is_restriction_free(q):
            return None
        x = g.term("restriction-free", size)
        return (Par(p, x), Par(q, x)) if r.random() < 0.5 else (Par(x, p), Par(x, q))
    if ctx == "restriction":
        free = sorted(free_names(p, g.env) | free_names(q, g.env))
        a = r.choice(free) if free and r.random() < 0.8 else g.name()
        return Restrict(a, p), Restrict(a, q)
    raise ValueError(f"unknown context {ctx!r}")


def _applicable(t: Term, env: ConstEnv) -> bool:
    return well_formed(t, env) and admissible(t, env)


def check_context(ctx: str, p: Term, q: Term, g: TermGen, cfg: CongruenceConfig, stats: ContextStats, sem=None) -> None:
    """Check one random closure of ``p ~sp q`` under ``ctx`` and record the outcome in ``stats``."""
    pair = _context_terms(ctx, p, q, g, cfg.size)
    if pair is None or not all(_applicable(t, g.env) for t in pair):
        stats.not_applicable += 1
        return
    stats.checked += 1
    v = sp_verdict(pair[0], pair[1], g.env, cfg.equiv, sem)
    if v == SOUND:
        stats.preserved += 1
    elif v == RESOURCE:
        stats.resource_limited += 1
    else:
        stats.violations.append({"context": ctx, "p": show(p), "q": show(q), "lhs": show(pair[0]), "rhs": show(pair[1])})


def recursion_case(p: Term, q: Term, closers: list, env: ConstEnv, cfg: CongruenceConfig, stats: ContextStats, var: str = "x") -> bool | None:
    """Recursive closure of an open pair.

    If ``p{r/x} ~sp q{r/x}`` for every closing ``r`` in ``closers``, the
    constants ``A := p{A/x}`` and ``B := q{B/x}`` are defined in ``env`` and
    compared.  Returns the verdict on ``A, B`` (``None`` when the open pair
    is not established or a cap is hit).
    """
    for r in closers:
        v = sp_verdict(substitute_var(p, r, var, env), substitute_var(q, r, var, env), env, cfg.equiv)
        if v != SOUND:
            if v == RESOURCE:
                stats.resource_limited += 1
            return None
    a, b = _fresh(env, "A"), None
    env.define(a, substitute_var(p, Const(a), var, env))
    b = _fresh(env, "B")
    env.define(b, substitute_var(q, Const(b), var, env))
    stats.checked += 1
    v = sp_verdict(Const(a), Const(b), env, cfg.equiv)
    if v == SOUND:
        stats.preserved += 1
        return True
    if v == RESOURCE:
        stats.resource_limited += 1
        return None
    stats.violations.append({"context": "recursion", "p": show(p), "q": show(q), "A": a, "B": b})
    return False


def _fresh(env: ConstEnv, stem: str) -> str:
    i = 0
    while f"{stem}{i}" in env:
        i += 1
    return f"{stem}{i}"


def open_example() -> tuple:
    """The open pair ``a.(b.0 + c.x) + d.x`` and ``d.x + a.(c.x + b.0)``."""
    x = Var("x")
    a, b, c, d = (Action("in", n) for n in "abcd")
    p1 = Sum(Prefix(a, Sum(Prefix(b, NIL), Prefix(c, x))), Prefix(d, x))
    p2 = Sum(Prefix(d, x), Prefix(a, Sum(Prefix(c, x), Prefix(b, NIL))))
    return p1, p2


_PAIR_CATEGORIES = ("strong", "guarded", "restriction-free", "general")


def check_congruence(cfg: CongruenceConfig | None = None) -> CongruenceReport:
    """Check that sp-bisimilarity is preserved by every operator and by guarded recursion.

    Candidate pairs are a generated term and a random rewrite of it (every
    fourth pair is two independent terms); only pairs the checker proves
    sp-bisimilar count.  Each established pair is put into every context that
    applies to its category.  Open guarded pairs are closed recursively
    after checking them on ``cfg.samples`` closing terms.
    """
    cfg = cfg or CongruenceConfig()
    rep = CongruenceReport()
    rng = random.Random(cfg.seed)
    attempts = 0
    g = None
    while rep.pairs < cfg.count and attempts < cfg.count * cfg.max_attempts:
        attempts += 1
        if g is None or attempts % 10 == 1:
            g = TermGen(rng, cfg.gen)
            sem = Semantics(g.env)
        cat = _PAIR_CATEGORIES[attempts % len(_PAIR_CATEGORIES)]
        p = g.term(cat, cfg.size)
        q = g.term(cat, cfg.size) if attempts % 4 == 0 else _variant(p, rng, g.env)
        if not (_applicable(p, g.env) and _applicable(q, g.env)):
            continue
        v = sp_verdict(p, q, g.env, cfg.equiv, sem)
        if v == COUNTEREXAMPLE:
            rep.not_applicable += 1
            continue
        if v == RESOURCE:
            rep.resource_limited += 1
            continue
        rep.pairs += 1
        rep.distinct += p != q
        for ctx in CONTEXTS:
            check_context(ctx, p, q, g, cfg, rep.contexts[ctx], sem)
        # open guarded pairs for the recursion case
        po = g.open_guarded(cfg.size, "x")
        closers = [g.term("sequential", 1) for _ in range(cfg.samples)]
        recursion_case(po, _variant(po, rng, g.env), closers, g.env, cfg, rep.recursion)
    g = TermGen(random.Random(cfg.seed), cfg.gen)
    closers = [Prefix(Action("in", "d"), NIL)] + [g.term("sequential", 1) for _ in range(cfg.samples)]
    p1, p2 = open_example()
    rep.example = recursion_case(p1, p2, closers, g.env, cfg, rep.recursion)
    return rep
