"""Static properties of terms and the substitutions that create derived constants."""
from __future__ import annotations

from ..errors import DefinitionError, PreconditionError
from .syntax import (
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
    is_sequential,
    show,
)


def _names_pairs(t: Term, env: ConstEnv) -> frozenset:
    if isinstance(t, (Nil, Var)):
        return frozenset()
    if isinstance(t, (Prefix, Strong)):
        rest = _names_pairs(t.cont, env)
        if t.act.is_tau:
            return rest
        return rest | {(t.act.name, t.act.restricted)}
    if isinstance(t, (Sum, Par)):
        return _names_pairs(t.left, env) | _names_pairs(t.right, env)
    if isinstance(t, Const):
        return env.const_names(t.name)
    if isinstance(t, Restrict):
        return _names_pairs(t.body, env) - {(t.name, False)}
    raise TypeError(f"not a term: {t!r}")


def free_name_pairs(t: Term, env: ConstEnv) -> frozenset:
    """Free names as ``(name, restricted)`` pairs, looking through constant bodies."""
    return _names_pairs(t, env)


def free_names(t: Term, env: ConstEnv) -> frozenset:
    """Free names, restricted ones rendered with a trailing prime (``a'``)."""
    return frozenset(n + ("'" if r else "") for n, r in _names_pairs(t, env))


def bound_names(t: Term, env: ConstEnv | None = None) -> frozenset:
    """Names bound by a restriction operator in ``t``.

    Constant bodies are guarded and therefore never contain restrictions, so
    ``env`` is accepted only for interface symmetry.
    """
    out = set()
    while isinstance(t, Restrict):
        out.add(t.name)
        t = t.body
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Restrict):
            out.add(u.name)
            stack.append(u.body)
        elif isinstance(u, (Prefix, Strong)):
            stack.append(u.cont)
        elif isinstance(u, (Sum, Par)):
            stack += [u.left, u.right]
    return frozenset(out)


def admissible_pairs(pairs) -> bool:
    plain = {n for n, r in pairs if not r}
    return not any(r and n in plain for n, r in pairs)


def admissible(t: Term, env: ConstEnv) -> bool:
    """No name occurs free both plain and restricted."""
    return admissible_pairs(_names_pairs(t, env))


def constants_of(t: Term, env: ConstEnv) -> set:
    """Names of all constants reachable from ``t`` through bodies."""
    seen: set = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Const):
            if u.name not in seen:
                seen.add(u.name)
                stack.append(env.body(u.name))
        elif isinstance(u, (Prefix, Strong)):
            stack.append(u.cont)
        elif isinstance(u, (Sum, Par)):
            stack += [u.left, u.right]
        elif isinstance(u, Restrict):
            stack.append(u.body)
    return seen


def _strong_cont_ok(s: Term) -> bool:
    """Every summand of a strong-prefix continuation is 0, a strong prefix, or an input/tau prefix."""
    if isinstance(s, Sum):
        return _strong_cont_ok(s.left) and _strong_cont_ok(s.right)
    if isinstance(s, Nil) or isinstance(s, Strong):
        return True
    if isinstance(s, Prefix):
        return not s.act.is_output
    return False


def _wf_violations(t: Term, out: list) -> None:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Strong):
            if not _strong_cont_ok(u.cont):
                out.append(u)
            stack.append(u.cont)
        elif isinstance(u, Prefix):
            stack.append(u.cont)
        elif isinstance(u, (Sum, Par)):
            stack += [u.left, u.right]
        elif isinstance(u, Restrict):
            stack.append(u.body)


def well_formed_violations(t: Term, env: ConstEnv) -> list:
    """Strong prefixes whose continuation may complete an atomic sequence with an output."""
    out: list = []
    _wf_violations(t, out)
    for c in sorted(constants_of(t, env)):
        _wf_violations(env.body(c), out)
    return out


def well_formed(t: Term, env: ConstEnv) -> bool:
    """Atomic sequences started by a strong prefix consist of inputs only (a final tau is allowed)."""
    return not well_formed_violations(t, env)


# -- renaming ---------------------------------------------------------------------
def rename(t: Term, mapping: dict, env: ConstEnv) -> Term:
    """Apply a renaming of plain names ``{a: (target, restricted)}`` to every free occurrence.

    Restricted occurrences are left alone and names bound by an inner
    restriction are not renamed.  Constants are replaced by derived constants
    registered in ``env``; a constant in which no renamed name is free stays
    unchanged, so renaming is the identity on terms without those names.
    """
    if not mapping:
        return t
    if isinstance(t, (Nil, Var)):
        return t
    if isinstance(t, Prefix):
        return Prefix(_rename_act(t.act, mapping), rename(t.cont, mapping, env))
    if isinstance(t, Strong):
        return Strong(_rename_act(t.act, mapping), rename(t.cont, mapping, env))
    if isinstance(t, Sum):
        return Sum(rename(t.left, mapping, env), rename(t.right, mapping, env))
    if isinstance(t, Par):
        return Par(rename(t.left, mapping, env), rename(t.right, mapping, env))
    if isinstance(t, Restrict):
        inner = {k: v for k, v in mapping.items() if k != t.name}
        if any(v == (t.name, False) for v in inner.values()):
            raise PreconditionError(f"renaming would capture {t.name} under a restriction")
        return Restrict(t.name, rename(t.body, inner, env))
    if isinstance(t, Const):
        return Const(env.renamed(t.name, mapping, lambda b, m: rename(b, m, env)))
    raise TypeError(f"not a term: {t!r}")


def _rename_act(a: Action, mapping: dict) -> Action:
    if a.is_tau or a.restricted or a.name not in mapping:
        return a
    tgt, r = mapping[a.name]
    return Action(a.kind, tgt, r)


def substitute_restricted(t: Term, a: str, env: ConstEnv) -> Term:
    """``t{a'/a}``: turn free ``a`` and ``~a`` into their restricted forms ``a'`` and ``~a'``."""
    return rename(t, {a: (a, True)}, env)


def substitute_name(t: Term, a: str, b: str, env: ConstEnv) -> Term:
    """``t{b/a}``: plain renaming used for alpha-conversion."""
    return rename(t, {a: (b, False)}, env)


# -- variable substitution -----------------------------------------------------------
def free_vars(t: Term, env: ConstEnv | None = None) -> frozenset:
    out: set = set()
    seen: set = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, (Prefix, Strong)):
            stack.append(u.cont)
        elif isinstance(u, (Sum, Par)):
            stack += [u.left, u.right]
        elif isinstance(u, Restrict):
            stack.append(u.body)
        elif isinstance(u, Const) and env is not None and u.name in env and u.name not in seen:
            seen.add(u.name)
            stack.append(env.body(u.name))
    return frozenset(out)


def substitute_var(p: Term, q: Term, x: str, env: ConstEnv) -> Term:
    """``p{q/x}`` for a sequential closed ``q``.

    The substitution also reaches into the bodies of constants of ``p`` that
    mention ``x``; each such constant ``B`` is replaced by a new constant
    named ``B{<q>/x}``.
    """
    if not is_sequential(q):
        raise PreconditionError(f"replacement for {x} must be a sequential term, got {show(q)}")
    if free_vars(q, env):
        raise PreconditionError("replacement term must be closed")
    tag = "{" + show(q) + "/" + x + "}"
    memo: dict = {}

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return q if t.name == x else t
        if isinstance(t, Nil):
            return t
        if isinstance(t, Prefix):
            return Prefix(t.act, go(t.cont))
        if isinstance(t, Strong):
            return Strong(t.act, go(t.cont))
        if isinstance(t, Sum):
            return Sum(go(t.left), go(t.right))
        if isinstance(t, Par):
            return Par(go(t.left), go(t.right))
        if isinstance(t, Restrict):
            return Restrict(t.name, go(t.body))
        if isinstance(t, Const):
            if x not in free_vars(t, env):
                return t
            new = t.name + tag
            if new in memo or new in env:
                return Const(new)
            memo[new] = True
            try:
                body = go(env.body(t.name))
            except DefinitionError:
                raise
            env.define(new, body)
            return Const(new)
        raise TypeError(f"not a term: {t!r}")

    return go(p)
