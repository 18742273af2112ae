import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnmnet.errors import CategoryError, DefinitionError, FnmSyntaxError, PreconditionError
from fnmnet.fnm import (
    NIL,
    Action,
    Const,
    ConstEnv,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Var,
    admissible,
    bound_names,
    category,
    free_names,
    free_vars,
    parse,
    parse_program,
    parse_term,
    show,
    substitute_name,
    substitute_restricted,
    substitute_var,
    well_formed,
)
from fnmnet.gen import CATEGORIES, TermGen, gen_terms


def test_parse_and_print():
    t, env = parse("A := a.A; main = (nu b) (A | <b>.c.0 | ~b.0);")
    assert show(t) == "(nu b) A | <b>.c.0 | ~b.0"
    assert show(env.body("A")) == "a.A"
    assert category(t) == "general"


@pytest.mark.parametrize(
    "src, cat",
    [("0", "guarded"), ("a.0 + b.0", "guarded"), ("A := a.0; main = A;", "sequential"), ("a.0 | b.0", "parallel")],
)
def test_categories(src, cat):
    assert category(parse_term(src)) == cat


def test_category_error_has_location():
    with pytest.raises(CategoryError) as ei:
        parse_term("a.0 +\n (b.0 | c.0)")
    assert (ei.value.line, ei.value.col) == (2, 2)


def test_syntax_and_definition_errors():
    with pytest.raises(FnmSyntaxError):
        parse_term("a.0 |")
    with pytest.raises(DefinitionError, match="undefined constant C"):
        parse_term("C")
    with pytest.raises(FnmSyntaxError, match="defined twice"):
        parse("A := a.0; A := b.0; main = A;")
    with pytest.raises((CategoryError, DefinitionError)):
        parse("A := A; main = A;")  # unguarded body


def test_sugar_and_primes():
    assert show(parse_term("(nu a,b) a.b.0")) == "(nu a) (nu b) a.b.0"
    t = parse_term("a'.0")
    assert t.act.restricted and free_names(t, ConstEnv()) == {"a'"}
    t, env = parse("C1' := a.C1'; main = C1';")
    assert t == Const("C1'")


def test_open_terms_need_flag():
    t = parse_term("a.x + d.x", allow_vars=True)
    assert free_vars(t) == {"x"}
    with pytest.raises(FnmSyntaxError):
        parse_term("a.x + d.x")


def test_free_and_bound_names():
    t, env = parse("A := a.B; B := <c>.~d.A; main = (nu c) A | e.0;")
    assert free_names(t, env) == {"a", "d", "e"}
    assert bound_names(t) == {"c"}


def test_well_formed_strong_prefix():
    env = ConstEnv()
    assert well_formed(parse_term("<a>.b.0"), env)
    assert well_formed(parse_term("<a>.(<b>.c.0 + tau.0)"), env)
    assert not well_formed(parse_term("<a>.~b.0"), env)


def test_admissible():
    env = ConstEnv()
    assert admissible(parse_term("a.0 | b'.0"), env)
    assert not admissible(parse_term("a.0 | a'.0"), env)


def test_rename_through_constants():
    t, env = parse("A := c.A + b.0; main = A;")
    r = substitute_restricted(t, "c", env)
    assert r == Const("A{c'/c}")
    assert show(env.body("A{c'/c}")) == "c'.A{c'/c} + b.0"
    # renaming a name that is not free is the identity
    assert substitute_name(t, "z", "y", env) == t


def test_substitute_var():
    env = ConstEnv()
    p = parse_term("a.(b.0 + c.x) + d.x", allow_vars=True)
    q = substitute_var(p, parse_term("d.0"), "x", env)
    assert show(q) == "a.(b.0 + c.d.0) + d.d.0"
    with pytest.raises(PreconditionError):
        substitute_var(p, parse_term("a.0 | b.0"), "x", env)


def test_restriction_in_constant_body_is_rejected():
    with pytest.raises((CategoryError, DefinitionError)):
        parse("A := (nu a) a.0; main = A;")


@given(st.integers(0, 10_000), st.sampled_from(CATEGORIES), st.integers(0, 4))
def test_print_parse_round_trip(seed, cat, size):
    g = TermGen(seed)
    t = g.term(cat, size)
    env = g.env
    assert parse_term(show(t), env) == t


@given(st.integers(0, 10_000), st.sampled_from(CATEGORIES))
def test_generated_terms_are_well_formed(seed, cat):
    g = TermGen(seed)
    for _ in range(5):
        t = g.term(cat, 3)
        assert well_formed(t, g.env)
        assert admissible(t, g.env)


def test_generator_is_reproducible():
    a = [show(next(gen_terms(7, 3, "general"))) for _ in range(3)]
    s1 = gen_terms(7, 3, "general")
    s2 = gen_terms(7, 3, "general")
    assert [show(next(s1)) for _ in range(10)] == [show(next(s2)) for _ in range(10)]
    assert len(set(a)) == 1
    assert next(gen_terms(0, 0, "guarded")) == NIL


def test_program_keeps_definition_order():
    prog = parse_program("B := b.0; A := a.B; main = A;")
    assert prog.definitions == ["B", "A"]
    assert parse_program("A := a.A;").term is None
