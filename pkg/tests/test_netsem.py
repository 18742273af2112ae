import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from fnmnet.corpus import CHOICE_FNM, PC1_FNM, PC1_NET, PC2_FNM, PC2_NET, SEMICOUNTER_FNM
from fnmnet.equiv import rooted_iso
from fnmnet.errors import PreconditionError
from fnmnet.fnm import NIL, TAU, ConstEnv, Par, Prefix, Restrict, Strong, Sum, inp, out, parse, parse_term, well_formed
from fnmnet.gen import TermGen
from fnmnet.multiset import Multiset
from fnmnet.netsem import TAU_LABEL, Semantics, compile_term, decompose, msync, net_of, sync
from fnmnet.petri import is_bounded, is_statically_reduced


def labels_of(net):
    return sorted(t.label for t in net.transitions)


def test_sync_table():
    a, na = (inp("a"),), (out("a"),)
    assert sync(a, na) == TAU_LABEL
    assert sync(na, a) == TAU_LABEL
    assert sync(a, a) is None
    assert sync((TAU,), (TAU,)) is None
    # a sequence consumes its first input against a single output
    assert sync((inp("a"), inp("b")), na) == ((inp("b"),))
    assert sync((inp("a"), inp("b")), (out("b"),)) is None
    assert sync((inp("a"), inp("b")), (inp("a"), inp("b"))) is None


def test_msync_folds_in_any_order():
    seq = (inp("a"), inp("b"), inp("c"))
    m = Multiset([seq, (out("a"),), (out("b"),)])
    assert msync(m) == {(inp("c"),)}
    assert msync(Multiset([(inp("c"),)])) == {(inp("c"),)}
    assert msync(Multiset([(inp("a"),), (inp("b"),)])) == frozenset()


def test_choice_net():
    t, env = parse(CHOICE_FNM)
    n = compile_term(t, env)
    assert len(n.places) == 1
    assert labels_of(n) == ["a", "tau", "~a"]
    tau = next(tr for tr in n.transitions if tr.label == "tau")
    assert tau.pre.size == 2 and not tau.post


def test_semicounter_net():
    t, env = parse(SEMICOUNTER_FNM)
    n = compile_term(t, env, rename=True)
    assert n.places == ("s1", "s2")
    got = {(tr.label, tr.pre, tr.post) for tr in n.transitions}
    assert got == {
        ("inc", Multiset({"s1": 1}), Multiset({"s1": 1, "s2": 1})),
        ("dec", Multiset({"s2": 3}), Multiset()),
    }
    assert not is_bounded(n)


@pytest.mark.parametrize("src, net", [(PC1_FNM, PC1_NET), (PC2_FNM, PC2_NET)])
def test_producer_consumer_nets(src, net):
    t, env = parse(src)
    assert rooted_iso(compile_term(t, env), net) is not None


def test_dec():
    env = ConstEnv()
    sem = Semantics(env)
    assert sem.dec(parse_term("0")) == Multiset()
    assert sem.dec(parse_term("0 + 0")).size == 1
    assert sem.dec(parse_term("a.0 | a.0 | 0")) == Multiset({parse_term("a.0"): 2})
    m = sem.dec(parse_term("(nu a) (a.0 | b.0)"))
    assert {str(s) for s in m.support()} == {"a'.0", "b.0"}


def test_ill_formed_and_inadmissible_rejected():
    env = ConstEnv()
    with pytest.raises(PreconditionError):
        net_of(parse_term("<a>.~b.0"), env)
    with pytest.raises(PreconditionError):
        net_of(parse_term("a.0 | a'.0"), env)


def test_restricted_labels_hidden():
    n = compile_term(parse_term("(nu a) (a.0 | ~a.0 | a.b.0)"), ConstEnv())
    assert labels_of(n) == ["b", "tau", "tau"]


def test_atomic_sequence_three_party():
    src = "(nu h) (nu k) (<h>.<k>.c.0 | ~h.0 | ~k.0)"
    n = compile_term(parse_term(src), ConstEnv())
    three = [t for t in n.transitions if t.pre.size == 3]
    assert [t.label for t in three] == ["c"]


@given(st.integers(0, 5_000), st.sampled_from(["guarded", "restriction-free", "general"]))
def test_generated_nets_bounded_reduced_and_decomposable(seed, cat):
    g = TermGen(seed)
    t = g.term(cat, 3)
    tn = net_of(t, g.env)
    assert is_statically_reduced(tn.net)
    assert is_bounded(tn.net)
    for tr in tn.transitions:
        if tr[0].size > 1:
            assert decompose(tr, tn.sem) is not None


def _guarded(children):
    act = st.builds(lambda k, n: TAU if k == "tau" else (inp(n) if k == "in" else out(n)),
                    st.sampled_from(["in", "out", "tau"]), st.sampled_from("ab"))
    return st.one_of(
        st.builds(Prefix, act, st.one_of(children, st.builds(Par, children, children))),
        st.builds(Strong, st.sampled_from("ab").map(inp), children),
        st.builds(Sum, children, children),
    )


raw_terms = st.recursive(st.just(NIL), _guarded, max_leaves=6)


@given(raw_terms, st.booleans())
@example(parse_term("<a>.~b.0"), False)
@example(parse_term("c.(<a>.(<b>.~a.0 + tau.0) | b.0)"), True)
@example(parse_term("<a>.(<b>.tau.0 + a.~b.0)"), False)
def test_well_formed_agrees_with_label_oracle(t, restrict):
    # ill-formed iff some derivable atomic sequence of length > 1 contains an output
    if restrict:
        t = Restrict("a", t)
    tn = net_of(t, ConstEnv(), force=True)
    bad = any(
        len(lab) > 1 and any(a.is_output for a in lab)
        for s in tn.place_terms.values()
        for lab, _ in tn.sem.seq_transitions(s)
    )
    assert well_formed(t, ConstEnv()) == (not bad)
