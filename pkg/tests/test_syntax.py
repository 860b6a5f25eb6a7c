import random

import pytest
from hypothesis import given, settings, strategies as st

from decor.parsing import ParseError, parse_equation, parse_signature, parse_term, parse_type, print_signature
from decor.syntax import (
    PURE, RO, RW, Base, Comp, Coprod, Copair, DecorationError, Downcast, Empty,
    Equation, Final, Id, In1, In2, Initial, LPair, Lookup, Pair, Prod, Proj1,
    Proj2, Sym, Tag, Theory, TypeMismatch, Unit, Untag, Update, build, compose,
    decorate, flatten, print_term, typecheck,
)

V = Base("V")


def test_parse_signature_location():
    sig = parse_signature("location X : V;")
    assert sig.locations == (("X", V),)


def test_parse_signature_exception():
    sig = parse_signature("exception T : V;")
    assert sig.exceptions == (("T", V),)


def test_duplicate_location_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        parse_signature("location X : V; location X : V;")


def test_signature_print_parse_roundtrip(lsig):
    assert parse_signature(print_signature(lsig)) == lsig


def test_parse_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_signature("type V;\npure f : V -> ;")
    assert err.value.line == 2


def test_ill_typed_axiom_rejected():
    with pytest.raises(ParseError):
        parse_signature("type V; type W; pure f : V -> W; axiom a : f == id(V);")


def test_comments_are_ignored():
    sig = parse_signature("-- a comment\ntype V; -- trailing\nlocation X : V;")
    assert sig.locations == (("X", V),)


def test_parse_lookup_update(ssig):
    t = parse_term("lkp[X] . upd[X]", ssig)
    assert t == Comp(Lookup("X"), Update("X"))
    assert typecheck(t, ssig) == (V, V)


def test_parse_identity(ssig):
    t = parse_term("id(1)", ssig)
    assert t == Id(Unit)
    assert typecheck(t, ssig) == (Unit, Unit)


def test_composition_mismatch(ssig):
    with pytest.raises(ParseError, match="cannot compose"):
        parse_term("upd[X] . id(1)", ssig)


def test_value_type_syntax(ssig):
    assert parse_type("V[X]", ssig) == V
    assert parse_term("id(V[X])", ssig) == Id(V)


def test_unknown_symbol(ssig):
    with pytest.raises(ParseError, match="unknown"):
        parse_term("zz", ssig)


def test_typecheck_examples(ssig):
    assert typecheck(Update("X"), ssig) == (V, Unit)
    assert typecheck(Final(Prod(V, Unit)), ssig) == (Prod(V, Unit), Unit)
    assert typecheck(Comp(Lookup("X"), Update("X")), ssig) == (V, V)


def test_typecheck_exception_generators(esig):
    assert typecheck(Tag("T"), esig) == (V, Empty)
    assert typecheck(Untag("T"), esig) == (Empty, V)


def test_typecheck_reports_path(ssig):
    with pytest.raises(TypeMismatch) as err:
        typecheck(Pair(Id(V), Lookup("X")), ssig)
    assert "pair" in str(err.value).lower() or "source" in str(err.value).lower()


def test_decorations():
    assert decorate(Comp(Lookup("X"), Update("X"))) == RW
    assert decorate(Id(V)) == PURE
    assert decorate(Downcast(Untag("T"))) == RO
    assert decorate(Downcast(Id(V))) == PURE
    assert decorate(Comp(Final(V), Lookup("X"))) == RO


def test_state_constructors_outside_state_theory():
    with pytest.raises(DecorationError):
        decorate(LPair(Id(V), Id(V)), Theory.COM)
    with pytest.raises(DecorationError):
        decorate(Lookup("X"), Theory.EXC)
    with pytest.raises(DecorationError):
        decorate(Tag("T"), Theory.ST)


def test_pair_bound_in_state_theory():
    # pairs take accessors, not modifiers
    assert decorate(Pair(Lookup("X"), Lookup("X")), Theory.ST) == RO
    with pytest.raises(DecorationError):
        decorate(Pair(Update("X"), Update("X")), Theory.ST)
    # a left pair takes an accessor first and a modifier second
    assert decorate(LPair(Comp(Lookup("X"), Final(V)), Update("X")), Theory.ST) == RW
    with pytest.raises(DecorationError):
        decorate(LPair(Update("X"), Id(V)), Theory.ST)


def test_copair_bound_in_exception_theory():
    assert decorate(Copair(Tag("T"), Tag("T")), Theory.EXC) == RO
    with pytest.raises(DecorationError):
        decorate(Copair(Untag("T"), Untag("T")), Theory.EXC)


def test_flatten_build_inverse(ssig):
    t = parse_term("(s . id(V)) . (lkp[X] . final(V)) . s", ssig)
    gens = flatten(t)
    assert gens == [Sym("s"), Lookup("X"), Final(V), Sym("s")]
    assert flatten(build(gens, V)) == gens
    assert build([], V) == Id(V)


def test_hash_consing_shares_nodes():
    a = Comp(Lookup("X"), Update("X"))
    b = Comp(Lookup("X"), Update("X"))
    assert a is b and a == b and hash(a) == hash(b)


def test_equation_printing(ssig):
    e = parse_equation("lkp[X] . upd[X] ~~ id(V)", ssig)
    assert str(e) == "lkp[X] . upd[X] ~~ id(V)"
    assert not e.strong and e.swap().lhs == Id(V)


def test_equation_must_be_parallel(ssig):
    with pytest.raises(ParseError):
        parse_equation("lkp[X] == id(V)", ssig)


# ---------------------------------------------------------------- round trip

_SIG = parse_signature("""
type V;
type W;
location X : V;
exception T : W;
pure a : V -> W;
pure b : W -> V;
pure c : 1 -> V;
""")
W = Base("W")


def _leaf(rng, src):
    opts = [Id(src), Final(src)]
    if src == Unit:
        opts += [Lookup("X"), Sym("c")]
    if src == V:
        opts += [Update("X"), Sym("a")]
    if src == W:
        opts += [Tag("T"), Sym("b")]
    if src == Empty:
        opts += [Untag("T"), Initial(V)]
    if isinstance(src, Prod):
        opts += [Proj1(src.left, src.right), Proj2(src.left, src.right)]
    return rng.choice(opts)


def _term(rng, src, depth):
    if depth == 0:
        return _leaf(rng, src)
    k = rng.randrange(4)
    if k == 0:
        f = _term(rng, src, depth - 1)
        g = _term(rng, typecheck(f, _SIG)[1], depth - 1)
        return Comp(g, f)
    if k == 1:
        return Pair(_term(rng, src, depth - 1), _term(rng, src, depth - 1))
    if k == 2:
        f = _term(rng, src, depth - 1)
        b = typecheck(f, _SIG)[1]
        return Comp(In1(b, V), f) if rng.random() < 0.5 else Comp(In2(V, b), f)
    if isinstance(src, Coprod):
        f1 = _term(rng, src.left, depth - 1)
        tgt = typecheck(f1, _SIG)[1]
        return Copair(Comp(In1(tgt, Unit), f1), Comp(In2(tgt, Unit), Final(src.right)))
    return _leaf(rng, src)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([Unit, V, W, Empty, Prod(V, W), Coprod(V, Unit)]),
       st.integers(0, 4))
def test_print_parse_roundtrip(seed, src, depth):
    t = _term(random.Random(seed), src, depth)
    typecheck(t, _SIG)
    assert parse_term(print_term(t), _SIG) == t


def test_decoration_is_max_of_components(family):
    for t in family.terms[::7]:
        assert decorate(t) == max(decorate(g) for g in flatten(t) or [Id(Unit)])
