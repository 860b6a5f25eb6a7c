import pytest

from decor import lemmas
from decor.exc import (
    DualityError, DualityMap, ExcDecider, HandlerSpec, IDENTITY, decide_exc_core,
    dualize, restrict, throw, try_catch,
)
from decor.kernel import check_derivation
from decor.parsing import parse_equation, parse_signature, parse_term
from decor.semantics import EXCEPTION, enumerate_models, eval_exc, holds
from decor.state import EQUIVALENT, NOT_EQUIVALENT, FragmentError
from decor.syntax import (
    Base, Comp, Coprod, Downcast, Empty, Equation, Final, Id, Initial, Lookup,
    Prod, STRONG, Sym, flatten, Tag, Theory, Unit, Untag, Update, WEAK, decorate, typecheck,
)

V, B = Base("V"), Base("B")

ONE_EXC = """\
type V;
exception T : V;
pure c : V -> 0;
pure s : V -> V;
inhabit V = c;
"""


def _emodels(sig, n=2):
    return list(enumerate_models(sig, n, EXCEPTION))


# ---------------------------------------------------------------- throw and try/catch

def test_throw_is_tag_when_target_is_empty(esig):
    t = throw(Base("B"), "T", esig)
    assert typecheck(t, esig) == (esig.resolve(esig.exception("T")), B)
    assert decorate(t, Theory.EXC) == 1
    e = Equation(STRONG, throw(Empty, "T", esig), Tag("T"))
    for m in _emodels(esig):
        assert holds(e, m)


def test_throw_unknown_exception(esig):
    with pytest.raises(Exception):
        throw(B, "Nope", esig)


def _rows(t, m):
    return {k: v for k, v in eval_exc(t, m).items()}


def test_try_with_pure_body_behaves_as_body(esig):
    f, g = Sym("f"), Sym("g")
    public, catch, body = try_catch(HandlerSpec(f, "T", g), esig)
    assert decorate(public, Theory.EXC) == 1
    assert decorate(catch, Theory.EXC) == 2
    for m in _emodels(esig):
        assert _rows(public, m) == _rows(f, m)


def test_try_catches_its_exception(esig):
    f, g = Sym("f"), Sym("g")
    public, _, _ = try_catch(HandlerSpec(Comp(throw(B, "T", esig), Id(V)), "T", g), esig)
    for m in _emodels(esig):
        tab = eval_exc(public, m)
        for v in m.carriers["V"]:
            assert tab[(0, v)] == (0, m.tables["g"][v])


def test_try_propagates_other_exceptions(esig):
    g = Sym("g")
    public, _, _ = try_catch(HandlerSpec(throw(B, "R", esig), "T", g), esig)
    for m in _emodels(esig):
        tab = eval_exc(public, m)
        for v in m.carriers["V"]:
            assert tab[(0, v)] == (1, (1, v))
        for e in m.exceptions:
            assert tab[(1, e)] == (1, e)


def test_try_rejects_catchers(esig):
    with pytest.raises(Exception, match="propagator"):
        try_catch(HandlerSpec(Comp(Sym("f"), Untag("T")), "T", Sym("g")), esig)


def test_try_rejects_mistyped_handler(esig):
    with pytest.raises(Exception, match="V_T -> B"):
        try_catch(HandlerSpec(Sym("f"), "T", Id(V)), esig)


# ---------------------------------------------------------------- duality

def test_dual_types():
    assert dualize(Prod(V, Unit)) == Coprod(V, Empty)
    assert dualize(Coprod(Empty, B)) == Prod(Unit, B)


def test_dual_terms(ssig):
    assert dualize(Lookup("X")) == Tag("X")
    assert dualize(Update("X")) == Untag("X")
    assert dualize(Final(V)) == Initial(V)
    t = parse_term("s . lkp[X] . upd[X] . c", ssig)
    d = dualize(t)
    assert flatten(d) == [Sym("c"), Untag("X"), Tag("X"), Sym("s")]
    assert dualize(d) == t


def test_dual_equation_keeps_kind(ssig):
    e = parse_equation("lkp[X] . upd[X] ~~ id(V)", ssig)
    d = dualize(e)
    assert d.kind == WEAK and d.lhs == Comp(Untag("X"), Tag("X"))


def test_downcast_has_no_dual():
    with pytest.raises(DualityError):
        dualize(Downcast(Id(V)))


def test_dual_signature_involution(ssig):
    d = dualize(ssig)
    assert [n for n, _ in d.exceptions] == ["X"] and not d.locations
    assert dict((n, (a, b)) for n, a, b in d.symbols)["c"] == (V, Empty)
    assert dualize(d) == ssig


def test_duality_map():
    dm = DualityMap.parse(["X=T", "Y=R"])
    assert dm("X") == "T" and dm("T") == "X" and dm("Z") == "Z"
    assert IDENTITY("X") == "X"
    with pytest.raises(DualityError):
        DualityMap.parse(["X"])
    with pytest.raises(DualityError):
        DualityMap.parse(["X=T", "X=R"])


def test_mapped_term():
    dm = DualityMap.parse(["X=T"])
    assert dualize(Comp(Update("X"), Lookup("X")), dm) == Comp(Tag("T"), Untag("T"))


@pytest.mark.parametrize("name", lemmas.LEMMAS)
def test_dual_lemmas_replay(name, lsig):
    d = lemmas.build(name, lsig)
    dsig = dualize(lsig)
    dd = dualize(d)
    assert dd.theory == Theory.EXC
    res = check_derivation(dd, dsig)
    assert res.ok, res.message
    assert dd.steps[-1].conclusion == dualize(d.steps[-1].conclusion)
    assert dualize(dd).steps[-1].conclusion == d.steps[-1].conclusion


def test_dual_axiom_file():
    ssig = parse_signature(lemmas.STATE_AXIOMS_SIG)
    dm = DualityMap.parse(lemmas.AXIOM_MAP)
    d = dualize(lemmas.axiom_instances(ssig), dm)
    assert check_derivation(d, dualize(ssig, dm)).ok


# ---------------------------------------------------------------- core decision

def test_decide_tag_untag():
    sig = parse_signature(ONE_EXC)
    v = decide_exc_core(parse_equation("tag[T] . untag[T] == id(0)", sig), sig)
    assert v.status == EQUIVALENT
    assert check_derivation(v.certificate, sig).ok
    assert v.certificate.steps[-1].conclusion == v.equation


def test_decide_untag_tag_refuted():
    sig = parse_signature(ONE_EXC)
    e = parse_equation("untag[T] . tag[T] == id(V)", sig)
    v = decide_exc_core(e, sig)
    assert v.status == NOT_EQUIVALENT
    m, w = v.countermodel
    assert m.kind == EXCEPTION and not holds(e, m)
    assert w[0] == 1                       # the witness is an exceptional input


def test_decide_untag_tag_weak():
    sig = parse_signature(ONE_EXC)
    v = decide_exc_core(parse_equation("untag[T] . tag[T] ~~ id(V)", sig), sig)
    assert v.status == EQUIVALENT and check_derivation(v.certificate, sig).ok


def test_decider_fragment():
    sig = parse_signature("type V; exception T : V; exception R : V;")
    with pytest.raises(FragmentError):
        ExcDecider(sig)
    sig = parse_signature(ONE_EXC)
    with pytest.raises(FragmentError):
        ExcDecider(sig).decide(Equation(STRONG, Downcast(Id(V)), Id(V)))


def test_restrict_drops_unused_symbols():
    sig = parse_signature(ONE_EXC)
    r = restrict(sig, Comp(Sym("s"), Untag("T")))
    assert r.inhabitants == ()
    assert [n for n, _, _ in r.symbols] == ["s"]
    # c : V -> 0 has no set model with V nonempty; the restricted signature has
    assert not list(enumerate_models(sig, 2, EXCEPTION))
    assert list(enumerate_models(r, 2, EXCEPTION))
