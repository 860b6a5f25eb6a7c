import itertools
import random

import numpy as np
import pytest

from decor import lemmas
from decor.exc import dualize, restrict
from decor.fuzz import Fingerprints, chains, state_signature
from decor.parsing import parse_equation, parse_signature, parse_term
from decor.semantics import (
    EXCEPTION, STATE, Model, ModelError, counterexample, decode_type,
    enumerate_models, eval_exc, eval_state, evaluate, holds, parse_model, print_model,
)
from decor.syntax import (
    Sym, subterms,
    Base, Comp, Coprod, Empty, Equation, Final, Prod, STRONG, Theory, Unit, WEAK,
    decorate, typecheck,
)

V = Base("V")


def test_decode_types(ssig):
    m = next(m for m in enumerate_models(ssig, 3) if len(m.carriers["V"]) == 3)
    assert len(decode_type(Unit, m)) == 1
    assert decode_type(Empty, m) == ()
    assert len(decode_type(Prod(V, V), m)) == 9
    assert len(decode_type(Coprod(V, Unit), m)) == 4
    assert len(decode_type(Coprod(Empty, Prod(Unit, V)), m)) == 3


def test_state_model_rejects_empty_carrier(ssig):
    with pytest.raises(ModelError):
        Model(STATE, ssig, {"V": ()}, {})


def _m2(sig):
    return next(m for m in enumerate_models(sig, 2) if len(m.carriers["V"]) == 2)


def test_state_tables():
    sig = parse_signature("type V; location X : V;")
    m = _m2(sig)
    assert eval_state(parse_term("lkp[X]", sig), m)[((), (1,))] == (1, (1,))
    assert eval_state(parse_term("upd[X]", sig), m)[(0, (1,))] == ((), (0,))
    assert eval_state(parse_term("lkp[X] . upd[X]", sig), m)[(0, (1,))] == (0, (0,))
    assert len(eval_state(parse_term("upd[X]", sig), m)) == 4


def test_exception_tables(esig):
    m = next(iter(enumerate_models(esig, 1, EXCEPTION)))
    tag = eval_exc(parse_term("tag[T]", esig), m)
    assert tag[(0, 0)] == (1, (0, 0))
    assert tag[(1, (1, 0))] == (1, (1, 0))
    untag = eval_exc(parse_term("untag[T]", esig), m)
    assert untag[(1, (0, 0))] == (0, 0)
    assert untag[(1, (1, 0))] == (1, (1, 0))


def test_holds_examples(ssig):
    models = list(enumerate_models(ssig, 2))
    assert all(holds(parse_equation("upd[X] . lkp[X] == id(1)", ssig), m) for m in models)
    assert all(holds(parse_equation("lkp[X] . upd[X] ~~ id(V)", ssig), m) for m in models)
    e = parse_equation("lkp[X] . upd[X] == id(V)", ssig)
    assert any(not holds(e, m) for m in models)
    m = _m2(ssig)
    assert counterexample(e, m) is not None


@pytest.mark.parametrize("text,n,count", [
    ("type V; location X : V;", 1, 1),
    ("type V; location X : V;", 2, 2),
    ("type V; type W; location X : V;", 2, 4),
    ("type V; pure s : V -> V; axiom inv : s . s == id(V);", 2, 1 + 2),
])
def test_model_counts(text, n, count):
    assert len(list(enumerate_models(parse_signature(text), n))) == count


def test_pinned_sizes():
    sig = parse_signature("type V; type W;")
    ms = list(enumerate_models(sig, 3, sizes={"V": 2}))
    assert len(ms) == 3 and all(len(m.carriers["V"]) == 2 for m in ms)


def test_sampling_is_capped_and_seeded(lsig):
    a = [print_model(m) for m in enumerate_models(lsig, 2, cap=8)]
    b = [print_model(m) for m in enumerate_models(lsig, 2, cap=8)]
    assert a == b and len(a) == 1 + 3 * 8    # |V| = |W| = 1 has a single model


@pytest.mark.parametrize("kind", [STATE, EXCEPTION])
def test_model_file_round_trip(kind, esig, ssig):
    sig = ssig if kind == STATE else esig
    for m in itertools.islice(enumerate_models(sig, 2, kind), 0, None, 7):
        again = parse_model(print_model(m), sig)
        assert again.carriers == m.carriers and again.tables == m.tables


def test_model_file_errors(ssig):
    with pytest.raises(ModelError):
        parse_model("model state; carrier V = 0 1;", ssig)
    with pytest.raises(ModelError):
        parse_model("model state; carrier V = 0; table c { * -> 0; } table s { 0 -> 5; }", ssig)
    with pytest.raises(ModelError):
        parse_model("model weird;", ssig)


# ---------------------------------------------------------------- laws

def test_pure_terms_are_counit_compatible(family):
    """A pure term leaves the state alone and ignores it."""
    pure = [t for t in family.terms[:2000] if decorate(t, Theory.ST) == 0]
    assert pure
    for m in family.models[::9]:
        for t in pure:
            tab = eval_state(t, m)
            for (a, s), (b, s2) in tab.items():
                assert s2 == s
                assert tab[(a, m.states[0])][0] == b


def test_accessors_keep_the_state(family):
    acc = [t for t in family.terms[:2000] if decorate(t, Theory.ST) == 1]
    for m in family.models[::9]:
        for t in acc:
            assert all(s2 == s for (_, s), (_, s2) in eval_state(t, m).items())


def test_effect_rule_is_valid(family):
    """f ~ g and final . f == final . g together give f == g."""
    rng = random.Random(3)
    fp = family.fp
    for (a, b), reps in family.classes.items():
        fin = Final(b)
        for _ in range(200):
            f, g = rng.choice(reps), rng.choice(reps)
            weak = fp.agree(Equation(WEAK, f, g))
            effect = fp.agree(Equation(STRONG, Comp(fin, f), Comp(fin, g)))
            assert fp.agree(Equation(STRONG, f, g)) == (weak and effect)


def test_lemma_corpus_sound(lsig):
    """Every step of every lemma holds in each sampled model of its hypotheses."""
    models = list(enumerate_models(lsig, 2, cap=48))
    for name in lemmas.LEMMAS:
        d = lemmas.build(name, lsig)
        hyps = [h for _, h in d.hypotheses]
        seen = 0
        for m in models:
            if all(holds(h, m) for h in hyps):
                seen += 1
                for st in d.steps:
                    if isinstance(st.conclusion, Equation):
                        assert holds(st.conclusion, m), (name, st)
        assert seen > 0, name


# ---------------------------------------------------------------- fingerprints

def test_fingerprints_match_holds(family):
    fp, models = family.fp, family.models
    rng = random.Random(5)
    for (a, b), reps in family.classes.items():
        for _ in range(40):
            f, g = rng.choice(reps), rng.choice(reps)
            for kind in (STRONG, WEAK):
                e = Equation(kind, f, g)
                assert fp.agree(e) == all(holds(e, m) for m in models)


def test_fingerprints_compose(family):
    fp = family.fp
    for t in family.terms[:300]:
        inputs, _, _ = fp.domain(typecheck(t, family.sig)[0])
        _, out_index, _ = fp.domain(typecheck(t, family.sig)[1])
        expect = [out_index[mi, evaluate(t, family.models[mi])[x]] for mi, x in inputs]
        assert np.array_equal(fp.of(t), expect)


def test_exception_fingerprints_match_holds():
    ssig = state_signature()
    terms = [t for t in chains(ssig, 4) if "c" not in repr(t)]
    dsig = restrict(dualize(ssig), *[dualize(t) for t in terms])
    models = list(enumerate_models(dsig, 3, EXCEPTION))
    fp = Fingerprints(dsig, models)
    rng = random.Random(7)
    by = {}
    for t in terms:
        d = dualize(t)
        by.setdefault(typecheck(d, dsig), []).append(d)
    for reps in by.values():
        for _ in range(60):
            f, g = rng.choice(reps), rng.choice(reps)
            for kind in (STRONG, WEAK):
                e = Equation(kind, f, g)
                assert fp.agree(e) == all(holds(e, m) for m in models)


def test_exception_interpretation_coherent_with_decorations():
    """Propagators let incoming exceptions through; pure terms never raise."""
    ssig = state_signature()
    terms = [t for t in chains(ssig, 4) if not any(s == Sym("c") for s in subterms(t))]
    dsig = restrict(dualize(ssig), *[dualize(t) for t in terms])
    models = list(enumerate_models(dsig, 3, EXCEPTION))
    seen = {0: 0, 1: 0}
    for t in map(dualize, terms):
        d = decorate(t, Theory.EXC)
        if d == 2:
            continue
        seen[d] += 1
        for m in models:
            for x, y in eval_exc(t, m).items():
                if x[0] == 1:
                    assert y == x
                elif d == 0:
                    assert y[0] == 0
    assert seen[0] and seen[1]
