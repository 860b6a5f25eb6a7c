"""Acceptance criteria, one test each.

Verdicts, reductions and canonical forms depend on a term only through its
canonical form, so the equations between the 10920 terms of the family are
covered by the equations between class representatives together with the
check that all members of a class share one fingerprint.  Fingerprint
agreement is equivalent to ``holds`` in every enumerated model; that is
cross-checked in ``test_semantics.py`` and again on samples below.
"""

import random
import time

import numpy as np
import pytest

from decor import lemmas
from decor.exc import DualityMap, ExcDecider, HandlerSpec, dualize, restrict, throw, try_catch
from decor.fuzz import Fingerprints, chains, state_models, state_signature, typed
from decor.kernel import check_derivation, parse_derivation, print_derivation
from decor.parsing import parse_equation, parse_signature, print_signature
from decor.semantics import EXCEPTION, counterexample, enumerate_models, eval_exc, holds
from decor.state import (
    EQUIVALENT, NOT_EQUIVALENT, UNKNOWN, Decider, decide, normalize_modifier,
    reduce_equation,
)
from decor.syntax import (
    Base, Comp, Copair, Coprod, Downcast, Equation, Lookup, STRONG, Sym, Tag, Theory, Untag, Update,
    WEAK, decorate, subterms, typecheck,
)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _classes(sig, terms, dec):
    """``{(source, target): [representative, ...]}`` by canonical form."""
    reps = {}
    for t in terms:
        reps.setdefault((typecheck(t, sig), dec.canonical(t).term), t)
    out = {}
    for (ty, _), t in reps.items():
        out.setdefault(ty, []).append(t)
    return out


def _pairs(classes):
    for reps in classes.values():
        for i, a in enumerate(reps):
            for b in reps[i + 1:]:
                for kind in (STRONG, WEAK):
                    yield Equation(kind, a, b)


@pytest.fixture(scope="module")
def setting():
    sig = state_signature()
    return sig, chains(sig, 6), state_models(sig, 3)


# ---------------------------------------------------------------- 1

def test_criterion_1_derived_rule_corpus():
    d = lemmas.data_dir()
    with Timer() as t:
        sig = parse_signature((d / "lemmas.sig").read_text())
        for name in lemmas.LEMMAS:
            drv = parse_derivation((d / f"{name}.drv").read_text(), sig)
            res = check_derivation(drv, sig)
            assert res.ok, (name, res.message)
    assert len(lemmas.DERIVED) == 7 and len(lemmas.COHERENCE) == 2
    assert t.elapsed < 1.0
    files = lemmas.data_files()
    for name, text in files.items():
        assert (d / name).read_text() == text, f"{name} is stale"


# ---------------------------------------------------------------- 2

def test_criterion_2_soundness(setting):
    sig, terms, models = setting
    with Timer() as t:
        dec = Decider(sig, "syntactic", 3, models=models)
        fp = Fingerprints(sig, models)
        classes = _classes(sig, terms, dec)
        # every member of a class has the fingerprint of its representative
        canon = {}
        for term in terms:
            key = (typecheck(term, sig), dec.canonical(term).term)
            canon.setdefault(key, fp.key(term))
            assert fp.key(term) == canon[key], term
        certified = violations = 0
        for e in _pairs(classes):
            if dec.decide(e).status == EQUIVALENT:
                certified += 1
                violations += not fp.agree(e)
    assert violations == 0 and certified > 0
    assert t.elapsed < 60
    # the fingerprint oracle agrees with holds() on a sample
    rng = random.Random(0)
    eqs = [e for e in _pairs(classes) if dec.decide(e).status == EQUIVALENT]
    for e in rng.sample(eqs, 100):
        assert all(holds(e, m) for m in models)


# ---------------------------------------------------------------- 3

def test_criterion_3_completeness(setting):
    sig, terms, models = setting
    with Timer() as t:
        dec = Decider(sig, "syntactic", 3, models=models)
        fp = Fingerprints(sig, models)
        classes = _classes(sig, terms, dec)
        counts = {EQUIVALENT: 0, NOT_EQUIVALENT: 0, UNKNOWN: 0}
        for e in _pairs(classes):
            v = dec.decide(e)
            counts[v.status] += 1
            if fp.agree(e):
                assert v.status == EQUIVALENT, e
            else:
                assert v.status == NOT_EQUIVALENT, e
                m, w = v.countermodel
                assert counterexample(e, m) is not None
    assert counts[UNKNOWN] == 0
    assert counts[EQUIVALENT] > 0 and counts[NOT_EQUIVALENT] > 0
    assert t.elapsed < 120


# ---------------------------------------------------------------- 4

def _per_model(fp, e):
    """Boolean array: does ``e`` hold in model i?"""
    a, _ = typecheck(e.lhs, fp.sig)
    inputs, _, offsets = fp.domain(a)
    pick = fp.strong if e.strong else fp.weak
    differ = (pick(e.lhs) != pick(e.rhs)).astype(np.int64)
    owner = np.fromiter((mi for mi, _ in inputs), dtype=np.int64, count=len(inputs))
    return np.bincount(owner, weights=differ, minlength=len(fp.models)) == 0


def test_criterion_4_reduction_bound(setting):
    sig, terms, models = setting
    dec = Decider(sig, "syntactic", 3, models=models)
    fp = Fingerprints(sig, models)
    classes = _classes(sig, terms, dec)
    worst = violations = 0
    for e in _pairs(classes):
        r = reduce_equation(e, sig, certificates=False)
        accessors = all(decorate(x, Theory.ST) <= 1 for x in (e.lhs, e.rhs))
        assert len(r) <= (2 if accessors else 4), e
        worst = max(worst, len(r))
        outs = np.ones(len(models), dtype=bool)
        for o in r.pure_equations:
            outs &= _per_model(fp, o)
        violations += int(np.count_nonzero(_per_model(fp, e) != outs))
    assert violations == 0
    assert worst <= 4
    # the reduction only sees canonical forms: other members of a class reduce alike
    rng = random.Random(1)
    by_type = typed(terms, sig)
    for _ in range(300):
        ty = rng.choice(sorted(by_type, key=str))
        a, b = rng.choice(by_type[ty]), rng.choice(by_type[ty])
        e = Equation(rng.choice((STRONG, WEAK)), a, b)
        ra = reduce_equation(e, sig, certificates=False)
        ca, cb = dec.canonical(a).term, dec.canonical(b).term
        rb = reduce_equation(Equation(e.kind, ca, cb), sig, certificates=False)
        assert ra.pure_equations == rb.pure_equations


# ---------------------------------------------------------------- 5

def _count(t, cls):
    return sum(isinstance(s, cls) for s in subterms(t))


@pytest.mark.slow
def test_criterion_5_canonical_forms(setting):
    sig, terms, models = setting
    fp = Fingerprints(sig, models)
    for term in terms:
        c, d = normalize_modifier(term, sig)
        form = c.term
        if c.is_accessor:
            assert _count(form, Lookup) <= 1 and _count(form, Update) == 0
        else:
            assert _count(form, Update) == 1
            assert _count(c.a.term, Lookup) <= 1 and _count(c.a.term, Update) == 0
        replay = parse_derivation(print_derivation(d), sig)
        res = check_derivation(replay, sig)
        assert res.ok, (term, res.message)
        assert replay.steps[-1].conclusion == Equation(STRONG, term, form)
        assert fp.key(term) == fp.key(form)


# ---------------------------------------------------------------- 6

def test_criterion_6_weak_strong_separation():
    sig = state_signature()
    v = decide(parse_equation("lkp[X] . upd[X] ~~ id(V)", sig), sig)
    assert v.status == EQUIVALENT and check_derivation(v.certificate, sig).ok
    e = parse_equation("lkp[X] . upd[X] == id(V)", sig)
    v = decide(e, sig)
    assert v.status == NOT_EQUIVALENT
    m, w = v.countermodel
    assert counterexample(e, m) == w
    e = parse_equation("upd[X] == final(V)", sig)
    v = decide(e, sig)
    assert v.status == NOT_EQUIVALENT and not holds(e, v.countermodel[0])


# ---------------------------------------------------------------- 7

def test_criterion_7_duality_transport(setting):
    sig, terms, _ = setting
    with Timer() as t:
        d = lemmas.data_dir()
        dm = DualityMap.parse(lemmas.AXIOM_MAP)
        ssig = parse_signature((d / "state_axioms.sig").read_text())
        esig = parse_signature((d / "exc_axioms.sig").read_text())
        assert print_signature(dualize(ssig, dm)) == (d / "exc_axioms.sig").read_text()
        sdrv = parse_derivation((d / "state_axioms.drv").read_text(), ssig)
        assert print_derivation(dualize(sdrv, dm)) == (d / "exc_axioms.drv").read_text()
        assert check_derivation(parse_derivation((d / "exc_axioms.drv").read_text(), esig),
                                esig).ok

        lsig = lemmas.lemma_signature()
        dlsig = dualize(lsig)
        for name in lemmas.DERIVED:
            drv = parse_derivation((d / f"{name}.drv").read_text(), lsig)
            dual = parse_derivation(print_derivation(dualize(drv)), dlsig)
            assert dual.theory == Theory.EXC
            assert check_derivation(dual, dlsig).ok, name

        dec = Decider(sig, "syntactic", 3)
        edec = ExcDecider(dualize(sig))
        classes = _classes(sig, terms, dec)
        for e in _pairs(classes):
            sv = dec.decide(e)
            ev = edec.decide(dualize(e), countermodel=False)
            assert ev.status == sv.status, e

        # on the subfamily without the co-inhabitant, exception verdicts
        # agree with exception models, and refutations come with countermodels
        free = [x for x in terms if not any(s == Sym("c") for s in subterms(x))]
        fsig = restrict(dualize(sig), *[dualize(x) for x in free])
        fmodels = list(enumerate_models(fsig, 3, EXCEPTION))
        efp = Fingerprints(fsig, fmodels)
        refuted = []
        for e in _pairs(_classes(sig, free, dec)):
            de = dualize(e)
            v = edec.decide(de, countermodel=False)
            assert (v.status == EQUIVALENT) == efp.agree(de), de
            if v.status == NOT_EQUIVALENT:
                refuted.append(de)
        for de in random.Random(2).sample(refuted, 50):
            m, w = edec.countermodel(de)
            assert counterexample(de, m) == w
    assert t.elapsed < 120


# ---------------------------------------------------------------- 8

HANDLER_SIG = """\
type V;
type W;
type B;
exception T : V;
exception R : W;
pure g : V -> B;
pure f : B -> B;
"""


def test_criterion_8_handlers():
    with Timer() as t:
        sig = parse_signature(HANDLER_SIG)
        V, W, B = Base("V"), Base("W"), Base("B")
        # the body returns on B, raises T on V and raises R on W
        body = Copair(Sym("f"), Copair(throw(B, "T", sig), throw(B, "R", sig)))
        assert typecheck(body, sig) == (Coprod(B, Coprod(V, W)), B)
        public, catch, private = try_catch(HandlerSpec(body, "T", Sym("g")), sig)
        catchers = [catch, private, Untag("T"), Comp(Sym("g"), Untag("T")),
                    Comp(Tag("R"), Untag("R")), Comp(Untag("T"), Tag("T"))]
        assert all(decorate(k, Theory.EXC) == 2 for k in catchers)
        models = list(enumerate_models(sig, 2, EXCEPTION, sizes={"V": 2, "W": 2, "B": 2}))
        assert len(models) == 4 ** 2
        for m in models:
            f, g = m.tables["f"], m.tables["g"]
            tab = eval_exc(public, m)
            for b in m.carriers["B"]:
                assert tab[(0, (0, b))] == (0, f[b])               # normal result
            for v in m.carriers["V"]:
                assert tab[(0, (1, (0, v)))] == (0, g[v])          # T routed to g
            for w in m.carriers["W"]:
                assert tab[(0, (1, (1, w)))] == (1, (1, w))        # R propagated
            for exn in m.exceptions:
                assert tab[(1, exn)] == (1, exn)                   # incoming ones too
            for k in catchers:
                assert holds(Equation(WEAK, k, Downcast(k)), m)
    assert t.elapsed < 5
