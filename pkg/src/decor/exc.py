"""Exceptions: throw, try/catch, downcast and the duality with states.

The core exception theory is the mirror image of the state theory: reverse
every composite and exchange products with coproducts, 1 with 0, lookup
with tag and update with untag.  :func:`dualize` performs this exchange on
types, terms, equations, signatures and whole derivations, and
:func:`decide_exc_core` decides core exception equations by deciding their
mirror images with :mod:`decor.state`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kernel import Derivation, Step, TermJudgment
from .syntax import (
    RO, Base, Comp, Copair, Coprod, DecorError, Downcast, Empty, EmptyT,
    Equation, Final, Id, In1, In2, Initial, LCopair, LPair, Lookup, Pair,
    Prod, Proj1, Proj2, RCopair, RPair, Signature, Sym, Tag, Theory, Unit,
    UnitT, Untag, Update, Val, decorate, subterms, typecheck,
)


class DualityError(DecorError):
    """Input outside the fragment closed under duality."""


# ---------------------------------------------------------------- programmer's language

@dataclass(frozen=True)
class HandlerSpec:
    body: object        # f : A -> B, a propagator
    name: str           # the exception name T that is handled
    handler: object     # g : V_T -> B, a propagator


def throw(b, name, sig):
    """``initial(B) . tag[T] : V_T -> B``."""
    sig.exception(name)
    t = Comp(Initial(b), Tag(name))
    typecheck(t, sig)
    return t


def try_catch(h, sig):
    """The public term and the two private catchers of a handler.

    The copairs range over ``B + 0`` and ``V_T + 0``, which are isomorphic
    to ``B`` and ``V_T``; the isomorphisms are the explicit first
    injections.
    """
    exc = Theory.EXC
    for part, what in ((h.body, "body"), (h.handler, "handler")):
        if decorate(part, exc) > RO:
            raise DecorError(f"the {what} of try/catch must be a propagator")
    a, b = typecheck(h.body, sig)
    vt = sig.resolve(sig.exception(h.name))
    hs, ht = typecheck(h.handler, sig)
    if hs != vt or ht != b:
        raise DecorError("the handler must have type V_T -> B, B the target of the body")
    catch = Comp(Copair(h.handler, Initial(b)), Comp(In1(vt, Empty), Untag(h.name)))
    body = Comp(LCopair(Id(b), catch), Comp(In1(b, Empty), h.body))
    public = Downcast(body)
    for t in (catch, body, public):
        typecheck(t, sig)
    return public, catch, body


def downcast(f):
    return Downcast(f)


# ---------------------------------------------------------------- duality

@dataclass(frozen=True)
class DualityMap:
    """Symmetric renaming applied while dualizing.

    ``names`` pairs locations with exception names, ``symbols`` pairs pure
    symbols with their mirror symbols.  Names not listed are kept.
    """

    names: tuple = ()
    symbols: tuple = ()
    _fwd: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for a, b in tuple(self.names) + tuple(self.symbols):
            for x, y in ((a, b), (b, a)):
                if self._fwd.get(x, y) != y:
                    raise DualityError(f"name {x!r} is mapped twice")
                self._fwd[x] = y

    @classmethod
    def parse(cls, items):
        """From ``["X=T", ...]``."""
        pairs = []
        for item in items or ():
            a, sep, b = item.partition("=")
            if not sep or not a.strip() or not b.strip():
                raise DualityError(f"bad mapping {item!r}; expected NAME=NAME")
            pairs.append((a.strip(), b.strip()))
        return cls(tuple(pairs))

    def __call__(self, name):
        return self._fwd.get(name, name)


IDENTITY = DualityMap()

_THEORY = {Theory.ST: Theory.EXC, Theory.EXC: Theory.ST,
           Theory.COM: Theory.MON, Theory.MON: Theory.COM}

_PAIRS = {Pair: Copair, LPair: LCopair, RPair: RCopair,
          Copair: Pair, LCopair: LPair, RCopair: RPair}


def dual_type(t, dm=IDENTITY):
    match t:
        case UnitT():
            return Empty
        case EmptyT():
            return Unit
        case Prod(l, r):
            return Coprod(dual_type(l, dm), dual_type(r, dm))
        case Coprod(l, r):
            return Prod(dual_type(l, dm), dual_type(r, dm))
        case Val(n):
            return Val(dm(n))
    return t


def dual_term(t, dm=IDENTITY):
    d = lambda x: dual_term(x, dm)
    ty = lambda x: dual_type(x, dm)
    match t:
        case Id(a):
            return Id(ty(a))
        case Comp(g, f):
            return Comp(d(f), d(g))
        case Pair(f1, f2) | LPair(f1, f2) | RPair(f1, f2) | Copair(f1, f2) \
                | LCopair(f1, f2) | RCopair(f1, f2):
            return _PAIRS[type(t)](d(f1), d(f2))
        case Proj1(a, b):
            return In1(ty(a), ty(b))
        case Proj2(a, b):
            return In2(ty(a), ty(b))
        case In1(a, b):
            return Proj1(ty(a), ty(b))
        case In2(a, b):
            return Proj2(ty(a), ty(b))
        case Final(a):
            return Initial(ty(a))
        case Initial(a):
            return Final(ty(a))
        case Sym(n):
            return Sym(dm(n))
        case Lookup(x):
            return Tag(dm(x))
        case Update(x):
            return Untag(dm(x))
        case Tag(x):
            return Lookup(dm(x))
        case Untag(x):
            return Update(dm(x))
        case Downcast():
            raise DualityError("downcast has no dual in the state theory")
    raise DualityError(f"cannot dualize {t!r}")


def dual_equation(e, dm=IDENTITY):
    return Equation(e.kind, dual_term(e.lhs, dm), dual_term(e.rhs, dm))


def dual_signature(sig, dm=IDENTITY):
    ty = lambda t: dual_type(t, dm)
    return Signature(
        types=sig.types,
        symbols=tuple((dm(n), ty(b), ty(a)) for n, a, b in sig.symbols),
        locations=tuple((dm(n), ty(t)) for n, t in sig.exceptions),
        exceptions=tuple((dm(n), ty(t)) for n, t in sig.locations),
        axioms=tuple((n, dual_equation(e, dm)) for n, e in sig.axioms),
        inhabitants=tuple((ty(t), dual_term(h, dm)) for t, h in sig.inhabitants),
    )


# rule name exchanges; binding names are listed as (this side, other side)
_RULES = {
    "repl": ("subs", {"g": "f"}),
    "id-source": ("id-target", {}),
    "prod1": ("coprod1", {"B1": "A1", "B2": "A2"}),
    "prod2": ("coprod2", {"B1": "A1", "B2": "A2"}),
    "pair": ("copair", {}),
    "pair-eq1": ("copair-eq1", {}),
    "pair-eq2": ("copair-eq2", {}),
    "pair-u": ("copair-u", {}),
    "final": ("initial", {"A": "B"}),
    "final-u": ("initial-u", {"f": "g"}),
    "lookup": ("tag", {"X": "T"}),
    "update": ("untag", {"X": "T"}),
    "lookupdate": ("untag-tag", {"X": "T"}),
    "lookupdate-ne": ("untag-tag-ne", {"X": "T", "Y": "R"}),
}
for _side in ("l", "r"):
    for _suffix in ("", "-eq1", "-eq2", "-u"):
        _RULES[f"{_side}-pair{_suffix}"] = (f"{_side}-copair{_suffix}", {})
for _k, (_v, _b) in list(_RULES.items()):
    _RULES[_v] = (_k, {y: x for x, y in _b.items()})

_NO_DUAL = {"downcast", "downcast-weak", "downcast-eq", "downcast-reflect"}


def dual_judgment(j, dm=IDENTITY):
    if isinstance(j, Equation):
        return dual_equation(j, dm)
    return TermJudgment(dual_term(j.term, dm), dual_type(j.target, dm),
                        dual_type(j.source, dm), j.dec)


def _dual_binding(v, dm):
    if isinstance(v, str):
        return dm(v)
    try:
        return dual_term(v, dm)
    except DualityError:
        if isinstance(v, (Base, UnitT, EmptyT, Prod, Coprod, Val)):
            return dual_type(v, dm)
        raise


def dual_derivation(d, dm=IDENTITY):
    out = Derivation(_THEORY[d.theory], [],
                     [(n, dual_equation(e, dm)) for n, e in d.hypotheses])
    where = {}
    for i, s in enumerate(d.steps):
        if s.rule in _NO_DUAL:
            raise DualityError(f"rule {s.rule} has no dual")
        b = {k: _dual_binding(v, dm) for k, v in s.bindings.items()}
        prem = tuple(where[p] for p in s.premises)
        concl = dual_judgment(s.conclusion, dm)
        if s.rule == "comp":
            out.steps.append(Step("comp", {"f": b["g"], "g": b["f"]}, prem, concl))
        elif s.rule == "assoc":
            b2 = {"f": b["h"], "g": b["g"], "h": b["f"]}
            out.steps.append(Step("assoc", b2, (), concl.swap()))
            out.steps.append(Step("sym", {}, (len(out.steps) - 1,), concl))
        else:
            rule, ren = _RULES.get(s.rule, (s.rule, {}))
            out.steps.append(Step(rule, {ren.get(k, k): v for k, v in b.items()}, prem, concl))
        where[i] = len(out.steps) - 1
    return out


def dualize(x, dm=IDENTITY):
    """Mirror image of a type, term, equation, judgment, signature or derivation."""
    if dm is None:
        dm = IDENTITY
    if isinstance(x, Derivation):
        return dual_derivation(x, dm)
    if isinstance(x, Signature):
        return dual_signature(x, dm)
    if isinstance(x, (Equation, TermJudgment)):
        return dual_judgment(x, dm)
    if isinstance(x, (Base, UnitT, EmptyT, Prod, Coprod, Val)):
        return dual_type(x, dm)
    return dual_term(x, dm)


# ---------------------------------------------------------------- decision

def restrict(sig, *terms):
    """The signature keeping only the pure symbols that occur in ``terms``
    (axioms are kept when all their symbols survive)."""
    used = {s.name for t in terms for s in subterms(t) if isinstance(s, Sym)}
    symbols = tuple(x for x in sig.symbols if x[0] in used)

    def ok(e):
        return all(s.name in used for t in (e.lhs, e.rhs) for s in subterms(t)
                   if isinstance(s, Sym))

    return Signature(types=sig.types, symbols=symbols, locations=sig.locations,
                     exceptions=sig.exceptions,
                     axioms=tuple((n, e) for n, e in sig.axioms if ok(e)))


class ExcDecider:
    """Decide core exception equations through their state mirror images."""

    def __init__(self, sig, oracle="syntactic", max_size=3):
        from .state import Decider, FragmentError
        if len(sig.exceptions) != 1 or sig.locations:
            raise FragmentError("the core exception procedure needs exactly one "
                                "exception name and no locations")
        self.sig = sig
        self.max_size = max_size
        self.dual_sig = dual_signature(sig)
        self.state = Decider(self.dual_sig, oracle, max_size)
        self._models = None

    def dual(self, e):
        from .state import FragmentError
        try:
            return dual_equation(e)
        except DualityError as exc:
            raise FragmentError(str(exc)) from None

    def decide(self, e, certificate=False, countermodel=True):
        from .state import NOT_EQUIVALENT, Verdict
        de = self.dual(e)
        self.state.ctx.check(de.lhs, de.rhs)
        v = self.state.decide(de, certificate=certificate)
        out = Verdict(v.status, e, obligations=[dual_equation(o) for o in v.obligations],
                      message=v.message)
        if v.failed is not None:
            out.failed = dual_equation(v.failed)
        if v.certificate is not None:
            out.certificate = dual_derivation(v.certificate)
        if countermodel and v.status == NOT_EQUIVALENT:
            out.countermodel = self.countermodel(e)
        return out

    def countermodel(self, e):
        from .semantics import EXCEPTION, counterexample, enumerate_models
        small = restrict(self.sig, e.lhs, e.rhs)
        for m in enumerate_models(small, self.max_size, EXCEPTION):
            w = counterexample(e, m)
            if w is not None:
                return m, w
        return None


def decide_exc_core(e, sig, oracle="syntactic", max_size=3, certificate=True):
    """Decide ``e`` in the core exception theory with one exception name."""
    return ExcDecider(sig, oracle, max_size).decide(e, certificate=certificate)
