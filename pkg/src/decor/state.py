"""Canonical forms, reduction to pure equations and the decision procedure
for the single-location state theory.

Terms live in the fragment without products, coproducts or the empty type.
An accessor is brought to the form ``v . lkp . final(X)`` with ``v`` pure,
and a modifier to ``u . lkp . upd . a`` with ``u`` pure and ``a`` an
accessor.  An equation between such terms is equivalent to at most four
equations between pure terms; every step of that reduction is carried out
inside a :class:`~decor.proofs.ProofBuilder`, so the verdict of
:func:`decide` comes with a derivation the kernel replays.

Proof-producing functions take a builder ``pb``; with ``pb=None`` the same
code computes the spines only, which is how verdicts are obtained quickly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .proofs import Chain, ProofBuilder, ProofError, prune
from .syntax import (
    PURE, RO, STRONG, WEAK, Base, Comp, DecorError, Equation, Final, Id,
    LPair, Lookup, Proj1, Proj2, RPair, Sym, Theory, Unit, Update, build,
    decorate, flatten, subterms, typecheck,
)

ST = Theory.ST


class FragmentError(DecorError):
    """Input outside the single-location fragment handled here."""


class MissingInhabitant(DecorError):
    pass


# ---------------------------------------------------------------- context

class StateContext:
    """Per-signature data: the location, its value type, inhabitants and the
    pure axioms oriented as rewrite rules."""

    def __init__(self, sig):
        if len(sig.locations) != 1:
            raise FragmentError(
                f"the decision procedure needs exactly one location, "
                f"found {len(sig.locations)}")
        self.sig = sig
        self.loc, v = sig.locations[0]
        self.V = sig.resolve(v)
        if not isinstance(self.V, Base):
            raise FragmentError("the location must hold a base type")
        self.lkp = Lookup(self.loc)
        self.upd = Update(self.loc)
        self._rules = None

    # -- fragment
    def check(self, *terms):
        for t in terms:
            for s in subterms(t):
                if not isinstance(s, (Id, Comp, Final, Sym, Lookup, Update)):
                    raise FragmentError(
                        f"{type(s).__name__} is outside the fragment of the "
                        "decision procedure")
                if not isinstance(s, Comp):
                    for ty in typecheck(s, self.sig):
                        if not (isinstance(ty, Base) or ty == Unit):
                            raise FragmentError(
                                "types in the fragment are base types and 1")
            decorate(t, ST)

    def inhabitant(self, ty):
        if ty == Unit:
            return Id(Unit)
        h = self.sig.inhabitant(ty)
        if h is None:
            raise MissingInhabitant(f"no inhabitant declared for type {ty}")
        return h

    # -- pure axioms as ground rewrite rules
    @property
    def rules(self):
        if self._rules is None:
            self._rules = []
            for name, e in self.sig.axioms:
                l, r = Chain(None, e.lhs, self.sig), Chain(None, e.rhs, self.sig)
                _pure_seg(self, l, 0, len(l.gens), rules=False)
                _pure_seg(self, r, 0, len(r.gens), rules=False)
                if l.gens == r.gens:
                    continue
                flip = _weight(l.gens) < _weight(r.gens)
                big, small = (r, l) if flip else (l, r)
                self._rules.append((list(big.gens), list(small.gens), name, flip))
        return self._rules

    def rule_lemma(self, pb, name, flip):
        e = self.sig.axiom(name)
        cl, cr = Chain(pb, e.lhs, self.sig), Chain(pb, e.rhs, self.sig)
        _pure_seg(self, cl, 0, len(cl.gens), rules=False)
        _pure_seg(self, cr, 0, len(cr.gens), rules=False)
        i = pb.trans(pb.sym(cl.proof), pb.axiom(name), cr.proof)
        return pb.sym(i) if flip else i


def _weight(gens):
    return (len(gens), " ".join(map(str, gens)))


# ---------------------------------------------------------------- lemmas

def one_id(pb):
    """``final(1) == id(1)``."""
    return pb.sym(pb.final_u(Id(Unit)))


def collapse(pb, s):
    """``s == final(A)`` for ``s : A -> 1``, or ``s == id(1)`` when A = 1."""
    src = typecheck(s, pb.sig)[0]
    i = pb.final_u(s)
    return pb.trans(i, one_id(pb)) if src == Unit else i


def lfl(pb, ctx):
    """``final(V) . lkp == id(1)``."""
    return collapse(pb, Comp(Final(ctx.V), ctx.lkp))


def lookupdate(pb, ctx):
    return pb.step("lookupdate", {"X": ctx.loc})


def cancel_front(pb, ctx, f):
    """``lkp . (upd . f) ~~ f`` for ``f : A -> V``."""
    lu = Comp(ctx.lkp, ctx.upd)
    return pb.trans(pb.bridge(Comp(ctx.lkp, Comp(ctx.upd, f)), Comp(lu, f)),
                    pb.subs(f, lookupdate(pb, ctx)),
                    pb.id_target(f))


def upd_lkp(pb, ctx):
    """``upd . lkp == id(1)`` from the local-global rule."""
    ul = Comp(ctx.upd, ctx.lkp)
    prem = pb.trans(cancel_front(pb, ctx, ctx.lkp),
                    pb.sym(pb.id_source(ctx.lkp)))
    return pb.local_global(ul, Id(Unit), [prem])


def upd_congruence(pb, ctx, i):
    """From ``f ~~ g : A -> V`` derive ``upd . f == upd . g``."""
    e = pb.eq(i)
    f, g = e.lhs, e.rhs
    prem = pb.trans(cancel_front(pb, ctx, f), i, pb.sym(cancel_front(pb, ctx, g)))
    return pb.local_global(Comp(ctx.upd, f), Comp(ctx.upd, g), [prem])


def cancel(pb, ctx, i, v1, v2):
    """From ``v1 . lkp . w1 == v2 . lkp . w2`` (``w1, w2 : X -> 1``, spines
    only) derive ``v1 == v2`` for pure ``v1, v2 : V -> Y``."""
    e = pb.eq(i)
    src = typecheck(e.lhs, pb.sig)[0]
    tail = Comp(ctx.inhabitant(src), ctx.upd)
    j = pb.subs(tail, i)
    sides = []
    for side, v in ((pb.eq(j).lhs, v1), (pb.eq(j).rhs, v2)):
        ch = Chain(pb, side, pb.sig)
        k = ch.find(lambda g: g == ctx.lkp)
        n = len(ch.gens)
        ch.rw(k + 1, n - 1, [], lambda: collapse(pb, ch.segment(k + 1, n - 1)))
        ch.rw(k, k + 2, [], lambda: lookupdate(pb, ctx))
        sides.append(ch.close(v))
    w = pb.trans(pb.sym(sides[0]), j, sides[1])
    return pb.strengthen(w)


# ---------------------------------------------------------------- spines

def _is_one(sig):
    return lambda g: typecheck(g, sig)[1] == Unit


def _collapse_seg(ctx, ch, i, j):
    k = ch.find(_is_one(ctx.sig), i, j)
    if k is None:
        return j
    src = ch.type_at(j)
    new = [] if src == Unit else [Final(src)]
    seg = ch.segment(k, j)
    ch.rw(k, j, new, lambda: collapse(ch.pb, seg))
    return k + len(new)


def _find_sub(gens, pat, i, j):
    n = len(pat)
    for k in range(i, j - n + 1):
        if gens[k:k + n] == pat:
            return k
    return None


def _pure_seg(ctx, ch, i, j, rules=True):
    """Normalize the pure segment ``gens[i:j]`` in place; return its new end."""
    j = _collapse_seg(ctx, ch, i, j)
    if not rules or not ctx.rules:
        return j
    for _ in range(256):
        for big, small, name, flip in ctx.rules:
            k = _find_sub(ch.gens, big, i, j)
            if k is not None:
                ch.rw(k, k + len(big), small,
                      lambda name=name, flip=flip: ctx.rule_lemma(ch.pb, name, flip))
                j += len(small) - len(big)
                j = _collapse_seg(ctx, ch, i, j)
                break
        else:
            return j
    return j


def _acc_seg(ctx, ch, i, j, drop=False):
    """Canonicalize the accessor segment ``gens[i:j]`` in place.

    Returns ``(None, j)`` when it is pure and ``(k, j)`` with the lookup at
    index ``k`` otherwise.  With ``drop`` and source 1 the trailing
    ``final(1)`` is removed.
    """
    k = ch.find(lambda g: g == ctx.lkp, i, j)
    if k is None:
        return None, _pure_seg(ctx, ch, i, j)
    src = ch.type_at(j)
    new = [] if drop and src == Unit else [Final(src)]
    seg = ch.segment(k + 1, j)
    if new:
        ch.rw(k + 1, j, new, lambda: ch.pb.final_u(seg))
    else:
        ch.rw(k + 1, j, new, lambda: collapse(ch.pb, seg))
    j = k + 1 + len(new)
    k2 = _pure_seg(ctx, ch, i, k)
    return k2, j + (k2 - k)


def _insert_lookup(ctx, ch, k):
    """Insert ``final(V) . lkp`` at cut ``k`` (which must have type 1)."""
    ch.rw(k, k, [Final(ctx.V), ctx.lkp], lambda: ch.pb.sym(lfl(ch.pb, ctx)))


# ---------------------------------------------------------------- canonical forms

@dataclass(frozen=True)
class CanonicalAccessor:
    source: object
    target: object
    pure: object = None       # the pure normal form, when the accessor is pure
    v: object = None          # V -> target, otherwise
    _loc: str = field(default="", repr=False)

    @property
    def is_pure(self):
        return self.v is None

    @property
    def term(self):
        if self.is_pure:
            return self.pure
        return Comp(self.v, Comp(Lookup(self._loc), Final(self.source)))


@dataclass(frozen=True)
class CanonicalModifier:
    source: object
    target: object
    accessor: CanonicalAccessor = None   # set when the input is an accessor
    u: object = None                     # V -> target
    a: CanonicalAccessor = None          # source -> V
    _loc: str = field(default="", repr=False)

    @property
    def is_accessor(self):
        return self.accessor is not None

    @property
    def term(self):
        if self.is_accessor:
            return self.accessor.term
        return Comp(self.u, Comp(Lookup(self._loc), Comp(Update(self._loc), self.a.term)))


def _acc_result(ctx, ch, k, j, lo, tgt):
    """Read a CanonicalAccessor off the segment ``gens[lo:j]``."""
    src = ch.type_at(j)
    if k is None:
        return CanonicalAccessor(src, tgt, pure=build(ch.gens[lo:j], src), _loc=ctx.loc)
    v = build(ch.gens[lo:k], ctx.V)
    return CanonicalAccessor(src, tgt, v=v, _loc=ctx.loc)


def _accessor(ctx, pb, t):
    ch = Chain(pb, t, ctx.sig)
    if ch.find(lambda g: g == ctx.upd) is not None:
        raise DecorError("normalize_accessor needs a term of decoration <= 1")
    k, j = _acc_seg(ctx, ch, 0, len(ch.gens))
    c = _acc_result(ctx, ch, k, j, 0, ch.tgt)
    return c, ch.close(c.term)


def _modifier(ctx, pb, t):
    ch = Chain(pb, t, ctx.sig)
    sig = ctx.sig
    is_upd = lambda g: g == ctx.upd
    if ch.find(is_upd) is None:
        c, i = _accessor(ctx, pb, t)
        return CanonicalModifier(c.source, c.target, accessor=c, _loc=ctx.loc), i
    while True:
        p = ch.find(is_upd)
        q = ch.find(is_upd, p + 1)
        if q is None:
            break
        k, q = _acc_seg(ctx, ch, p + 1, q, drop=True)
        if k is None:
            _insert_lookup(ctx, ch, q)
            k, q = q + 1, q + 2
        else:
            q = k + 1
        # gens[p+1:k] is v1, gens[k] = lkp, gens[q] = upd
        v1 = ch.gens[p + 1:k]
        f2 = ch.gens[q + 1:]
        new = v1 + f2
        if pb is None:
            ch.rw(p + 1, len(ch.gens), new)
            continue
        n = len(ch.gens)
        f1 = ch.segment(p + 1, n)

        def lemma(f1=f1, v1=v1):
            sub = Chain(pb, f1, sig)
            sub.rw(len(v1), len(v1) + 2, [], lambda: lookupdate(pb, ctx))
            return upd_congruence(pb, ctx, sub.proof)

        ch.rw(p, n, [ctx.upd] + new, lemma)
    p = ch.find(is_upd)
    k, p = _acc_seg(ctx, ch, 0, p, drop=True)
    if k is None:
        _insert_lookup(ctx, ch, p)
        p += 2
        k = _pure_seg(ctx, ch, 0, p - 1)
        p = k + 1
    u = build(ch.gens[:k], ctx.V)
    n = len(ch.gens)
    ka, j = _acc_seg(ctx, ch, p + 1, n)
    a = _acc_result(ctx, ch, ka, j, p + 1, ctx.V)
    c = CanonicalModifier(ch.src, ch.tgt, u=u, a=a, _loc=ctx.loc)
    return c, ch.close(c.term)


def normalize_accessor(a, sig, proof=True):
    """Canonical form of an accessor and a derivation of ``a == canonical``."""
    ctx = StateContext(sig)
    ctx.check(a)
    if decorate(a, ST) > RO:
        raise DecorError("normalize_accessor needs a term of decoration <= 1")
    pb = ProofBuilder(sig, ST) if proof else None
    c, i = _accessor(ctx, pb, a)
    return c, (_finish(pb, i) if proof else None)


def normalize_modifier(f, sig, proof=True):
    """Canonical form of a modifier and a derivation of ``f == canonical``."""
    ctx = StateContext(sig)
    ctx.check(f)
    pb = ProofBuilder(sig, ST) if proof else None
    c, i = _modifier(ctx, pb, f)
    return c, (_finish(pb, i) if proof else None)


def _finish(pb, i):
    """The steps of ``pb`` that step ``i`` depends on, ending with ``i``."""
    return prune(pb.d, i)


# ---------------------------------------------------------------- reduction

@dataclass
class _Plan:
    obligations: list            # pure strong equations
    forward: object              # (pb, idxs) -> idx of the input equation
    backward: object             # (pb, idx) -> list of idxs of obligations


def _canon(ctx, pb, t, memo):
    key = (id(pb), t)
    if key not in memo:
        memo[key] = _modifier(ctx, pb, t)
    return memo[key]


def _acc_plan(ctx, t1, t2, memo):
    """Plan for the strong equation ``t1 == t2`` between accessors."""
    c1, _ = _canon(ctx, None, t1, memo)
    c2, _ = _canon(ctx, None, t2, memo)
    a1, a2 = c1.accessor, c2.accessor

    def proofs(pb):
        return _canon(ctx, pb, t1, memo)[1], _canon(ctx, pb, t2, memo)[1]

    if a1.is_pure and a2.is_pure:
        ob = Equation(STRONG, a1.pure, a2.pure)

        def fwd(pb, idxs):
            p1, p2 = proofs(pb)
            return pb.trans(p1, idxs[0], pb.sym(p2))

        def bwd(pb, i):
            p1, p2 = proofs(pb)
            return [pb.trans(pb.sym(p1), i, p2)]

        return _Plan([ob], fwd, bwd)

    if not a1.is_pure and not a2.is_pure:
        ob = Equation(STRONG, a1.v, a2.v)
        tail = Comp(ctx.lkp, Final(a1.source))

        def fwd(pb, idxs):
            p1, p2 = proofs(pb)
            return pb.trans(p1, pb.subs(tail, idxs[0]), pb.sym(p2))

        def bwd(pb, i):
            p1, p2 = proofs(pb)
            e = pb.trans(pb.sym(p1), i, p2)
            return [cancel(pb, ctx, e, a1.v, a2.v)]

        return _Plan([ob], fwd, bwd)

    flipped = not a1.is_pure
    if flipped:
        t1, t2, a1, a2 = t2, t1, a2, a1
    plan = _mixed_plan(ctx, t1, t2, a1, a2, memo)
    if not flipped:
        return plan

    def fwd(pb, idxs):
        return pb.sym(plan.forward(pb, idxs))

    def bwd(pb, i):
        return plan.backward(pb, pb.sym(i))

    return _Plan(plan.obligations, fwd, bwd)


def _mixed_plan(ctx, t1, t2, a1, a2, memo):
    """``t1`` pure, ``t2`` not: the two equations (3) and (4)."""
    X, V = a1.source, ctx.V
    h = ctx.inhabitant(X)
    nf1 = flatten(a1.pure)
    hs = flatten(h)
    p3 = build(nf1 + hs + [Final(V)], V)
    p4 = build(nf1 + hs + [Final(X)], X)
    ob3 = Equation(STRONG, p3, a2.v)
    ob4 = Equation(STRONG, p4, a1.pure)
    sig = ctx.sig

    def proofs(pb):
        return _canon(ctx, pb, t1, memo)[1], _canon(ctx, pb, t2, memo)[1]

    def fwd(pb, idxs):
        i3, i4 = idxs
        p1, p2 = proofs(pb)
        j = pb.subs(Comp(ctx.lkp, Final(X)), pb.sym(i3))
        ch = Chain(pb, pb.eq(j).rhs, sig)
        k = len(nf1) + len(hs)
        ch.rw(k, k + 2, [], lambda: lfl(pb, ctx))
        mid = ch.close(p4)
        # t2 == a2.term == ... == p4 == a1.pure == t1
        back = pb.trans(p2, j, mid, i4, pb.sym(p1))
        return pb.sym(back)

    def bwd(pb, i):
        p1, p2 = proofs(pb)
        e = pb.trans(pb.sym(p1), i, p2)          # pure == v . lkp . final(X)
        # (4)
        j4 = pb.subs(Comp(h, Final(X)), e)
        ch = Chain(pb, pb.eq(j4).rhs, sig)
        k = ch.find(lambda g: g == ctx.lkp)
        n = len(ch.gens)
        ch.rw(k + 1, n - 1, [], lambda: collapse(pb, ch.segment(k + 1, n - 1)))
        r4 = ch.close(a2.term)
        lhs4 = pb.bridge(p4, pb.eq(j4).lhs)
        i4 = pb.trans(lhs4, j4, r4, pb.sym(e))
        # (3)
        j3 = pb.subs(h, e)
        ch = Chain(pb, pb.eq(j3).rhs, sig)
        k = ch.find(lambda g: g == ctx.lkp)
        n = len(ch.gens)
        ch.rw(k + 1, n, [], lambda: collapse(pb, ch.segment(k + 1, n)))
        r3 = ch.proof
        cl = Chain(pb, pb.eq(j3).lhs, sig)
        _insert_lookup(ctx, cl, len(cl.gens))
        l3 = cl.proof
        both = pb.trans(pb.sym(l3), j3, r3)
        i3 = cancel(pb, ctx, both, p3, a2.v)
        return [i3, i4]

    return _Plan([ob3, ob4], fwd, bwd)


def _weak_parts(ctx, t, memo):
    """``(W, A)`` with ``t ~~ W`` and ``final . t == upd . A``."""
    c, _ = _canon(ctx, None, t, memo)
    if c.is_accessor:
        return t, Comp(ctx.lkp, Final(c.source))
    W = build(flatten(c.u) + flatten(c.a.term), c.source)
    return W, c.a.term


def _weak_proof(ctx, pb, t, W, memo):
    c, i = _canon(ctx, pb, t, memo)
    if c.is_accessor:
        return pb.refl(t)
    ch = Chain(pb, c.term, ctx.sig)
    k = len(flatten(c.u))
    ch.rw(k, k + 2, [], lambda: lookupdate(pb, ctx))
    return pb.trans(i, ch.close(W))


def _state_proof(ctx, pb, t, A, memo):
    """``final(Y) . t == upd . A``."""
    c, i = _canon(ctx, pb, t, memo)
    fin = Final(c.target)
    if c.is_accessor:
        j = pb.final_u(Comp(fin, t))
        ul = upd_lkp(pb, ctx)
        k = pb.subs(Final(c.source), ul)
        k = pb.trans(pb.sym(pb.id_target(Final(c.source))), pb.sym(k),
                     pb.bridge(pb.eq(k).lhs, Comp(ctx.upd, A)))
        return pb.trans(j, k)
    j = pb.repl(fin, i)
    ch = Chain(pb, pb.eq(j).rhs, ctx.sig)
    k = ch.find(lambda g: g == ctx.upd)
    ch.rw(0, k, [], lambda: collapse(pb, ch.segment(0, k)))
    return pb.trans(j, ch.close(Comp(ctx.upd, A)))


def _plan(ctx, e, memo):
    t1, t2 = e.lhs, e.rhs
    d = max(decorate(t1, ST), decorate(t2, ST))
    if d <= RO:
        plan = _acc_plan(ctx, t1, t2, memo)
        if e.kind == STRONG:
            return plan
        return _Plan(plan.obligations,
                     lambda pb, idxs: pb.weaken(plan.forward(pb, idxs)),
                     lambda pb, i: plan.backward(pb, pb.strengthen(i)))
    W1, A1 = _weak_parts(ctx, t1, memo)
    W2, A2 = _weak_parts(ctx, t2, memo)
    wplan = _acc_plan(ctx, W1, W2, memo)
    nw = len(wplan.obligations)

    def weak_fwd(pb, idxs):
        return pb.trans(_weak_proof(ctx, pb, t1, W1, memo),
                        wplan.forward(pb, idxs[:nw]),
                        pb.sym(_weak_proof(ctx, pb, t2, W2, memo)))

    def weak_bwd(pb, i):
        w = pb.trans(pb.sym(_weak_proof(ctx, pb, t1, W1, memo)), pb.weaken(i),
                     _weak_proof(ctx, pb, t2, W2, memo))
        return wplan.backward(pb, pb.strengthen(w))

    if e.kind == WEAK:
        return _Plan(wplan.obligations, weak_fwd, weak_bwd)

    splan = _acc_plan(ctx, A1, A2, memo)
    tgt = typecheck(t1, ctx.sig)[1]

    def fwd(pb, idxs):
        w = weak_fwd(pb, idxs)
        s = pb.trans(_state_proof(ctx, pb, t1, A1, memo),
                     pb.repl(ctx.upd, splan.forward(pb, idxs[nw:])),
                     pb.sym(_state_proof(ctx, pb, t2, A2, memo)))
        return pb.effect(t1, t2, w, s)

    def bwd(pb, i):
        out = weak_bwd(pb, i)
        s = pb.trans(pb.sym(_state_proof(ctx, pb, t1, A1, memo)),
                     pb.repl(Final(tgt), i),
                     _state_proof(ctx, pb, t2, A2, memo))
        s = pb.weaken(pb.repl(ctx.lkp, s))
        a = pb.trans(pb.sym(cancel_front(pb, ctx, A1)), s, cancel_front(pb, ctx, A2))
        return out + splan.backward(pb, pb.strengthen(a))

    return _Plan(wplan.obligations + splan.obligations, fwd, bwd)


# ---------------------------------------------------------------- pure oracle

def pure_normal_form(ctx, t, rules=True):
    ch = Chain(None, t, ctx.sig)
    _pure_seg(ctx, ch, 0, len(ch.gens), rules)
    return ch.term


def pure_proof(ctx, pb, e):
    """Proof of a pure equation whose sides share a normal form."""
    sides = []
    for t in (e.lhs, e.rhs):
        ch = Chain(pb, t, ctx.sig)
        _pure_seg(ctx, ch, 0, len(ch.gens))
        sides.append(ch)
    nf = sides[0].term
    return pb.trans(sides[0].close(nf), pb.sym(sides[1].close(nf)))


@dataclass
class ReductionResult:
    equation: Equation
    pure_equations: list           # the non-trivial obligations
    all_equations: list            # every obligation, trivial ones included
    forward: object = None         # Derivation: hypotheses p1..pn |- equation
    backward: object = None        # Derivation: hypothesis e |- every obligation
    backward_steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.pure_equations)


def reduce_equation(e, sig, certificates=True):
    """Reduce ``e`` to at most four pure equations, with both certificates."""
    ctx = StateContext(sig)
    ctx.check(e.lhs, e.rhs)
    memo = {}
    plan = _plan(ctx, e, memo)
    obs = plan.obligations
    trivial = [pure_normal_form(ctx, o.lhs, False) == pure_normal_form(ctx, o.rhs, False)
               for o in obs]
    res = ReductionResult(e, [o for o, t in zip(obs, trivial) if not t], list(obs))
    if not certificates:
        return res
    pb = ProofBuilder(sig, ST)
    idxs, n = [], 0
    for o, t in zip(obs, trivial):
        if t:
            idxs.append(pure_proof(ctx, pb, o))
        else:
            n += 1
            idxs.append(pb.assume(f"p{n}", o))
    res.forward = _finish(pb, plan.forward(pb, idxs))
    pb = ProofBuilder(sig, ST)
    i = pb.assume("e", e)
    steps = plan.backward(pb, i)
    res.backward = pb.d
    res.backward_steps = [s + 1 for s in steps]
    return res


# ---------------------------------------------------------------- decide

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not-equivalent"
UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: str
    equation: Equation
    certificate: object = None     # Derivation of the equation
    failed: Equation = None        # a pure obligation refuted by the oracle
    countermodel: object = None    # (Model, witness) when found
    obligations: list = field(default_factory=list)
    message: str = ""

    @property
    def equivalent(self):
        return self.status == EQUIVALENT

    def __bool__(self):
        return self.equivalent


class Decider:
    """Decision procedure with caches shared across many queries.

    Verdicts depend on the canonical forms of the two sides only, so they
    are cached per pair of canonical terms.  Certificates are produced on
    demand by :meth:`certificate`.
    """

    def __init__(self, sig, oracle="syntactic", max_size=3, models=None):
        self.sig = sig
        self.ctx = StateContext(sig)
        self.oracle = oracle
        self.max_size = max_size
        self._models = models
        self._memo = {}
        self._canon = {}
        self._verdicts = {}
        self._nf = {}
        self._tables = {}

    def canonical(self, t):
        c = self._canon.get(t)
        if c is None:
            self.ctx.check(t)
            c = _modifier(self.ctx, None, t)[0]
            self._canon[t] = c
        return c

    def _pure_nf(self, t):
        r = self._nf.get(t)
        if r is None:
            r = self._nf[t] = pure_normal_form(self.ctx, t)
        return r

    def models(self):
        if self._models is None:
            from .semantics import enumerate_models
            self._models = list(enumerate_models(self.sig, self.max_size, "state"))
        return self._models

    def _table(self, t, mi):
        key = (t, mi)
        r = self._tables.get(key)
        if r is None:
            from .semantics import eval_state
            r = self._tables[key] = eval_state(t, self.models()[mi])
        return r

    def countermodel(self, e):
        """First enumerated model refuting ``e``, with a witness input."""
        from .semantics import counterexample
        c1, c2 = self.canonical(e.lhs).term, self.canonical(e.rhs).term
        for mi, m in enumerate(self.models()):
            w = counterexample(Equation(e.kind, c1, c2), m,
                               tables=(self._table(c1, mi), self._table(c2, mi)))
            if w is not None:
                return m, w
        return None

    def decide(self, e, certificate=False):
        c1, c2 = self.canonical(e.lhs), self.canonical(e.rhs)
        key = (e.kind, c1.term, c2.term)
        v = self._verdicts.get(key)
        if v is None:
            v = self._verdicts[key] = self._decide(e)
        v = Verdict(v.status, e, None, v.failed, v.countermodel, v.obligations, v.message)
        if certificate and v.equivalent:
            v.certificate = self.certificate(e)
        return v

    def _decide(self, e):
        plan = _plan(self.ctx, e, self._memo)
        obs = plan.obligations
        unknown = None
        for o in obs:
            if self._pure_nf(o.lhs) == self._pure_nf(o.rhs):
                continue
            if self.ctx.rules and (self.oracle == "syntactic"
                                   or self.countermodel(o) is None):
                unknown = o
                continue
            return Verdict(NOT_EQUIVALENT, e, failed=o, countermodel=self.countermodel(e),
                           obligations=obs)
        if unknown is not None:
            return Verdict(UNKNOWN, e, failed=unknown, obligations=obs,
                           message=f"pure oracle cannot decide {unknown}")
        return Verdict(EQUIVALENT, e, obligations=obs)

    def certificate(self, e):
        """Full derivation of ``e`` (which must be equivalent)."""
        memo = {}
        plan = _plan(self.ctx, e, memo)
        pb = ProofBuilder(self.sig, ST)
        idxs = [pure_proof(self.ctx, pb, o) for o in plan.obligations]
        return _finish(pb, plan.forward(pb, idxs))


def decide(e, sig, oracle="syntactic", max_size=3, certificate=True):
    """Decide ``e`` in the single-location state theory."""
    d = Decider(sig, oracle, max_size)
    d.ctx.check(e.lhs, e.rhs)
    return d.decide(e, certificate=certificate)


# ---------------------------------------------------------------- sequential products

def seq_product(f1, f2, side, sig):
    """Sequential product ``A1*A2 -> B1*B2`` of two modifiers.

    The left product runs ``f1`` first; it is the right pair of ``f1`` and an
    identity followed by the left pair of an identity and ``f2``.  The right
    product is the mirror image.
    """
    a1, b1 = typecheck(f1, sig)
    a2, b2 = typecheck(f2, sig)
    first = RPair(Comp(f1, Proj1(a1, a2)), Proj2(a1, a2))    # A1*A2 -> B1*A2
    second = LPair(Proj1(b1, a2), Comp(f2, Proj2(b1, a2)))   # B1*A2 -> B1*B2
    if side == "left":
        return Comp(second, first)
    if side != "right":
        raise ValueError("side must be 'left' or 'right'")
    first = LPair(Proj1(a1, a2), Comp(f2, Proj2(a1, a2)))    # A1*A2 -> A1*B2
    second = RPair(Comp(f1, Proj1(a1, b2)), Proj2(a1, b2))   # A1*B2 -> B1*B2
    return Comp(second, first)
