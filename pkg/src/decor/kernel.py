"""Proof kernel: decorated rule schemas and derivation checking.

A derivation is a flat list of steps.  Each step names a rule, binds the
rule's metavariables and cites earlier steps as premises; the kernel
recomputes the conclusion with :func:`apply_rule` and compares it with the
recorded one by strict structural equality.  Typing premises of the rules
(``f : A -> B`` with a decoration bound) are not separate steps: they are
checked directly on the bindings with :func:`~decor.syntax.typecheck` and
:func:`~decor.syntax.decorate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .syntax import (
    PURE, RO, RW, STRONG, WEAK, Comp, Copair, DecorError, Downcast, Empty,
    Equation, Final, Id, In1, In2, Initial, LCopair, LPair, Lookup, Pair,
    Proj1, Proj2, RCopair, RPair, Tag, Theory, Unit, Untag, Update, _Node,
    check_equation, copair_bound, decorate, pair_bound, print_term,
    print_type, typecheck,
)
from dataclasses import dataclass as _dc


class KernelError(DecorError):
    def __init__(self, rule, message):
        self.rule = rule
        super().__init__(f"{rule}: {message}")


@_dc(frozen=True, eq=False)
class TermJudgment(_Node):
    term: object
    source: object
    target: object
    dec: int

    def __str__(self):
        return (f"{print_term(self.term)} : {print_type(self.source)} -> "
                f"{print_type(self.target)} @ {self.dec}")


@dataclass(frozen=True)
class Param:
    name: str
    sort: str                 # "term", "type" or "name"
    bound: int | None = None  # decoration bound for terms


@dataclass(frozen=True)
class RuleSchema:
    name: str
    params: tuple
    premises: tuple           # human-readable premise patterns
    conclusion: str
    side: str = ""
    apply: Callable = field(default=None, repr=False, compare=False)

    def param(self, name):
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass
class Step:
    rule: str
    bindings: dict
    premises: tuple
    conclusion: object


@dataclass
class Derivation:
    theory: Theory
    steps: list = field(default_factory=list)
    hypotheses: list = field(default_factory=list)   # (name, Equation)

    def conclusion(self, index=-1):
        return self.steps[index].conclusion

    def __len__(self):
        return len(self.steps)


@dataclass
class CheckReport:
    ok: bool
    step: int | None = None       # 1-based number of the failing step
    rule: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return f"step {self.step} ({self.rule}): {self.message}"


@dataclass
class _Ctx:
    sig: object
    theory: Theory
    hypotheses: dict
    rule: str = ""

    def fail(self, msg):
        raise KernelError(self.rule, msg)

    def dec(self, t):
        try:
            return decorate(t, self.theory)
        except DecorError as exc:
            self.fail(str(exc))

    def types(self, t):
        try:
            return typecheck(t, self.sig)
        except DecorError as exc:
            self.fail(str(exc))

    def eq(self, kind, lhs, rhs):
        e = Equation(kind, lhs, rhs)
        try:
            check_equation(e, self.sig)
        except DecorError as exc:
            self.fail(f"non-parallel equation: {exc}")
        self.dec(lhs)
        self.dec(rhs)
        return e

    def tj(self, t):
        s, tg = self.types(t)
        return TermJudgment(t, s, tg, self.dec(t))


# ---------------------------------------------------------------- helpers

def _premise_eq(ctx, prem, i):
    if i >= len(prem):
        ctx.fail(f"missing premise {i + 1}")
    p = prem[i]
    if not isinstance(p, Equation):
        ctx.fail(f"premise {i + 1} is not an equation")
    return p


def _expect(ctx, prem, i, want):
    got = _premise_eq(ctx, prem, i)
    if got != want:
        ctx.fail(f"premise mismatch: expected {want}, got {got}")
    return got


def _arity(ctx, prem, n):
    if len(prem) != n:
        ctx.fail(f"expected {n} premise(s), got {len(prem)}")


def _coprojections(a1, a2):
    return In1(a1, a2), In2(a1, a2)


def _projections(b1, b2):
    return Proj1(b1, b2), Proj2(b1, b2)


# ---------------------------------------------------------------- rule table

def _rules_for(theory):
    T = Param
    rules = {}

    def rule(name, params, premises, conclusion, side=""):
        def deco(fn):
            rules[name] = RuleSchema(name, tuple(params), tuple(premises),
                                     conclusion, side, fn)
            return fn
        return deco

    com = theory.comonadic
    pb = pair_bound(theory)
    cb = copair_bound(theory)

    # congruence
    @rule("refl", [T("f", "term", RW)], [], "f == f")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.eq(STRONG, b["f"], b["f"])

    @rule("sym", [], ["f = g"], "g = f")
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        return Equation(e.kind, e.rhs, e.lhs)

    @rule("trans", [], ["f = g", "g = h"], "f = h", "both premises of one kind")
    def _(c, b, p):
        _arity(c, p, 2)
        e1, e2 = _premise_eq(c, p, 0), _premise_eq(c, p, 1)
        if e1.kind != e2.kind:
            c.fail("premises have different kinds")
        if e1.rhs != e2.lhs:
            c.fail(f"premise mismatch: {print_term(e1.rhs)} is not "
                   f"{print_term(e2.lhs)}")
        return Equation(e1.kind, e1.lhs, e2.rhs)

    repl_side = "weak kind requires g pure" if com else ""

    @rule("repl", [T("g", "term", RW)], ["f1 = f2 : A -> B"], "g.f1 = g.f2",
          repl_side)
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        g = b["g"]
        if com and e.kind == WEAK and c.dec(g) > PURE:
            c.fail("weak replacement requires the replacing term g pure")
        return c.eq(e.kind, Comp(g, e.lhs), Comp(g, e.rhs))

    subs_side = "" if com else "weak kind requires f pure"

    @rule("subs", [T("f", "term", RW)], ["g1 = g2 : B -> C"], "g1.f = g2.f",
          subs_side)
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        f = b["f"]
        if not com and e.kind == WEAK and c.dec(f) > PURE:
            c.fail("weak substitution requires the substituted term f pure")
        return c.eq(e.kind, Comp(e.lhs, f), Comp(e.rhs, f))

    # categorical
    @rule("id", [T("A", "type")], [], "id(A) : A -> A @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Id(b["A"]))

    @rule("comp", [T("f", "term", RW), T("g", "term", RW)], [], "g.f @ max")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Comp(b["g"], b["f"]))

    @rule("id-source", [T("f", "term", RW)], [], "f . id(A) == f")
    def _(c, b, p):
        _arity(c, p, 0)
        f = b["f"]
        return c.eq(STRONG, Comp(f, Id(c.types(f)[0])), f)

    @rule("id-target", [T("f", "term", RW)], [], "id(B) . f == f")
    def _(c, b, p):
        _arity(c, p, 0)
        f = b["f"]
        return c.eq(STRONG, Comp(Id(c.types(f)[1]), f), f)

    @rule("assoc", [T("f", "term", RW), T("g", "term", RW), T("h", "term", RW)],
          [], "h.(g.f) == (h.g).f")
    def _(c, b, p):
        _arity(c, p, 0)
        f, g, h = b["f"], b["g"], b["h"]
        return c.eq(STRONG, Comp(h, Comp(g, f)), Comp(Comp(h, g), f))

    # products
    @rule("prod1", [T("B1", "type"), T("B2", "type")], [], "pr1 : B1*B2 -> B1 @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Proj1(b["B1"], b["B2"]))

    @rule("prod2", [T("B1", "type"), T("B2", "type")], [], "pr2 : B1*B2 -> B2 @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Proj2(b["B1"], b["B2"]))

    def two(c, b, bound1, bound2):
        f1, f2 = b["f1"], b["f2"]
        if c.dec(f1) > bound1 or c.dec(f2) > bound2:
            c.fail(f"components must have decorations <= {bound1} and <= {bound2}")
        return f1, f2

    def pair_parts(c, f1, f2):
        s1, t1 = c.types(f1)
        s2, t2 = c.types(f2)
        if s1 != s2:
            c.fail("pair components have different sources")
        return _projections(t1, t2)

    def copair_parts(c, f1, f2):
        s1, t1 = c.types(f1)
        s2, t2 = c.types(f2)
        if t1 != t2:
            c.fail("copair components have different targets")
        return _coprojections(s1, s2)

    fp = [T("f1", "term", pb), T("f2", "term", pb)]

    @rule("pair", fp, [], "pair(f1, f2) @ max")
    def _(c, b, p):
        _arity(c, p, 0)
        f1, f2 = two(c, b, pb, pb)
        pair_parts(c, f1, f2)
        return c.tj(Pair(f1, f2))

    for i in (1, 2):
        @rule(f"pair-eq{i}", fp, [], f"pr{i} . pair(f1, f2) == f{i}")
        def _(c, b, p, i=i):
            _arity(c, p, 0)
            f1, f2 = two(c, b, pb, pb)
            pr = pair_parts(c, f1, f2)[i - 1]
            return c.eq(STRONG, Comp(pr, Pair(f1, f2)), (f1, f2)[i - 1])

    @rule("pair-u", fp + [T("g", "term", pb)],
          ["pr1 . g == f1", "pr2 . g == f2"], "g == pair(f1, f2)")
    def _(c, b, p):
        _arity(c, p, 2)
        f1, f2 = two(c, b, pb, pb)
        g = b["g"]
        if c.dec(g) > pb:
            c.fail(f"g must have decoration <= {pb}")
        pr1, pr2 = pair_parts(c, f1, f2)
        _expect(c, p, 0, Equation(STRONG, Comp(pr1, g), f1))
        _expect(c, p, 1, Equation(STRONG, Comp(pr2, g), f2))
        return c.eq(STRONG, g, Pair(f1, f2))

    @rule("final", [T("A", "type")], [], "final(A) : A -> 1 @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Final(b["A"]))

    @rule("final-u", [T("f", "term", pb)], [], "f == final(A)",
          f"f : A -> 1 with decoration <= {pb}")
    def _(c, b, p):
        _arity(c, p, 0)
        f = b["f"]
        s, t = c.types(f)
        if t != Unit:
            c.fail("f must target 1")
        if c.dec(f) > pb:
            c.fail(f"f must have decoration <= {pb}")
        return c.eq(STRONG, f, Final(s))

    # coproducts
    @rule("coprod1", [T("A1", "type"), T("A2", "type")], [], "in1 : A1 -> A1+A2 @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(In1(b["A1"], b["A2"]))

    @rule("coprod2", [T("A1", "type"), T("A2", "type")], [], "in2 : A2 -> A1+A2 @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(In2(b["A1"], b["A2"]))

    fc = [T("f1", "term", cb), T("f2", "term", cb)]

    @rule("copair", fc, [], "copair(f1, f2) @ max")
    def _(c, b, p):
        _arity(c, p, 0)
        f1, f2 = two(c, b, cb, cb)
        copair_parts(c, f1, f2)
        return c.tj(Copair(f1, f2))

    for i in (1, 2):
        @rule(f"copair-eq{i}", fc, [], f"copair(f1, f2) . in{i} == f{i}")
        def _(c, b, p, i=i):
            _arity(c, p, 0)
            f1, f2 = two(c, b, cb, cb)
            inj = copair_parts(c, f1, f2)[i - 1]
            return c.eq(STRONG, Comp(Copair(f1, f2), inj), (f1, f2)[i - 1])

    @rule("copair-u", fc + [T("g", "term", cb)],
          ["g . in1 == f1", "g . in2 == f2"], "g == copair(f1, f2)")
    def _(c, b, p):
        _arity(c, p, 2)
        f1, f2 = two(c, b, cb, cb)
        g = b["g"]
        if c.dec(g) > cb:
            c.fail(f"g must have decoration <= {cb}")
        in1, in2 = copair_parts(c, f1, f2)
        _expect(c, p, 0, Equation(STRONG, Comp(g, in1), f1))
        _expect(c, p, 1, Equation(STRONG, Comp(g, in2), f2))
        return c.eq(STRONG, g, Copair(f1, f2))

    ib = PURE if com else RO

    @rule("initial", [T("B", "type")], [], "initial(B) : 0 -> B @ 0")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Initial(b["B"]))

    @rule("initial-u", [T("g", "term", ib)], [], "g == initial(B)",
          f"g : 0 -> B with decoration <= {ib}")
    def _(c, b, p):
        _arity(c, p, 0)
        g = b["g"]
        s, t = c.types(g)
        if s != Empty:
            c.fail("g must source 0")
        if c.dec(g) > ib:
            c.fail(f"g must have decoration <= {ib}")
        return c.eq(STRONG, g, Initial(t))

    # conversions
    @rule("up-1", [T("f", "term", PURE)], [], "f @ 1")
    def _(c, b, p):
        _arity(c, p, 0)
        j = c.tj(b["f"])
        if j.dec > PURE:
            c.fail("up-1 requires a pure term")
        return TermJudgment(j.term, j.source, j.target, RO)

    @rule("up-2", [T("f", "term", RO)], [], "f @ 2")
    def _(c, b, p):
        _arity(c, p, 0)
        j = c.tj(b["f"])
        if j.dec > RO:
            c.fail("up-2 requires decoration <= 1")
        return TermJudgment(j.term, j.source, j.target, RW)

    @rule("strong-to-weak", [], ["f == g"], "f ~~ g")
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        if e.kind != STRONG:
            c.fail("premise must be a strong equation")
        return Equation(WEAK, e.lhs, e.rhs)

    @rule("weak-to-strong", [], ["f ~~ g"], "f == g", "both decorations <= 1")
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        if e.kind != WEAK:
            c.fail("premise must be a weak equation")
        if c.dec(e.lhs) > RO or c.dec(e.rhs) > RO:
            c.fail("weak-to-strong requires both decorations <= 1")
        return Equation(STRONG, e.lhs, e.rhs)

    @rule("axiom", [T("name", "name")], [], "declared pure axiom")
    def _(c, b, p):
        _arity(c, p, 0)
        try:
            e = c.sig.axiom(b["name"])
        except DecorError as exc:
            c.fail(str(exc))
        return e

    @rule("hyp", [T("name", "name")], [], "hypothesis of the derivation")
    def _(c, b, p):
        _arity(c, p, 0)
        name = b["name"]
        if name not in c.hypotheses:
            c.fail(f"unknown hypothesis {name!r}")
        return c.hypotheses[name]

    if theory is Theory.ST:
        _state_rules(rule, T)
    if theory is Theory.EXC:
        _exc_rules(rule, T)
    return rules


def _state_rules(rule, T):
    lr = {"l": (RO, RW, WEAK, STRONG, LPair), "r": (RW, RO, STRONG, WEAK, RPair)}
    for side, (b1, b2, k1, k2, ctor) in lr.items():
        params = [T("f1", "term", b1), T("f2", "term", b2)]

        def parts(c, b, b1=b1, b2=b2):
            f1, f2 = b["f1"], b["f2"]
            if c.dec(f1) > b1 or c.dec(f2) > b2:
                c.fail(f"components must have decorations <= {b1} and <= {b2}")
            s1, t1 = c.types(f1)
            s2, t2 = c.types(f2)
            if s1 != s2:
                c.fail("pair components have different sources")
            return f1, f2, Proj1(t1, t2), Proj2(t1, t2)

        @rule(f"{side}-pair", params, [], f"{side}pair(f1, f2) @ max")
        def _(c, b, p, parts=parts, ctor=ctor):
            _arity(c, p, 0)
            f1, f2, _, _ = parts(c, b)
            return c.tj(ctor(f1, f2))

        for i, kind in ((1, k1), (2, k2)):
            @rule(f"{side}-pair-eq{i}", params, [],
                  f"pr{i} . {side}pair(f1, f2) {'==' if kind == STRONG else '~~'} f{i}")
            def _(c, b, p, parts=parts, ctor=ctor, i=i, kind=kind):
                _arity(c, p, 0)
                f1, f2, pr1, pr2 = parts(c, b)
                pr = (pr1, pr2)[i - 1]
                return c.eq(kind, Comp(pr, ctor(f1, f2)), (f1, f2)[i - 1])

        @rule(f"{side}-pair-u", params + [T("g", "term", RW)],
              ["pr1 . g = f1", "pr2 . g = f2"], f"g == {side}pair(f1, f2)")
        def _(c, b, p, parts=parts, ctor=ctor, k1=k1, k2=k2):
            _arity(c, p, 2)
            f1, f2, pr1, pr2 = parts(c, b)
            g = b["g"]
            c.dec(g)
            _expect(c, p, 0, Equation(k1, Comp(pr1, g), f1))
            _expect(c, p, 1, Equation(k2, Comp(pr2, g), f2))
            return c.eq(STRONG, g, ctor(f1, f2))

    @rule("effect", [T("f", "term", RW), T("g", "term", RW)],
          ["f ~~ g", "final(B) . f == final(B) . g"], "f == g")
    def _(c, b, p):
        _arity(c, p, 2)
        f, g = b["f"], b["g"]
        tgt = c.types(f)[1]
        _expect(c, p, 0, Equation(WEAK, f, g))
        _expect(c, p, 1, Equation(STRONG, Comp(Final(tgt), f), Comp(Final(tgt), g)))
        return c.eq(STRONG, f, g)

    @rule("lookup", [T("X", "name")], [], "lkp[X] : 1 -> V[X] @ 1")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Lookup(b["X"]))

    @rule("update", [T("X", "name")], [], "upd[X] : V[X] -> 1 @ 2")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Update(b["X"]))

    @rule("lookupdate", [T("X", "name")], [], "lkp[X] . upd[X] ~~ id(V[X])")
    def _(c, b, p):
        _arity(c, p, 0)
        x = b["X"]
        vx = c.types(Lookup(x))[1]
        return c.eq(WEAK, Comp(Lookup(x), Update(x)), Id(vx))

    @rule("lookupdate-ne", [T("X", "name"), T("Y", "name")], [],
          "lkp[Y] . upd[X] ~~ lkp[Y] . final(V[X])", "X != Y")
    def _(c, b, p):
        _arity(c, p, 0)
        x, y = b["X"], b["Y"]
        if x == y:
            c.fail("locations must differ")
        vx = c.types(Update(x))[0]
        return c.eq(WEAK, Comp(Lookup(y), Update(x)), Comp(Lookup(y), Final(vx)))

    @rule("local-global", [T("f", "term", RW), T("g", "term", RW)],
          ["lkp[X] . f ~~ lkp[X] . g for every location X"], "f == g")
    def _(c, b, p):
        f, g = b["f"], b["g"]
        s, t = c.types(f)
        if t != Unit:
            c.fail("f and g must target 1")
        locs = [n for n, _ in c.sig.locations]
        _arity(c, p, len(locs))
        for i, x in enumerate(locs):
            _expect(c, p, i, Equation(WEAK, Comp(Lookup(x), f), Comp(Lookup(x), g)))
        return c.eq(STRONG, f, g)


def _exc_rules(rule, T):
    lr = {"l": (RO, RW, WEAK, STRONG, LCopair), "r": (RW, RO, STRONG, WEAK, RCopair)}
    for side, (b1, b2, k1, k2, ctor) in lr.items():
        params = [T("f1", "term", b1), T("f2", "term", b2)]

        def parts(c, b, b1=b1, b2=b2):
            f1, f2 = b["f1"], b["f2"]
            if c.dec(f1) > b1 or c.dec(f2) > b2:
                c.fail(f"components must have decorations <= {b1} and <= {b2}")
            s1, t1 = c.types(f1)
            s2, t2 = c.types(f2)
            if t1 != t2:
                c.fail("copair components have different targets")
            return f1, f2, In1(s1, s2), In2(s1, s2)

        @rule(f"{side}-copair", params, [], f"{side}copair(f1, f2) @ max")
        def _(c, b, p, parts=parts, ctor=ctor):
            _arity(c, p, 0)
            f1, f2, _, _ = parts(c, b)
            return c.tj(ctor(f1, f2))

        for i, kind in ((1, k1), (2, k2)):
            @rule(f"{side}-copair-eq{i}", params, [],
                  f"{side}copair(f1, f2) . in{i} {'==' if kind == STRONG else '~~'} f{i}")
            def _(c, b, p, parts=parts, ctor=ctor, i=i, kind=kind):
                _arity(c, p, 0)
                f1, f2, in1, in2 = parts(c, b)
                inj = (in1, in2)[i - 1]
                return c.eq(kind, Comp(ctor(f1, f2), inj), (f1, f2)[i - 1])

        @rule(f"{side}-copair-u", params + [T("g", "term", RW)],
              ["g . in1 = f1", "g . in2 = f2"], f"g == {side}copair(f1, f2)")
        def _(c, b, p, parts=parts, ctor=ctor, k1=k1, k2=k2):
            _arity(c, p, 2)
            f1, f2, in1, in2 = parts(c, b)
            g = b["g"]
            c.dec(g)
            _expect(c, p, 0, Equation(k1, Comp(g, in1), f1))
            _expect(c, p, 1, Equation(k2, Comp(g, in2), f2))
            return c.eq(STRONG, g, ctor(f1, f2))

    @rule("effect", [T("f", "term", RW), T("g", "term", RW)],
          ["f ~~ g", "f . initial(A) == g . initial(A)"], "f == g")
    def _(c, b, p):
        _arity(c, p, 2)
        f, g = b["f"], b["g"]
        src = c.types(f)[0]
        _expect(c, p, 0, Equation(WEAK, f, g))
        _expect(c, p, 1, Equation(STRONG, Comp(f, Initial(src)), Comp(g, Initial(src))))
        return c.eq(STRONG, f, g)

    @rule("tag", [T("T", "name")], [], "tag[T] : V[T] -> 0 @ 1")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Tag(b["T"]))

    @rule("untag", [T("T", "name")], [], "untag[T] : 0 -> V[T] @ 2")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Untag(b["T"]))

    @rule("untag-tag", [T("T", "name")], [], "untag[T] . tag[T] ~~ id(V[T])")
    def _(c, b, p):
        _arity(c, p, 0)
        t = b["T"]
        vt = c.types(Tag(t))[0]
        return c.eq(WEAK, Comp(Untag(t), Tag(t)), Id(vt))

    @rule("untag-tag-ne", [T("T", "name"), T("R", "name")], [],
          "untag[T] . tag[R] ~~ initial(V[T]) . tag[R]", "T != R")
    def _(c, b, p):
        _arity(c, p, 0)
        t, r = b["T"], b["R"]
        if t == r:
            c.fail("exception names must differ")
        vt = c.types(Untag(t))[1]
        return c.eq(WEAK, Comp(Untag(t), Tag(r)), Comp(Initial(vt), Tag(r)))

    @rule("local-global", [T("f", "term", RW), T("g", "term", RW)],
          ["f . tag[T] ~~ g . tag[T] for every exception name T"], "f == g")
    def _(c, b, p):
        f, g = b["f"], b["g"]
        s, t = c.types(f)
        if s != Empty:
            c.fail("f and g must source 0")
        names = [n for n, _ in c.sig.exceptions]
        _arity(c, p, len(names))
        for i, n in enumerate(names):
            _expect(c, p, i, Equation(WEAK, Comp(f, Tag(n)), Comp(g, Tag(n))))
        return c.eq(STRONG, f, g)

    @rule("downcast", [T("f", "term", RW)], [], "down(f) @ 1")
    def _(c, b, p):
        _arity(c, p, 0)
        return c.tj(Downcast(b["f"]))

    @rule("downcast-weak", [T("f", "term", RW)], [], "f ~~ down(f)")
    def _(c, b, p):
        _arity(c, p, 0)
        f = b["f"]
        return c.eq(WEAK, f, Downcast(f))

    @rule("downcast-eq", [], ["f ~~ g"], "down(f) == down(g)")
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        if e.kind != WEAK:
            c.fail("premise must be a weak equation")
        return c.eq(STRONG, Downcast(e.lhs), Downcast(e.rhs))

    @rule("downcast-reflect", [], ["down(f) == down(g)"], "f ~~ g")
    def _(c, b, p):
        _arity(c, p, 1)
        e = _premise_eq(c, p, 0)
        if e.kind != STRONG or not (isinstance(e.lhs, Downcast)
                                    and isinstance(e.rhs, Downcast)):
            c.fail("premise must be a strong equation between downcasts")
        return c.eq(WEAK, e.lhs.f, e.rhs.f)


_CATALOGUES = {}


def catalogue(theory):
    if isinstance(theory, str):
        theory = Theory.parse(theory)
    if theory not in _CATALOGUES:
        _CATALOGUES[theory] = _rules_for(theory)
    return _CATALOGUES[theory]


def rule_catalogue(theory):
    """The decorated rule schemas of ``theory`` in a stable order."""
    return list(catalogue(theory).values())


# ---------------------------------------------------------------- checking

def apply_rule(rule, bindings, premises, sig, theory, hypotheses=None):
    """Conclusion of ``rule`` under ``bindings`` and ``premises``.

    Raises :class:`KernelError` when the instance is not legal.
    """
    if isinstance(theory, str):
        theory = Theory.parse(theory)
    if isinstance(rule, str):
        try:
            rule = catalogue(theory)[rule]
        except KeyError:
            raise KernelError(rule, f"unknown rule in {theory}") from None
    ctx = _Ctx(sig, theory, dict(hypotheses or {}), rule.name)
    for prm in rule.params:
        if prm.name not in bindings:
            ctx.fail(f"missing binding for {prm.name}")
        v = bindings[prm.name]
        if prm.sort == "term":
            ctx.types(v)
            if prm.bound is not None and ctx.dec(v) > prm.bound:
                ctx.fail(f"{prm.name} = {print_term(v)} has decoration "
                         f"{ctx.dec(v)}, above the bound {prm.bound}")
        elif prm.sort == "type":
            try:
                sig.resolve(v)
            except DecorError as exc:
                ctx.fail(str(exc))
    extra = set(bindings) - {p.name for p in rule.params}
    if extra:
        ctx.fail(f"unexpected binding(s) {sorted(extra)}")
    return rule.apply(ctx, bindings, list(premises))


def check_step(d, i, sig, concluded=None):
    step = d.steps[i]
    concluded = concluded if concluded is not None else [s.conclusion for s in d.steps]
    for j in step.premises:
        if not 0 <= j < i:
            raise KernelError(step.rule, f"premise {j + 1} does not precede step {i + 1}")
    got = apply_rule(step.rule, step.bindings, [concluded[j] for j in step.premises],
                     sig, d.theory, dict(d.hypotheses))
    if got != step.conclusion:
        raise KernelError(step.rule, f"conclusion mismatch: rule yields {got}, "
                                     f"step states {step.conclusion}")
    return got


def check_derivation(d, sig):
    """Replay every step of ``d``; report the first failure."""
    for name, e in d.hypotheses:
        try:
            check_equation(e, sig)
        except DecorError as exc:
            return CheckReport(False, 0, "hyp", f"hypothesis {name}: {exc}")
    concluded = []
    for i, step in enumerate(d.steps):
        try:
            for j in step.premises:
                if not 0 <= j < i:
                    raise KernelError(step.rule,
                                      f"premise {j + 1} does not precede step {i + 1}")
            got = apply_rule(step.rule, step.bindings,
                             [concluded[j] for j in step.premises],
                             sig, d.theory, dict(d.hypotheses))
            if got != step.conclusion:
                raise KernelError(step.rule, f"conclusion mismatch: rule yields "
                                             f"{got}, step states {step.conclusion}")
            if isinstance(got, Equation):
                check_equation(got, sig)
        except DecorError as exc:
            msg = str(exc)
            prefix = f"{step.rule}: "
            if msg.startswith(prefix):
                msg = msg[len(prefix):]
            return CheckReport(False, i + 1, step.rule, msg)
        concluded.append(got)
    return CheckReport(True)


# ---------------------------------------------------------------- file format

def print_derivation(d):
    from .syntax import print_type as pt
    lines = [f"theory {d.theory.value};"]
    for name, e in d.hypotheses:
        lines.append(f"assume {name} : {e};")
    cat = catalogue(d.theory)
    for i, s in enumerate(d.steps):
        rule = cat.get(s.rule)
        parts = []
        for k, v in s.bindings.items():
            sort = rule.param(k).sort if rule is not None and _has(rule, k) else None
            if sort == "type":
                parts.append(f"{k} = {pt(v)}")
            elif sort == "name":
                parts.append(f"{k} = {v}")
            else:
                parts.append(f"{k} = {print_term(v)}")
        binds = "{ " + ", ".join(parts) + " }" if parts else "{ }"
        prem = ", ".join(str(j + 1) for j in s.premises)
        lines.append(f"{i + 1}: {s.rule} {binds} from [{prem}] |- {s.conclusion};")
    return "\n".join(lines) + "\n"


def _has(rule, k):
    return any(p.name == k for p in rule.params)


def parse_derivation(text, sig):
    """Parse the ``.drv`` format; raises :class:`~decor.parsing.ParseError`.

    The ``theory NAME;`` header is optional and defaults to L_st, so an
    empty file is the empty derivation.
    """
    from .parsing import Parser
    p = Parser(text, sig)
    theory = Theory.ST
    if p.at("theory"):
        p.expect("theory")
        tok = p.tok
        try:
            theory = Theory.parse(p.name())
        except DecorError as exc:
            raise p.error(str(exc), tok) from None
        p.expect(";")
    d = Derivation(theory)
    cat = catalogue(theory)
    while p.at("assume"):
        p.expect("assume")
        name = p.name()
        p.expect(":")
        d.hypotheses.append((name, p.equation()))
        p.expect(";")
    expected = 1
    while p.tok[0] != "eof":
        tok = p.tok
        n = p.integer()
        if n != expected:
            raise p.error(f"expected step number {expected}", tok)
        expected += 1
        p.expect(":")
        rname = p.name()
        rule = cat.get(rname) or _foreign_rule(rname)
        p.expect("{")
        bindings = {}
        while not p.at("}"):
            k = p.name()
            p.expect("=")
            sort = rule.param(k).sort if rule is not None and _has(rule, k) else "term"
            if sort == "type":
                bindings[k] = p.type()
            elif sort == "name":
                bindings[k] = p.name()
            else:
                bindings[k] = p.term()
            if not p.accept(","):
                break
        p.expect("}")
        if p.name() != "from":
            raise p.error("expected 'from'")
        p.expect("[")
        prem = []
        while not p.at("]"):
            prem.append(p.integer() - 1)
            if not p.accept(","):
                break
        p.expect("]")
        p.expect("|-")
        conclusion = _judgment(p)
        p.expect(";")
        d.steps.append(Step(rname, bindings, tuple(prem), conclusion))
    return d


def _foreign_rule(name):
    """The schema of a rule from another theory, used only to parse its
    bindings; the checker then rejects the step."""
    for th in (Theory.ST, Theory.EXC):
        rule = catalogue(th).get(name)
        if rule is not None:
            return rule
    return None


def _judgment(p):
    from .syntax import Equation as Eq
    lhs = p.term()
    if p.accept(":"):
        a = p.type()
        p.expect("->")
        b = p.type()
        p.expect("@")
        return TermJudgment(lhs, a, b, p.integer())
    if p.accept("=="):
        return Eq(STRONG, lhs, p.term())
    if p.accept("~~"):
        return Eq(WEAK, lhs, p.term())
    raise p.error("expected ':', '==' or '~~'")
