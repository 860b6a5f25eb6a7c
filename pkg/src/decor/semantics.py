"""Finite set models for the state and exception theories.

A state model interprets every term ``f : A -> B`` as a table from
``A x S`` to ``B x S``, where ``S`` is the product of the location carriers
taken in declaration order.  An exception model interprets ``f`` as a table
from ``A + E`` to ``B + E``, ``E`` being the tagged sum of the exception
carriers.  Both read every term at the largest decoration, so strong
equality is plain table equality.

Values: the element of 1 is ``()``, pairs are tuples, and the injections of
a sum are ``(0, a)`` and ``(1, b)``.  In exception tables the same tagging
separates an ordinary value ``(0, a)`` from an exception ``(1, (k, v))``
raised with the ``k``-th exception name.
"""

from __future__ import annotations

import itertools
import os
import random
import re
from dataclasses import dataclass, field

from .syntax import (
    STRONG, WEAK, Base, Comp, Copair, Coprod, DecorError, Downcast, EmptyT, Equation,
    Final, Id, In1, In2, Initial, LCopair, LPair, Lookup, Pair, Prod, Proj1,
    Proj2, RCopair, RPair, Sym, Tag, UnitT, Untag, Update, Val, print_type,
    typecheck,
)

STATE = "state"
EXCEPTION = "exception"

#: Largest number of pure-table combinations tried per carrier assignment.
SAMPLE_CAP = 4096


class ModelError(DecorError):
    pass


class FunctionTable(dict):
    """Extensional graph of an interpreting function."""

    @property
    def rows(self):
        return sorted(self.items(), key=lambda kv: repr(kv[0]))

    def __str__(self):
        return "\n".join(f"{format_value(a)} -> {format_value(b)}" for a, b in self.rows)


@dataclass(eq=False)
class Model:
    kind: str
    sig: object
    carriers: dict                    # base type name -> tuple of elements
    tables: dict                      # pure symbol name -> {input: output}
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in (STATE, EXCEPTION):
            raise ModelError(f"unknown model kind {self.kind!r}")
        if self.kind == STATE:
            for name, elems in self.carriers.items():
                if not elems:
                    raise ModelError(f"state models need nonempty carriers ({name})")

    def decode(self, ty):
        return decode_type(ty, self)

    @property
    def states(self):
        if "states" not in self._cache:
            sets = [self.decode(v) for _, v in self.sig.locations]
            self._cache["states"] = tuple(itertools.product(*sets))
        return self._cache["states"]

    @property
    def exceptions(self):
        if "exceptions" not in self._cache:
            self._cache["exceptions"] = tuple(
                (k, v) for k, (_, ty) in enumerate(self.sig.exceptions)
                for v in self.decode(ty))
        return self._cache["exceptions"]

    def __str__(self):
        return print_model(self)


def decode_type(ty, m):
    """Finite set interpreting ``ty`` in ``m``, as a tuple."""
    match ty:
        case UnitT():
            return ((),)
        case EmptyT():
            return ()
        case Base(name):
            try:
                return tuple(m.carriers[name])
            except KeyError:
                raise ModelError(f"model has no carrier for type {name!r}") from None
        case Val(name):
            return decode_type(m.sig.value_type(name), m)
        case Prod(l, r):
            return tuple(itertools.product(decode_type(l, m), decode_type(r, m)))
        case Coprod(l, r):
            return tuple([(0, a) for a in decode_type(l, m)] +
                         [(1, b) for b in decode_type(r, m)])
    raise ModelError(f"cannot decode {ty!r}")


# ---------------------------------------------------------------- evaluation

def eval_state(t, m):
    """Table ``A x S -> B x S`` of ``t``."""
    if m.kind != STATE:
        raise ModelError("eval_state needs a state model")
    cache = m._cache.setdefault("eval", {})
    r = cache.get(t)
    if r is None:
        src, _ = typecheck(t, m.sig)
        fn = _state_fn(t, m, cache)
        r = FunctionTable()
        for a in decode_type(src, m):
            for s in m.states:
                r[(a, s)] = fn(a, s)
        cache[t] = r
    return r


def _state_fn(t, m, cache):
    sig = m.sig

    def sub(f):
        tab = eval_state(f, m)
        return lambda a, s: tab[(a, s)]

    match t:
        case Id() | In1() | In2() | Proj1() | Proj2() | Final() | Sym():
            p = _pure_fn(t, m)
            return lambda a, s: (p(a), s)
        case Initial():
            return lambda a, s: _absurd()
        case Comp(g, f):
            fg, ff = sub(g), sub(f)
            return lambda a, s: fg(*ff(a, s))
        case Lookup(x):
            i = _loc_index(sig, x)
            return lambda a, s: (s[i], s)
        case Update(x):
            i = _loc_index(sig, x)
            return lambda a, s: ((), s[:i] + (a,) + s[i + 1:])
        case Pair(f1, f2) | LPair(f1, f2):
            g1, g2 = sub(f1), sub(f2)

            def lp(a, s):
                b1, _ = g1(a, s)
                b2, s2 = g2(a, s)
                return (b1, b2), s2
            return lp
        case RPair(f1, f2):
            g1, g2 = sub(f1), sub(f2)

            def rp(a, s):
                b1, s1 = g1(a, s)
                b2, _ = g2(a, s)
                return (b1, b2), s1
            return rp
        case Copair(f1, f2):
            g1, g2 = sub(f1), sub(f2)
            return lambda a, s: (g1 if a[0] == 0 else g2)(a[1], s)
    raise ModelError(f"{type(t).__name__} has no state interpretation")


def _absurd():
    raise ModelError("no element of the empty type")


def _loc_index(sig, x):
    for i, (n, _) in enumerate(sig.locations):
        if n == x:
            return i
    raise ModelError(f"unknown location {x!r}")


def _exn_index(sig, x):
    for i, (n, _) in enumerate(sig.exceptions):
        if n == x:
            return i
    raise ModelError(f"unknown exception name {x!r}")


def _pure_fn(t, m):
    match t:
        case Id():
            return lambda a: a
        case Final():
            return lambda a: ()
        case Proj1():
            return lambda a: a[0]
        case Proj2():
            return lambda a: a[1]
        case In1():
            return lambda a: (0, a)
        case In2():
            return lambda a: (1, a)
        case Sym(name):
            try:
                tab = m.tables[name]
            except KeyError:
                raise ModelError(f"model has no table for {name!r}") from None
            return lambda a: tab[a]
    raise ModelError(f"{type(t).__name__} is not a pure generator")


def eval_exc(t, m):
    """Table ``A + E -> B + E`` of ``t``."""
    if m.kind != EXCEPTION:
        raise ModelError("eval_exc needs an exception model")
    cache = m._cache.setdefault("eval", {})
    r = cache.get(t)
    if r is None:
        src, _ = typecheck(t, m.sig)
        fn = _exc_fn(t, m)
        r = FunctionTable()
        for a in decode_type(src, m):
            r[(0, a)] = fn((0, a))
        for e in m.exceptions:
            r[(1, e)] = fn((1, e))
        cache[t] = r
    return r


def _exc_fn(t, m):
    sig = m.sig

    def sub(f):
        return eval_exc(f, m).__getitem__

    def propagate(ordinary):
        return lambda x: ordinary(x[1]) if x[0] == 0 else x

    match t:
        case Id() | In1() | In2() | Proj1() | Proj2() | Final() | Sym():
            p = _pure_fn(t, m)
            return propagate(lambda a: (0, p(a)))
        case Initial():
            return propagate(lambda a: _absurd())
        case Comp(g, f):
            fg, ff = sub(g), sub(f)
            return lambda x: fg(ff(x))
        case Tag(n):
            k = _exn_index(sig, n)
            return propagate(lambda v: (1, (k, v)))
        case Untag(n):
            k = _exn_index(sig, n)
            return lambda x: (0, x[1][1]) if x[0] == 1 and x[1][0] == k else x
        case Downcast(f):
            g = sub(f)
            return propagate(lambda a: g((0, a)))
        case Pair(f1, f2):
            g1, g2 = sub(f1), sub(f2)

            def pair(a):
                r1, r2 = g1((0, a)), g2((0, a))
                if r1[0] == 1:
                    return r1
                if r2[0] == 1:
                    return r2
                return (0, (r1[1], r2[1]))
            return propagate(pair)
        case Copair(f1, f2):
            g1, g2 = sub(f1), sub(f2)
            return propagate(lambda a: (g1 if a[0] == 0 else g2)((0, a[1])))
        case LCopair(f1, f2):
            g1, g2 = sub(f1), sub(f2)
            return lambda x: (g2(x) if x[0] == 1 else
                              g1((0, x[1][1])) if x[1][0] == 0 else g2((0, x[1][1])))
        case RCopair(f1, f2):
            g1, g2 = sub(f1), sub(f2)
            return lambda x: (g1(x) if x[0] == 1 else
                              g1((0, x[1][1])) if x[1][0] == 0 else g2((0, x[1][1])))
    raise ModelError(f"{type(t).__name__} has no exception interpretation")


def evaluate(t, m):
    return eval_state(t, m) if m.kind == STATE else eval_exc(t, m)


# ---------------------------------------------------------------- equations

def _agree(e, m, x, y):
    # weak equations compare returned values on the state side; on the
    # exception side they compare everything, but only ordinary inputs reach here
    if e.kind == WEAK and m.kind == STATE:
        return x[0] == y[0]
    return x == y


def counterexample(e, m, tables=None):
    """An input on which the two sides of ``e`` differ in ``m``, or None."""
    t1, t2 = tables if tables is not None else (evaluate(e.lhs, m), evaluate(e.rhs, m))
    for k, x in t1.items():
        if m.kind == EXCEPTION and e.kind != STRONG and k[0] == 1:
            continue
        if not _agree(e, m, x, t2[k]):
            return k
    return None


def holds(e, m):
    return counterexample(e, m) is None


# ---------------------------------------------------------------- enumeration

def _seed():
    try:
        return int(os.environ.get("DECOR_SEED", "0"))
    except ValueError:
        return 0


def enumerate_models(sig, max_size, kind=STATE, sizes=None, min_size=1, cap=SAMPLE_CAP):
    """All models with carriers of size ``min_size..max_size`` satisfying the
    pure axioms of ``sig``.

    ``sizes`` pins the size of some carriers.  When the pure tables for one
    carrier assignment have more than ``cap`` combinations, ``cap`` of them
    are drawn with a generator seeded from ``DECOR_SEED``.
    """
    if max_size < 1:
        raise ModelError("max_size must be at least 1")
    sizes = dict(sizes or {})
    names = list(sig.types)
    ranges = [[sizes[n]] if n in sizes else range(min_size, max_size + 1) for n in names]
    rng = random.Random(_seed())
    for combo in itertools.product(*ranges):
        carriers = {n: tuple(range(k)) for n, k in zip(names, combo)}
        base = Model(kind, sig, carriers, {})
        spaces = []
        for name, a, b in sig.symbols:
            dom, cod = decode_type(sig.resolve(a), base), decode_type(sig.resolve(b), base)
            spaces.append((name, dom, cod))
        total = 1
        for _, dom, cod in spaces:
            total *= len(cod) ** len(dom)
        if total == 0:
            continue
        if total <= cap:
            choices = itertools.product(*[
                itertools.product(cod, repeat=len(dom)) for _, dom, cod in spaces])
        else:
            choices = (tuple(tuple(rng.choice(cod) for _ in dom) for _, dom, cod in spaces)
                       for _ in range(cap))
        for choice in choices:
            tables = {name: dict(zip(dom, outs)) for (name, dom, _), outs in zip(spaces, choice)}
            m = Model(kind, sig, carriers, tables)
            if all(holds(e, m) for _, e in sig.axioms):
                yield m


# ---------------------------------------------------------------- model files

def format_value(v):
    """Text of a value: ``*`` for the element of 1, tuples in parentheses."""
    if v == ():
        return "*"
    if isinstance(v, tuple):
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    return str(v)


def print_model(m):
    lines = [f"model {m.kind};"]
    for name in m.sig.types:
        if name in m.carriers:
            lines.append(f"carrier {name} = {' '.join(map(str, m.carriers[name]))};")
    for name, _, _ in m.sig.symbols:
        if name in m.tables:
            rows = "; ".join(f"{format_value(a)} -> {format_value(b)}" for a, b in
                             sorted(m.tables[name].items(), key=lambda kv: repr(kv[0])))
            lines.append(f"table {name} {{ {rows}; }}")
    return "\n".join(lines) + "\n"


_VTOK = re.compile(r"\s*(?:(--[^\n]*)|([(),;{}=*]|->)|([A-Za-z0-9_']+))")


def _vtokens(text):
    out, pos = [], 0
    while pos < len(text):
        mt = _VTOK.match(text, pos)
        if mt is None or mt.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ModelError(f"unexpected character {text[pos]!r} in model file")
        pos = mt.end()
        if mt.group(2):
            out.append(mt.group(2))
        elif mt.group(3):
            w = mt.group(3)
            out.append(int(w) if w.isdigit() else w)
    return out


def parse_model(text, sig):
    """Parse the model format written by :func:`print_model`."""
    toks = _vtokens(text)
    i = 0

    def expect(x):
        nonlocal i
        if i >= len(toks) or toks[i] != x:
            raise ModelError(f"expected {x!r} in model file")
        i += 1

    def value():
        nonlocal i
        tok = toks[i]
        if tok == "*":
            i += 1
            return ()
        if tok == "(":
            i += 1
            items = [value()]
            while toks[i] == ",":
                i += 1
                items.append(value())
            expect(")")
            return tuple(items)
        i += 1
        return tok

    expect("model")
    kind = toks[i]
    i += 1
    expect(";")
    carriers, tables = {}, {}
    while i < len(toks):
        kw = toks[i]
        i += 1
        if kw == "carrier":
            name = toks[i]
            i += 2
            elems = []
            while toks[i] != ";":
                elems.append(toks[i])
                i += 1
            i += 1
            carriers[name] = tuple(elems)
        elif kw == "table":
            name = toks[i]
            i += 1
            expect("{")
            tab = {}
            while toks[i] != "}":
                a = value()
                expect("->")
                tab[a] = value()
                if toks[i] == ";":
                    i += 1
            expect("}")
            tables[name] = tab
        else:
            raise ModelError(f"unknown model declaration {kw!r}")
    m = Model(kind, sig, carriers, tables)
    for name, a, b in sig.symbols:
        if name not in tables:
            raise ModelError(f"model has no table for {name!r}")
        dom = decode_type(sig.resolve(a), m)
        cod = set(decode_type(sig.resolve(b), m))
        if set(tables[name]) != set(dom) or not set(tables[name].values()) <= cod:
            raise ModelError(f"table {name!r} is not a total function "
                             f"{print_type(a)} -> {print_type(b)}")
    return m
