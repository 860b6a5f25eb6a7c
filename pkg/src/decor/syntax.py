"""Object language: types, terms, equations, signatures, typing and decorations.

Terms are morphisms with a single source and a single target type.  Every term
carries an intrinsic *minimal decoration*: 0 for pure terms, 1 for accessors
(state) or propagators (exceptions), 2 for modifiers or catchers.  Upcasts are
implicit, so a rule that asks for a term of decoration ``d`` accepts any term
whose minimal decoration is at most ``d``.
"""

from __future__ import annotations

import enum
import functools
import weakref
from dataclasses import dataclass, field

PURE, RO, RW = 0, 1, 2

STRONG = "strong"
WEAK = "weak"


class DecorError(Exception):
    """Base class of every error raised by this package."""


class TypeMismatch(DecorError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(self.path) or "<root>"
        super().__init__(f"{message} (at {where})")


class DecorationError(DecorError):
    pass


class SignatureError(DecorError):
    pass


class Theory(enum.Enum):
    COM = "L_com"
    MON = "L_mon"
    ST = "L_st"
    EXC = "L_exc"

    @property
    def comonadic(self):
        return self in (Theory.COM, Theory.ST)

    @property
    def base(self):
        return Theory.COM if self.comonadic else Theory.MON

    @classmethod
    def parse(cls, text):
        text = text.strip()
        for th in cls:
            if text in (th.value, th.value[2:], th.name.lower()):
                return th
        raise DecorError(f"unknown theory {text!r}")

    def __str__(self):
        return self.value


class _Node:
    """Immutable AST node with structural equality and a cached hash.

    Nodes are hash-consed: constructing a node equal to a live one returns
    the live one, so equality tests on shared subterms are identity tests.
    """

    __slots__ = ()
    _interned = True

    def __new__(cls, *args, **kwargs):
        if not cls._interned:
            return object.__new__(cls)
        names = _field_names(cls)
        values = args + tuple(kwargs.get(n, _defaults(cls)[n]) for n in names[len(args):])
        key = (cls,) + values
        try:
            node = _INTERN.get(key)
        except TypeError:          # unhashable field value
            return object.__new__(cls)
        if node is None:
            node = object.__new__(cls)
            _INTERN[key] = node
        return node

    def _key(self):
        d = self.__dict__
        return tuple(d[n] for n in self.__dataclass_fields__)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_h", h)
            return h


_INTERN = weakref.WeakValueDictionary()


@functools.cache
def _field_names(cls):
    return tuple(n for n, f in cls.__dataclass_fields__.items() if f.init)


@functools.cache
def _defaults(cls):
    return {n: f.default for n, f in cls.__dataclass_fields__.items()}


# ---------------------------------------------------------------- types

@dataclass(frozen=True, eq=False)
class Base(_Node):
    name: str

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True, eq=False)
class UnitT(_Node):
    def __str__(self):
        return "1"


@dataclass(frozen=True, eq=False)
class EmptyT(_Node):
    def __str__(self):
        return "0"


@dataclass(frozen=True, eq=False)
class Prod(_Node):
    left: object
    right: object

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True, eq=False)
class Coprod(_Node):
    left: object
    right: object

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True, eq=False)
class Val(_Node):
    """Value type of a location or an exception name.

    The parser resolves ``V[X]`` to the declared type directly, so this node
    only shows up in programmatically built terms; typing resolves it.
    """

    name: str

    def __str__(self):
        return f"V[{self.name}]"


Unit = UnitT()
Empty = EmptyT()


def print_type(t):
    match t:
        case Base(name):
            return name
        case UnitT():
            return "1"
        case EmptyT():
            return "0"
        case Val(name):
            return f"V[{name}]"
        case Prod(l, r):
            ls = print_type(l)
            rs = print_type(r)
            if isinstance(l, Coprod):
                ls = f"({ls})"
            if isinstance(r, (Prod, Coprod)):
                rs = f"({rs})"
            return f"{ls} * {rs}"
        case Coprod(l, r):
            ls = print_type(l)
            rs = print_type(r)
            if isinstance(r, Coprod):
                rs = f"({rs})"
            return f"{ls} + {rs}"
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------- terms

class Term(_Node):
    __slots__ = ()

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, eq=False)
class Id(Term):
    type: object


@dataclass(frozen=True, eq=False)
class Comp(Term):
    """``Comp(g, f)`` is g after f."""

    g: Term
    f: Term


@dataclass(frozen=True, eq=False)
class Pair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class LPair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class RPair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class Proj1(Term):
    t1: object
    t2: object


@dataclass(frozen=True, eq=False)
class Proj2(Term):
    t1: object
    t2: object


@dataclass(frozen=True, eq=False)
class Final(Term):
    type: object


@dataclass(frozen=True, eq=False)
class Copair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class LCopair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class RCopair(Term):
    f1: Term
    f2: Term


@dataclass(frozen=True, eq=False)
class In1(Term):
    t1: object
    t2: object


@dataclass(frozen=True, eq=False)
class In2(Term):
    t1: object
    t2: object


@dataclass(frozen=True, eq=False)
class Initial(Term):
    type: object


@dataclass(frozen=True, eq=False)
class Sym(Term):
    name: str


@dataclass(frozen=True, eq=False)
class Lookup(Term):
    loc: str


@dataclass(frozen=True, eq=False)
class Update(Term):
    loc: str


@dataclass(frozen=True, eq=False)
class Tag(Term):
    exn: str


@dataclass(frozen=True, eq=False)
class Untag(Term):
    exn: str


@dataclass(frozen=True, eq=False)
class Downcast(Term):
    f: Term


_PAIRS = {Pair: "pair", LPair: "lpair", RPair: "rpair",
          Copair: "copair", LCopair: "lcopair", RCopair: "rcopair"}
_TYPED2 = {Proj1: "pr1", Proj2: "pr2", In1: "in1", In2: "in2"}
_NAMED = {Lookup: "lkp", Update: "upd", Tag: "tag", Untag: "untag"}


def print_term(t):
    match t:
        case Comp(g, f):
            gs = print_term(g)
            if isinstance(g, Comp):
                gs = f"({gs})"
            return f"{gs} . {print_term(f)}"
        case Id(ty):
            return f"id({print_type(ty)})"
        case Final(ty):
            return f"final({print_type(ty)})"
        case Initial(ty):
            return f"initial({print_type(ty)})"
        case Sym(name):
            return name
        case Downcast(f):
            return f"down({print_term(f)})"
    kind = type(t)
    if kind in _PAIRS:
        return f"{_PAIRS[kind]}({print_term(t.f1)}, {print_term(t.f2)})"
    if kind in _TYPED2:
        return f"{_TYPED2[kind]}({print_type(t.t1)}, {print_type(t.t2)})"
    if kind in _NAMED:
        name = t.loc if hasattr(t, "loc") else t.exn
        return f"{_NAMED[kind]}[{name}]"
    raise TypeError(f"not a term: {t!r}")


def children(t):
    match t:
        case Comp(g, f):
            return (g, f)
        case Downcast(f):
            return (f,)
    if type(t) in _PAIRS:
        return (t.f1, t.f2)
    return ()


def subterms(t):
    yield t
    for c in children(t):
        yield from subterms(c)


# ---------------------------------------------------------------- equations

@dataclass(frozen=True, eq=False)
class Equation(_Node):
    kind: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.kind not in (STRONG, WEAK):
            raise DecorError(f"bad equation kind {self.kind!r}")

    @property
    def strong(self):
        return self.kind == STRONG

    def swap(self):
        return Equation(self.kind, self.rhs, self.lhs)

    def __str__(self):
        op = "==" if self.strong else "~~"
        return f"{print_term(self.lhs)} {op} {print_term(self.rhs)}"


def strong(lhs, rhs):
    return Equation(STRONG, lhs, rhs)


def weak(lhs, rhs):
    return Equation(WEAK, lhs, rhs)


# ---------------------------------------------------------------- signatures

@dataclass(frozen=True, eq=False)
class Signature(_Node):
    """Declarations available to terms: base types, pure symbols, locations,
    exception names, pure axioms and inhabitants.

    ``inhabitants`` maps a type to a closed pure term.  On the state side the
    term has type ``1 -> X``; on the exception side it is read as the dual
    co-inhabitant ``X -> 0`` (see :mod:`decor.exc`).
    """

    types: tuple = ()
    symbols: tuple = ()          # (name, source, target)
    locations: tuple = ()        # (name, value type)
    exceptions: tuple = ()       # (name, value type)
    axioms: tuple = ()           # (name, Equation)
    inhabitants: tuple = ()      # (type, term)
    _interned = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def _key(self):
        return (self.types, self.symbols, self.locations, self.exceptions,
                self.axioms, self.inhabitants)

    def __post_init__(self):
        names = set()
        for group in (self.symbols, self.locations, self.exceptions):
            for entry in group:
                if entry[0] in names:
                    raise SignatureError(f"duplicate name {entry[0]!r}")
                names.add(entry[0])
        seen = set()
        for name, _ in self.axioms:
            if name in seen:
                raise SignatureError(f"duplicate axiom name {name!r}")
            seen.add(name)
        if len(set(self.types)) != len(self.types):
            raise SignatureError("duplicate type declaration")
        self._cache["sym"] = {n: (s, t) for n, s, t in self.symbols}
        self._cache["loc"] = dict(self.locations)
        self._cache["exn"] = dict(self.exceptions)
        self._cache["ax"] = dict(self.axioms)
        self._cache["typing"] = {}
        self._cache["dec"] = {}

    def symbol(self, name):
        try:
            return self._cache["sym"][name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    def has_symbol(self, name):
        return name in self._cache["sym"]

    def location(self, name):
        try:
            return self._cache["loc"][name]
        except KeyError:
            raise SignatureError(f"unknown location {name!r}") from None

    def exception(self, name):
        try:
            return self._cache["exn"][name]
        except KeyError:
            raise SignatureError(f"unknown exception name {name!r}") from None

    def value_type(self, name):
        if name in self._cache["loc"]:
            return self._cache["loc"][name]
        if name in self._cache["exn"]:
            return self._cache["exn"][name]
        raise SignatureError(f"V[{name}] names no location or exception")

    def axiom(self, name):
        try:
            return self._cache["ax"][name]
        except KeyError:
            raise SignatureError(f"unknown axiom {name!r}") from None

    def inhabitant(self, ty):
        for t, h in self.inhabitants:
            if t == ty:
                return h
        return None

    def resolve(self, ty):
        """Replace every ``Val`` node by the declared value type."""
        match ty:
            case Val(name):
                return self.resolve(self.value_type(name))
            case Prod(l, r):
                return Prod(self.resolve(l), self.resolve(r))
            case Coprod(l, r):
                return Coprod(self.resolve(l), self.resolve(r))
            case Base(name):
                if name not in self.types:
                    raise SignatureError(f"undeclared type {name!r}")
        return ty

    def __str__(self):
        from .parsing import print_signature
        return print_signature(self)


# ---------------------------------------------------------------- typing

def typecheck(t, sig):
    """Return ``(source, target)`` of ``t``; raise :class:`TypeMismatch`."""
    cache = sig._cache["typing"]
    try:
        return cache[t]
    except KeyError:
        pass
    res = _typecheck(t, sig, ())
    cache[t] = res
    return res


def _typecheck(t, sig, path):
    r = sig.resolve
    match t:
        case Id(ty):
            ty = r(ty)
            return ty, ty
        case Comp(g, f):
            fs, ft = _sub(f, sig, path, "f")
            gs, gt = _sub(g, sig, path, "g")
            if ft != gs:
                raise TypeMismatch(
                    f"cannot compose: {print_term(f)} targets {print_type(ft)}"
                    f" but {print_term(g)} sources {print_type(gs)}", path)
            return fs, gt
        case Pair(f1, f2) | LPair(f1, f2) | RPair(f1, f2):
            s1, t1 = _sub(f1, sig, path, "f1")
            s2, t2 = _sub(f2, sig, path, "f2")
            if s1 != s2:
                raise TypeMismatch(
                    f"pair components have different sources "
                    f"{print_type(s1)} and {print_type(s2)}", path)
            return s1, Prod(t1, t2)
        case Copair(f1, f2) | LCopair(f1, f2) | RCopair(f1, f2):
            s1, t1 = _sub(f1, sig, path, "f1")
            s2, t2 = _sub(f2, sig, path, "f2")
            if t1 != t2:
                raise TypeMismatch(
                    f"copair components have different targets "
                    f"{print_type(t1)} and {print_type(t2)}", path)
            return Coprod(s1, s2), t1
        case Proj1(a, b):
            a, b = r(a), r(b)
            return Prod(a, b), a
        case Proj2(a, b):
            a, b = r(a), r(b)
            return Prod(a, b), b
        case In1(a, b):
            a, b = r(a), r(b)
            return a, Coprod(a, b)
        case In2(a, b):
            a, b = r(a), r(b)
            return b, Coprod(a, b)
        case Final(ty):
            return r(ty), Unit
        case Initial(ty):
            return Empty, r(ty)
        case Sym(name):
            s, tg = sig.symbol(name)
            return s, tg
        case Lookup(x):
            return Unit, r(sig.location(x))
        case Update(x):
            return r(sig.location(x)), Unit
        case Tag(n):
            return r(sig.exception(n)), Empty
        case Untag(n):
            return Empty, r(sig.exception(n))
        case Downcast(f):
            return _sub(f, sig, path, "down")
    raise TypeMismatch(f"not a term: {t!r}", path)


def _sub(t, sig, path, step):
    cache = sig._cache["typing"]
    if t in cache:
        return cache[t]
    res = _typecheck(t, sig, path + (step,))
    cache[t] = res
    return res


def source(t, sig):
    return typecheck(t, sig)[0]


def target(t, sig):
    return typecheck(t, sig)[1]


def check_equation(e, sig):
    """Raise unless both sides of ``e`` are parallel; return (source, target)."""
    ls = typecheck(e.lhs, sig)
    rs = typecheck(e.rhs, sig)
    if ls != rs:
        raise TypeMismatch(
            f"equation sides are not parallel: {print_type(ls[0])} -> "
            f"{print_type(ls[1])} versus {print_type(rs[0])} -> {print_type(rs[1])}")
    return ls


# ---------------------------------------------------------------- decorations

_STATE_ONLY = (LPair, RPair, Lookup, Update)
_EXC_ONLY = (LCopair, RCopair, Tag, Untag, Downcast)


def pair_bound(theory):
    return RO if theory.comonadic else PURE


def copair_bound(theory):
    return {Theory.COM: PURE, Theory.ST: RW}.get(theory, RO)


def decorate(t, theory=None):
    """Minimal decoration of ``t``.

    With a theory, also reject constructors the theory does not provide and
    (co)pairs whose components exceed the bound of the corresponding rule.
    """
    cache = _DEC_CACHE.get(theory)
    if cache is None:
        cache = _DEC_CACHE[theory] = {}
    try:
        return cache[t]
    except KeyError:
        pass
    d = _decorate(t, theory)
    if len(cache) > 500_000:
        cache.clear()
    cache[t] = d
    return d


_DEC_CACHE = {}


def _decorate(t, theory):
    if theory is not None:
        if isinstance(t, _STATE_ONLY) and theory is not Theory.ST:
            raise DecorationError(
                f"{type(t).__name__} is not available in {theory}")
        if isinstance(t, _EXC_ONLY) and theory is not Theory.EXC:
            raise DecorationError(
                f"{type(t).__name__} is not available in {theory}")
    match t:
        case Lookup() | Tag():
            return RO
        case Update() | Untag():
            return RW
        case Downcast(f):
            return min(decorate(f, theory), RO)
        case Comp(g, f):
            return max(decorate(g, theory), decorate(f, theory))
        case Pair(f1, f2):
            d1, d2 = decorate(f1, theory), decorate(f2, theory)
            if theory is not None and max(d1, d2) > pair_bound(theory):
                raise DecorationError(
                    f"pair in {theory} needs components of decoration "
                    f"<= {pair_bound(theory)}")
            return max(d1, d2)
        case Copair(f1, f2):
            d1, d2 = decorate(f1, theory), decorate(f2, theory)
            if theory is not None and max(d1, d2) > copair_bound(theory):
                raise DecorationError(
                    f"copair in {theory} needs components of decoration "
                    f"<= {copair_bound(theory)}")
            return max(d1, d2)
        case LPair(f1, f2) | LCopair(f1, f2):
            d1, d2 = decorate(f1, theory), decorate(f2, theory)
            if theory is not None and d1 > RO:
                raise DecorationError("left (co)pair needs a first component "
                                      "of decoration <= 1")
            return max(d1, d2)
        case RPair(f1, f2) | RCopair(f1, f2):
            d1, d2 = decorate(f1, theory), decorate(f2, theory)
            if theory is not None and d2 > RO:
                raise DecorationError("right (co)pair needs a second component "
                                      "of decoration <= 1")
            return max(d1, d2)
    return PURE


# ---------------------------------------------------------------- chains

def flatten(t):
    """Composition spine of ``t`` with identities erased, leftmost first."""
    match t:
        case Comp(g, f):
            return flatten(g) + flatten(f)
        case Id():
            return []
    return [t]


def build(gens, ty):
    """Right-nested composite of ``gens``; ``Id(ty)`` when empty."""
    if not gens:
        return Id(ty)
    t = gens[-1]
    for g in reversed(gens[:-1]):
        t = Comp(g, t)
    return t


def compose(*terms):
    """``compose(h, g, f)`` is h after g after f, right-nested."""
    t = terms[-1]
    for g in reversed(terms[:-1]):
        t = Comp(g, t)
    return t
