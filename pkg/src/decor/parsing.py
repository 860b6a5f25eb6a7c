"""Text syntax for types, terms, equations, signatures and derivations.

Grammar (``--`` starts a line comment)::

    signature := (decl ";")*
    decl      := "type" NAME | "pure" NAME ":" type "->" type
               | "location" NAME ":" type | "exception" NAME ":" type
               | "axiom" NAME ":" eq | "inhabit" type "=" term
    type      := NAME | "1" | "0" | type "*" type | type "+" type | "V[" NAME "]"
    term      := atom ("." term)?
    eq        := term ("==" | "~~") term

``*`` binds tighter than ``+``; both associate to the left.  ``.`` associates
to the right and ``g . f`` applies ``f`` first.
"""

from __future__ import annotations

import re

from .syntax import (
    Base, Comp, Copair, Coprod, DecorError, Downcast, Empty, Equation, Final,
    Id, In1, In2, Initial, LCopair, LPair, Lookup, Pair, Prod, Proj1, Proj2,
    RCopair, RPair, STRONG, Signature, Sym, Tag, Unit, Untag, Update, WEAK,
    Val, check_equation, decorate, print_term, print_type, typecheck,
)


class ParseError(DecorError):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<op>->|==|~~|\|-|[()\[\]{},;:.*+=@|])
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*)
""", re.VERBOSE)

KEYWORDS = {
    "id", "pair", "lpair", "rpair", "pr1", "pr2", "final", "copair",
    "lcopair", "rcopair", "in1", "in2", "initial", "lkp", "upd", "tag",
    "untag", "down", "throw", "try", "catch",
}


def tokenize(text):
    out = []
    pos, line, col0 = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append((kind, tok, line, pos - col0 + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            col0 = pos + tok.rfind("\n") + 1
        pos = m.end()
    out.append(("eof", "", line, pos - col0 + 1))
    return out


class Parser:
    def __init__(self, text, sig=None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig if sig is not None else Signature()
        self.new_types = None    # set while parsing declarations

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok[2], tok[3])

    def at(self, text):
        return self.tok[1] == text and self.tok[0] != "eof"

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok[1] or 'end of input'!r}")
        self.i += 1

    def name(self):
        if self.tok[0] != "name":
            raise self.error(f"expected a name, found {self.tok[1] or 'end of input'!r}")
        self.i += 1
        return self.toks[self.i - 1][1]

    def integer(self):
        if self.tok[0] != "num":
            raise self.error("expected a number")
        self.i += 1
        return int(self.toks[self.i - 1][1])

    def done(self):
        if self.tok[0] != "eof":
            raise self.error(f"unexpected {self.tok[1]!r}")

    # -- types
    def type(self):
        t = self.type_prod()
        while self.accept("+"):
            t = Coprod(t, self.type_prod())
        return t

    def type_prod(self):
        t = self.type_atom()
        while self.accept("*"):
            t = Prod(t, self.type_atom())
        return t

    def type_atom(self):
        tok = self.tok
        if self.accept("("):
            t = self.type()
            self.expect(")")
            return t
        if tok[0] == "num":
            n = self.integer()
            if n == 1:
                return Unit
            if n == 0:
                return Empty
            raise self.error("only 0 and 1 are type constants", tok)
        name = self.name()
        if name == "V" and self.at("["):
            self.expect("[")
            loc = self.name()
            self.expect("]")
            try:
                return self.sig.value_type(loc)
            except DecorError as exc:
                raise self.error(str(exc), tok) from None
        if name not in self.sig.types:
            if self.new_types is None:
                raise self.error(f"undeclared type {name!r}", tok)
            self.new_types.append(name)
            self.sig = _extend(self.sig, types=self.sig.types + (name,))
        return Base(name)

    # -- terms
    def term(self):
        t = self.term_atom()
        if self.accept("."):
            return Comp(t, self.term())
        return t

    def term_atom(self):
        tok = self.tok
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        name = self.name()
        if name in ("id", "final", "initial"):
            self.expect("(")
            ty = self.type()
            self.expect(")")
            return {"id": Id, "final": Final, "initial": Initial}[name](ty)
        if name in ("pr1", "pr2", "in1", "in2"):
            self.expect("(")
            a = self.type()
            self.expect(",")
            b = self.type()
            self.expect(")")
            return {"pr1": Proj1, "pr2": Proj2, "in1": In1, "in2": In2}[name](a, b)
        if name in ("pair", "lpair", "rpair", "copair", "lcopair", "rcopair"):
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return {"pair": Pair, "lpair": LPair, "rpair": RPair, "copair": Copair,
                    "lcopair": LCopair, "rcopair": RCopair}[name](a, b)
        if name in ("lkp", "upd", "tag", "untag"):
            self.expect("[")
            n = self.name()
            self.expect("]")
            try:
                if name in ("lkp", "upd"):
                    self.sig.location(n)
                else:
                    self.sig.exception(n)
            except DecorError as exc:
                raise self.error(str(exc), tok) from None
            return {"lkp": Lookup, "upd": Update, "tag": Tag, "untag": Untag}[name](n)
        if name == "down":
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Downcast(t)
        if name == "throw":
            from .exc import throw
            self.expect("(")
            b = self.type()
            self.expect(",")
            n = self.name()
            self.expect(")")
            return throw(b, n, self.sig)
        if name == "try":
            from .exc import HandlerSpec, try_catch
            self.expect("(")
            body = self.term()
            self.expect(")")
            if self.name() != "catch":
                raise self.error("expected 'catch'")
            self.expect("[")
            n = self.name()
            self.expect("]")
            self.expect("(")
            handler = self.term()
            self.expect(")")
            return try_catch(HandlerSpec(body, n, handler), self.sig)[0]
        if name in KEYWORDS or not self.sig.has_symbol(name):
            raise self.error(f"unknown symbol {name!r}", tok)
        return Sym(name)

    def equation(self):
        lhs = self.term()
        if self.accept("=="):
            kind = STRONG
        elif self.accept("~~"):
            kind = WEAK
        else:
            raise self.error("expected '==' or '~~'")
        return Equation(kind, lhs, self.term())


def _extend(sig, **changes):
    fields = dict(types=sig.types, symbols=sig.symbols, locations=sig.locations,
                  exceptions=sig.exceptions, axioms=sig.axioms,
                  inhabitants=sig.inhabitants)
    fields.update(changes)
    return Signature(**fields)


def _typed(parser, fn, tok):
    try:
        return fn()
    except ParseError:
        raise
    except DecorError as exc:
        raise parser.error(str(exc), tok) from None


def parse_type(text, sig=None):
    p = Parser(text, sig)
    t = p.type()
    p.done()
    return t


def parse_term(text, sig):
    """Parse and typecheck a term."""
    p = Parser(text, sig)
    tok = p.tok
    t = p.term()
    p.done()
    _typed(p, lambda: typecheck(t, sig), tok)
    return t


def parse_equation(text, sig):
    p = Parser(text, sig)
    tok = p.tok
    e = p.equation()
    p.done()
    _typed(p, lambda: check_equation(e, sig), tok)
    return e


def parse_signature(text):
    p = Parser(text, Signature())
    while p.tok[0] != "eof":
        _declaration(p)
        p.expect(";")
    return p.sig


def _declaration(p):
    tok = p.tok
    kw = p.name()
    sig = p.sig
    try:
        if kw == "type":
            name = p.name()
            if name in sig.types:
                raise p.error(f"duplicate type {name!r}", tok)
            p.sig = _extend(sig, types=sig.types + (name,))
        elif kw in ("pure", "location", "exception"):
            name = _fresh_name(p)
            p.expect(":")
            p.new_types = []
            a = p.type()
            if kw == "pure":
                p.expect("->")
                b = p.type()
                entry = (name, a, b)
                p.sig = _extend(p.sig, symbols=p.sig.symbols + (entry,))
            elif kw == "location":
                p.sig = _extend(p.sig, locations=p.sig.locations + ((name, a),))
            else:
                p.sig = _extend(p.sig, exceptions=p.sig.exceptions + ((name, a),))
            p.new_types = None
        elif kw == "axiom":
            name = p.name()
            p.expect(":")
            e = p.equation()
            check_equation(e, sig)
            if decorate(e.lhs) or decorate(e.rhs) or not e.strong:
                raise p.error(f"axiom {name!r} must be a strong equation "
                              "between pure terms", tok)
            p.sig = _extend(sig, axioms=sig.axioms + ((name, e),))
        elif kw == "inhabit":
            ty = p.type()
            p.expect("=")
            h = p.term()
            s, t = typecheck(h, sig)
            if decorate(h) != 0:
                raise p.error("an inhabitant must be a pure term", tok)
            ok = (s, t) == (Unit, ty) or (s, t) == (ty, Empty)
            if not ok:
                raise p.error(f"inhabitant of {print_type(ty)} must have type "
                              f"1 -> {print_type(ty)} (or {print_type(ty)} -> 0 "
                              "on the exception side)", tok)
            if sig.inhabitant(ty) is not None:
                raise p.error(f"duplicate inhabitant for {print_type(ty)}", tok)
            p.sig = _extend(sig, inhabitants=sig.inhabitants + ((ty, h),))
        else:
            raise p.error(f"unknown declaration {kw!r}", tok)
    except ParseError:
        raise
    except DecorError as exc:
        raise p.error(str(exc), tok) from None


def _fresh_name(p):
    tok = p.tok
    name = p.name()
    if name in KEYWORDS:
        raise p.error(f"{name!r} is a reserved word", tok)
    return name


def print_signature(sig):
    lines = [f"type {t};" for t in sig.types]
    lines += [f"location {n} : {print_type(t)};" for n, t in sig.locations]
    lines += [f"exception {n} : {print_type(t)};" for n, t in sig.exceptions]
    lines += [f"pure {n} : {print_type(a)} -> {print_type(b)};"
              for n, a, b in sig.symbols]
    lines += [f"axiom {n} : {e};" for n, e in sig.axioms]
    lines += [f"inhabit {print_type(t)} = {print_term(h)};"
              for t, h in sig.inhabitants]
    return "\n".join(lines) + "\n"
