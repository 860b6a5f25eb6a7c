"""Exhaustive term families and semantic fingerprints.

The family used throughout the test suite consists of every well-typed
right-nested composite of at most ``depth`` generators taken from

    final(1), c : 1 -> V, lkp[X], final(V), s : V -> V, upd[X], id(1), id(V)

over the one-location signature of :func:`state_signature`.  Other
bracketings are equal to these by associativity, which the normalizer
handles through :func:`decor.syntax.flatten`.

A *fingerprint* of a term is the concatenation, over a fixed list of
models, of its interpreting function encoded as an integer array.  The weak
fingerprint keeps only what a weak equation compares: the returned value on
the state side, and the results on ordinary inputs on the exception side.
Two terms satisfy a strong (weak) equation in every model of the list
exactly when their strong (weak) fingerprints coincide.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .exc import dualize
from .parsing import parse_signature
from .semantics import STATE, enumerate_models, evaluate
from .syntax import Base, Comp, Final, Id, Lookup, Sym, Unit, Update, typecheck

STATE_SIG = """\
type V;
location X : V;
pure c : 1 -> V;
pure s : V -> V;
inhabit V = c;
"""


def state_signature():
    return parse_signature(STATE_SIG)


def generators(sig):
    """Generators of the family, as ``(term, source, target)``."""
    x, _ = sig.locations[0]
    gens = [Final(Unit), Lookup(x), Update(x), Id(Unit)]
    for name, _, _ in sig.symbols:
        gens.append(Sym(name))
    for ty in sig.types:
        gens += [Final(Base(ty)), Id(Base(ty))]
    return [(g, *typecheck(g, sig)) for g in dict.fromkeys(gens)]


def chains(sig, depth=6):
    """Every well-typed right-nested composite of 1..``depth`` generators."""
    gens = generators(sig)
    level = [(g, a, b) for g, a, b in gens]
    out = list(level)
    for _ in range(depth - 1):
        nxt = []
        for t, a, b in level:
            for g, ga, gb in gens:
                if ga == b:
                    nxt.append((Comp(g, t), a, gb))
        out += nxt
        level = nxt
    return [t for t, _, _ in out]


def typed(terms, sig):
    """Group terms by ``(source, target)``."""
    groups = defaultdict(list)
    for t in terms:
        groups[typecheck(t, sig)].append(t)
    return dict(groups)


class Fingerprints:
    """Integer-array encodings of terms across a fixed list of models.

    Every type gets a global domain: the inputs of its identity in each
    model, model after model.  The fingerprint of ``t : A -> B`` maps each
    index of the domain of ``A`` to the index of the result in the domain of
    ``B``.  Composites are interpreted by composition, so the fingerprint of
    ``g . f`` is ``fp(g)[fp(f)]``; other terms are evaluated directly.
    """

    def __init__(self, sig, models):
        self.sig = sig
        self.models = list(models)
        self._doms = {}
        self._fp = {}

    def domain(self, ty):
        """``(inputs, index, offsets)`` of the global domain of ``ty``."""
        d = self._doms.get(ty)
        if d is None:
            inputs, index, offsets = [], {}, []
            for mi, m in enumerate(self.models):
                offsets.append(len(inputs))
                for x in evaluate(Id(ty), m):
                    index[mi, x] = len(inputs)
                    inputs.append((mi, x))
            d = self._doms[ty] = (inputs, index, offsets)
        return d

    def of(self, t):
        r = self._fp.get(t)
        if r is not None:
            return r
        if isinstance(t, Comp):
            r = self.of(t.g)[self.of(t.f)]
        else:
            a, b = typecheck(t, self.sig)
            inputs, _, _ = self.domain(a)
            _, out_index, _ = self.domain(b)
            tables = [evaluate(t, m) for m in self.models]
            r = np.fromiter((out_index[mi, tables[mi][x]] for mi, x in inputs),
                            dtype=np.int64, count=len(inputs))
        self._fp[t] = r
        return r

    def strong(self, t):
        return self.of(t)

    def weak(self, t):
        a, b = typecheck(t, self.sig)
        return self._weak_view(a, b)(self.of(t))

    def _weak_view(self, a, b):
        key = ("weak", a, b)
        f = self._doms.get(key)
        if f is None:
            if not self.models or self.models[0].kind == STATE:
                outs, _, _ = self.domain(b)
                codes = {}
                value = np.fromiter((codes.setdefault((mi, x[0]), len(codes)) for mi, x in outs),
                                    dtype=np.int64, count=len(outs))
                f = lambda arr: value[arr]
            else:
                ins, _, _ = self.domain(a)
                mask = np.fromiter((x[0] == 0 for _, x in ins), dtype=bool, count=len(ins))
                f = lambda arr: arr[mask]
            self._doms[key] = f
        return f

    def key(self, t, kind="strong"):
        return (self.strong(t) if kind == "strong" else self.weak(t)).tobytes()

    def agree(self, e):
        """Whether ``e`` holds in every model of the list."""
        pick = self.strong if e.strong else self.weak
        return bool(np.array_equal(pick(e.lhs), pick(e.rhs)))

    def matrix(self, terms, kind="strong"):
        """Stacked fingerprints, one row per term."""
        return np.stack([self.strong(t) if kind == "strong" else self.weak(t) for t in terms])


def state_models(sig, max_size=3):
    return list(enumerate_models(sig, max_size, STATE))


def exception_family(depth=6):
    """The mirror image of the state family: signature and terms."""
    ssig = state_signature()
    return dualize(ssig), [dualize(t) for t in chains(ssig, depth)]

