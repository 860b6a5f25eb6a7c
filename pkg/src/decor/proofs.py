"""Building kernel derivations programmatically.

:class:`ProofBuilder` appends steps to a :class:`~decor.kernel.Derivation`,
computing each conclusion with :func:`~decor.kernel.apply_rule` so a builder
can never record a step the kernel would reject.  Steps are shared: asking
twice for the same conclusion returns the first index.

:class:`Chain` tracks a term as its composition spine and rewrites segments
of it, turning a lemma about the segment into a proof about the whole term
with the necessary substitution, replacement, associativity and identity
steps.  A chain created without a builder performs the same rewrites on the
spine only; normal forms are then computed without producing proofs.
"""

from __future__ import annotations

from .kernel import Derivation, Step, apply_rule
from .syntax import (
    STRONG, WEAK, Comp, DecorError, Equation, Final, Id, Unit, build,
    decorate, flatten, typecheck,
)


class ProofError(DecorError):
    """A proof step the builder was asked for is not available."""


class ProofBuilder:
    def __init__(self, sig, theory, hypotheses=()):
        self.sig = sig
        self.theory = theory
        self.d = Derivation(theory, [], list(hypotheses))
        self._hyps = dict(hypotheses)
        self._index = {}
        self._norm = {}

    # -- raw steps
    def step(self, rule, bindings=None, premises=()):
        bindings = bindings or {}
        concl = apply_rule(rule, bindings, [self.eq(i) for i in premises],
                           self.sig, self.theory, self._hyps)
        if concl in self._index:
            return self._index[concl]
        self.d.steps.append(Step(rule, dict(bindings), tuple(premises), concl))
        i = len(self.d.steps) - 1
        self._index[concl] = i
        return i

    def eq(self, i):
        return self.d.steps[i].conclusion

    def assume(self, name, e):
        if name not in self._hyps:
            self._hyps[name] = e
            self.d.hypotheses.append((name, e))
        return self.step("hyp", {"name": name})

    def types(self, t):
        return typecheck(t, self.sig)

    # -- congruence
    def refl(self, t):
        return self.step("refl", {"f": t})

    def sym(self, i):
        e = self.eq(i)
        if e.lhs == e.rhs:
            return i
        return self.step("sym", {}, (i,))

    def weaken(self, i):
        return i if self.eq(i).kind == WEAK else self.step("strong-to-weak", {}, (i,))

    def strengthen(self, i):
        return i if self.eq(i).kind == STRONG else self.step("weak-to-strong", {}, (i,))

    def trans(self, *idxs):
        """Chain equations; strong links are weakened if any link is weak."""
        idxs = [i for i in idxs if i is not None]
        weak = any(self.eq(i).kind == WEAK for i in idxs)
        if weak:
            idxs = [self.weaken(i) for i in idxs]
        cur = idxs[0]
        for j in idxs[1:]:
            if self.eq(j).lhs == self.eq(j).rhs:
                continue
            if self.eq(cur).lhs == self.eq(cur).rhs:
                cur = j
                continue
            cur = self.step("trans", {}, (cur, j))
        return cur

    def repl(self, g, i):
        return self.step("repl", {"g": g}, (i,))

    def subs(self, f, i):
        return self.step("subs", {"f": f}, (i,))

    # -- categorical
    def assoc(self, f, g, h):
        return self.step("assoc", {"f": f, "g": g, "h": h})

    def id_source(self, f):
        return self.step("id-source", {"f": f})

    def id_target(self, f):
        return self.step("id-target", {"f": f})

    def final_u(self, f):
        return self.step("final-u", {"f": f})

    def axiom(self, name):
        return self.step("axiom", {"name": name})

    def local_global(self, f, g, premises):
        return self.step("local-global", {"f": f, "g": g}, tuple(premises))

    def effect(self, f, g, weak_idx, state_idx):
        return self.step("effect", {"f": f, "g": g}, (weak_idx, state_idx))

    # -- spines
    def norm(self, t):
        """Index of ``t == build(flatten(t))``."""
        if t in self._norm:
            return self._norm[t]
        match t:
            case Comp(g, f):
                gs, fs = flatten(g), flatten(f)
                i1 = self.subs(f, self.norm(g))
                bg = self.eq(i1).rhs.g
                i2 = self.repl(bg, self.norm(f))
                i3 = self._append(gs, fs, self.types(g)[0], self.types(f)[0])
                r = self.trans(i1, i2, i3)
            case _:
                r = self.refl(t)
        self._norm[t] = r
        return r

    def _append(self, gs, fs, mid, src):
        """``build(gs) . build(fs) == build(gs + fs)``."""
        bg, bf = build(gs, mid), build(fs, src)
        if not gs:
            return self.id_target(bf)
        if not fs:
            return self.id_source(bg)
        if len(gs) == 1:
            return self.refl(Comp(bg, bf))
        g1 = gs[0]
        rest = build(gs[1:], mid)
        i1 = self.sym(self.assoc(bf, rest, g1))
        i2 = self.repl(g1, self._append(gs[1:], fs, mid, src))
        return self.trans(i1, i2)

    def bridge(self, t1, t2):
        """``t1 == t2`` for terms with the same spine."""
        if t1 == t2:
            return self.refl(t1)
        if flatten(t1) != flatten(t2):
            raise ProofError("bridge between terms with different spines")
        return self.trans(self.norm(t1), self.sym(self.norm(t2)))

    def derivation(self):
        return self.d


def prune(d, last=None):
    """Copy of ``d`` keeping only the steps that step ``last`` (default: the
    final step) depends on, renumbered, with ``last`` as the final step."""
    if not d.steps:
        return Derivation(d.theory, [], list(d.hypotheses))
    last = len(d.steps) - 1 if last is None else last
    need, todo = set(), [last]
    while todo:
        i = todo.pop()
        if i not in need:
            need.add(i)
            todo.extend(d.steps[i].premises)
    order = sorted(need - {last}) + [last]
    where = {old: new for new, old in enumerate(order)}
    steps = [Step(d.steps[i].rule, dict(d.steps[i].bindings),
                  tuple(where[p] for p in d.steps[i].premises), d.steps[i].conclusion)
             for i in order]
    return Derivation(d.theory, steps, list(d.hypotheses))


class Chain:
    """A term seen as its spine, together with a running proof.

    ``proof`` is the index of ``original = build(gens)`` (``None`` without a
    builder).
    """

    def __init__(self, pb, t, sig):
        self.pb = pb
        self.sig = sig
        self.src, self.tgt = typecheck(t, sig)
        self.gens = flatten(t)
        self.original = t
        self.proof = pb.norm(t) if pb is not None else None

    @property
    def term(self):
        return build(self.gens, self.src)

    def type_at(self, i):
        """Type at cut ``i``: the target of ``gens[i]``, or the source of the
        whole chain at the right end."""
        if i >= len(self.gens):
            return self.src
        return typecheck(self.gens[i], self.sig)[1]

    def segment(self, i, j):
        """``build(gens[i:j])`` with the right identity type for empty cuts."""
        return build(self.gens[i:j], self.type_at(j))

    def find(self, pred, start=0, stop=None):
        stop = len(self.gens) if stop is None else stop
        for k in range(start, stop):
            if pred(self.gens[k]):
                return k
        return None

    def rw(self, i, j, new, lemma=None):
        """Replace ``gens[i:j]`` by ``new``.

        ``lemma`` is a thunk returning the index of an equation whose sides
        have spines ``gens[i:j]`` and ``new``; it is only called with a
        builder.
        """
        new = list(new)
        if self.gens[i:j] == new:
            return
        old = self.gens
        pb = self.pb
        li = lemma() if pb is not None else None
        self.gens = old[:i] + new + old[j:]
        if pb is None:
            return
        e = pb.eq(li)
        if flatten(e.lhs) != old[i:j] or flatten(e.rhs) != new:
            raise ProofError(f"lemma {e} does not match the rewritten segment")
        cur = li
        if j < len(old):
            cur = pb.subs(build(old[j:], self.src), cur)
        if i > 0:
            prefix = build(old[:i], None)
            if pb.eq(cur).kind == WEAK and pb.theory.comonadic and decorate(prefix):
                raise ProofError("weak rewrite under an effectful context")
            cur = pb.repl(prefix, cur)
        before = pb.bridge(build(old, self.src), pb.eq(cur).lhs)
        after = pb.bridge(pb.eq(cur).rhs, build(self.gens, self.src))
        self.proof = pb.trans(self.proof, before, cur, after)

    def close(self, target):
        """Index of ``original = target`` where ``target`` has the current spine."""
        if self.pb is None:
            return None
        return self.pb.trans(self.proof, self.pb.bridge(build(self.gens, self.src), target))
