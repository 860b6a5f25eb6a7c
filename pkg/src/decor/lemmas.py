"""Instances of the derived rules of the state theory, as kernel derivations.

Each derived rule is a schema with premises.  The functions below
instantiate it over :data:`LEMMA_SIG`, where schematic pure terms become
pure symbols and premises become named hypotheses (``assume``), and build
the derivation with the same helpers the normalizer uses.  The results are
frozen in ``decor/data`` and replayed by the test suite; ``corpus()``
regenerates them.

Instances (``p, q : W -> V``, ``u, w : V -> W``, ``k : 1 -> W``):

1. ``lkp.upd.p ~~ lkp.upd.q  |-  upd.p == upd.q``
2. ``lkp.upd.p ~~ q  |-  upd.lkp.upd.p == upd.q``
3. ``|-  upd.lkp == id(1)``
4. ``|-  w.lkp.upd.a ~~ w.a`` with the accessor ``a = s.lkp.final(W)``
5. ``|-  k == k.final(V).lkp``
6. ``w.lkp == u.lkp  |-  w == u``
7. ``w.lkp == k  |-  w == k.final(V)``

plus two conversion-coherence derivations: a weak equation between
accessors yields the strong one, and a strong equation between modifiers
yields the weak one.
"""

from __future__ import annotations

from .parsing import parse_signature
from .proofs import ProofBuilder
from .state import StateContext, _finish, cancel, lfl, lookupdate, upd_congruence, upd_lkp
from .syntax import Base, Comp, Equation, Final, Id, STRONG, Sym, Theory, Unit, WEAK, compose

LEMMA_SIG = """\
type V;
type W;
location X : V;
pure c : 1 -> V;
pure k : 1 -> W;
pure s : V -> V;
pure p : W -> V;
pure q : W -> V;
pure u : V -> W;
pure w : V -> W;
inhabit V = c;
"""


def lemma_signature():
    return parse_signature(LEMMA_SIG)


class _Env:
    def __init__(self, sig):
        self.sig = sig
        self.ctx = StateContext(sig)
        self.pb = ProofBuilder(sig, Theory.ST)
        self.V, self.W = Base("V"), Base("W")
        for name in ("k", "s", "p", "q", "u", "w"):
            setattr(self, name, Sym(name))
        self.lkp, self.upd = self.ctx.lkp, self.ctx.upd

    def finish(self, i, goal):
        pb = self.pb
        e = pb.eq(i)
        j = pb.trans(pb.bridge(goal.lhs, e.lhs), i, pb.bridge(e.rhs, goal.rhs))
        if pb.eq(j) != goal:
            raise AssertionError(f"derived {pb.eq(j)}, wanted {goal}")
        return _finish(pb, j)


def lemma_1(env):
    lkp, upd, p, q = env.lkp, env.upd, env.p, env.q
    f, g = Comp(upd, p), Comp(upd, q)
    h = env.pb.assume("h", Equation(WEAK, Comp(lkp, f), Comp(lkp, g)))
    i = env.pb.local_global(f, g, [h])
    return env.finish(i, Equation(STRONG, f, g))


def lemma_2(env):
    lkp, upd, p, q = env.lkp, env.upd, env.p, env.q
    f = compose(lkp, upd, p)
    h = env.pb.assume("h", Equation(WEAK, f, q))
    i = upd_congruence(env.pb, env.ctx, h)
    return env.finish(i, Equation(STRONG, Comp(upd, f), Comp(upd, q)))


def lemma_3(env):
    i = upd_lkp(env.pb, env.ctx)
    return env.finish(i, Equation(STRONG, Comp(env.upd, env.lkp), Id(Unit)))


def lemma_4(env):
    pb, lkp, upd, w = env.pb, env.lkp, env.upd, env.w
    a = compose(env.s, lkp, Final(env.W))
    i = pb.repl(w, lookupdate(pb, env.ctx))                      # w.(lkp.upd) ~~ w.id
    i = pb.trans(i, pb.id_source(w))
    i = pb.subs(a, i)
    return env.finish(i, Equation(WEAK, compose(w, lkp, upd, a), Comp(w, a)))


def lemma_5(env):
    pb, k = env.pb, env.k
    i = pb.repl(k, lfl(pb, env.ctx))                             # k.(final(V).lkp) == k.id(1)
    i = pb.sym(pb.trans(i, pb.id_source(k)))
    return env.finish(i, Equation(STRONG, k, compose(k, Final(env.V), env.lkp)))


def lemma_6(env):
    pb, lkp, w, u = env.pb, env.lkp, env.w, env.u
    h = pb.assume("h", Equation(STRONG, Comp(w, lkp), Comp(u, lkp)))
    i = cancel(pb, env.ctx, h, w, u)
    return env.finish(i, Equation(STRONG, w, u))


def lemma_7(env):
    pb, lkp, w, k = env.pb, env.lkp, env.w, env.k
    h = pb.assume("h", Equation(STRONG, Comp(w, lkp), k))
    five = pb.sym(pb.trans(pb.repl(k, lfl(pb, env.ctx)), pb.id_source(k)))
    kf = Comp(k, Final(env.V))
    i = pb.trans(h, five, pb.bridge(pb.eq(five).rhs, Comp(kf, lkp)))
    i = cancel(pb, env.ctx, i, w, kf)
    return env.finish(i, Equation(STRONG, w, kf))


def coherence_weak_to_strong(env):
    pb = env.pb
    a1 = compose(env.s, env.lkp, Final(env.W))
    a2 = compose(env.p, Id(env.W))
    h = pb.assume("h", Equation(WEAK, a1, a2))
    i = pb.strengthen(h)
    return env.finish(i, Equation(STRONG, a1, a2))


def coherence_strong_to_weak(env):
    pb = env.pb
    f = compose(env.upd, env.p)
    g = compose(env.upd, env.q)
    h = pb.assume("h", Equation(STRONG, f, g))
    i = pb.weaken(h)
    return env.finish(i, Equation(WEAK, f, g))


# the seven derived rules, in the order listed above, then the two
# conversion-coherence derivations
LEMMAS = {
    "unit_local_global": lemma_1,
    "update_congruence": lemma_2,
    "update_lookup": lemma_3,
    "pure_mid_id": lemma_4,
    "pure_point_lookup": lemma_5,
    "lookup_cancel": lemma_6,
    "lookup_useless": lemma_7,
    "coherence_weak_to_strong": coherence_weak_to_strong,
    "coherence_strong_to_weak": coherence_strong_to_weak,
}


def build(name, sig=None):
    """The derivation of one corpus entry."""
    return LEMMAS[name](_Env(sig or lemma_signature()))


DERIVED = tuple(LEMMAS)[:7]
COHERENCE = tuple(LEMMAS)[7:]


def corpus(sig=None):
    """``{name: Derivation}`` for every entry."""
    sig = sig or lemma_signature()
    return {name: build(name, sig) for name in LEMMAS}


# ---------------------------------------------------------------- axiom files

STATE_AXIOMS_SIG = """\
type V;
type W;
location X : V;
location Y : W;
pure c : 1 -> V;
pure d : 1 -> W;
pure s : V -> V;
axiom invol : s . s == id(V);
inhabit V = c;
inhabit W = d;
"""

# renaming used to transport the state axiom file to the exception side
AXIOM_MAP = ("X=T", "Y=R")


def axiom_instances(sig):
    """One step per theory axiom of ``sig``: the lookup and update
    judgments, ``lookupdate`` for each location, ``lookupdate-ne`` for each
    ordered pair of distinct locations, and each pure axiom."""
    pb = ProofBuilder(sig, Theory.ST)
    names = [n for n, _ in sig.locations]
    for x in names:
        pb.step("lookup", {"X": x})
        pb.step("update", {"X": x})
    for x in names:
        pb.step("lookupdate", {"X": x})
        for y in names:
            if y != x:
                pb.step("lookupdate-ne", {"X": x, "Y": y})
    for name, _ in sig.axioms:
        pb.axiom(name)
    return pb.d


def data_files():
    """``{file name: text}`` of every frozen data file."""
    from .exc import DualityMap, dualize
    from .kernel import print_derivation
    from .parsing import print_signature
    sig = lemma_signature()
    files = {"lemmas.sig": LEMMA_SIG}
    for name, d in corpus(sig).items():
        files[f"{name}.drv"] = print_derivation(d)
    ssig = parse_signature(STATE_AXIOMS_SIG)
    dm = DualityMap.parse(AXIOM_MAP)
    files["state_axioms.sig"] = STATE_AXIOMS_SIG
    files["state_axioms.drv"] = print_derivation(axiom_instances(ssig))
    files["exc_axioms.sig"] = print_signature(dualize(ssig, dm))
    files["exc_axioms.drv"] = print_derivation(dualize(axiom_instances(ssig), dm))
    return files


def write_data(directory):
    from pathlib import Path
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in data_files().items():
        (out / name).write_text(text)
    return sorted(data_files())


def data_dir():
    """Directory of the frozen files shipped with the package."""
    from importlib.resources import files
    return files("decor") / "data"


if __name__ == "__main__":
    import sys
    for name in write_data(sys.argv[1] if len(sys.argv) > 1 else data_dir()):
        print(name)
