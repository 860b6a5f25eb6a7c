"""
From states to exceptions
=========================

Reversing every arrow turns a location into an exception name: lookup
becomes tag (raising), update becomes untag (catching), products become
sums.  Proofs are carried along, so results about state transfer to
exceptions without new work.
"""

from decor import check_derivation, decide, dualize, parse_equation, parse_signature
from decor.exc import decide_exc_core
from decor.lemmas import LEMMAS, build, lemma_signature
from decor.parsing import print_signature

ssig = parse_signature("""
type V;
location X : V;
pure c : 1 -> V;
pure s : V -> V;
inhabit V = c;
""")
esig = dualize(ssig)
print(print_signature(esig))

# the state axiom lkp . upd ~~ id(V) becomes untag . tag ~~ id(V)
e = parse_equation("lkp[X] . upd[X] ~~ id(V)", ssig)
print(e, "  <->  ", dualize(e))

# each derived rule about state, read backwards, is a rule about exceptions
lsig = lemma_signature()
for name in LEMMAS:
    d = dualize(build(name, lsig))
    ok = check_derivation(d, dualize(lsig)).ok
    print(f"{name:>26}  {d.steps[-1].conclusion}  [{'ok' if ok else 'FAILED'}]")

# deciding about exceptions goes through the mirror image
for text in ("tag[X] . untag[X] == id(0)", "untag[X] . tag[X] == id(V)"):
    v = decide_exc_core(parse_equation(text, esig), esig)
    mirror = decide(dualize(v.equation), ssig)
    print(f"{text}: {v.status} (state side: {mirror.status})")
