"""
Deciding equations about one memory cell
========================================

A single location X holds a value of type V.  lkp[X] reads it and upd[X]
overwrites it.  Strong equations (==) compare results and final states,
weak ones (~~) only the results.
"""

from decor import (
    check_derivation, decide, normalize_modifier, parse_equation, parse_signature,
    parse_term, print_term, reduce_equation,
)
from decor.semantics import format_value, print_model

sig = parse_signature("""
type V;
location X : V;
pure c : 1 -> V;
pure s : V -> V;
inhabit V = c;
""")

# writing what was just read changes nothing
v = decide(parse_equation("upd[X] . lkp[X] == id(1)", sig), sig)
print("upd . lkp == id(1):", v.status, f"({len(v.certificate.steps)} certificate steps)")

# reading back what was just written returns it, but only up to effects
for text in ("lkp[X] . upd[X] ~~ id(V)", "lkp[X] . upd[X] == id(V)"):
    v = decide(parse_equation(text, sig), sig)
    print(f"{text}:", v.status)
m, w = v.countermodel
print("refuted at input", format_value(w), "in")
print(print_model(m))

# every modifier has a canonical form with a single update
t = parse_term("s . lkp[X] . upd[X] . s . lkp[X] . upd[X] . c", sig)
canon, proof = normalize_modifier(t, sig)
print(print_term(t), " ==> ", print_term(canon.term))
print("certificate checks:", check_derivation(proof, sig).ok)

# and each equation reduces to at most four pure ones
e = parse_equation("upd[X] . s . lkp[X] == upd[X] . lkp[X]", sig)
r = reduce_equation(e, sig)
print(f"{e} reduces to")
for p in r.pure_equations:
    print("   ", p)
