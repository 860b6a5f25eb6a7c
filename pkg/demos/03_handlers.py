"""
try/catch as a term
===================

A handler is built from the primitive catcher untag.  Its private parts
may intercept exceptions; the public term downcasts them back to a
propagator, so exceptions that were already raised before the handler
runs pass through untouched.
"""

from decor import parse_signature
from decor.exc import HandlerSpec, throw, try_catch
from decor.semantics import EXCEPTION, enumerate_models, eval_exc, format_value
from decor.syntax import Base, Copair, Sym, print_term

sig = parse_signature("""
type V;
type W;
type B;
exception T : V;
exception R : W;
pure g : V -> B;
pure f : B -> B;
""")
B = Base("B")

# the body returns f(b) on B, raises T on V and raises R on W
body = Copair(Sym("f"), Copair(throw(B, "T", sig), throw(B, "R", sig)))
public, catch, private = try_catch(HandlerSpec(body, "T", Sym("g")), sig)
print("try", print_term(body), "catch T =>", "g")
print("  catch part:", print_term(catch))

# a model where f swaps the two elements of B and g is the identity on V = B
m = next(m for m in enumerate_models(sig, 2, EXCEPTION, sizes={"V": 2, "W": 2, "B": 2})
         if m.tables["f"] == {0: 1, 1: 0} and m.tables["g"] == {0: 0, 1: 1})
print("\nf =", m.tables["f"], " g =", m.tables["g"])
for x, y in eval_exc(public, m).rows:
    print(f"  {format_value(x):>16} -> {format_value(y)}")
# input (0, ...) is ordinary, (1, (k, v)) is exception number k carrying v
