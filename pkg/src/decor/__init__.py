"""Decorated equational logics for states and exceptions.

Terms carry decorations (pure, accessor or propagator, modifier or catcher)
and equations come in a strong and a weak kind.  The package provides:

* :mod:`decor.syntax` and :mod:`decor.parsing`: types, terms, signatures,
  type checking, decoration inference, parsing and printing;
* :mod:`decor.kernel`: the inference rules of L_com, L_mon, L_st and L_exc
  and a checker for derivations;
* :mod:`decor.state`: canonical forms, reduction to pure equations and a
  certified decision procedure for one location;
* :mod:`decor.exc`: throw, try/catch, downcast and the duality with states;
* :mod:`decor.semantics`: finite models and evaluation;
* :mod:`decor.cli`: the ``decor`` command.
"""

from .exc import (
    DualityMap, ExcDecider, HandlerSpec, decide_exc_core, downcast, dualize,
    throw, try_catch,
)
from .kernel import (
    CheckReport, Derivation, KernelError, Step, TermJudgment, apply_rule,
    check_derivation, parse_derivation, print_derivation, rule_catalogue,
)
from .parsing import (
    ParseError, parse_equation, parse_signature, parse_term, parse_type,
    print_signature,
)
from .semantics import (
    EXCEPTION, STATE, Model, counterexample, enumerate_models, eval_exc,
    eval_state, evaluate, holds, parse_model, print_model,
)
from .state import (
    EQUIVALENT, NOT_EQUIVALENT, UNKNOWN, Decider, FragmentError,
    MissingInhabitant, Verdict, decide, normalize_accessor, normalize_modifier,
    reduce_equation, seq_product,
)
from .syntax import (
    PURE, RO, RW, DecorError, Equation, Signature, Theory, decorate,
    print_term, print_type, typecheck,
)

__version__ = "0.1.0"
