"""Shared fixtures: signatures, the exhaustive term family and its models."""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from decor import lemmas
from decor.fuzz import Fingerprints, chains, state_models, state_signature, typed
from decor.parsing import parse_signature
from decor.state import Decider
from decor.syntax import typecheck

STATE_SIG = """\
type V;
location X : V;
pure c : 1 -> V;
pure s : V -> V;
inhabit V = c;
"""

EXC_SIG = """\
type V;
type B;
exception T : V;
exception R : V;
pure f : V -> B;
pure g : V -> B;
"""


@pytest.fixture(scope="session")
def ssig():
    return parse_signature(STATE_SIG)


@pytest.fixture(scope="session")
def esig():
    return parse_signature(EXC_SIG)


@pytest.fixture(scope="session")
def lsig():
    return lemmas.lemma_signature()


@dataclass
class Family:
    sig: object
    terms: list
    models: list
    fp: Fingerprints
    decider: Decider
    classes: dict          # (source, target) -> list of class representatives
    canon: dict            # term -> canonical term


@pytest.fixture(scope="session")
def family():
    """Every right-nested composite of at most six generators, grouped into
    classes of equal canonical form."""
    sig = state_signature()
    terms = chains(sig, 6)
    models = state_models(sig, 3)
    dec = Decider(sig, "syntactic", 3, models=models)
    canon, reps = {}, {}
    for t in terms:
        c = dec.canonical(t).term
        canon[t] = c
        reps.setdefault((typecheck(t, sig), c), t)
    classes = {}
    for (ty, _), t in reps.items():
        classes.setdefault(ty, []).append(t)
    return Family(sig, terms, models, Fingerprints(sig, models), dec, classes, canon)


@pytest.fixture(scope="session")
def family_by_type(family):
    return typed(family.terms, family.sig)
