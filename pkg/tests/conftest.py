"""Shared helpers: a statement sampler covering every sentence shape the six
rule templates can emit, and canned examples used across test modules."""

from __future__ import annotations

import random

import pytest

from cotbench.logic import (
    Adj,
    AdjNoun,
    DeductionRule,
    Determiner,
    Everything,
    Example,
    Named,
    Noun,
    Or,
    Quantified,
    Statement,
    chain,
    plain,
    DEFAULT_LEXICON,
)

_FORMS = (Determiner.EVERY, Determiner.EACH, Determiner.BARE_PLURAL)


def sample_statement(rng: random.Random, lexicon=DEFAULT_LEXICON) -> Statement:
    """One statement drawn from the union of all rule templates' shapes."""
    name = rng.choice(lexicon.names)
    c1, c2 = rng.sample(lexicon.concepts, 2)
    adjective = rng.choice(lexicon.adjectives)
    negated = rng.random() < 0.5
    shape = rng.randrange(10)
    if shape == 0:
        return Statement(Named(name), negated, Adj(adjective))
    if shape == 1:
        return Statement(Named(name), negated, Noun(c1))
    if shape == 2:
        return Statement(Named(name), False, AdjNoun(adjective, c1))
    if shape == 3:
        return Statement(Named(name), False, Or(Adj(adjective), Noun(c1)))
    if shape == 4:
        return Statement(Named(name), False, Or(Noun(c1), Noun(c2)))
    if shape == 5:
        return Statement(Quantified(rng.choice(_FORMS), c1), negated, Adj(adjective))
    if shape == 6:
        return Statement(Quantified(rng.choice(_FORMS), c1), negated, Noun(c2))
    if shape == 7:
        return Statement(Quantified(rng.choice(_FORMS), c1), False, AdjNoun(adjective, c2))
    if shape == 8:
        return Statement(Everything(Or(Noun(c1), Noun(c2))), negated,
                         Noun(rng.choice([c for c in lexicon.concepts if c not in (c1, c2)])))
    return Statement(
        Named(name), True, Noun(c1),
        conjunct=Statement(Named(name), True, Noun(c2)),
    )


def transparency_example() -> Example:
    """The implication-elimination question about Wren and sterpuses."""
    premises = (
        Statement(Quantified(Determiner.BARE_PLURAL, "sterpus"), False, Adj("transparent")),
        Statement(Named("Wren"), False, Noun("sterpus")),
    )
    conclusion = Statement(Named("Wren"), False, Adj("transparent"))
    gold = chain([plain(premises[1]), plain(premises[0]), plain(conclusion)])
    return Example("ie-wren", DeductionRule.IMPLICATION_ELIMINATION, premises, conclusion, gold)


@pytest.fixture
def wren_example() -> Example:
    return transparency_example()
