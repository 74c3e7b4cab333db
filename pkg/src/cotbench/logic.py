"""Core logical forms for the restricted copular-sentence language.

Everything here is an immutable value: statements, deduction rules, proof
steps, and the sampling lexicon shared by the generator, the surface
grammar, and the proof checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class DeductionRule(Enum):
    IMPLICATION_ELIMINATION = "implication_elimination"
    CONJUNCTION_INTRODUCTION = "conjunction_introduction"
    CONJUNCTION_ELIMINATION = "conjunction_elimination"
    DISJUNCTION_INTRODUCTION = "disjunction_introduction"
    DISJUNCTION_ELIMINATION = "disjunction_elimination"
    PROOF_BY_CONTRADICTION = "proof_by_contradiction"


#: (premise count, gold-proof paragraph count) per rule.
_RULE_ARITY: dict[DeductionRule, tuple[int, int]] = {
    DeductionRule.IMPLICATION_ELIMINATION: (2, 1),
    DeductionRule.CONJUNCTION_INTRODUCTION: (2, 1),
    DeductionRule.CONJUNCTION_ELIMINATION: (1, 1),
    DeductionRule.DISJUNCTION_INTRODUCTION: (1, 1),
    DeductionRule.DISJUNCTION_ELIMINATION: (3, 3),
    DeductionRule.PROOF_BY_CONTRADICTION: (2, 3),
}

RULE_ALIASES = {
    "ie": DeductionRule.IMPLICATION_ELIMINATION,
    "ci": DeductionRule.CONJUNCTION_INTRODUCTION,
    "ce": DeductionRule.CONJUNCTION_ELIMINATION,
    "di": DeductionRule.DISJUNCTION_INTRODUCTION,
    "de": DeductionRule.DISJUNCTION_ELIMINATION,
    "pbc": DeductionRule.PROOF_BY_CONTRADICTION,
}


def rule_arity(rule: DeductionRule) -> tuple[int, int]:
    """Return (premise count, gold paragraph count) for a deduction rule."""
    return _RULE_ARITY[rule]


def rule_from_string(name: str) -> DeductionRule:
    """Resolve a rule from its full slug or short alias (ie, ci, ce, di, de, pbc)."""
    key = name.strip().lower()
    if key in RULE_ALIASES:
        return RULE_ALIASES[key]
    try:
        return DeductionRule(key)
    except ValueError:
        raise ValueError(f"unknown deduction rule: {name!r}") from None


def _require_lower_word(value: str, what: str) -> None:
    if not value or not value.isascii() or not value.isalpha() or not value.islower():
        raise ValueError(f"{what} must be a nonempty lowercase ASCII word, got {value!r}")


def _require_name(value: str) -> None:
    if not value or not value.isascii() or not value.isalpha() or not value[0].isupper():
        raise ValueError(f"entity name must be a capitalized ASCII word, got {value!r}")


class Determiner(Enum):
    EVERY = "every"
    EACH = "each"
    BARE_PLURAL = "bare_plural"


@dataclass(frozen=True)
class Named:
    """Proper-name subject, e.g. "Alex"."""

    name: str

    def __post_init__(self) -> None:
        _require_name(self.name)


@dataclass(frozen=True)
class Quantified:
    """Quantified subject: "every X", "each X", or the bare plural "Xs"."""

    determiner: Determiner
    concept: str

    def __post_init__(self) -> None:
        _require_lower_word(self.concept, "concept")


@dataclass(frozen=True)
class Everything:
    """The "everything that is ..." subject used by contradiction premises."""

    restriction: "Complement | None" = None


Subject = Named | Quantified | Everything


@dataclass(frozen=True)
class Adj:
    word: str

    def __post_init__(self) -> None:
        _require_lower_word(self.word, "adjective")


@dataclass(frozen=True)
class Noun:
    concept: str

    def __post_init__(self) -> None:
        _require_lower_word(self.concept, "concept")


@dataclass(frozen=True)
class AdjNoun:
    adjective: str
    concept: str

    def __post_init__(self) -> None:
        _require_lower_word(self.adjective, "adjective")
        _require_lower_word(self.concept, "concept")


@dataclass(frozen=True)
class Or:
    """Two-way disjunctive complement; branches are never themselves Or."""

    left: "Complement"
    right: "Complement"

    def __post_init__(self) -> None:
        if isinstance(self.left, Or) or isinstance(self.right, Or):
            raise ValueError("disjunctive complements do not nest")


Complement = Adj | Noun | AdjNoun | Or


@dataclass(frozen=True)
class Statement:
    """One copular sentence; ``conjunct`` holds the second half of an
    "X and Y" compound conclusion and never carries its own conjunct."""

    subject: Subject
    negated: bool
    complement: Complement
    conjunct: "Statement | None" = None

    def __post_init__(self) -> None:
        if self.conjunct is not None and self.conjunct.conjunct is not None:
            raise ValueError("a conjunct statement cannot carry its own conjunct")

    def negated_copy(self) -> "Statement":
        """The same statement with the copula polarity flipped."""
        return Statement(self.subject, not self.negated, self.complement, self.conjunct)


class StepKind(Enum):
    PLAIN = "plain"
    ASSUME = "assume"
    CONTRADICTS = "contradicts"
    SINCE = "since"


@dataclass(frozen=True)
class ProofStep:
    """One proof sentence. ``aux`` is the "Since"-clause condition or the
    contradicted statement, present exactly for those two kinds."""

    kind: StepKind
    statement: Statement
    aux: Statement | None = None

    def __post_init__(self) -> None:
        needs_aux = self.kind in (StepKind.SINCE, StepKind.CONTRADICTS)
        if needs_aux != (self.aux is not None):
            raise ValueError(f"aux must be present iff kind is Since or Contradicts, got {self.kind}")


def plain(statement: Statement) -> ProofStep:
    return ProofStep(StepKind.PLAIN, statement)


def assume(statement: Statement) -> ProofStep:
    return ProofStep(StepKind.ASSUME, statement)


def contradicts(derived: Statement, contradicted: Statement) -> ProofStep:
    """A "This contradicts with ..." step: ``derived`` clashes with ``contradicted``."""
    return ProofStep(StepKind.CONTRADICTS, derived, contradicted)


def since(conclusion: Statement, condition: Statement) -> ProofStep:
    return ProofStep(StepKind.SINCE, conclusion, condition)


@dataclass(frozen=True)
class ProofChain:
    paragraphs: tuple[tuple[ProofStep, ...], ...]

    def __post_init__(self) -> None:
        if not self.paragraphs or any(not p for p in self.paragraphs):
            raise ValueError("a proof chain needs at least one nonempty paragraph")

    def steps(self) -> tuple[ProofStep, ...]:
        """All steps in order, paragraph boundaries dropped."""
        return tuple(step for para in self.paragraphs for step in para)


def chain(*paragraphs: list[ProofStep] | tuple[ProofStep, ...]) -> ProofChain:
    return ProofChain(tuple(tuple(p) for p in paragraphs))


@dataclass(frozen=True)
class Example:
    """One question: premises, conclusion, and its gold proof chain."""

    id: str
    rule: DeductionRule
    premises: tuple[Statement, ...]
    conclusion: Statement
    gold: ProofChain

    def __post_init__(self) -> None:
        n_premises, n_paragraphs = rule_arity(self.rule)
        if len(self.premises) != n_premises:
            raise ValueError(
                f"{self.rule.value} takes {n_premises} premises, got {len(self.premises)}"
            )
        if len(self.gold.paragraphs) != n_paragraphs:
            raise ValueError(
                f"{self.rule.value} gold proof has {n_paragraphs} paragraphs, "
                f"got {len(self.gold.paragraphs)}"
            )


@dataclass(frozen=True)
class Lexicon:
    """Sampling vocabulary. Concept and adjective inventories must be disjoint
    so the parser can tell the two apart."""

    concepts: tuple[str, ...] = (
        "impus", "sterpus", "wumpus", "yumpus", "zumpus",
        "dumpus", "rompus", "numpus", "tumpus", "vumpus",
    )
    adjectives: tuple[str, ...] = ("floral", "earthy", "hot", "transparent", "loud", "liquid")
    names: tuple[str, ...] = ("Alex", "Wren", "Max", "Sam", "Fae", "Polly")

    def __post_init__(self) -> None:
        for c in self.concepts:
            _require_lower_word(c, "concept")
        for a in self.adjectives:
            _require_lower_word(a, "adjective")
        for n in self.names:
            _require_name(n)
        if set(self.concepts) & set(self.adjectives):
            raise ValueError("concepts and adjectives must be disjoint")
        for pool, what in ((self.concepts, "concepts"), (self.adjectives, "adjectives"), (self.names, "names")):
            if len(set(pool)) != len(pool):
                raise ValueError(f"duplicate entries in {what}")

    def to_dict(self) -> dict:
        return {
            "concepts": list(self.concepts),
            "adjectives": list(self.adjectives),
            "names": list(self.names),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Lexicon":
        return cls(
            concepts=tuple(data["concepts"]),
            adjectives=tuple(data["adjectives"]),
            names=tuple(data["names"]),
        )


DEFAULT_LEXICON = Lexicon()
