"""Bidirectional bridge between Statements and restricted-English text.

``realize`` is deterministic: the same statement and config always produce
byte-identical text. ``parse_sentence`` inverts it exactly on everything the
realizer can emit, and is additionally tolerant of a missing terminal
period, doubled spaces, and case differences on the first word. Determiners
and the copula are matched case-insensitively; everything else is exact.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

from .logic import (
    Adj,
    AdjNoun,
    Complement,
    Determiner,
    Everything,
    Lexicon,
    Named,
    Noun,
    Or,
    ProofChain,
    ProofStep,
    Quantified,
    Statement,
    StepKind,
    DEFAULT_LEXICON,
)


class UnparseableSentence(ValueError):
    """Raised when text does not fit the restricted grammar.

    ``span`` is the offending portion of the input.
    """

    def __init__(self, message: str, span: str):
        super().__init__(f"{message}: {span!r}")
        self.span = span


class RealizationError(ValueError):
    pass


@dataclass(frozen=True)
class RealizationConfig:
    """Realizer knobs. ``vowel_letters`` drives the a/an choice and
    ``paragraph_separator`` joins proof paragraphs."""

    vowel_letters: str = "aeiou"
    paragraph_separator: str = "\n"


DEFAULT_CONFIG = RealizationConfig()


def pluralize(concept: str) -> str:
    """Stems ending in "s" gain "es", all others gain "s"."""
    return concept + ("es" if concept.endswith("s") else "s")


def _article(phrase: str, config: RealizationConfig) -> str:
    return "an" if phrase[0] in config.vowel_letters else "a"


def _complement_phrase(comp: Complement, plural: bool, config: RealizationConfig) -> str:
    if isinstance(comp, Adj):
        return comp.word
    if isinstance(comp, Noun):
        if plural:
            return pluralize(comp.concept)
        return f"{_article(comp.concept, config)} {comp.concept}"
    if isinstance(comp, AdjNoun):
        if plural:
            return f"{comp.adjective} {pluralize(comp.concept)}"
        return f"{_article(comp.adjective, config)} {comp.adjective} {comp.concept}"
    if isinstance(comp, Or):
        left = _complement_phrase(comp.left, plural, config)
        right = _complement_phrase(comp.right, plural, config)
        return f"{left} or {right}"
    raise TypeError(f"unknown complement: {comp!r}")


def _is_everything_premise_shape(statement: Statement) -> bool:
    # The only grammatical "Everything" sentence: a restricted universal with
    # a plain noun consequent, as in contradiction premises.
    subject = statement.subject
    return (
        isinstance(subject, Everything)
        and isinstance(subject.restriction, Or)
        and isinstance(subject.restriction.left, Noun)
        and isinstance(subject.restriction.right, Noun)
        and isinstance(statement.complement, Noun)
        and statement.conjunct is None
    )


def _subject_phrase(statement: Statement, config: RealizationConfig) -> tuple[str, bool]:
    subject = statement.subject
    if isinstance(subject, Named):
        return subject.name, False
    if isinstance(subject, Quantified):
        if subject.determiner is Determiner.BARE_PLURAL:
            return pluralize(subject.concept), True
        return f"{subject.determiner.value} {subject.concept}", False
    if isinstance(subject, Everything):
        if not _is_everything_premise_shape(statement):
            raise RealizationError(
                "an Everything subject is only realizable in the restricted-universal premise shape"
            )
        restriction = _complement_phrase(subject.restriction, False, config)
        return f"everything that is {restriction}", False
    raise TypeError(f"unknown subject: {subject!r}")


def realize_clause(statement: Statement, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    """Mid-sentence form: no capitalization beyond proper names, no period."""
    subject, plural = _subject_phrase(statement, config)
    copula = "are" if plural else "is"
    negation = " not" if statement.negated else ""
    text = f"{subject} {copula}{negation} {_complement_phrase(statement.complement, plural, config)}"
    if statement.conjunct is not None:
        text = f"{text} and {realize_clause(statement.conjunct, config)}"
    return text


def realize(statement: Statement, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    """One sentence: capitalized first letter, terminal period."""
    clause = realize_clause(statement, config)
    return clause[0].upper() + clause[1:] + "."


def realize_step(step: ProofStep, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    if step.kind is StepKind.PLAIN:
        return realize(step.statement, config)
    if step.kind is StepKind.ASSUME:
        return f"Assume {realize_clause(step.statement, config)}."
    if step.kind is StepKind.CONTRADICTS:
        return f"This contradicts with {realize_clause(step.aux, config)}."
    if step.kind is StepKind.SINCE:
        return f"Since {realize_clause(step.aux, config)}, {realize_clause(step.statement, config)}."
    raise TypeError(f"unknown step kind: {step.kind!r}")


def realize_chain(proof: ProofChain, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    """Steps joined by single spaces, paragraphs by the configured separator."""
    paragraphs = [" ".join(realize_step(s, config) for s in para) for para in proof.paragraphs]
    return config.paragraph_separator.join(paragraphs)


_SENTENCE_BOUNDARY = re.compile(r"\.(?:\s+|$)")


def split_sentences(text: str) -> list[str]:
    """Split on periods followed by whitespace or end of text; periods are
    consumed and empty fragments dropped."""
    return [part.strip() for part in _SENTENCE_BOUNDARY.split(text) if part.strip()]


class _Parser:
    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.concepts = set(lexicon.concepts)
        self.adjectives = set(lexicon.adjectives)
        self.names_by_fold = {n.lower(): n for n in lexicon.names}
        self.singular_by_plural = {pluralize(c): c for c in lexicon.concepts}

    def parse_sentence(self, text: str) -> Statement:
        normalized = re.sub(r"\s+", " ", text.strip())
        if normalized.endswith("."):
            normalized = normalized[:-1].rstrip()
        if not normalized:
            raise UnparseableSentence("empty sentence", text)
        tokens = normalized.split(" ")
        and_positions = [i for i, t in enumerate(tokens) if t == "and"]
        if len(and_positions) > 1:
            raise UnparseableSentence("at most one 'and' is allowed", normalized)
        if and_positions:
            cut = and_positions[0]
            first = self._parse_clause(tokens[:cut], first_word_tolerant=True)
            second = self._parse_clause(tokens[cut + 1:], first_word_tolerant=False)
            return dataclasses.replace(first, conjunct=second)
        return self._parse_clause(tokens, first_word_tolerant=True)

    def _parse_clause(self, tokens: list[str], first_word_tolerant: bool) -> Statement:
        if not tokens:
            raise UnparseableSentence("empty clause", "")
        subject, index = self._parse_subject(tokens, first_word_tolerant)
        if index >= len(tokens) or tokens[index].lower() not in ("is", "are"):
            got = tokens[index] if index < len(tokens) else "<end>"
            raise UnparseableSentence("expected a copula ('is' or 'are')", got)
        index += 1
        negated = False
        if index < len(tokens) and tokens[index] == "not":
            negated = True
            index += 1
        complement = self._parse_complement(tokens[index:])
        return Statement(subject, negated, complement)

    def _parse_subject(self, tokens: list[str], first_word_tolerant: bool):
        word = tokens[0]
        folded = word.lower()
        if folded in ("every", "each"):
            if len(tokens) < 2 or tokens[1] not in self.concepts:
                got = tokens[1] if len(tokens) > 1 else "<end>"
                raise UnparseableSentence("expected a known concept after the determiner", got)
            determiner = Determiner.EVERY if folded == "every" else Determiner.EACH
            return Quantified(determiner, tokens[1]), 2
        if folded == "everything":
            if len(tokens) >= 3 and tokens[1] == "that" and tokens[2].lower() == "is":
                copula_at = None
                for j in range(3, len(tokens)):
                    if tokens[j].lower() in ("is", "are"):
                        copula_at = j
                        break
                if copula_at is None or copula_at == 3:
                    raise UnparseableSentence("unterminated 'everything that is' restriction", " ".join(tokens))
                restriction = self._parse_complement(tokens[3:copula_at])
                return Everything(restriction), copula_at
            return Everything(None), 1
        name_key = folded if first_word_tolerant else None
        if word in self.names_by_fold.values():
            return Named(word), 1
        if name_key is not None and name_key in self.names_by_fold:
            return Named(self.names_by_fold[name_key]), 1
        plural_key = word if word in self.singular_by_plural else (
            folded if first_word_tolerant and folded in self.singular_by_plural else None
        )
        if plural_key is not None:
            return Quantified(Determiner.BARE_PLURAL, self.singular_by_plural[plural_key]), 1
        raise UnparseableSentence("unrecognized subject", word)

    def _parse_complement(self, tokens: list[str]) -> Complement:
        if not tokens:
            raise UnparseableSentence("missing complement", "<end>")
        branches: list[list[str]] = [[]]
        for token in tokens:
            if token == "or":
                branches.append([])
            else:
                branches[-1].append(token)
        if len(branches) > 2:
            raise UnparseableSentence("a disjunction has exactly two branches", " ".join(tokens))
        if len(branches) == 2:
            return Or(self._parse_simple(branches[0]), self._parse_simple(branches[1]))
        return self._parse_simple(branches[0])

    def _parse_simple(self, tokens: list[str]) -> Complement:
        span = " ".join(tokens)
        if not tokens:
            raise UnparseableSentence("empty complement branch", span)
        has_article = tokens[0] in ("a", "an")
        rest = tokens[1:] if has_article else tokens
        if len(rest) == 1:
            word = rest[0]
            if word in self.adjectives:
                if has_article:
                    raise UnparseableSentence("a bare adjective takes no article", span)
                return Adj(word)
            if word in self.concepts:
                if not has_article:
                    raise UnparseableSentence("a singular noun needs an article", span)
                return Noun(word)
            if word in self.singular_by_plural:
                if has_article:
                    raise UnparseableSentence("a plural noun takes no article", span)
                return Noun(self.singular_by_plural[word])
            raise UnparseableSentence("unknown complement word", word)
        if len(rest) == 2:
            adjective, noun = rest
            if adjective not in self.adjectives:
                raise UnparseableSentence("expected an adjective before the noun", adjective)
            if noun in self.concepts:
                if not has_article:
                    raise UnparseableSentence("a singular noun phrase needs an article", span)
                return AdjNoun(adjective, noun)
            if noun in self.singular_by_plural:
                if has_article:
                    raise UnparseableSentence("a plural noun phrase takes no article", span)
                return AdjNoun(adjective, self.singular_by_plural[noun])
            raise UnparseableSentence("unknown noun", noun)
        raise UnparseableSentence("complement does not fit the grammar", span)


def parse_sentence(text: str, lexicon: Lexicon = DEFAULT_LEXICON) -> Statement:
    """Parse one restricted-English sentence back into a Statement."""
    return _Parser(lexicon).parse_sentence(text)


_ASSUME = "assume "
_CONTRADICTS = "this contradicts with "
_SINCE = "since "


def parse_step(text: str, lexicon: Lexicon = DEFAULT_LEXICON) -> ProofStep:
    """Parse one proof sentence (with or without its terminal period)."""
    stripped = text.strip()
    folded = stripped.lower()
    if folded.startswith(_ASSUME):
        statement = parse_sentence(stripped[len(_ASSUME):], lexicon)
        return ProofStep(StepKind.ASSUME, statement)
    if folded.startswith(_CONTRADICTS):
        contradicted = parse_sentence(stripped[len(_CONTRADICTS):], lexicon)
        return ProofStep(StepKind.CONTRADICTS, contradicted.negated_copy(), contradicted)
    if folded.startswith(_SINCE):
        body = stripped[len(_SINCE):]
        if ", " not in body:
            raise UnparseableSentence("a 'Since' sentence needs a comma-separated main clause", stripped)
        condition_text, conclusion_text = body.split(", ", 1)
        condition = parse_sentence(condition_text, lexicon)
        conclusion = parse_sentence(conclusion_text, lexicon)
        return ProofStep(StepKind.SINCE, conclusion, condition)
    return ProofStep(StepKind.PLAIN, parse_sentence(stripped, lexicon))


def parse_chain(text: str, lexicon: Lexicon = DEFAULT_LEXICON) -> ProofChain:
    """Parse a realized proof chain; lines are paragraphs."""
    paragraphs = []
    for line in text.split("\n"):
        sentences = split_sentences(line)
        if not sentences:
            continue
        paragraphs.append(tuple(parse_step(s, lexicon) for s in sentences))
    if not paragraphs:
        raise UnparseableSentence("empty proof chain", text)
    return ProofChain(tuple(paragraphs))
