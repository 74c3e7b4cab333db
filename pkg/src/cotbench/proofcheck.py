"""Verdicts for generated chains of thought.

Strict mode requires step-for-step structural equality with the gold chain
(paragraph boundaries are ignored, step order matters). Valid mode is the
lenient alternative: every step must be a premise restatement, an
assumption, a one-step derivation licensed by the example's rule, or a
consistent Contradicts/Since step, and the final step must state the
conclusion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammar import UnparseableSentence, parse_step, realize_step, split_sentences
from .logic import (
    AdjNoun,
    Adj,
    DeductionRule,
    Everything,
    Example,
    Lexicon,
    Named,
    Noun,
    Or,
    ProofStep,
    Quantified,
    Statement,
    StepKind,
    DEFAULT_LEXICON,
)


@dataclass(frozen=True)
class Divergence:
    """First point where a generated chain departs from gold; paragraph and
    step are 1-based positions in the gold chain."""

    paragraph: int
    step: int
    expected: str
    got: str


@dataclass(frozen=True)
class Verdict:
    correct: bool
    mode: str
    first_divergence: Divergence | None = None
    parse_failures: tuple[str, ...] = ()


def _parse_generated(
    generated: str, lexicon: Lexicon
) -> tuple[list[tuple[str, ProofStep | None]], tuple[str, ...]]:
    items: list[tuple[str, ProofStep | None]] = []
    failures: list[str] = []
    for line in generated.split("\n"):
        for sentence in split_sentences(line):
            try:
                items.append((sentence, parse_step(sentence, lexicon)))
            except UnparseableSentence:
                items.append((sentence, None))
                failures.append(sentence)
    return items, tuple(failures)


def _gold_positions(example: Example) -> list[tuple[int, int, ProofStep]]:
    positions = []
    for p_index, paragraph in enumerate(example.gold.paragraphs, start=1):
        for s_index, step in enumerate(paragraph, start=1):
            positions.append((p_index, s_index, step))
    return positions


def check_strict(generated: str, example: Example, lexicon: Lexicon = DEFAULT_LEXICON) -> Verdict:
    """Correct iff the parsed step sequence equals the gold chain exactly."""
    items, failures = _parse_generated(generated, lexicon)
    gold = _gold_positions(example)
    divergence = None
    for k in range(max(len(items), len(gold))):
        got_text = items[k][0] if k < len(items) else ""
        got_step = items[k][1] if k < len(items) else None
        if k >= len(gold):
            last_p, last_s, _ = gold[-1]
            divergence = Divergence(last_p, last_s + (k - len(gold) + 1), "", got_text)
            break
        p_index, s_index, expected_step = gold[k]
        if got_step is None or got_step != expected_step:
            divergence = Divergence(p_index, s_index, realize_step(expected_step), got_text)
            break
    correct = divergence is None and not failures
    return Verdict(correct, "strict", divergence, failures)


def _statement_pool(statements: list[Statement]) -> set[Statement]:
    return set(statements)


def _derivable_by_implication(target: Statement, known: set[Statement]) -> bool:
    if not isinstance(target.subject, Named) or target.conjunct is not None:
        return False
    for premise in known:
        if premise.negated or premise.subject != target.subject:
            continue
        antecedent = premise.complement
        for universal in known:
            if universal.complement != target.complement or universal.negated != target.negated:
                continue
            subject = universal.subject
            if isinstance(subject, Quantified) and isinstance(antecedent, Noun):
                if subject.concept == antecedent.concept:
                    return True
            elif isinstance(subject, Everything) and subject.restriction == antecedent:
                return True
    return False


def _derivable_by_conjunction_intro(target: Statement, known: set[Statement]) -> bool:
    comp = target.complement
    if not isinstance(comp, AdjNoun) or target.negated or target.conjunct is not None:
        return False
    return (
        Statement(target.subject, False, Adj(comp.adjective)) in known
        and Statement(target.subject, False, Noun(comp.concept)) in known
    )


def _derivable_by_conjunction_elim(target: Statement, known: set[Statement]) -> bool:
    if not isinstance(target.complement, Noun) or target.negated or target.conjunct is not None:
        return False
    return any(
        isinstance(fact.complement, AdjNoun)
        and fact.subject == target.subject
        and not fact.negated
        and fact.complement.concept == target.complement.concept
        for fact in known
    )


def _derivable_by_disjunction_intro(target: Statement, known: set[Statement]) -> bool:
    comp = target.complement
    if not isinstance(comp, Or) or target.negated or target.conjunct is not None:
        return False
    return (
        Statement(target.subject, False, comp.left) in known
        or Statement(target.subject, False, comp.right) in known
    )


_RULE_MOVES = {
    DeductionRule.IMPLICATION_ELIMINATION: (_derivable_by_implication,),
    DeductionRule.CONJUNCTION_INTRODUCTION: (_derivable_by_conjunction_intro,),
    DeductionRule.CONJUNCTION_ELIMINATION: (_derivable_by_conjunction_elim,),
    DeductionRule.DISJUNCTION_INTRODUCTION: (_derivable_by_disjunction_intro,),
    DeductionRule.DISJUNCTION_ELIMINATION: (_derivable_by_implication,),
    DeductionRule.PROOF_BY_CONTRADICTION: (
        _derivable_by_disjunction_intro,
        _derivable_by_implication,
    ),
}


def check_valid(generated: str, example: Example, lexicon: Lexicon = DEFAULT_LEXICON) -> Verdict:
    """Lenient verdict: each step must be justified, the last must be the
    conclusion. A chain with unparseable sentences is never valid."""
    items, failures = _parse_generated(generated, lexicon)
    if failures or not items:
        return Verdict(False, "valid", None, failures)
    premises = set(example.premises)
    prior: list[Statement] = []
    moves = _RULE_MOVES[example.rule]
    pbc = example.rule is DeductionRule.PROOF_BY_CONTRADICTION
    current_assumption: Statement | None = None
    contradiction_seen = False
    for sentence, step in items:
        known = premises | _statement_pool(prior)
        ok = False
        if step.kind is StepKind.ASSUME:
            ok = True
            current_assumption = step.statement
            contradiction_seen = False
        elif step.kind is StepKind.CONTRADICTS:
            ok = step.aux in known and step.statement in known
            if ok:
                contradiction_seen = True
        elif step.kind is StepKind.SINCE:
            ok = step.aux in known and step.statement in _statement_pool(prior)
        else:
            if step.statement in premises:
                ok = True
            elif any(move(step.statement, known) for move in moves):
                ok = True
            elif (
                pbc
                and contradiction_seen
                and current_assumption is not None
                and step.statement == current_assumption.negated_copy()
            ):
                ok = True
            elif (
                pbc
                and step.statement.conjunct is not None
                and Statement(step.statement.subject, step.statement.negated,
                              step.statement.complement) in known
                and step.statement.conjunct in known
            ):
                ok = True
        if not ok:
            return Verdict(False, "valid")
        prior.append(step.statement)
    if items[-1][1].statement != example.conclusion:
        return Verdict(False, "valid")
    return Verdict(True, "valid")


def check(generated: str, example: Example, mode: str = "strict",
          lexicon: Lexicon = DEFAULT_LEXICON) -> Verdict:
    if mode == "strict":
        return check_strict(generated, example, lexicon)
    if mode == "valid":
        return check_valid(generated, example, lexicon)
    raise ValueError(f"unknown checking mode: {mode!r}")
