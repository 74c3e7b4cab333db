"""Seeded procedural generation of examples for the six deduction rules,
plus emission of the fine-tuning corpus.

The RNG is Python's ``random.Random`` (Mersenne Twister), which is seedable
and produces the same stream on every platform, so a (rule, count, seed)
triple always reproduces the same dataset byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .logic import (
    AdjNoun,
    Adj,
    DeductionRule,
    Determiner,
    Everything,
    Example,
    Lexicon,
    Named,
    Noun,
    Or,
    ProofChain,
    Quantified,
    Statement,
    assume,
    chain,
    contradicts,
    plain,
    rule_from_string,
    since,
    DEFAULT_LEXICON,
)
from .grammar import parse_chain, parse_sentence, realize, realize_chain


class LexiconTooSmall(ValueError):
    pass


RULE_ORDER: tuple[DeductionRule, ...] = tuple(DeductionRule)

#: Optimizer settings recorded in the corpus manifest for the downstream
#: trainer; the corpus emitter itself never trains.
TRAINING_HYPERPARAMETERS = {
    "optimizer": "Adam",
    "weight_decay": 0.01,
    "beta_1": 0.9,
    "beta_2": 0.999,
    "epsilon": 1e-8,
    "epochs": 100,
    "batch_size": 1000,
    "learning_rate": 2e-5,
}


@dataclass(frozen=True)
class GenSpec:
    rule: DeductionRule
    count: int
    seed: int
    lexicon: Lexicon = DEFAULT_LEXICON
    shuffle_premises: bool = False

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("count must be at least 1")


@dataclass(frozen=True)
class CorpusSpec:
    exemplars_per_question: int = 3
    questions_per_rule: int = 100
    split_fraction: float = 0.9
    seed: int = 0
    lexicon: Lexicon = DEFAULT_LEXICON

    def __post_init__(self) -> None:
        if self.exemplars_per_question < 1:
            raise ValueError("exemplars_per_question must be at least 1")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError("split_fraction must be strictly between 0 and 1")


_SUBJECT_FORMS = (Determiner.EVERY, Determiner.EACH, Determiner.BARE_PLURAL)


def _check_lexicon(lexicon: Lexicon) -> None:
    if len(lexicon.concepts) < 3 or not lexicon.adjectives or not lexicon.names:
        raise LexiconTooSmall(
            "generation needs at least 3 concepts, 1 adjective, and 1 name"
        )


def build_gold_chain(
    rule: DeductionRule, premises: tuple[Statement, ...], conclusion: Statement
) -> ProofChain:
    """Reconstruct the gold proof chain for a question from its premises and
    conclusion alone. Used both by the generator and by the gold-answer
    backends, so there is a single source of truth for chain shapes."""
    R = DeductionRule
    if rule is R.IMPLICATION_ELIMINATION:
        fact = next(p for p in premises if isinstance(p.subject, Named))
        implication = next(p for p in premises if not isinstance(p.subject, Named))
        return chain([plain(fact), plain(implication), plain(conclusion)])
    if rule is R.CONJUNCTION_INTRODUCTION:
        noun_fact = next(p for p in premises if isinstance(p.complement, Noun))
        adj_fact = next(p for p in premises if isinstance(p.complement, Adj))
        return chain([plain(noun_fact), plain(adj_fact), plain(conclusion)])
    if rule in (R.CONJUNCTION_ELIMINATION, R.DISJUNCTION_INTRODUCTION):
        return chain([plain(premises[0]), plain(conclusion)])
    if rule is R.DISJUNCTION_ELIMINATION:
        disjunction = next(p for p in premises if isinstance(p.subject, Named))
        universals = [p for p in premises if not isinstance(p.subject, Named)]
        cases = (disjunction.complement.left, disjunction.complement.right)
        paragraphs = []
        for case in cases:
            universal = next(
                u for u in universals if u.subject.concept == case.concept
            )
            assumption = Statement(disjunction.subject, False, case)
            paragraphs.append([assume(assumption), plain(universal), plain(conclusion)])
        paragraphs.append([since(conclusion, disjunction)])
        return chain(*paragraphs)
    if rule is R.PROOF_BY_CONTRADICTION:
        universal = next(p for p in premises if isinstance(p.subject, Everything))
        fact = next(p for p in premises if isinstance(p.subject, Named))
        subject = fact.subject
        disjunction = Statement(subject, False, universal.subject.restriction)
        consequent = Statement(subject, False, universal.complement)
        paragraphs = []
        for part in (conclusion, conclusion.conjunct):
            assumption = Statement(subject, False, part.complement)
            discharge = Statement(subject, True, part.complement)
            paragraphs.append([
                assume(assumption),
                plain(disjunction),
                plain(universal),
                plain(consequent),
                contradicts(consequent, fact),
                plain(discharge),
            ])
        paragraphs.append([plain(Statement(subject, True, conclusion.complement,
                                           conjunct=conclusion.conjunct))])
        return chain(*paragraphs)
    raise ValueError(f"unknown rule: {rule!r}")


def _quantified(form: Determiner, concept: str) -> Quantified:
    return Quantified(form, concept)


def generate_example(
    rule: DeductionRule,
    rng: random.Random,
    lexicon: Lexicon = DEFAULT_LEXICON,
    *,
    example_id: str | None = None,
    shuffle_premises: bool = False,
) -> Example:
    """Draw one example from the rule's template; advancing ``rng`` is the
    only side effect. All concepts sampled into one example are distinct."""
    _check_lexicon(lexicon)
    R = DeductionRule

    if rule is R.IMPLICATION_ELIMINATION:
        concept = rng.choice(lexicon.concepts)
        adjective = rng.choice(lexicon.adjectives)
        name = rng.choice(lexicon.names)
        negated = rng.random() < 0.5
        form = rng.choice(_SUBJECT_FORMS)
        implication = Statement(_quantified(form, concept), negated, Adj(adjective))
        fact = Statement(Named(name), False, Noun(concept))
        premises = (implication, fact)
        conclusion = Statement(Named(name), negated, Adj(adjective))
    elif rule is R.CONJUNCTION_INTRODUCTION:
        concept = rng.choice(lexicon.concepts)
        adjective = rng.choice(lexicon.adjectives)
        name = rng.choice(lexicon.names)
        adjective_first = rng.random() < 0.5
        noun_fact = Statement(Named(name), False, Noun(concept))
        adj_fact = Statement(Named(name), False, Adj(adjective))
        premises = (adj_fact, noun_fact) if adjective_first else (noun_fact, adj_fact)
        conclusion = Statement(Named(name), False, AdjNoun(adjective, concept))
    elif rule is R.CONJUNCTION_ELIMINATION:
        concept = rng.choice(lexicon.concepts)
        adjective = rng.choice(lexicon.adjectives)
        name = rng.choice(lexicon.names)
        premises = (Statement(Named(name), False, AdjNoun(adjective, concept)),)
        conclusion = Statement(Named(name), False, Noun(concept))
    elif rule is R.DISJUNCTION_INTRODUCTION:
        concept = rng.choice(lexicon.concepts)
        adjective = rng.choice(lexicon.adjectives)
        name = rng.choice(lexicon.names)
        premises = (Statement(Named(name), False, Noun(concept)),)
        conclusion = Statement(Named(name), False, Or(Adj(adjective), Noun(concept)))
    elif rule is R.DISJUNCTION_ELIMINATION:
        left, right, shared = rng.sample(lexicon.concepts, 3)
        name = rng.choice(lexicon.names)
        first_form = rng.choice(_SUBJECT_FORMS)
        second_form = rng.choice(_SUBJECT_FORMS)
        premises = (
            Statement(_quantified(first_form, left), False, Noun(shared)),
            Statement(_quantified(second_form, right), False, Noun(shared)),
            Statement(Named(name), False, Or(Noun(left), Noun(right))),
        )
        conclusion = Statement(Named(name), False, Noun(shared))
    elif rule is R.PROOF_BY_CONTRADICTION:
        left, right, shared = rng.sample(lexicon.concepts, 3)
        name = rng.choice(lexicon.names)
        premises = (
            Statement(Everything(Or(Noun(left), Noun(right))), False, Noun(shared)),
            Statement(Named(name), True, Noun(shared)),
        )
        conclusion = Statement(
            Named(name), True, Noun(left),
            conjunct=Statement(Named(name), True, Noun(right)),
        )
    else:
        raise ValueError(f"unknown rule: {rule!r}")

    if shuffle_premises:
        reordered = list(premises)
        rng.shuffle(reordered)
        premises = tuple(reordered)

    gold = build_gold_chain(rule, premises, conclusion)
    return Example(
        id=example_id if example_id is not None else f"{rule.value}-0",
        rule=rule,
        premises=premises,
        conclusion=conclusion,
        gold=gold,
    )


def generate_dataset(spec: GenSpec) -> list[Example]:
    """Exactly ``spec.count`` distinct examples; deterministic for a seed.
    Examples are deduplicated on (premises, conclusion)."""
    rng = random.Random(spec.seed)
    return _generate_distinct(spec.rule, spec.count, rng, spec.lexicon, spec.shuffle_premises)


def _generate_distinct(
    rule: DeductionRule,
    count: int,
    rng: random.Random,
    lexicon: Lexicon,
    shuffle_premises: bool = False,
) -> list[Example]:
    out: list[Example] = []
    seen: set = set()
    stall = 0
    while len(out) < count:
        example = generate_example(
            rule, rng, lexicon,
            example_id=f"{rule.value}-{len(out)}",
            shuffle_premises=shuffle_premises,
        )
        key = (example.premises, example.conclusion)
        if key in seen:
            stall += 1
            if stall > max(10_000, 100 * count):
                raise LexiconTooSmall(
                    f"lexicon cannot yield {count} distinct {rule.value} examples"
                )
            continue
        stall = 0
        seen.add(key)
        out.append(example)
    return out


def _round_half_up(value: float) -> int:
    return int(value + 0.5)


def emit_corpus(spec: CorpusSpec) -> tuple[list[dict], list[dict], dict]:
    """Build the fine-tuning corpus: one record per exemplar block, shuffled
    with the seed and split into train/validation."""
    from .prompts import example_block  # deferred import; prompts depends on grammar only

    rng = random.Random(spec.seed)
    records: list[dict] = []
    per_rule = spec.questions_per_rule * spec.exemplars_per_question
    for rule in RULE_ORDER:
        for example in _generate_distinct(rule, per_rule, rng, spec.lexicon):
            records.append({"text": example_block(example), "rule": rule.value})
    rng.shuffle(records)
    n_train = _round_half_up(spec.split_fraction * len(records))
    train, validation = records[:n_train], records[n_train:]
    manifest = {
        "seed": spec.seed,
        "rng": "python random.Random (Mersenne Twister)",
        "lexicon": spec.lexicon.to_dict(),
        "rules": [rule.value for rule in RULE_ORDER],
        "questions_per_rule": spec.questions_per_rule,
        "exemplars_per_question": spec.exemplars_per_question,
        "records_total": len(records),
        "split": {
            "fraction": spec.split_fraction,
            "train": len(train),
            "validation": len(validation),
        },
        "training_hyperparameters": dict(TRAINING_HYPERPARAMETERS),
        "notes": {
            "proof_by_contradiction_gold": (
                "the second sentence of each assumption paragraph states the "
                "disjunction ('X or Y') rather than the conjunction, so every "
                "emitted chain verifies under the bundled proof checker"
            ),
        },
    }
    return train, validation, manifest


def example_to_record(example: Example) -> dict:
    return {
        "id": example.id,
        "rule": example.rule.value,
        "premises": [realize(p) for p in example.premises],
        "conclusion": realize(example.conclusion),
        "gold": realize_chain(example.gold),
    }


def example_from_record(record: dict, lexicon: Lexicon = DEFAULT_LEXICON) -> Example:
    rule = rule_from_string(record["rule"])
    return Example(
        id=record["id"],
        rule=rule,
        premises=tuple(parse_sentence(p, lexicon) for p in record["premises"]),
        conclusion=parse_sentence(record["conclusion"], lexicon),
        gold=parse_chain(record["gold"], lexicon),
    )


def write_dataset(examples: list[Example], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps(example_to_record(example)) + "\n")


def load_dataset(path: str | Path, lexicon: Lexicon = DEFAULT_LEXICON) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                examples.append(example_from_record(json.loads(line), lexicon))
    return examples


def write_corpus(spec: CorpusSpec, out_dir: str | Path) -> dict:
    """Write train.jsonl, validation.jsonl, and manifest.json; returns the
    manifest. Identical specs produce byte-identical files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train, validation, manifest = emit_corpus(spec)
    for name, rows in (("train.jsonl", train), ("validation.jsonl", validation)):
        with open(out / name, "w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row) + "\n")
    with open(out / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    return manifest
