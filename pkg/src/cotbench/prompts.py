"""Byte-exact prompt assembly for the two evaluation tasks.

The few-shot block layouts are pinned by golden-file tests; any whitespace
change here is a contract change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .grammar import RealizationConfig, realize, realize_chain, DEFAULT_CONFIG
from .logic import Example

MCQ_LABELS = ("A", "B", "C", "D", "E")


@dataclass(frozen=True)
class McqQuestion:
    id: str
    stem: str
    choices: tuple[tuple[str, str], ...]
    answer_key: str

    def __post_init__(self) -> None:
        labels = tuple(label for label, _ in self.choices)
        if labels != MCQ_LABELS:
            raise ValueError(f"choices must be labeled A-E in order, got {labels}")
        if self.answer_key not in MCQ_LABELS:
            raise ValueError(f"answer key must be one of A-E, got {self.answer_key!r}")


def question_block(example: Example, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    """The question part of a block: premises, "Prove:", conclusion, then an
    open "A: " awaiting the chain."""
    premises = " ".join(realize(p, config) for p in example.premises)
    return f"Q: {premises} Prove: {realize(example.conclusion, config)}\nA: "


def example_block(example: Example, config: RealizationConfig = DEFAULT_CONFIG) -> str:
    """A full exemplar block: question followed by its gold chain."""
    return question_block(example, config) + realize_chain(example.gold, config)


def build_prontoqa_prompt(
    exemplars: list[Example],
    test: Example,
    config: RealizationConfig = DEFAULT_CONFIG,
) -> str:
    """Exemplar blocks then the open test block, separated by exactly two
    newlines. With no exemplars the prompt is just the test block."""
    for exemplar in exemplars:
        if exemplar.premises == test.premises and exemplar.conclusion == test.conclusion:
            raise ValueError("the test question must not appear among the exemplars")
    blocks = [example_block(e, config) for e in exemplars]
    blocks.append(question_block(test, config))
    return "\n\n".join(blocks)


def build_csqa_prompt(fixed_exemplar_block: str, question: McqQuestion) -> str:
    """Append the test question and its lettered choices after the fixed
    exemplar block; the prompt ends with a bare newline after the last
    choice."""
    first_label, first_text = question.choices[0]
    parts = [fixed_exemplar_block, f"\nQ: {question.stem} Answer Choices: ({first_label.lower()}) {first_text}"]
    for label, text in question.choices[1:]:
        parts.append(f"\n({label.lower()}) {text}")
    parts.append("\n")
    return "".join(parts)


def csqa_exemplar_block() -> str:
    """The seven fixed chain-of-thought exemplars shipped with the package."""
    return resources.files("cotbench.data").joinpath("csqa_exemplars.txt").read_text(encoding="utf-8")


def load_csqa_questions(path: str | Path) -> list[McqQuestion]:
    """Read the public validation file format: one JSON record per line with
    question.stem, question.choices[].label/.text, and answerKey."""
    questions = []
    with open(path, encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            body = record["question"]
            questions.append(
                McqQuestion(
                    id=str(record.get("id", f"q{index}")),
                    stem=body["stem"],
                    choices=tuple((c["label"], c["text"]) for c in body["choices"]),
                    answer_key=record["answerKey"],
                )
            )
    return questions
