"""Experiment runner: builds prompts, queries a backend with bounded
concurrency, checks the outputs, and aggregates a report.

Per-question backend errors are recorded as unparseable so long sweeps
survive flaky endpoints; only configuration errors abort a run. Report row
order always matches dataset order regardless of completion scheduling.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .backends import Backend, BackendError, DecodeConfig, complete
from .extract import McqResult, extract_cot, extract_csqa
from .logic import Example, Lexicon, DEFAULT_LEXICON
from .prompts import McqQuestion, build_csqa_prompt, build_prontoqa_prompt
from .proofcheck import Verdict, check

PRONTOQA_DECODE = DecodeConfig(max_new_tokens=256)

#: Crude byte-based stand-in for the input token count when no tokenizer is
#: available; deliberately conservative and overridable per run.
BYTES_PER_TOKEN_ESTIMATE = 4
CSQA_EXTRA_TOKENS = 100


def estimate_input_tokens(prompt: str) -> int:
    return math.ceil(len(prompt.encode("utf-8")) / BYTES_PER_TOKEN_ESTIMATE)


@dataclass
class EvalReport:
    task: str
    totals: dict
    accuracy: float
    per_rule: dict
    verdicts: list
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "totals": dict(self.totals),
            "accuracy": self.accuracy,
            "per_rule": {k: dict(v) for k, v in self.per_rule.items()},
            "verdicts": list(self.verdicts),
            "metadata": dict(self.metadata),
        }

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2)
            handle.write("\n")


def write_responses(responses: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in responses:
            handle.write(json.dumps(row) + "\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _divergence_dict(verdict: Verdict) -> dict | None:
    if verdict.first_divergence is None:
        return None
    d = verdict.first_divergence
    return {"paragraph": d.paragraph, "step": d.step, "expected": d.expected, "got": d.got}


def _tally(rows: list[dict]) -> dict:
    totals = {"total": len(rows), "correct": 0, "incorrect": 0, "unparseable": 0}
    for row in rows:
        totals[row["outcome"]] += 1
    assert totals["correct"] + totals["incorrect"] + totals["unparseable"] == totals["total"]
    return totals


def _accuracy(totals: dict) -> float:
    return totals["correct"] / totals["total"] if totals["total"] else 0.0


def run_prontoqa(
    dataset: list[Example],
    backend: Backend,
    shots: int = 8,
    mode: str = "strict",
    concurrency: int = 1,
    decode: DecodeConfig = PRONTOQA_DECODE,
    lexicon: Lexicon = DEFAULT_LEXICON,
) -> tuple[EvalReport, list[dict]]:
    """Evaluate every question with ``shots`` same-rule exemplars drawn
    cyclically from the rest of the dataset."""
    if not dataset:
        raise ValueError("dataset is empty")
    if shots < 0:
        raise ValueError("shots must be non-negative")
    by_rule: dict = {}
    for index, example in enumerate(dataset):
        by_rule.setdefault(example.rule, []).append(index)
    for rule, indices in by_rule.items():
        if shots + 1 > len(indices):
            raise ValueError(
                f"{rule.value} has {len(indices)} questions; {shots} shots need at least {shots + 1}"
            )

    started = _now()
    jobs = []
    for rule, indices in by_rule.items():
        for position, index in enumerate(indices):
            exemplar_indices = [
                indices[(position + offset) % len(indices)] for offset in range(1, shots + 1)
            ]
            jobs.append((index, [dataset[j] for j in exemplar_indices]))
    jobs.sort(key=lambda job: job[0])

    def _one(job) -> dict:
        index, exemplars = job
        example = dataset[index]
        prompt = build_prontoqa_prompt(exemplars, example)
        row = {"id": example.id, "rule": example.rule.value, "prompt": prompt}
        try:
            raw = complete(backend, prompt, decode, question_id=example.id)
        except BackendError as err:
            row.update(raw_output=None, extracted=None, outcome="unparseable",
                       error=f"{type(err).__name__}: {err}", verdict=None)
            return row
        extracted = extract_cot(raw, prompt)
        verdict = check(extracted, example, mode, lexicon)
        if verdict.correct:
            outcome = "correct"
        elif verdict.parse_failures:
            outcome = "unparseable"
        else:
            outcome = "incorrect"
        row.update(
            raw_output=raw,
            extracted=extracted,
            outcome=outcome,
            error=None,
            verdict={
                "correct": verdict.correct,
                "mode": verdict.mode,
                "first_divergence": _divergence_dict(verdict),
                "parse_failures": list(verdict.parse_failures),
            },
        )
        return row

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        rows = list(pool.map(_one, jobs))

    per_rule = {}
    for rule in by_rule:
        rule_rows = [r for r in rows if r["rule"] == rule.value]
        totals = _tally(rule_rows)
        totals["accuracy"] = _accuracy(totals)
        per_rule[rule.value] = totals
    totals = _tally(rows)
    report = EvalReport(
        task="prontoqa",
        totals=totals,
        accuracy=_accuracy(totals),
        per_rule=per_rule,
        verdicts=[
            {k: row[k] for k in ("id", "rule", "outcome", "error", "verdict")}
            for row in rows
        ],
        metadata={
            "backend": getattr(backend, "name", type(backend).__name__),
            "shots": shots,
            "mode": mode,
            "concurrency": concurrency,
            "decode": decode.to_dict(),
            # None for mock backends that take no decode parameters at all.
            "repetition_penalty_sent": getattr(backend, "send_repetition_penalty", None),
            "questions": len(dataset),
            "started_at": started,
            "finished_at": _now(),
        },
    )
    responses = [
        {k: row.get(k) for k in ("id", "prompt", "raw_output", "extracted", "verdict")}
        for row in rows
    ]
    return report, responses


def run_csqa(
    questions: list[McqQuestion],
    backend: Backend,
    exemplar_block: str,
    concurrency: int = 1,
    max_new_tokens: int | None = None,
    repetition_penalty: float = 0.0001,
) -> tuple[EvalReport, list[dict]]:
    """Evaluate multiple-choice questions; the token budget defaults to the
    estimated input length plus a fixed allowance."""
    if not questions:
        raise ValueError("question list is empty")
    started = _now()

    def _one(question: McqQuestion) -> dict:
        prompt = build_csqa_prompt(exemplar_block, question)
        budget = max_new_tokens
        if budget is None:
            budget = estimate_input_tokens(prompt) + CSQA_EXTRA_TOKENS
        decode = DecodeConfig(max_new_tokens=budget, greedy=True,
                              repetition_penalty=repetition_penalty)
        row = {"id": question.id, "prompt": prompt}
        try:
            raw = complete(backend, prompt, decode, question_id=question.id)
        except BackendError as err:
            row.update(raw_output=None, extracted=None, outcome="unparseable",
                       error=f"{type(err).__name__}: {err}")
            return row
        outcome = extract_csqa(raw, prompt, question.answer_key)
        label = {
            McqResult.CORRECT: "correct",
            McqResult.INCORRECT: "incorrect",
            McqResult.NO_ANSWER: "unparseable",
        }[outcome.result]
        row.update(raw_output=raw, extracted=outcome.extracted, outcome=label, error=None)
        return row

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        rows = list(pool.map(_one, questions))
    for row in rows:
        row["verdict"] = row["outcome"]

    totals = _tally(rows)
    report = EvalReport(
        task="csqa",
        totals=totals,
        accuracy=_accuracy(totals),
        per_rule={},
        verdicts=[
            {k: row.get(k) for k in ("id", "outcome", "extracted", "error")}
            for row in rows
        ],
        metadata={
            "backend": getattr(backend, "name", type(backend).__name__),
            "concurrency": concurrency,
            "questions": len(questions),
            "max_new_tokens": max_new_tokens if max_new_tokens is not None
            else f"input_estimate+{CSQA_EXTRA_TOKENS}",
            "input_token_estimate": f"ceil(bytes/{BYTES_PER_TOKEN_ESTIMATE})",
            "repetition_penalty": repetition_penalty,
            "repetition_penalty_sent": getattr(backend, "send_repetition_penalty", None),
            "started_at": started,
            "finished_at": _now(),
        },
    )
    responses = [
        {k: row.get(k) for k in ("id", "prompt", "raw_output", "extracted", "verdict")}
        for row in rows
    ]
    return report, responses
