"""Completion backends behind one contract: (prompt, DecodeConfig) -> text.

The HTTP backend speaks the plain completions protocol: POST
{base_url}/completions with model, prompt, max_tokens, temperature, and an
optional repetition_penalty; the response must carry choices[0].text. The
three mock backends exist so the full pipeline can run and be tested
without any model hosting.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Mapping, Protocol

import requests

from .generate import build_gold_chain
from .grammar import parse_sentence, realize_chain, split_sentences
from .logic import (
    DeductionRule,
    Everything,
    Lexicon,
    Named,
    Or,
    Quantified,
    Statement,
    DEFAULT_LEXICON,
)

TOKEN_ENV_VAR = "COTBENCH_API_TOKEN"


class BackendError(RuntimeError):
    pass


class BackendUnavailable(BackendError):
    """Network failure or repeated server errors."""


class BackendRejected(BackendError):
    """The server answered but refused or returned an unusable body."""


class Timeout(BackendError):
    pass


@dataclass(frozen=True)
class DecodeConfig:
    max_new_tokens: int = 256
    greedy: bool = True
    repetition_penalty: float = 0.0001

    def to_dict(self) -> dict:
        return {
            "max_new_tokens": self.max_new_tokens,
            "greedy": self.greedy,
            "repetition_penalty": self.repetition_penalty,
        }


class Backend(Protocol):
    name: str

    def complete(self, prompt: str, config: DecodeConfig, question_id: str | None = None) -> str:
        ...


def complete(backend: Backend, prompt: str, config: DecodeConfig,
             question_id: str | None = None) -> str:
    if not prompt:
        raise ValueError("prompt must be nonempty")
    return backend.complete(prompt, config, question_id)


def infer_rule(premises: tuple[Statement, ...], conclusion: Statement) -> DeductionRule:
    """Recover the deduction rule from the shapes of a parsed question."""
    R = DeductionRule
    if len(premises) == 3:
        return R.DISJUNCTION_ELIMINATION
    if len(premises) == 1:
        if isinstance(conclusion.complement, Or):
            return R.DISJUNCTION_INTRODUCTION
        return R.CONJUNCTION_ELIMINATION
    if any(isinstance(p.subject, Everything) for p in premises):
        return R.PROOF_BY_CONTRADICTION
    if any(isinstance(p.subject, Quantified) for p in premises):
        return R.IMPLICATION_ELIMINATION
    return R.CONJUNCTION_INTRODUCTION


def parse_test_block(prompt: str, lexicon: Lexicon) -> tuple[tuple[Statement, ...], Statement]:
    """Read the trailing open question block of a few-shot prompt back into
    premises and a conclusion."""
    block = prompt.rsplit("\n\n", 1)[-1]
    if not block.startswith("Q: ") or " Prove: " not in block or not block.endswith("\nA: "):
        raise ValueError("prompt does not end with an open question block")
    body = block[len("Q: "):-len("\nA: ")]
    premises_text, conclusion_text = body.split(" Prove: ", 1)
    premises = tuple(parse_sentence(s, lexicon) for s in split_sentences(premises_text))
    conclusion = parse_sentence(conclusion_text, lexicon)
    return premises, conclusion


_CSQA_CHOICE_MARK = " Answer Choices: (a) "


def _looks_like_csqa(prompt: str) -> bool:
    return _CSQA_CHOICE_MARK in prompt


class GoldOracle:
    """Answers every question correctly: re-derives the gold chain from the
    prompt's test block, or looks up the gold letter for multiple choice."""

    name = "gold"

    def __init__(self, lexicon: Lexicon = DEFAULT_LEXICON,
                 answer_keys: Mapping[str, str] | None = None):
        self.lexicon = lexicon
        self.answer_keys = dict(answer_keys or {})

    def complete(self, prompt: str, config: DecodeConfig, question_id: str | None = None) -> str:
        if question_id is not None and question_id in self.answer_keys:
            return f"So the answer is ({self.answer_keys[question_id].lower()})."
        premises, conclusion = parse_test_block(prompt, self.lexicon)
        rule = infer_rule(premises, conclusion)
        return realize_chain(build_gold_chain(rule, premises, conclusion))


CORRUPTION_POLICIES = ("repeat_premise_noun", "truncate_final", "garble")


class CorruptOracle:
    """Produces systematically wrong chains. The default policy replays the
    classic small-model failure: the final sentence repeats the fact
    premise's noun phrase instead of the conclusion's complement."""

    name = "corrupt"

    def __init__(self, lexicon: Lexicon = DEFAULT_LEXICON, policy: str = "repeat_premise_noun"):
        if policy not in CORRUPTION_POLICIES:
            raise ValueError(f"unknown corruption policy: {policy!r}")
        self.lexicon = lexicon
        self.policy = policy

    def complete(self, prompt: str, config: DecodeConfig, question_id: str | None = None) -> str:
        if _looks_like_csqa(prompt):
            return ""
        premises, conclusion = parse_test_block(prompt, self.lexicon)
        rule = infer_rule(premises, conclusion)
        gold = realize_chain(build_gold_chain(rule, premises, conclusion))
        if self.policy == "garble":
            return "Colorless green ideas sleep furiously."
        sentences = gold.replace("\n", " ").split(". ")
        if self.policy == "truncate_final":
            return ". ".join(sentences[:-1]) + "." if len(sentences) > 1 else ""
        fact = next((p for p in premises if isinstance(p.subject, Named)), premises[0])
        corrupted_final = Statement(fact.subject, conclusion.negated, fact.complement)
        from .grammar import realize  # local to avoid a cycle at import time

        sentences[-1] = realize(corrupted_final)[:-1]
        return ". ".join(sentences) + "."


class Scripted:
    """Fixed outputs keyed by question id."""

    name = "scripted"

    def __init__(self, outputs: Mapping[str, str]):
        self.outputs = dict(outputs)

    def complete(self, prompt: str, config: DecodeConfig, question_id: str | None = None) -> str:
        if question_id not in self.outputs:
            raise BackendRejected(f"no scripted output for question {question_id!r}")
        return self.outputs[question_id]


class HttpCompletion:
    """Client for a completions endpoint with bounded retries on transient
    failures. 4xx responses are never retried."""

    name = "http"

    def __init__(
        self,
        base_url: str,
        model_id: str,
        token_env: str = TOKEN_ENV_VAR,
        timeout: float = 60.0,
        retries: int = 2,
        backoff: float = 0.5,
        send_repetition_penalty: bool = True,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.token_env = token_env
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.send_repetition_penalty = send_repetition_penalty
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str, config: DecodeConfig, question_id: str | None = None) -> str:
        body = {
            "model": self.model_id,
            "prompt": prompt,
            "max_tokens": config.max_new_tokens,
        }
        if config.greedy:
            body["temperature"] = 0.0
        if self.send_repetition_penalty:
            body["repetition_penalty"] = config.repetition_penalty
        url = f"{self.base_url}/completions"
        failure: BackendError | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * attempt)
            try:
                response = self.session.post(url, json=body, headers=self._headers(),
                                             timeout=self.timeout)
            except requests.Timeout:
                failure = Timeout(f"completion request timed out after {self.timeout}s")
                continue
            except requests.RequestException as err:
                failure = BackendUnavailable(f"completion request failed: {err}")
                continue
            if response.status_code >= 500:
                failure = BackendUnavailable(f"server error {response.status_code}")
                continue
            if response.status_code >= 400:
                raise BackendRejected(
                    f"server rejected request ({response.status_code}): {response.text[:200]}"
                )
            try:
                text = response.json()["choices"][0]["text"]
            except (ValueError, LookupError, TypeError):
                raise BackendRejected("completion response has no choices[0].text") from None
            if not isinstance(text, str):
                raise BackendRejected("completion text is not a string")
            return text
        assert failure is not None
        raise failure
