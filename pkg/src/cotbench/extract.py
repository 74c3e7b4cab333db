"""String-parsing protocols for model outputs.

Both extractors are total: they never raise on arbitrary byte strings. The
prompt prefix is removed by longest common prefix rather than exact
equality, which tolerates backends that lightly normalize whitespace when
echoing the prompt.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

_CSQA_MARKER = "So the answer is ("
_MCQ_LETTERS = "abcde"


class McqResult(Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    NO_ANSWER = "no_answer"


@dataclass(frozen=True)
class McqOutcome:
    result: McqResult
    extracted: str | None = None

    def __post_init__(self) -> None:
        if (self.result is McqResult.NO_ANSWER) != (self.extracted is None):
            raise ValueError("extracted is present exactly when an answer was found")


def _strip_prompt(raw_output: str, prompt: str) -> str:
    if not prompt:
        return raw_output
    if raw_output.startswith(prompt):
        return raw_output[len(prompt):]
    shared = 0
    limit = min(len(raw_output), len(prompt))
    while shared < limit and raw_output[shared] == prompt[shared]:
        shared += 1
    return raw_output[shared:]


def extract_csqa(raw_output: str, prompt: str, answer_key: str) -> McqOutcome:
    """Find the first "So the answer is (" marker and read the letter before
    the next ")". Any failure along the way means the question went
    unanswered; letter comparison ignores case."""
    remainder = _strip_prompt(raw_output, prompt)
    marker_at = remainder.find(_CSQA_MARKER)
    if marker_at < 0:
        return McqOutcome(McqResult.NO_ANSWER)
    after = remainder[marker_at + len(_CSQA_MARKER):]
    close_at = after.find(")")
    if close_at < 0:
        return McqOutcome(McqResult.NO_ANSWER)
    extracted = after[:close_at]
    if len(extracted) != 1 or extracted.lower() not in _MCQ_LETTERS:
        return McqOutcome(McqResult.NO_ANSWER)
    if extracted.lower() == answer_key.lower():
        return McqOutcome(McqResult.CORRECT, extracted)
    return McqOutcome(McqResult.INCORRECT, extracted)


def extract_cot(raw_output: str, prompt: str) -> str:
    """Everything before the first "Q:" in the continuation, whitespace
    trimmed. Idempotent when reapplied with an empty prompt."""
    remainder = _strip_prompt(raw_output, prompt)
    cut = remainder.find("Q:")
    if cut >= 0:
        remainder = remainder[:cut]
    return remainder.strip()
