"""Deductive-reasoning CoT benchmark kit.

Submodules: ``logic`` (statements, rules, proofs), ``grammar`` (realize and
parse), ``generate`` (seeded datasets and the fine-tuning corpus),
``prompts`` (few-shot prompt assembly), ``extract`` (output parsing),
``proofcheck`` (strict/valid verdicts), ``backends`` and ``harness``
(evaluation runs), ``attention`` (token-level scoring), ``figures``.
"""

__version__ = "0.1.0"
