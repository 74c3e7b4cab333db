"""Builds a tiny randomly initialized causal LM checkpoint on disk so the
exporter can run fully offline. The word-level tokenizer covers the closed
vocabulary of the reasoning corpus plus a handful of markers."""

from __future__ import annotations

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, trainers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

CONCEPTS = ["impus", "sterpus", "wumpus", "yumpus", "zumpus",
            "dumpus", "rompus", "numpus", "tumpus", "vumpus"]
ADJECTIVES = ["floral", "earthy", "hot", "transparent", "loud", "liquid"]
NAMES = ["Alex", "Wren", "Max", "Sam", "Fae", "Polly"]
MARKERS = [
    "Q", "A", ":", ".", ",", "Prove", "Assume", "Since", "This", "contradicts",
    "with", "Every", "Each", "every", "each", "is", "are", "not", "a", "an",
    "or", "and", "Everything", "everything", "that",
]


def _plural(word: str) -> str:
    return word + ("es" if word.endswith("s") else "s")


def _vocabulary() -> list[str]:
    plurals = [_plural(c) for c in CONCEPTS]
    capitalized = [w.capitalize() for w in CONCEPTS + plurals]
    return CONCEPTS + plurals + capitalized + ADJECTIVES + NAMES + MARKERS


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory) -> str:
    directory = tmp_path_factory.mktemp("tiny-checkpoint")
    tokenizer = Tokenizer(models.WordLevel(unk_token="[UNK]"))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.WordLevelTrainer(special_tokens=["[UNK]", "[EOS]"])
    tokenizer.train_from_iterator([" ".join(_vocabulary())], trainer)
    fast = PreTrainedTokenizerFast(tokenizer_object=tokenizer,
                                   unk_token="[UNK]", eos_token="[EOS]")
    config = GPT2Config(
        vocab_size=fast.vocab_size + 8,
        n_positions=2048,
        n_embd=32,
        n_layer=2,
        n_head=2,
        bos_token_id=fast.eos_token_id,
        eos_token_id=fast.eos_token_id,
    )
    torch.manual_seed(1234)
    model = GPT2LMHeadModel(config)
    model.save_pretrained(directory)
    fast.save_pretrained(directory)
    return str(directory)
