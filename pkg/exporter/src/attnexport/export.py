"""Run a prompt through a local causal LM with attention capture and write
the interchange file the scoring toolkit consumes.

All scoring math lives on the consumer side; this adapter only captures and
serializes. The file layout is the interchange contract: model_id, prompt,
tokens (the tokenizer's string pieces), shape {layers, heads, n}, and
attention as [layer][head][query][key] floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer


class ExportError(RuntimeError):
    pass


_DTYPES = {
    "float32": torch.float32,
    "half": torch.float16,
    "float16": torch.float16,
    "bfloat16": torch.bfloat16,
}


@dataclass(frozen=True)
class ExportRequest:
    model: str
    prompt: str
    out_path: str | Path
    dtype: str = "float32"

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        if self.dtype not in _DTYPES:
            raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {self.dtype!r}")


def _load(model_id: str, dtype: str):
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        # Eager attention so the per-head weights are actually materialized.
        model = AutoModelForCausalLM.from_pretrained(
            model_id, attn_implementation="eager", dtype=_DTYPES[dtype]
        )
    except Exception as err:
        raise ExportError(f"could not load checkpoint {model_id!r}: {err}") from err
    model.eval()
    return tokenizer, model


def capture_attention(request: ExportRequest) -> dict:
    """Forward the prompt once and return the interchange payload."""
    tokenizer, model = _load(request.model, request.dtype)
    encoded = tokenizer(request.prompt, return_tensors="pt")
    input_ids = encoded["input_ids"]
    tokens = tokenizer.convert_ids_to_tokens(input_ids[0])
    try:
        with torch.no_grad():
            output = model(**encoded, output_attentions=True)
    except torch.cuda.OutOfMemoryError as err:
        raise ExportError(
            f"out of memory on a {input_ids.shape[1]}-token prompt: {err}"
        ) from err
    if not output.attentions:
        raise ExportError("model returned no attention tensors")
    # (layers, heads, n, n); upcast so serialization is exact for the dtype.
    stacked = torch.stack(output.attentions, dim=0).squeeze(1).float().cpu().numpy()
    layers, heads, n, _ = stacked.shape
    if n != len(tokens):
        raise ExportError(f"token count {len(tokens)} does not match matrix size {n}")
    return {
        "model_id": str(request.model),
        "prompt": request.prompt,
        "tokens": list(tokens),
        "shape": {"layers": int(layers), "heads": int(heads), "n": int(n)},
        "attention": stacked.tolist(),
    }


def export_attention(request: ExportRequest) -> Path:
    """Write the interchange file and return its path."""
    payload = capture_attention(request)
    out = Path(request.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)
        handle.write("\n")
    return out
