"""Pack a fine-tuning corpus into fixed-size token blocks.

Record texts are tokenized, concatenated into one stream, and cut into
consecutive blocks; the trailing partial block is dropped. Output is raw
little-endian int32 token ids plus a JSON manifest with the token counts.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from transformers import AutoTokenizer


def read_corpus_texts(path: str | Path) -> list[str]:
    """One JSON record per line with a ``text`` field."""
    texts = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                texts.append(json.loads(line)["text"])
    return texts


def pack_blocks(texts: list[str], tokenizer_id: str, block_size: int = 1024) -> tuple[list[list[int]], dict]:
    """Return (blocks, stats). ``stats`` records total, packed, and dropped
    token counts."""
    if block_size < 1:
        raise ValueError("block_size must be positive")
    tokenizer = AutoTokenizer.from_pretrained(tokenizer_id)
    stream: list[int] = []
    for text in texts:
        stream.extend(tokenizer.encode(text, add_special_tokens=False))
    n_blocks = len(stream) // block_size
    blocks = [stream[i * block_size:(i + 1) * block_size] for i in range(n_blocks)]
    stats = {
        "records": len(texts),
        "total_tokens": len(stream),
        "block_size": block_size,
        "n_blocks": n_blocks,
        "packed_tokens": n_blocks * block_size,
        "dropped_tokens": len(stream) - n_blocks * block_size,
    }
    return blocks, stats


def write_packed(blocks: list[list[int]], stats: dict, tokenizer_id: str,
                 out_path: str | Path) -> dict:
    """Write the .bin token file and its sidecar manifest; returns the
    manifest."""
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    flat = np.array([token for block in blocks for token in block], dtype="<i4")
    flat.tofile(out)
    manifest = dict(stats, tokenizer=str(tokenizer_id), output=out.name, token_dtype="int32-le")
    manifest_path = out.with_suffix(out.suffix + ".manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    return manifest
