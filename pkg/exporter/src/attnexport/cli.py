"""Console entry points: ``export-attn`` and ``pack-blocks``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import ExportRequest, export_attention
from .pack import pack_blocks, read_corpus_texts, write_packed


def main_export(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="export-attn",
        description="Capture attention for a prompt and write the interchange file",
    )
    parser.add_argument("--model", required=True, help="checkpoint id or local path")
    parser.add_argument("--prompt-file", required=True, help="file whose contents are the prompt")
    parser.add_argument("--out", required=True, help="interchange JSON path")
    parser.add_argument("--dtype", default="float32",
                        choices=("float32", "half", "float16", "bfloat16"))
    args = parser.parse_args(argv)
    prompt = Path(args.prompt_file).read_text(encoding="utf-8")
    request = ExportRequest(model=args.model, prompt=prompt, out_path=args.out, dtype=args.dtype)
    path = export_attention(request)
    print(f"wrote {path}")
    return 0


def main_pack(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pack-blocks",
        description="Pack a corpus JSONL into fixed-size token blocks",
    )
    parser.add_argument("--corpus", required=True, help="JSONL with a text field per record")
    parser.add_argument("--tokenizer", required=True, help="tokenizer id or local path")
    parser.add_argument("--block", type=int, default=1024)
    parser.add_argument("--out", required=True, help="output .bin path")
    args = parser.parse_args(argv)
    texts = read_corpus_texts(args.corpus)
    blocks, stats = pack_blocks(texts, args.tokenizer, args.block)
    manifest = write_packed(blocks, stats, args.tokenizer, args.out)
    print(
        f"packed {manifest['n_blocks']} blocks of {manifest['block_size']} tokens "
        f"({manifest['dropped_tokens']} dropped) into {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main_export())
