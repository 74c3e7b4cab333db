"""Token-level scoring over attention matrices and its renderers.

Conventions: ``A[j, i]`` is how much query row ``j`` attends to key column
``i``, so a column sum is the total attention a token *receives*. Scoring:

* global score  g_i = sum_j A[j, i]; with ``zero_first`` the first token's
  score is forced to 0 so it cannot dominate,
* B = A @ diag(g), then B is normalized column-wise (an all-zero column
  stays all zero),
* proportional score p_i = sum over the i-th *row* of the normalized B,
* total s = g + p, min-max normalized into [0, 1] (all zeros when s is
  constant).
"""

from __future__ import annotations

import csv
import html
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

ROW_SUM_TOLERANCE = 1e-3
CAUSAL_TOLERANCE = 1e-6


class NonSquareMatrix(ValueError):
    pass


class NegativeEntry(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class LengthMismatch(ValueError):
    pass


class InvalidAttentionFile(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TokenScores:
    global_scores: np.ndarray
    proportional_scores: np.ndarray
    totals: np.ndarray
    normalized: np.ndarray


def token_scores(matrix: np.ndarray, zero_first: bool = True) -> TokenScores:
    """Score one n-by-n attention matrix. Entries must be finite and
    non-negative; rows need not be normalized."""
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquareMatrix(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)) or np.any(A < 0):
        raise NegativeEntry("matrix entries must be finite and non-negative")
    g = A.sum(axis=0)
    if zero_first and g.size:
        g = g.copy()
        g[0] = 0.0
    scaled = A * g[np.newaxis, :]
    column_sums = scaled.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        normalized_columns = np.where(column_sums > 0, scaled / column_sums, 0.0)
    p = normalized_columns.sum(axis=1)
    s = g + p
    spread = s.max() - s.min() if s.size else 0.0
    if spread > 0:
        s_norm = (s - s.min()) / spread
    else:
        s_norm = np.zeros_like(s)
    return TokenScores(g, p, s, s_norm)


@dataclass(frozen=True, eq=False)
class AttentionRecord:
    """Tokens plus the per-layer, per-head attention tensor loaded from an
    interchange file. ``matrices`` has shape (layers, heads, n, n)."""

    model_id: str
    prompt: str
    tokens: tuple[str, ...]
    matrices: np.ndarray

    @property
    def layers(self) -> int:
        return self.matrices.shape[0]

    @property
    def heads(self) -> int:
        return self.matrices.shape[1]

    @property
    def size(self) -> int:
        return len(self.tokens)

    def matrix(self, layer: int, head: int) -> np.ndarray:
        return self.matrices[_resolve(layer, self.layers, "layer"),
                             _resolve(head, self.heads, "head")]


def _resolve(index: int, bound: int, what: str) -> int:
    resolved = index + bound if index < 0 else index
    if not 0 <= resolved < bound:
        raise IndexOutOfRange(f"{what} index {index} out of range for {bound} {what}s")
    return resolved


def _schema() -> dict:
    text = resources.files("cotbench.data").joinpath("attention_record.schema.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def validate_record_data(data: dict) -> None:
    """Schema check plus the numeric invariants the schema cannot express:
    shape consistency, non-negative entries, row-stochastic rows, and a
    causal upper triangle."""
    try:
        jsonschema.validate(data, _schema())
    except jsonschema.ValidationError as err:
        raise InvalidAttentionFile(f"schema violation: {err.message}") from None
    shape = data["shape"]
    n = shape["n"]
    if len(data["tokens"]) != n:
        raise InvalidAttentionFile(
            f"shape.n is {n} but there are {len(data['tokens'])} tokens"
        )
    matrices = np.asarray(data["attention"], dtype=float)
    if matrices.shape != (shape["layers"], shape["heads"], n, n):
        raise InvalidAttentionFile(
            f"attention tensor has shape {matrices.shape}, expected "
            f"({shape['layers']}, {shape['heads']}, {n}, {n})"
        )
    if not np.all(np.isfinite(matrices)) or np.any(matrices < 0):
        raise InvalidAttentionFile("attention entries must be finite and non-negative")
    row_sums = matrices.sum(axis=-1)
    if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOLERANCE):
        worst = float(np.abs(row_sums - 1.0).max())
        raise InvalidAttentionFile(
            f"attention rows must sum to 1 (worst deviation {worst:.2e})"
        )
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    if np.any(np.abs(matrices[..., upper]) > CAUSAL_TOLERANCE):
        raise InvalidAttentionFile("entries above the diagonal must be zero (causal attention)")


def record_from_dict(data: dict) -> AttentionRecord:
    validate_record_data(data)
    return AttentionRecord(
        model_id=data["model_id"],
        prompt=data["prompt"],
        tokens=tuple(data["tokens"]),
        matrices=np.asarray(data["attention"], dtype=float),
    )


def load_attention_record(path: str | Path) -> AttentionRecord:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    return record_from_dict(data)


def save_attention_record(record: AttentionRecord, path: str | Path) -> None:
    data = {
        "model_id": record.model_id,
        "prompt": record.prompt,
        "tokens": list(record.tokens),
        "shape": {"layers": record.layers, "heads": record.heads, "n": record.size},
        "attention": record.matrices.tolist(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle)
        handle.write("\n")


def score_prompt(record: AttentionRecord, layer: int = -1, head: int = 0,
                 zero_first: bool = True) -> TokenScores:
    """Token scores for one head; layer -1 selects the last layer."""
    return token_scores(record.matrix(layer, head), zero_first=zero_first)


def _visible(token: str) -> str:
    escaped = html.escape(token)
    escaped = escaped.replace("\n", "&#x21B5;<br/>")
    escaped = escaped.replace("\t", "&#x21E5;")
    return escaped.replace(" ", "&nbsp;")


_HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8"/>
<title>Token scores</title>
<style>
body {{ font-family: "DejaVu Sans Mono", monospace; margin: 2em; }}
.tokens {{ line-height: 1.9; word-wrap: break-word; }}
.tok {{ padding: 1px 0; border-radius: 2px; }}
.legend {{ margin-top: 1.5em; width: 320px; font-size: 0.85em; }}
.legend-bar {{ height: 14px; border: 1px solid #999;
  background: linear-gradient(to right, hsl({hue}, 0%, {lightness}%), hsl({hue}, 100%, {lightness}%)); }}
.legend-labels {{ display: flex; justify-content: space-between; }}
</style>
</head>
<body>
<div class="tokens">{spans}</div>
<div class="legend">
<div class="legend-bar"></div>
<div class="legend-labels"><span>0.0</span><span>normalized score</span><span>1.0</span></div>
</div>
</body>
</html>
"""

_HUE = 24
_LIGHTNESS = 72


def render_token_html(tokens: list[str] | tuple[str, ...], normalized) -> str:
    """Self-contained page where each token's background saturation is
    linear in its normalized score; whitespace tokens stay visible."""
    values = np.asarray(normalized, dtype=float)
    if len(tokens) != values.size:
        raise LengthMismatch(f"{len(tokens)} tokens but {values.size} scores")
    spans = []
    for token, value in zip(tokens, values):
        saturation = min(max(float(value), 0.0), 1.0) * 100.0
        spans.append(
            f'<span class="tok" style="background-color: hsl({_HUE}, {saturation:.2f}%, '
            f'{_LIGHTNESS}%)" title="{float(value):.6f}">{_visible(token)}</span>'
        )
    return _HTML_TEMPLATE.format(hue=_HUE, lightness=_LIGHTNESS, spans="".join(spans))


def head_matrix_rows(record: AttentionRecord, layer: int, head: int) -> list[list[str]]:
    """Tabular dump of one head: header row of key tokens, then one row per
    query with its weights and the strongest key token excluding key 1."""
    matrix = record.matrix(layer, head)
    header = ["query"] + list(record.tokens) + ["top_key", "top_key_index"]
    rows = [header]
    for j, token in enumerate(record.tokens):
        weights = matrix[j]
        if record.size > 1:
            top = 1 + int(np.argmax(weights[1:]))
            top_token, top_index = record.tokens[top], str(top)
        else:
            top_token, top_index = "", ""
        rows.append([token] + [repr(float(w)) for w in weights] + [top_token, top_index])
    return rows


def write_head_matrix_csv(record: AttentionRecord, layer: int, head: int,
                          path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(head_matrix_rows(record, layer, head))
