import json
import subprocess
import sys

import pytest

from attnexport.export import ExportError, ExportRequest, capture_attention, export_attention

TEN_TOKEN_PROMPT = "Wren is a sterpus . Sterpuses are transparent . Wren"


def _score_with_primary_cli(input_path, html_path, csv_path):
    """Drive the consumer toolkit through its CLI; that command is the
    external contract this exporter writes against."""
    return subprocess.run(
        [
            sys.executable, "-m", "cotbench.cli", "attn", "score",
            "--input", str(input_path), "--layer", "-1", "--head", "0",
            "--html", str(html_path), "--csv", str(csv_path), "--no-figures",
        ],
        capture_output=True, text=True,
    )


def test_export_is_schema_valid_and_scorable(tiny_checkpoint, tmp_path):
    out = tmp_path / "attn.json"
    request = ExportRequest(model=tiny_checkpoint, prompt=TEN_TOKEN_PROMPT, out_path=out)
    export_attention(request)

    data = json.loads(out.read_text())
    n = data["shape"]["n"]
    assert n == 10
    assert len(data["tokens"]) == n
    assert len(data["attention"]) == data["shape"]["layers"] == 2
    assert len(data["attention"][0]) == data["shape"]["heads"] == 2
    assert len(data["attention"][0][0]) == n
    assert all(len(row) == n for row in data["attention"][0][0])

    html_path, csv_path = tmp_path / "scores.html", tmp_path / "matrix.csv"
    result = _score_with_primary_cli(out, html_path, csv_path)
    assert result.returncode == 0, result.stderr
    assert html_path.exists() and csv_path.exists()
    assert html_path.read_text().count('<span class="tok"') == n


def test_reloaded_token_list_round_trips(tiny_checkpoint, tmp_path):
    out = tmp_path / "attn.json"
    export_attention(ExportRequest(model=tiny_checkpoint, prompt=TEN_TOKEN_PROMPT, out_path=out))
    tokens = json.loads(out.read_text())["tokens"]

    csv_path = tmp_path / "matrix.csv"
    result = _score_with_primary_cli(out, tmp_path / "x.html", csv_path)
    assert result.returncode == 0, result.stderr
    import csv as csv_module

    with open(csv_path, newline="") as handle:
        header = next(csv_module.reader(handle))
    assert header[1:-2] == tokens


def test_half_precision_export_still_validates(tiny_checkpoint, tmp_path):
    out = tmp_path / "half.json"
    export_attention(ExportRequest(model=tiny_checkpoint, prompt=TEN_TOKEN_PROMPT,
                                   out_path=out, dtype="half"))
    result = _score_with_primary_cli(out, tmp_path / "h.html", tmp_path / "h.csv")
    assert result.returncode == 0, result.stderr


def test_empty_prompt_rejected(tiny_checkpoint, tmp_path):
    with pytest.raises(ValueError):
        ExportRequest(model=tiny_checkpoint, prompt="", out_path=tmp_path / "x.json")


def test_unknown_dtype_rejected(tiny_checkpoint, tmp_path):
    with pytest.raises(ValueError):
        ExportRequest(model=tiny_checkpoint, prompt="hi", out_path=tmp_path / "x.json",
                      dtype="int8")


def test_missing_checkpoint_reports_load_failure(tmp_path):
    request = ExportRequest(model=str(tmp_path / "nope"), prompt="hi",
                            out_path=tmp_path / "x.json")
    with pytest.raises(ExportError):
        capture_attention(request)


def test_export_cli(tiny_checkpoint, tmp_path):
    from attnexport.cli import main_export

    prompt_file = tmp_path / "prompt.txt"
    prompt_file.write_text(TEN_TOKEN_PROMPT, encoding="utf-8")
    out = tmp_path / "cli.json"
    code = main_export(["--model", tiny_checkpoint, "--prompt-file", str(prompt_file),
                        "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["shape"]["n"] == 10
