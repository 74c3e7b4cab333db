"""Command-line interface.

Subcommands: ``gen`` (dataset synthesis), ``corpus`` (fine-tuning corpus),
``run prontoqa`` / ``run csqa`` (evaluation sweeps), and ``attn score``
(token-level attention scoring). Report-writing paths also render figures
next to their outputs unless ``--no-figures`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attention import (
    load_attention_record,
    render_token_html,
    score_prompt,
    write_head_matrix_csv,
)
from .backends import (
    TOKEN_ENV_VAR,
    CorruptOracle,
    GoldOracle,
    HttpCompletion,
    Scripted,
    CORRUPTION_POLICIES,
)
from .generate import CorpusSpec, GenSpec, generate_dataset, load_dataset, write_corpus, write_dataset
from .harness import run_csqa, run_prontoqa
from .logic import Lexicon, rule_from_string, DEFAULT_LEXICON
from .prompts import csqa_exemplar_block, load_csqa_questions


def _load_lexicon(path: str | None) -> Lexicon:
    if path is None:
        return DEFAULT_LEXICON
    with open(path, encoding="utf-8") as handle:
        return Lexicon.from_dict(json.load(handle))


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = GenSpec(
        rule=rule_from_string(args.rule),
        count=args.count,
        seed=args.seed,
        lexicon=_load_lexicon(args.lexicon),
        shuffle_premises=args.shuffle_premises,
    )
    examples = generate_dataset(spec)
    write_dataset(examples, args.out)
    print(f"wrote {len(examples)} {spec.rule.value} examples to {args.out}")
    return 0


def _cmd_corpus(args: argparse.Namespace) -> int:
    spec = CorpusSpec(
        exemplars_per_question=args.exemplars_per_question,
        questions_per_rule=args.questions_per_rule,
        split_fraction=args.split,
        seed=args.seed,
        lexicon=_load_lexicon(args.lexicon),
    )
    manifest = write_corpus(spec, args.out_dir)
    print(
        f"wrote {manifest['split']['train']} train / {manifest['split']['validation']} "
        f"validation records to {args.out_dir}"
    )
    return 0


def _build_backend(args: argparse.Namespace, answer_keys=None):
    lexicon = _load_lexicon(getattr(args, "lexicon", None))
    if args.backend == "gold":
        return GoldOracle(lexicon, answer_keys=answer_keys)
    if args.backend == "corrupt":
        return CorruptOracle(lexicon, policy=args.corrupt_policy)
    if args.backend == "scripted":
        if not args.scripted:
            raise SystemExit("--scripted FILE is required with the scripted backend")
        with open(args.scripted, encoding="utf-8") as handle:
            return Scripted(json.load(handle))
    if args.backend == "http":
        if not args.endpoint:
            raise SystemExit("--endpoint URL is required with the http backend")
        return HttpCompletion(
            args.endpoint,
            args.model or "",
            token_env=args.token_env,
            timeout=args.timeout,
        )
    raise SystemExit(f"unknown backend {args.backend!r}")


def _figure_path(out: str, suffix: str) -> Path:
    base = Path(out)
    return base.with_name(base.stem + suffix + ".png")


def _cmd_run_prontoqa(args: argparse.Namespace) -> int:
    lexicon = _load_lexicon(args.lexicon)
    dataset = load_dataset(args.dataset, lexicon)
    backend = _build_backend(args)
    report, responses = run_prontoqa(
        dataset,
        backend,
        shots=args.shots,
        mode=args.mode,
        concurrency=args.concurrency,
        lexicon=lexicon,
    )
    report.write(args.out)
    if args.responses:
        from .harness import write_responses

        write_responses(responses, args.responses)
    if not args.no_figures:
        from .figures import save_rule_accuracy_figure

        figure = save_rule_accuracy_figure(
            report.per_rule, _figure_path(args.out, "_accuracy"),
            title=f"{report.metadata['backend']} accuracy by rule",
        )
        print(f"figure: {figure}")
    for rule, stats in report.per_rule.items():
        print(f"{rule}: {stats['accuracy']:.2f} ({stats['correct']}/{stats['total']})")
    print(f"overall: {report.accuracy:.4f}; report: {args.out}")
    return 0


def _cmd_run_csqa(args: argparse.Namespace) -> int:
    questions = load_csqa_questions(args.questions)
    if args.exemplars:
        exemplar_block = Path(args.exemplars).read_text(encoding="utf-8")
    else:
        exemplar_block = csqa_exemplar_block()
    answer_keys = {q.id: q.answer_key for q in questions}
    backend = _build_backend(args, answer_keys=answer_keys)
    report, responses = run_csqa(
        questions,
        backend,
        exemplar_block,
        concurrency=args.concurrency,
        max_new_tokens=args.max_new_tokens,
    )
    report.write(args.out)
    if args.responses:
        from .harness import write_responses

        write_responses(responses, args.responses)
    if not args.no_figures:
        from .figures import save_outcome_figure

        figure = save_outcome_figure(
            report.totals, _figure_path(args.out, "_outcomes"),
            title=f"{report.metadata['backend']} outcomes",
        )
        print(f"figure: {figure}")
    print(
        f"accuracy: {report.accuracy:.4f}; unparseable: {report.totals['unparseable']}; "
        f"report: {args.out}"
    )
    return 0


def _cmd_attn_score(args: argparse.Namespace) -> int:
    record = load_attention_record(args.input)
    scores = score_prompt(record, layer=args.layer, head=args.head,
                          zero_first=not args.no_zero_first)
    if not args.html and not args.csv:
        for token, value in zip(record.tokens, scores.normalized):
            print(f"{value:.4f}\t{token!r}")
    if args.html:
        Path(args.html).write_text(
            render_token_html(record.tokens, scores.normalized), encoding="utf-8"
        )
        print(f"html: {args.html}")
    if args.csv:
        write_head_matrix_csv(record, args.layer, args.head, args.csv)
        print(f"csv: {args.csv}")
        if not args.no_figures:
            from .figures import save_attention_heatmap

            figure = save_attention_heatmap(
                record.matrix(args.layer, args.head), record.tokens,
                _figure_path(args.csv, "_heatmap"),
                title=f"{record.model_id} layer {args.layer} head {args.head}",
            )
            print(f"figure: {figure}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotbench",
        description="Deductive-reasoning CoT benchmark kit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a question dataset for one rule")
    gen.add_argument("--rule", required=True,
                     help="rule slug or alias (ie, ci, ce, di, de, pbc)")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--lexicon", help="JSON file with concepts/adjectives/names")
    gen.add_argument("--shuffle-premises", action="store_true")
    gen.set_defaults(func=_cmd_gen)

    corpus = sub.add_parser("corpus", help="emit the fine-tuning corpus and manifest")
    corpus.add_argument("--out-dir", required=True)
    corpus.add_argument("--seed", type=int, required=True)
    corpus.add_argument("--questions-per-rule", type=int, default=100)
    corpus.add_argument("--exemplars-per-question", type=int, default=3)
    corpus.add_argument("--split", type=float, default=0.9)
    corpus.add_argument("--lexicon")
    corpus.set_defaults(func=_cmd_corpus)

    run = sub.add_parser("run", help="run an evaluation")
    run_sub = run.add_subparsers(dest="task", required=True)

    def _common_run_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--backend", choices=("http", "gold", "corrupt", "scripted"),
                       default="gold")
        p.add_argument("--endpoint", help="base URL for the http backend")
        p.add_argument("--model", help="model id sent to the http backend")
        p.add_argument("--scripted", help="JSON file mapping question id to output")
        p.add_argument("--corrupt-policy", choices=CORRUPTION_POLICIES,
                       default="repeat_premise_noun")
        p.add_argument("--concurrency", type=int, default=1)
        p.add_argument("--timeout", type=float, default=60.0)
        p.add_argument("--token-env", default=TOKEN_ENV_VAR,
                       help="environment variable holding the bearer token")
        p.add_argument("--out", required=True, help="report JSON path")
        p.add_argument("--responses", help="optional JSONL of raw responses")
        p.add_argument("--no-figures", action="store_true")
        p.add_argument("--lexicon")

    prontoqa = run_sub.add_parser("prontoqa", help="proof-generation evaluation")
    prontoqa.add_argument("--dataset", required=True)
    prontoqa.add_argument("--shots", type=int, default=8)
    prontoqa.add_argument("--mode", choices=("strict", "valid"), default="strict")
    _common_run_args(prontoqa)
    prontoqa.set_defaults(func=_cmd_run_prontoqa)

    csqa = run_sub.add_parser("csqa", help="multiple-choice evaluation")
    csqa.add_argument("--questions", required=True)
    csqa.add_argument("--exemplars",
                      help="exemplar block file; defaults to the bundled seven")
    csqa.add_argument("--max-new-tokens", type=int,
                      help="override the input-estimate+100 budget")
    _common_run_args(csqa)
    csqa.set_defaults(func=_cmd_run_csqa)

    attn = sub.add_parser("attn", help="attention-map tools")
    attn_sub = attn.add_subparsers(dest="attn_command", required=True)
    score = attn_sub.add_parser("score", help="score one head and render outputs")
    score.add_argument("--input", required=True, help="attention interchange JSON")
    score.add_argument("--layer", type=int, default=-1)
    score.add_argument("--head", type=int, default=0)
    score.add_argument("--html", help="write the colored-token page here")
    score.add_argument("--csv", help="write the head matrix table here")
    score.add_argument("--no-zero-first", action="store_true",
                       help="keep the first token's received-attention score")
    score.add_argument("--no-figures", action="store_true")
    score.set_defaults(func=_cmd_attn_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
