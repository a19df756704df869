"""Command-line entry point.

Subcommands:

    train          train one model per seed, logging metrics and writing
                   best-validation checkpoints
    eval-words     score a checkpoint on word-similarity TSV datasets
    eval-sentences linear-probe (or direct-cosine) evaluation of frozen
                   sentence representations on a TSV task
    analyze-gates  per-word gate values against corpus frequency
    significance   Welch-test per-seed results against the best method
    grad-check     run the gradient verification suite

Exit codes: 0 success, 1 validation or usage error, 2 runtime failure.
Every subcommand writes only beneath its --out path.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from collections import Counter

from . import checkpoint
from .combine import METHODS, normalize_method
from .config import build_train_config, parse_config_file, parse_seeds
from .data import load_wordsim
from .probe import load_probe_task, run_probe_task
from .stats import SeedGroupResult, gate_profile, significance_table
from .tokenizer import tokenize
from .training import run_seeds, write_metric_log
from .wordsim import evaluate_wordsim

__all__ = ["main", "dispatch"]


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_(1, f"{self.prog}: error: {message}")


class SystemExit_(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


def _build_parser() -> _Parser:
    parser = _Parser(prog="chargate", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_train = sub.add_parser("train", help="train models, one run per seed")
    p_train.add_argument("--method", help=f"combination method ({'|'.join(METHODS)})")
    p_train.add_argument("--data", help="directory holding train.jsonl and dev.jsonl")
    p_train.add_argument("--config", help="key = value config file")
    p_train.add_argument("--seeds", help="comma list or inclusive range, e.g. 1..7")
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--parallel-seeds", type=int, default=1, metavar="N")

    p_words = sub.add_parser("eval-words", help="word-similarity evaluation")
    p_words.add_argument("--checkpoint", required=True)
    p_words.add_argument("--datasets", required=True, help="TSV file or directory of TSV files")
    p_words.add_argument("--out", required=True, help="report CSV path")
    p_words.add_argument("--keep-case", action="store_true", help="do not lowercase pairs")

    p_sent = sub.add_parser("eval-sentences", help="probe frozen sentence vectors")
    p_sent.add_argument("--checkpoint", required=True)
    p_sent.add_argument("--task", required=True, help="TSV task file")
    p_sent.add_argument("--kind", required=True, choices=["cls", "rel", "sts"])
    p_sent.add_argument("--eval-task", help="optional held-out TSV to score instead")
    p_sent.add_argument("--l2", type=float, default=0.0)
    p_sent.add_argument("--out", required=True, help="report CSV path")

    p_gates = sub.add_parser("analyze-gates", help="gate values vs corpus frequency")
    p_gates.add_argument("--checkpoint", required=True)
    p_gates.add_argument("--wordlist", required=True, help="file with one word per line")
    p_gates.add_argument("--freq-from", required=True, help="text corpus to count frequencies in")
    p_gates.add_argument("--out", required=True, help="CSV path")
    p_gates.add_argument("--per-dim", action="store_true", help="emit every gate dimension")

    p_sig = sub.add_parser("significance", help="per-condition Welch tests")
    p_sig.add_argument("--results", required=True, help="CSV: dataset,task,method,seed,value")
    p_sig.add_argument("--alpha", type=float, default=0.05)
    p_sig.add_argument("--out", required=True, help="CSV path")

    p_grad = sub.add_parser("grad-check", help="gradient verification suite")
    p_grad.add_argument("--points", type=int, default=100)
    p_grad.add_argument("--epsilon", type=float, default=1e-5)
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--threshold", type=float, default=1e-4)

    return parser


def _cmd_train(args) -> int:
    file_values = parse_config_file(args.config) if args.config else {}
    overrides: dict = {"out_dir": args.out}
    if args.method:
        overrides["method"] = normalize_method(args.method)
    if args.seeds:
        overrides["seeds"] = parse_seeds(args.seeds)
    if args.data:
        overrides["train_path"] = os.path.join(args.data, "train.jsonl")
        overrides["dev_path"] = os.path.join(args.data, "dev.jsonl")
        default_embeddings = os.path.join(args.data, "embeddings.txt")
        if os.path.exists(default_embeddings) and "embeddings_path" not in file_values:
            overrides["embeddings_path"] = default_embeddings
    config = build_train_config(file_values, overrides)

    os.makedirs(args.out, exist_ok=True)
    outcomes = run_seeds(config, parallel=args.parallel_seeds)
    summary_path = os.path.join(args.out, "results.csv")
    with open(summary_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["seed", "status", "best_val_acc", "best_epoch", "checkpoint", "error"])
        for outcome in outcomes:
            if outcome.failed:
                writer.writerow([outcome.seed, "failed", "", "", "", outcome.error])
                continue
            state = outcome.state
            write_metric_log(state, os.path.join(args.out, f"seed{outcome.seed}_log.csv"))
            writer.writerow(
                [
                    outcome.seed,
                    "ok",
                    repr(state.best_val_acc),
                    state.best_epoch,
                    state.best_checkpoint_path or "",
                    "",
                ]
            )
    failures = [o for o in outcomes if o.failed]
    for outcome in failures:
        print(f"seed {outcome.seed} failed: {outcome.error}", file=sys.stderr)
    print(f"wrote {summary_path}")
    return 2 if failures else 0


def _cmd_eval_words(args) -> int:
    model = checkpoint.load_model(args.checkpoint)
    if os.path.isdir(args.datasets):
        paths = sorted(
            os.path.join(args.datasets, name)
            for name in os.listdir(args.datasets)
            if name.endswith(".tsv")
        )
        if not paths:
            raise ValueError(f"{args.datasets}: no .tsv files found")
    else:
        paths = [args.datasets]
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["dataset", "n_pairs", "pearson_x100", "spearman_x100", "coverage"])
        for path in paths:
            name = os.path.splitext(os.path.basename(path))[0]
            pairs = load_wordsim(path, lowercase=not args.keep_case)
            report = evaluate_wordsim(model, pairs, dataset=name)
            if report.skipped:
                print(f"{name}: skipped ({report.note})", file=sys.stderr)
                writer.writerow([name, report.n_pairs, "", "", _fmt(report.coverage)])
                continue
            writer.writerow(
                [
                    name,
                    report.n_pairs,
                    repr(report.pearson_x100),
                    repr(report.spearman_x100),
                    _fmt(report.coverage),
                ]
            )
    print(f"wrote {args.out}")
    return 0


def _fmt(value) -> str:
    return "" if value is None else repr(value)


def _cmd_eval_sentences(args) -> int:
    model = checkpoint.load_model(args.checkpoint)
    task = load_probe_task(args.task, args.kind)
    eval_task = load_probe_task(args.eval_task, args.kind) if args.eval_task else None
    metric, probe = run_probe_task(model, task, l2=args.l2, eval_task=eval_task)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["task", "kind", "metric", "n_examples", "l2", "probe_iterations"])
        writer.writerow(
            [
                task.name,
                task.kind,
                repr(metric),
                len(task.labels),
                repr(args.l2),
                probe.iterations if probe is not None else "",
            ]
        )
    print(f"wrote {args.out}")
    return 0


def _cmd_analyze_gates(args) -> int:
    model = checkpoint.load_model(args.checkpoint)
    with open(args.wordlist, encoding="utf-8") as handle:
        words = [line.strip() for line in handle if line.strip()]
    if not words:
        raise ValueError(f"{args.wordlist}: no words")
    frequencies: Counter = Counter()
    with open(args.freq_from, encoding="utf-8") as handle:
        for line in handle:
            frequencies.update(tokenize(line))
    profiles = gate_profile(model, words, frequencies)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["word", "frequency", "mean_gate"]
        if args.per_dim:
            header += [f"gate_{i}" for i in range(len(profiles[0].gate))]
        writer.writerow(header)
        for profile in profiles:
            fields = [profile.word, profile.frequency, repr(profile.mean_gate)]
            if args.per_dim:
                fields += [repr(float(v)) for v in profile.gate]
            writer.writerow(fields)
    print(f"wrote {args.out}")
    return 0


def _cmd_significance(args) -> int:
    groups: dict[tuple[str, str, str], list[float]] = {}
    with open(args.results, newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"dataset", "task", "method", "seed", "value"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"{args.results}: need columns {sorted(required)}")
        for record in reader:
            key = (record["dataset"], record["task"], record["method"])
            groups.setdefault(key, []).append(float(record["value"]))
    seed_groups = [
        SeedGroupResult(dataset, task, method, values)
        for (dataset, task, method), values in groups.items()
    ]
    rows = significance_table(seed_groups, alpha=args.alpha)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["dataset", "task", "method", "mean", "is_best", "t", "dof", "p", "significant", "note"]
        )
        for r in rows:
            writer.writerow(
                [
                    r.dataset,
                    r.task,
                    r.method,
                    repr(r.mean),
                    int(r.is_best),
                    _fmt(r.t),
                    _fmt(r.dof),
                    _fmt(r.p),
                    "" if r.significant is None else int(r.significant),
                    r.note,
                ]
            )
    print(f"wrote {args.out}")
    return 0


def _cmd_grad_check(args) -> int:
    from .verification import gradient_suite

    results = gradient_suite(points=args.points, epsilon=args.epsilon, seed=args.seed)
    ok = True
    for name, error in results.items():
        status = "ok" if error < args.threshold else "FAIL"
        ok &= error < args.threshold
        print(f"{name:20s} max relative error {error:.3e}  {status}")
    return 0 if ok else 2


_COMMANDS = {
    "train": _cmd_train,
    "eval-words": _cmd_eval_words,
    "eval-sentences": _cmd_eval_sentences,
    "analyze-gates": _cmd_analyze_gates,
    "significance": _cmd_significance,
    "grad-check": _cmd_grad_check,
}


def dispatch(argv) -> int:
    """Parse argv and run the subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit_ as err:
        print(err.message, file=sys.stderr)
        return err.code
    except SystemExit as err:  # --help prints and exits 0
        return int(err.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"runtime failure: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
