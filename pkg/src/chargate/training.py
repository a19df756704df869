"""Entailment training loop: minibatch SGD with gradient clipping, a
divide-on-plateau learning-rate schedule, and best-validation
checkpointing, replicated independently per random seed.

The schedule compares each epoch's validation accuracy with the
immediately previous epoch (not the best so far) and divides the learning
rate when it decreased. A checkpoint is written whenever validation
accuracy exceeds the previous best. Runs are fully seeded: parameter
init, embedding fallback rows, and epoch shuffles all derive from the run
seed, so identical configs produce identical logs.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .autodiff import clip_gradients, gradients, no_grad
from .chars import CharVocab
from .checkpoint import save_model
from .data import (
    NliExample,
    PretrainedEmbeddings,
    WordVocab,
    build_vocab,
    load_embeddings,
    load_nli,
)
from .model import ModelConfig, NliModel

__all__ = [
    "TrainConfig",
    "TrainData",
    "EpochLog",
    "TrainState",
    "SeedOutcome",
    "train_one",
    "run_seeds",
    "evaluate_accuracy",
    "write_metric_log",
]


@dataclass
class TrainConfig:
    """Everything a training run needs; defaults follow the recipe the
    encoders were designed around (batch 64, SGD 0.1, divide the lr by 5
    on validation decrease, clip gradients at global norm 5)."""

    method: str = "vg"
    batch_size: int = 64
    initial_lr: float = 0.1
    lr_divisor: float = 5.0
    lr_schedule: bool = True  # divide on validation decrease; off = constant lr
    clip_threshold: float = 5.0
    clip_mode: str = "norm"
    max_epochs: int = 20
    min_lr: float = 1e-5
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)
    word_dim: int = 300
    char_dim: int = 50
    char_hidden: int = 300
    sentence_dim: int = 4096
    classifier_hidden: int = 512
    min_freq: int = 2
    lowercase: bool = False
    stop_train_acc: float | None = None
    train_path: str | None = None
    dev_path: str | None = None
    embeddings_path: str | None = None
    out_dir: str | None = None

    def __post_init__(self):
        for name in ("batch_size", "initial_lr", "clip_threshold", "max_epochs", "min_freq"):
            if getattr(self, name) <= 0:
                raise ValueError(f"TrainConfig: {name} must be positive")
        if self.lr_divisor <= 1:
            raise ValueError("TrainConfig: lr_divisor must be greater than 1")
        if not self.seeds:
            raise ValueError("TrainConfig: need at least one seed")

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            method=self.method,
            word_dim=self.word_dim,
            char_dim=self.char_dim,
            char_hidden=self.char_hidden,
            sentence_dim=self.sentence_dim,
            classifier_hidden=self.classifier_hidden,
            lowercase=self.lowercase,
        )


@dataclass
class TrainData:
    """In-memory datasets, for callers that bypass file loading."""

    train: list[NliExample]
    dev: list[NliExample]


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    train_acc: float
    val_acc: float
    lr: float


@dataclass
class TrainState:
    seed: int
    log: list[EpochLog] = field(default_factory=list)
    best_val_acc: float = float("-inf")
    best_epoch: int = 0
    best_checkpoint_path: str | None = None
    stop_reason: str = ""

    @property
    def final_lr(self) -> float:
        return self.log[-1].lr if self.log else float("nan")


@dataclass
class SeedOutcome:
    seed: int
    state: TrainState | None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def evaluate_accuracy(model: NliModel, examples: Sequence[NliExample]) -> float:
    """Fraction of argmax predictions matching gold labels."""
    if not examples:
        raise ValueError("evaluate_accuracy: empty dataset")
    with no_grad():
        correct = sum(1 for ex in examples if model.predict(ex) == ex.label)
    return correct / len(examples)


def _load_data(config: TrainConfig) -> TrainData:
    if config.train_path is None or config.dev_path is None:
        raise ValueError("train_one: config needs train_path and dev_path (or pass data=)")
    train = load_nli(config.train_path, lowercase=config.lowercase)
    dev = load_nli(config.dev_path, lowercase=config.lowercase)
    return TrainData(train=train, dev=dev)


def build_vocabs(
    examples: Sequence[NliExample], config: TrainConfig
) -> tuple[WordVocab, CharVocab]:
    """Word vocabulary at the configured frequency floor; characters keep
    everything observed in the training data."""

    def tokens():
        for ex in examples:
            yield from ex.premise
            yield from ex.hypothesis

    word_vocab = build_vocab(tokens(), min_freq=config.min_freq, lowercased=config.lowercase)
    char_vocab = CharVocab.from_corpus(tokens())
    return word_vocab, char_vocab


def train_one(config: TrainConfig, seed: int, data: TrainData | None = None) -> TrainState:
    """One fully seeded training run; returns its state and metric log."""
    if data is None:
        data = _load_data(config)
    word_vocab, char_vocab = build_vocabs(data.train, config)

    embeddings: PretrainedEmbeddings | None = None
    if config.embeddings_path is not None:
        embeddings = load_embeddings(
            config.embeddings_path, word_vocab, config.word_dim, seed=seed
        )
    model = NliModel.init(config.model_config(), word_vocab, char_vocab, seed, embeddings)
    params = model.parameters()

    shuffle_rng = np.random.default_rng([seed, 1])
    state = TrainState(seed=seed)
    lr = config.initial_lr
    previous_val_acc: float | None = None
    n = len(data.train)

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            batch = [data.train[i] for i in order[start : start + config.batch_size]]
            try:
                loss, predictions = model.batch_loss(batch)
                grads = gradients(loss, params)
            except ValueError as err:
                raise RuntimeError(
                    f"training aborted: non-finite values at epoch {epoch}, "
                    f"batch {batch_index}: {err}"
                ) from err
            grads = clip_gradients(grads, config.clip_threshold, mode=config.clip_mode)
            for name, tensor in params.items():
                tensor.data -= lr * grads[name]
            loss_sum += loss.item() * len(batch)
            correct += sum(1 for ex, p in zip(batch, predictions) if p == ex.label)

        train_loss = loss_sum / n
        train_acc = correct / n
        val_acc = evaluate_accuracy(model, data.dev)
        state.log.append(EpochLog(epoch, train_loss, train_acc, val_acc, lr))

        if val_acc > state.best_val_acc:
            state.best_val_acc = val_acc
            state.best_epoch = epoch
            if config.out_dir is not None:
                os.makedirs(config.out_dir, exist_ok=True)
                path = os.path.join(config.out_dir, f"seed{seed}_best.ckpt")
                save_model(model, path)
                state.best_checkpoint_path = path

        if config.lr_schedule and previous_val_acc is not None and val_acc < previous_val_acc:
            lr /= config.lr_divisor
        previous_val_acc = val_acc

        if config.stop_train_acc is not None and train_acc >= config.stop_train_acc:
            state.stop_reason = f"train accuracy reached {config.stop_train_acc}"
            break
        if lr < config.min_lr:
            state.stop_reason = f"learning rate underflow (< {config.min_lr})"
            break
    else:
        state.stop_reason = "max epochs"
    return state


def _run_one_seed(config: TrainConfig, seed: int, data: TrainData | None) -> SeedOutcome:
    try:
        return SeedOutcome(seed=seed, state=train_one(config, seed, data))
    except Exception as err:  # noqa: BLE001 - report and continue with other seeds
        return SeedOutcome(seed=seed, state=None, error=f"{type(err).__name__}: {err}")


def run_seeds(
    config: TrainConfig, data: TrainData | None = None, parallel: int = 1
) -> list[SeedOutcome]:
    """Independent runs for every configured seed.

    A failing seed is reported in its outcome and does not stop the
    remaining seeds. With parallel > 1, seeds run in separate processes
    (each run is single-threaded and shares nothing).
    """
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_run_one_seed, config, seed, data) for seed in config.seeds]
            return [f.result() for f in futures]
    return [_run_one_seed(config, seed, data) for seed in config.seeds]


def write_metric_log(state: TrainState, path) -> None:
    """Per-epoch CSV: epoch, train_loss, train_acc, val_acc, lr.

    Floats are written with repr, which is shortest-roundtrip and thus
    byte-stable across identical runs.
    """
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "train_loss", "train_acc", "val_acc", "lr"])
        for entry in state.log:
            writer.writerow(
                [
                    entry.epoch,
                    repr(entry.train_loss),
                    repr(entry.train_acc),
                    repr(entry.val_acc),
                    repr(entry.lr),
                ]
            )
