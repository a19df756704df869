"""Model checkpoints: a JSON manifest followed by a raw float64 payload.

Layout of a checkpoint file:

    line 1: magic string ``CHARGATE-CKPT-1``
    line 2: one JSON object holding the model config, both vocabularies,
            a SHA-256 hash of the vocabulary contents, and the tensor
            manifest (name + shape, in payload order)
    rest:   the tensors' data as little-endian float64, C order,
            concatenated in manifest order

Floats round-trip exactly, so a reloaded model reproduces its metrics
bit for bit. The vocabulary hash is recomputed on load and any mismatch
is rejected, which catches both corruption and manifest tampering.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .chars import CharVocab
from .data import WordVocab
from .model import ModelConfig, NliModel

__all__ = ["save_model", "load_model", "vocab_hash"]

MAGIC = b"CHARGATE-CKPT-1"


def vocab_hash(word_vocab: WordVocab, char_vocab: CharVocab | None) -> str:
    digest = hashlib.sha256()
    for word in word_vocab.index_to_word:
        digest.update(word.encode("utf-8"))
        digest.update(b"\x00")
    digest.update(b"\x01")
    if char_vocab is not None:
        for ch in char_vocab.index_to_char:
            digest.update(ch.encode("utf-8"))
            digest.update(b"\x00")
    return digest.hexdigest()


def save_model(model: NliModel, path) -> None:
    params = model.parameters()
    manifest = [{"name": name, "shape": list(t.data.shape)} for name, t in params.items()]
    word_vocab = model.word_vocab
    header = {
        "config": model.config.to_dict(),
        "word_vocab": {
            "words": word_vocab.index_to_word[2:],
            "counts": [word_vocab.counts[w] for w in word_vocab.index_to_word[2:]],
            "lowercased": word_vocab.lowercased,
        },
        "char_vocab": (
            {"chars": model.char_vocab.index_to_char[1:]} if model.char_vocab is not None else None
        ),
        "vocab_hash": vocab_hash(word_vocab, model.char_vocab),
        "tensors": manifest,
    }
    with open(path, "wb") as handle:
        handle.write(MAGIC + b"\n")
        handle.write(json.dumps(header, ensure_ascii=False).encode("utf-8") + b"\n")
        for name, tensor in params.items():
            handle.write(np.ascontiguousarray(tensor.data, dtype="<f8").tobytes())


def load_model(path) -> NliModel:
    with open(path, "rb") as handle:
        magic = handle.readline().rstrip(b"\n")
        if magic != MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        header = json.loads(handle.readline().decode("utf-8"))
        payload = handle.read()

    config = ModelConfig(**header["config"])
    wv = header["word_vocab"]
    word_vocab = WordVocab(list(zip(wv["words"], wv["counts"])), lowercased=wv["lowercased"])
    char_vocab = None
    if header["char_vocab"] is not None:
        char_vocab = CharVocab(header["char_vocab"]["chars"])
    if vocab_hash(word_vocab, char_vocab) != header["vocab_hash"]:
        raise ValueError(f"{path}: vocabulary hash mismatch, checkpoint is corrupt")

    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape)) if shape else 1
        nbytes = size * 8
        chunk = payload[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise ValueError(f"{path}: truncated payload at tensor {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise ValueError(f"{path}: {len(payload) - offset} trailing payload bytes")
    return NliModel.from_state(config, word_vocab, char_vocab, arrays)
