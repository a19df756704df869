"""Gate values against word frequency.

Trains the vector-gate model on a small power-law corpus in which
frequent words have strong pretrained vectors and rare words do not,
then inspects the learned per-word gates. The expected picture: the
rarer the word, the higher its mean gate, i.e. the more the model leans
on the character path. A positive Spearman correlation between rarity
rank and mean gate quantifies the trend.

Takes a couple of minutes (it really trains the model, three more than
desk-toy epochs would show nothing).
"""

import tempfile

import numpy as np

from chargate.checkpoint import load_model
from chargate.stats import gate_profile
from chargate.synthetic import make_zipf_corpus
from chargate.training import TrainConfig, TrainData, train_one
from chargate.wordsim import spearman

corpus = make_zipf_corpus(n_train=600, n_dev=120, vocab_size=300, embed_dim=16, seed=0)
print(f"corpus: {len(corpus.train)} training pairs, vocabulary {len(corpus.words)}")
print(f"most frequent word appears {corpus.frequencies.most_common(1)[0][1]} times")

with tempfile.TemporaryDirectory() as workdir:
    emb_path = f"{workdir}/embeddings.txt"
    with open(emb_path, "w") as fh:
        fh.write("\n".join(corpus.embedding_lines) + "\n")

    config = TrainConfig(
        method="vg",
        batch_size=16,
        initial_lr=0.2,
        lr_schedule=False,
        max_epochs=7,
        min_freq=1,
        word_dim=16,
        char_dim=8,
        char_hidden=16,
        sentence_dim=24,
        classifier_hidden=24,
        embeddings_path=emb_path,
        out_dir=workdir,
    )
    state = train_one(config, seed=1, data=TrainData(train=corpus.train, dev=corpus.dev))
    print(f"trained {len(state.log)} epochs, best validation acc {state.best_val_acc:.3f}")
    model = load_model(state.best_checkpoint_path)

words = model.word_vocab.index_to_word[2:]
profiles = gate_profile(model, words, corpus.frequencies)

print("\nmean gate by frequency band (gates near 1 lean on characters):")
gates = np.array([p.mean_gate for p in profiles])
freqs = np.array([p.frequency for p in profiles], dtype=np.float64)
for lo, hi in ((50, 10**9), (10, 50), (3, 10), (1, 3)):
    sel = (freqs >= lo) & (freqs < hi)
    if sel.any():
        print(f"  frequency [{lo:3d}, {hi if hi < 10**9 else 'inf'}): "
              f"n={int(sel.sum()):3d}  mean gate {gates[sel].mean():.3f}")

rho = spearman(-freqs, gates)
print(f"\nSpearman(rarity rank, mean gate) = {rho:.3f}  (> 0 means rarer -> higher gate)")
