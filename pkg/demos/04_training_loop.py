"""Training the entailment model end to end.

The trainer runs minibatch SGD with global-norm gradient clipping and
(optionally) the divide-on-validation-decrease learning-rate schedule,
checkpointing whenever validation accuracy improves. Here it overfits a
tiny synthetic fixture, which is quick and shows the whole loop working:
every method can drive this fixture to 100% training accuracy.
"""

import tempfile

from chargate.synthetic import make_overfit_embeddings, make_overfit_fixture
from chargate.training import TrainConfig, TrainData, train_one

examples = make_overfit_fixture()
data = TrainData(train=examples, dev=examples)
print(f"fixture: {len(examples)} premise/hypothesis pairs, 3 balanced labels")
print("example:", examples[0])

with tempfile.TemporaryDirectory() as workdir:
    emb_path = f"{workdir}/embeddings.txt"
    with open(emb_path, "w") as fh:
        fh.write("\n".join(make_overfit_embeddings(16)) + "\n")

    config = TrainConfig(
        method="sg",
        batch_size=64,
        initial_lr=0.1,
        lr_schedule=False,  # constant lr: no meaningful validation signal here
        max_epochs=120,
        stop_train_acc=1.0,
        word_dim=16,
        char_dim=16,
        char_hidden=16,
        sentence_dim=32,
        classifier_hidden=32,
        min_freq=2,
        embeddings_path=emb_path,
        out_dir=workdir,
    )
    state = train_one(config, seed=1, data=data)

    print(f"\nstopped: {state.stop_reason}")
    print("epoch  train_loss  train_acc  val_acc  lr")
    for entry in state.log[:: max(1, len(state.log) // 10)]:
        print(
            f"{entry.epoch:5d}  {entry.train_loss:10.4f}  {entry.train_acc:9.3f}"
            f"  {entry.val_acc:7.3f}  {entry.lr:g}"
        )
    print(f"best validation accuracy {state.best_val_acc:.3f} at epoch {state.best_epoch}")
    print(f"checkpoint: {state.best_checkpoint_path}")
