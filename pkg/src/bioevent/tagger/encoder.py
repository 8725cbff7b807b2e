"""DistilBERT token classifier (needs the optional ``encoder`` extra).

With ``pretrained`` set, a Hugging Face checkpoint is fine-tuned and only
the first sub-token of each word is trained and scored. Without it, a small
DistilBERT is built from scratch on a word-level vocabulary, so every word
is exactly one position and no alignment is needed.
"""

from __future__ import annotations

import json
import logging
import random
from pathlib import Path

from ..errors import ClassifierError
from .base import TokenClassifier, TrainConfig

log = logging.getLogger(__name__)

PAD, UNK = "[PAD]", "[UNK]"
IGNORE = -100


def _require():
    try:
        import torch
        import transformers
    except ImportError as exc:  # pragma: no cover - depends on the install
        raise ClassifierError("the encoder classifier needs torch and transformers "
                              "(pip install 'artifact[encoder]')") from exc
    return torch, transformers


class EncoderClassifier(TokenClassifier):
    name = "distilbert"
    version = "1"
    reentrant = False

    def __init__(self, pretrained: str | None = None, *, dim=128, n_layers=2, n_heads=4,
                 max_length=512, lowercase=True, device="cpu", min_count=1):
        self.pretrained = pretrained
        self.dim, self.n_layers, self.n_heads = dim, n_layers, n_heads
        self.max_length = max_length
        self.lowercase = lowercase
        self.device = device
        self.min_count = min_count
        self.model = None
        self.tokenizer = None
        self.vocab: dict[str, int] = {}
        self.labels: list[str] = []
        self.history: list[dict] = []

    # encoding

    def _word(self, w):
        return w.lower() if self.lowercase else w

    def _build_vocab(self, sequences):
        counts = {}
        for seq in sequences:
            for w in seq:
                counts[self._word(w)] = counts.get(self._word(w), 0) + 1
        words = sorted(w for w, c in counts.items() if c >= self.min_count)
        self.vocab = {PAD: 0, UNK: 1, **{w: i + 2 for i, w in enumerate(words)}}

    def _encode(self, seqs, labels=None):
        """Padded ids, attention mask, label ids and the position of each
        word's first sub-token."""
        torch, _ = _require()
        rows, firsts = [], []
        for seq in seqs:
            if self.pretrained:
                enc = self.tokenizer(list(seq), is_split_into_words=True, truncation=True,
                                     max_length=self.max_length)
                ids, first, seen = enc["input_ids"], {}, set()
                for pos, wid in enumerate(enc.word_ids()):
                    if wid is not None and wid not in seen:
                        seen.add(wid)
                        first[wid] = pos
                if len(first) < len(seq):
                    raise ClassifierError(f"sequence of {len(seq)} words exceeds {self.max_length} sub-tokens")
                firsts.append([first[i] for i in range(len(seq))])
            else:
                ids = [self.vocab.get(self._word(w), 1) for w in seq]
                firsts.append(list(range(len(seq))))
            rows.append(ids)
        width = max(len(r) for r in rows)
        pad = self.tokenizer.pad_token_id if self.pretrained else 0
        input_ids = torch.full((len(rows), width), pad, dtype=torch.long)
        mask = torch.zeros((len(rows), width), dtype=torch.long)
        for i, r in enumerate(rows):
            input_ids[i, :len(r)] = torch.tensor(r)
            mask[i, :len(r)] = 1
        lab = None
        if labels is not None:
            index = {l: i for i, l in enumerate(self.labels)}
            lab = torch.full((len(rows), width), IGNORE, dtype=torch.long)
            for i, (first, seq_labels) in enumerate(zip(firsts, labels)):
                for pos, l in zip(first, seq_labels):
                    lab[i, pos] = index[l]
        return input_ids.to(self.device), mask.to(self.device), lab, firsts

    def _new_model(self):
        torch, tf = _require()
        n = len(self.labels)
        id2label = dict(enumerate(self.labels))
        label2id = {l: i for i, l in id2label.items()}
        if self.pretrained:
            self.tokenizer = tf.AutoTokenizer.from_pretrained(self.pretrained, use_fast=True)
            model = tf.DistilBertForTokenClassification.from_pretrained(
                self.pretrained, num_labels=n, id2label=id2label, label2id=label2id)
        else:
            cfg = tf.DistilBertConfig(
                vocab_size=len(self.vocab), dim=self.dim, n_layers=self.n_layers, n_heads=self.n_heads,
                hidden_dim=4 * self.dim, max_position_embeddings=self.max_length, dropout=0.1,
                attention_dropout=0.1, num_labels=n, id2label=id2label, label2id=label2id, pad_token_id=0)
            model = tf.DistilBertForTokenClassification(cfg)
        return model.to(self.device)

    # contract

    def train(self, sequences, labels, config: TrainConfig, groups=None, keys=None) -> None:
        torch, _ = _require()
        sequences, labels = [list(s) for s in sequences], [list(l) for l in labels]
        if not sequences:
            raise ClassifierError("empty training set")
        random.seed(config.seed)
        torch.manual_seed(config.seed)
        self.labels = list(config.label_scheme)
        if not self.pretrained:
            self._build_vocab(sequences)
        self.model = self._new_model()
        lr = config.learning_rate or (5e-5 if self.pretrained else 1e-3)
        opt = torch.optim.AdamW(self.model.parameters(), lr=lr)
        groups = list(groups) if groups is not None else list(range(len(sequences)))
        batches = {}
        for i, g in enumerate(groups):
            batches.setdefault(g, []).append(i)
        order = sorted(batches)
        rng = random.Random(config.seed)
        self.history = []
        for epoch in range(config.epochs):
            self.model.train()
            rng.shuffle(order)
            total = 0.0
            for g in order:
                idx = batches[g]
                ids, mask, lab, _ = self._encode([sequences[i] for i in idx], [labels[i] for i in idx])
                out = self.model(input_ids=ids, attention_mask=mask, labels=lab.to(self.device))
                opt.zero_grad()
                out.loss.backward()
                opt.step()
                total += out.loss.item()
            self.history.append({"epoch": epoch + 1, "loss": total / len(order)})
            log.debug("epoch %d loss %.4f", epoch + 1, total / len(order))
            callback = config.extra.get("on_epoch")
            if callback is not None and callback(epoch + 1, self) is False:
                break

    def predict(self, sequences, keys=None, batch_size=32):
        torch, _ = _require()
        if self.model is None:
            raise ClassifierError("predict called before train/load")
        self.model.eval()
        out = []
        sequences = [list(s) for s in sequences]
        with torch.no_grad():
            for lo in range(0, len(sequences), batch_size):
                chunk = sequences[lo:lo + batch_size]
                nonempty = [s for s in chunk if s]
                probs_rows = iter([])
                if nonempty:
                    ids, mask, _, firsts = self._encode(nonempty)
                    probs = torch.softmax(self.model(input_ids=ids, attention_mask=mask).logits, -1).cpu()
                    probs_rows = iter(list(zip(probs, firsts)))
                for s in chunk:
                    if not s:
                        out.append([])
                        continue
                    p, first = next(probs_rows)
                    out.append([{l: float(p[pos, j]) for j, l in enumerate(self.labels)} for pos in first])
        return out

    def describe(self) -> dict:
        return {"name": self.name, "version": self.version, "pretrained": self.pretrained,
                "dim": self.dim, "n_layers": self.n_layers, "vocab_size": len(self.vocab)}

    # persistence

    def save(self, path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        self.model.save_pretrained(path)
        if self.tokenizer is not None:
            self.tokenizer.save_pretrained(path)
        meta = {"labels": self.labels, "vocab": self.vocab, "pretrained": self.pretrained,
                "lowercase": self.lowercase, "max_length": self.max_length, "kind": "encoder"}
        (path / "bioevent.json").write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path, device="cpu") -> "EncoderClassifier":
        _, tf = _require()
        path = Path(path)
        meta = json.loads((path / "bioevent.json").read_text("utf-8"))
        clf = cls(meta["pretrained"], lowercase=meta["lowercase"], max_length=meta["max_length"], device=device)
        clf.labels, clf.vocab = meta["labels"], meta["vocab"]
        if meta["pretrained"]:
            clf.tokenizer = tf.AutoTokenizer.from_pretrained(path, use_fast=True)
        clf.model = tf.DistilBertForTokenClassification.from_pretrained(path).to(device)
        return clf
