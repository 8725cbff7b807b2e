"""Deterministic in-tree classifiers: no encoder needed to exercise the harness."""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter, defaultdict
from pathlib import Path

from ..core.labels import O, to_token_labels
from ..errors import ClassifierError
from .base import Task, TokenClassifier, TrainConfig, one_hot


class MemorizingClassifier(TokenClassifier):
    """Replays training labels for sequences it has seen and falls back to
    each word's most frequent training label.

    ``noise`` flips that fraction of predicted tokens to a different label,
    chosen by a hash of the token position so the output is reproducible.
    """

    name = "memorizing"
    version = "1"
    reentrant = True

    def __init__(self, noise: float = 0.0, seed: int = 0):
        if not 0.0 <= noise <= 1.0:
            raise ValueError("noise must be in [0, 1]")
        self.noise = noise
        self.seed = seed
        self._seqs: dict[tuple, tuple] = {}
        self._words: dict[str, str] = {}
        self._labels: tuple[str, ...] = (O,)

    def train(self, sequences, labels, config: TrainConfig, groups=None, keys=None) -> None:
        counts = defaultdict(Counter)
        for toks, labs in zip(sequences, labels):
            if len(toks) != len(labs):
                raise ClassifierError("token and label sequences differ in length")
            self._seqs[tuple(toks)] = tuple(labs)
            for t, lab in zip(toks, labs):
                counts[t][lab] += 1
        self._words = {w: min(c, key=lambda lab: (-c[lab], lab)) for w, c in counts.items()}
        self._labels = tuple(config.label_scheme)
        self.seed = config.seed if self.seed == 0 else self.seed

    def _flip(self, toks, i, label):
        if not self.noise:
            return label
        h = hashlib.sha256(f"{self.seed}|{i}|{' '.join(toks)}".encode()).digest()
        rng = random.Random(h)
        if rng.random() >= self.noise:
            return label
        others = [lab for lab in self._labels if lab != label]
        return rng.choice(others) if others else label

    def predict(self, sequences, keys=None):
        out = []
        for toks in sequences:
            labs = self._seqs.get(tuple(toks)) or tuple(self._words.get(t, O) for t in toks)
            out.append([one_hot(self._flip(toks, i, lab)) for i, lab in enumerate(labs)])
        return out

    def save(self, path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        meta = {"kind": "memorizing", "noise": self.noise, "seed": self.seed, "labels": list(self._labels),
                "words": self._words, "sequences": [[list(k), list(v)] for k, v in self._seqs.items()]}
        (path / "bioevent.json").write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "MemorizingClassifier":
        meta = json.loads((Path(path) / "bioevent.json").read_text("utf-8"))
        clf = cls(meta["noise"], meta["seed"])
        clf._labels = tuple(meta["labels"])
        clf._words = meta["words"]
        clf._seqs = {tuple(k): tuple(v) for k, v in meta["sequences"]}
        return clf


class GoldReplayClassifier(TokenClassifier):
    """Oracle that returns the gold labels of a reference corpus.

    Sequences are looked up by key ``(doc_id, first_token_index)``; the
    token texts must match the gold document or a ClassifierError is raised.
    """

    name = "gold-replay"
    version = "1"
    reentrant = True

    def __init__(self, corpus, task):
        self.task = Task(task)
        self._docs = {d.doc_id: d for d in corpus}
        self._labels = {}

    def train(self, sequences, labels, config, groups=None, keys=None) -> None:
        pass

    def _gold(self, doc_id):
        if doc_id not in self._labels:
            doc = self._docs.get(doc_id)
            if doc is None:
                raise ClassifierError(f"no gold document {doc_id!r}")
            self._labels[doc_id] = (doc, to_token_labels(doc, self.task.layer))
        return self._labels[doc_id]

    def predict(self, sequences, keys=None):
        if keys is None:
            raise ClassifierError("gold replay needs (doc_id, start) keys")
        out = []
        for toks, (doc_id, start) in zip(sequences, keys):
            doc, labels = self._gold(doc_id)
            gold_toks = [t.text for t in doc.tokens[start:start + len(toks)]]
            if gold_toks != list(toks):
                raise ClassifierError(f"token mismatch replaying {doc_id!r} at {start}")
            out.append([one_hot(lab) for lab in labels[start:start + len(toks)]])
        return out
