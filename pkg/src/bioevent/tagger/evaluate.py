"""Token-level micro F1 on the positive class."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core.labels import B_ENT, EVENT, I_ENT
from .base import Task


@dataclass(frozen=True)
class F1Score:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if not self.tp + self.fp + self.fn:
            return 1.0  # nothing to find and nothing predicted
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other):
        return F1Score(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def positive_labels(task) -> frozenset:
    return frozenset({B_ENT, I_ENT}) if Task(task) is Task.ENTITY else frozenset({EVENT})


def _counts(gold, pred, positive) -> F1Score:
    tp = fp = fn = 0
    for g_seq, p_seq in zip(gold, pred):
        if len(g_seq) != len(p_seq):
            raise ValueError("gold and predicted sequences differ in length")
        for g, p in zip(g_seq, p_seq):
            gp, pp = g in positive, p in positive
            tp += gp and pp
            fp += pp and not gp
            fn += gp and not pp
    return F1Score(tp, fp, fn)


def evaluate_f1(gold, predicted, task) -> F1Score:
    """Micro F1 over tokens; for entities B-ENT and I-ENT count as one
    positive class, so a B/I confusion inside a mention is not an error."""
    gold, predicted = list(gold), list(predicted)
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted differ in number of sequences")
    return _counts(gold, predicted, positive_labels(task))


def per_label_scores(gold, predicted, task) -> dict[str, F1Score]:
    labels = sorted(positive_labels(task))
    return {lab: _counts(gold, predicted, frozenset({lab})) for lab in labels}


SPLITS = ("train", "dev", "test")


@dataclass
class EvalReport:
    task: Task
    scores: dict[str, F1Score]  # pooled over runs
    per_label: dict[str, dict[str, F1Score]] = field(default_factory=dict)
    run_scores: dict[str, list[float]] = field(default_factory=dict)
    n_runs: int = 1
    composition: dict = field(default_factory=dict)

    def _mean(self, split):
        runs = self.run_scores.get(split)
        return sum(runs) / len(runs) if runs else self.scores[split].f1

    @property
    def f_train(self) -> float:
        return self._mean("train")

    @property
    def f_dev(self) -> float:
        return self._mean("dev")

    @property
    def f_test(self) -> float:
        return self._mean("test")

    def triple(self) -> tuple[float, float, float]:
        return (self.f_train, self.f_dev, self.f_test)

    def to_dict(self) -> dict:
        return {
            "task": self.task.value,
            "n_runs": self.n_runs,
            "f_train": self.f_train, "f_dev": self.f_dev, "f_test": self.f_test,
            "scores": {k: v.to_dict() for k, v in self.scores.items()},
            "per_label": {s: {lab: v.to_dict() for lab, v in d.items()} for s, d in self.per_label.items()},
            "run_scores": self.run_scores,
            "composition": self.composition,
        }
