"""Classifier contract shared by the mock and encoder implementations."""

from __future__ import annotations

import abc
from dataclasses import asdict, dataclass, field
from enum import Enum

from ..core.labels import ENTITY_LABELS, EVENT_LABELS, O, Layer


class Task(str, Enum):
    ENTITY = "ENTITY"
    EVENT = "EVENT"

    @property
    def layer(self) -> Layer:
        return Layer(self.value)

    @property
    def labels(self) -> tuple[str, ...]:
        return ENTITY_LABELS if self is Task.ENTITY else EVENT_LABELS


REPLICATION_EPOCHS = (5, 15, 30)


@dataclass
class TrainConfig:
    task: Task = Task.EVENT
    epochs: int = 5
    seed: int = 0
    learning_rate: float | None = None  # None: classifier default
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.task = Task(self.task)
        if self.epochs < 1:
            raise ValueError("epochs must be positive")

    @property
    def label_scheme(self) -> tuple[str, ...]:
        return self.task.labels

    @property
    def is_replication(self) -> bool:
        return self.epochs in REPLICATION_EPOCHS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["task"] = self.task.value
        return d


class TokenClassifier(abc.ABC):
    """Whole-token classifier.

    ``train`` fits on parallel lists of token and label sequences; ``groups``
    gives each sequence a batch id (one batch per document). ``predict``
    returns one ``{label: probability}`` dict per input token. ``keys``
    identify sequences as ``(doc_id, first_token_index)`` for classifiers that
    need them.
    """

    reentrant = False
    name = "classifier"
    version = "0"

    @abc.abstractmethod
    def train(self, sequences, labels, config: TrainConfig, groups=None, keys=None) -> None: ...

    @abc.abstractmethod
    def predict(self, sequences, keys=None) -> list[list[dict[str, float]]]: ...

    def predict_labels(self, sequences, keys=None) -> list[list[str]]:
        return [[argmax(dist) for dist in seq] for seq in self.predict(sequences, keys)]

    def describe(self) -> dict:
        return {"name": self.name, "version": self.version}


def argmax(dist: dict[str, float]) -> str:
    if not dist:
        return O
    # ties broken by label name so predictions stay deterministic
    return max(sorted(dist), key=lambda k: dist[k])


def one_hot(label: str) -> dict[str, float]:
    return {label: 1.0}
