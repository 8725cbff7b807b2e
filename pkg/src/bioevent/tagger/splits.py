from __future__ import annotations

import random
from dataclasses import dataclass

from ..adapters.compose import Unit
from ..core.model import Corpus, sentence_documents
from ..errors import InsufficientDataError


@dataclass(frozen=True)
class SplitSpec:
    unit: Unit
    train: int
    dev: int
    test: int
    event_bearing_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "unit", Unit(self.unit))
        if min(self.train, self.dev, self.test) < 0:
            raise ValueError("split sizes must be non-negative")

    @property
    def total(self) -> int:
        return self.train + self.dev + self.test


ENTITY_SPLIT = SplitSpec(Unit.DOCUMENTS, train=5, dev=5, test=10)
# the 1,691 event-bearing sentences in three near-equal parts
EVENT_SPLIT = SplitSpec(Unit.SENTENCES, train=564, dev=563, test=564, event_bearing_only=True)
SPLIT_PRESETS = {"entity": ENTITY_SPLIT, "event": EVENT_SPLIT}


def split_units(corpus: Corpus, spec: SplitSpec) -> list:
    if spec.unit is Unit.DOCUMENTS:
        units = list(corpus.documents)
    else:
        units = [s for d in corpus.documents for s in sentence_documents(d)]
    if spec.event_bearing_only:
        units = [u for u in units if u.events]
    return sorted(units, key=lambda u: u.doc_id)


def build_splits(corpus: Corpus, spec: SplitSpec, seed: int = 0) -> tuple[Corpus, Corpus, Corpus]:
    """Disjoint seeded train/dev/test subsets of ``corpus``."""
    units = split_units(corpus, spec)
    if len(units) < spec.total:
        raise InsufficientDataError(corpus.name, spec.total, len(units))
    random.Random(seed).shuffle(units)
    a, b = spec.train, spec.train + spec.dev
    parts = (units[:a], units[a:b], units[b:spec.total])
    return tuple(Corpus(f"{corpus.name}-{tag}", tuple(p), corpus.provenance)
                 for tag, p in zip(("train", "dev", "test"), parts))
