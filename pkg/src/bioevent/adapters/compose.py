"""Seeded sampling of mixed training sets under a size cap."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ..core.model import AnnotatedDocument, Corpus, Provenance, sentence_documents
from ..errors import InsufficientDataError

# three times the 1,691 event-bearing WikiBio sentences
EVENT_SENTENCE_CAP = 5073
ENTITY_DOCUMENT_CAP = 100


class Unit(str, Enum):
    DOCUMENTS = "DOCUMENTS"
    SENTENCES = "SENTENCES"


@dataclass(frozen=True)
class TrainingSetSpec:
    name: str
    components: tuple[tuple[str, int], ...]
    cap: int
    unit: Unit = Unit.SENTENCES

    def __post_init__(self):
        object.__setattr__(self, "components", tuple((str(n), int(c)) for n, c in self.components))
        object.__setattr__(self, "unit", Unit(self.unit))
        if self.total > self.cap:
            raise ValueError(f"{self.name}: {self.total} requested units exceed cap {self.cap}")

    @property
    def total(self) -> int:
        return sum(c for _, c in self.components)


def largest_remainder(total: int, names) -> dict[str, int]:
    """Split ``total`` into equal integer shares by largest remainder.

    Remainder ties go to later names, so with two corpora the first gets the
    floor and the second the ceiling.
    """
    names = list(names)
    if not names:
        return {}
    exact = [Fraction(total, len(names))] * len(names)
    shares = [int(x) for x in exact]
    left = total - sum(shares)
    order = sorted(range(len(names)), key=lambda i: (-(exact[i] - shares[i]), -i))
    for i in order[:left]:
        shares[i] += 1
    return dict(zip(names, shares))


def equal_share_spec(name, corpora, cap, unit=Unit.SENTENCES, extra=()):
    """Spec with ``extra`` fixed components (e.g. a WikiBio slice) plus equal
    shares of what is left of ``cap`` across ``corpora``."""
    extra = tuple(extra)
    remaining = cap - sum(c for _, c in extra)
    shares = largest_remainder(remaining, corpora)
    return TrainingSetSpec(name, tuple(shares.items()) + extra, cap, unit)


# event-detection mixtures; see the decisions log for the member choice
MISC_MEMBERS = {
    "misc_01": ("ontonotes", "timebank", "litbank", "newsreader"),
    "misc_02": ("ontonotes", "timebank", "litbank"),
    "misc_03": ("ontonotes", "litbank"),
}


def misc_spec(name: str, cap: int = EVENT_SENTENCE_CAP, wikibio: int = 0) -> TrainingSetSpec:
    extra = (("wikibio", wikibio),) if wikibio else ()
    label = f"{name}+wikibio" if wikibio else name
    return equal_share_spec(label, MISC_MEMBERS[name], cap, Unit.SENTENCES, extra)


def _units(corpus: Corpus, unit: Unit) -> list[AnnotatedDocument]:
    prefix = f"{corpus.name}:"
    if unit is Unit.SENTENCES:
        out = []
        for doc in corpus.documents:
            out.extend(sentence_documents(doc, prefix=prefix))
    else:
        out = [d.evolve(doc_id=prefix + d.doc_id) for d in corpus.documents]
    return sorted(out, key=lambda d: d.doc_id)


def compose_training_set(spec: TrainingSetSpec, corpora, rng_seed: int = 0) -> Corpus:
    """Sample each component without replacement and concatenate.

    Unit ids are prefixed with the source corpus name. Each component draws
    from its own generator seeded by ``(rng_seed, corpus name)``, so a
    component's sample does not depend on the other components.
    """
    by_name = {c.name.lower(): c for c in corpora}
    picked = []
    provs = set()
    for cname, count in spec.components:
        corpus = by_name.get(cname.lower())
        if corpus is None:
            raise InsufficientDataError(cname, count, 0)
        pool = _units(corpus, spec.unit)
        if count > len(pool):
            raise InsufficientDataError(cname, count, len(pool))
        rng = random.Random(f"{rng_seed}:{cname.lower()}")
        picked.extend(rng.sample(pool, count))
        provs.add(corpus.provenance)
    # mixtures have no single provenance; unit ids keep the source corpus
    prov = provs.pop() if len(provs) == 1 else Provenance.SYNTHETIC
    return Corpus(spec.name, tuple(picked), prov)
