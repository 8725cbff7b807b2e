"""Immutable data model for biographies annotated with target-entity
mentions, single-token events, LINK and CONT_MOD relations."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class MentionKind(str, Enum):
    DIRECT = "DIRECT"
    INDIRECT = "INDIRECT"


class Uncertainty(str, Enum):
    FACTUAL = "FACTUAL"
    INTENTION = "INTENTION"
    NOT_HAPPENED = "NOT_HAPPENED"
    EPISTEMIC = "EPISTEMIC"


class Provenance(str, Enum):
    WIKIBIO = "WIKIBIO"
    GUM = "GUM"
    ONTONOTES = "ONTONOTES"
    TIMEBANK = "TIMEBANK"
    LITBANK = "LITBANK"
    NEWSREADER = "NEWSREADER"
    SYNTHETIC = "SYNTHETIC"


class Origin(str, Enum):
    WESTERN = "WESTERN"
    TRANSNATIONAL = "TRANSNATIONAL"


class Gender(str, Enum):
    MAN = "MAN"
    WOMAN = "WOMAN"


@dataclass(frozen=True, order=True)
class GroupLabel:
    origin: Origin
    gender: Gender

    @property
    def code(self) -> str:
        """Two-letter code, e.g. ``TW`` for Transnational women."""
        return self.origin.value[0] + self.gender.value[0]

    @classmethod
    def from_code(cls, code: str) -> "GroupLabel":
        code = code.strip().upper()
        origins = {"W": Origin.WESTERN, "T": Origin.TRANSNATIONAL}
        genders = {"M": Gender.MAN, "W": Gender.WOMAN}
        if len(code) != 2 or code[0] not in origins or code[1] not in genders:
            raise ValueError(f"unknown group code {code!r}")
        return cls(origins[code[0]], genders[code[1]])

    def __str__(self):
        return self.code


ALL_GROUPS = tuple(GroupLabel(o, g) for o in Origin for g in Gender)


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    sentence_index: int
    lemma: Optional[str] = None
    pos: Optional[str] = None


@dataclass(frozen=True, order=True)
class EntityMention:
    start: int
    end: int  # inclusive
    kind: MentionKind = MentionKind.DIRECT

    @property
    def token_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __contains__(self, index: int) -> bool:
        return self.start <= index <= self.end


@dataclass(frozen=True, order=True)
class EventMention:
    token_index: int
    uncertainty: Uncertainty = Uncertainty.FACTUAL


@dataclass(frozen=True, order=True)
class LinkRelation:
    source_token: int
    target_token: int


@dataclass(frozen=True, order=True)
class ContModRelation:
    source_token: int
    target_token: int
    value: Uncertainty


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    target_entity_name: str
    tokens: tuple[Token, ...]
    entity_mentions: tuple[EntityMention, ...] = ()
    events: tuple[EventMention, ...] = ()
    links: tuple[LinkRelation, ...] = ()
    cont_mods: tuple[ContModRelation, ...] = ()
    group: Optional[GroupLabel] = None

    def __post_init__(self):
        # accept lists from callers but store tuples, so instances stay hashable
        for name in ("tokens", "entity_mentions", "events", "links", "cont_mods"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))

    def __len__(self):
        return len(self.tokens)

    @property
    def n_sentences(self) -> int:
        return len({t.sentence_index for t in self.tokens})

    def sentence_spans(self) -> list[tuple[int, int, int]]:
        """``(sentence_index, first_token, last_token_exclusive)`` per sentence."""
        spans = []
        start = 0
        for i in range(1, len(self.tokens) + 1):
            if i == len(self.tokens) or self.tokens[i].sentence_index != self.tokens[start].sentence_index:
                spans.append((self.tokens[start].sentence_index, start, i))
                start = i
        return spans

    def event_indices(self) -> set[int]:
        return {e.token_index for e in self.events}

    def mention_indices(self) -> set[int]:
        out = set()
        for m in self.entity_mentions:
            out.update(range(m.start, m.end + 1))
        return out

    def evolve(self, **changes) -> "AnnotatedDocument":
        return replace(self, **changes)


@dataclass(frozen=True)
class Corpus:
    name: str
    documents: tuple[AnnotatedDocument, ...] = ()
    provenance: Provenance = Provenance.SYNTHETIC

    def __post_init__(self):
        if not isinstance(self.documents, tuple):
            object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise ValueError(f"duplicate doc_id {doc.doc_id!r} in corpus {self.name!r}")
            seen.add(doc.doc_id)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i) -> AnnotatedDocument:
        return self.documents[i]

    def by_id(self) -> dict[str, AnnotatedDocument]:
        return {d.doc_id: d for d in self.documents}


@dataclass
class CorpusCounts:
    documents: int = 0
    sentences: int = 0
    event_sentences: int = 0
    tokens: int = 0
    events: int = 0
    mentions: int = 0
    links: int = 0
    cont_mods: int = 0
    extra: dict = field(default_factory=dict)


def count_corpus(corpus) -> CorpusCounts:
    """Raw annotation totals; ``corpus`` may be a Corpus or any document iterable."""
    c = CorpusCounts()
    for doc in corpus:
        c.documents += 1
        c.sentences += doc.n_sentences
        c.tokens += len(doc.tokens)
        c.events += len(doc.events)
        c.mentions += len(doc.entity_mentions)
        c.links += len(doc.links)
        c.cont_mods += len(doc.cont_mods)
        ev = doc.event_indices()
        c.event_sentences += len({doc.tokens[i].sentence_index for i in ev if i < len(doc.tokens)})
    return c


def sentence_documents(doc: AnnotatedDocument, prefix: str = "") -> list[AnnotatedDocument]:
    """Split a document into one document per sentence, re-indexing tokens.

    Relations whose endpoints fall in different sentences are dropped.
    Sentence ids take the form ``<prefix><doc_id>#s<sentence_index>``.
    """
    out = []
    for sent_idx, lo, hi in doc.sentence_spans():
        def inside(i):
            return lo <= i < hi

        tokens = tuple(
            Token(t.index - lo, t.text, 0, t.lemma, t.pos) for t in doc.tokens[lo:hi]
        )
        out.append(
            AnnotatedDocument(
                doc_id=f"{prefix}{doc.doc_id}#s{sent_idx}",
                target_entity_name=doc.target_entity_name,
                tokens=tokens,
                entity_mentions=tuple(
                    EntityMention(m.start - lo, m.end - lo, m.kind)
                    for m in doc.entity_mentions if inside(m.start) and inside(m.end)
                ),
                events=tuple(
                    EventMention(e.token_index - lo, e.uncertainty)
                    for e in doc.events if inside(e.token_index)
                ),
                links=tuple(
                    LinkRelation(r.source_token - lo, r.target_token - lo)
                    for r in doc.links if inside(r.source_token) and inside(r.target_token)
                ),
                cont_mods=tuple(
                    ContModRelation(r.source_token - lo, r.target_token - lo, r.value)
                    for r in doc.cont_mods if inside(r.source_token) and inside(r.target_token)
                ),
                group=doc.group,
            )
        )
    return out
