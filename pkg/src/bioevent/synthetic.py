"""Seeded generators for small annotated biographies with planted gold.

The documents imitate the annotation scheme closely enough to exercise every
layer: direct and indirect mentions, verbal and nominal events, LINK on
copulas and CONT_MOD on hedged events. Every token carries a lemma and a
Penn-style POS tag.
"""

from __future__ import annotations

import random

from .core.model import (
    AnnotatedDocument,
    ContModRelation,
    Corpus,
    EntityMention,
    EventMention,
    LinkRelation,
    MentionKind,
    Provenance,
    Token,
    Uncertainty,
)
from .text import lemmatize

FIRST = ["Amina", "Chinua", "Wole", "Ngozi", "Kofi", "Maya", "Toni", "Ama", "Bessie", "Femi", "Lola", "Zora"]
LAST = ["Okafor", "Adeyemi", "Mensah", "Walker", "Morrison", "Head", "Hurston", "Soyinka", "Achebe", "Aidoo"]
NATIONALITY = ["Nigerian", "Ghanaian", "Kenyan", "American", "British", "Jamaican"]
PROFESSION = ["writer", "poet", "novelist", "journalist", "playwright", "teacher", "activist"]
CITY = ["Lagos", "Accra", "Nairobi", "London", "Paris", "Harlem", "Kingston", "Ibadan"]
TITLE = ["Sozaboy", "Arrow", "Harvest", "Rain", "Dust", "Sunrise", "Echoes", "Tides"]
PLACE_NOUN = ["village", "town", "district", "capital"]

_POS = {
    "was": "VBD", "a": "DT", "an": "DT", "the": "DT", "in": "IN", "to": "TO", "of": "IN", "and": "CC",
    "he": "PRP", "she": "PRP", "his": "PRP$", "her": "PRP$", "novel": "NN", "college": "NN",
    "but": "CC", "father": "NN", "mother": "NN", "is": "VBZ", "located": "VBN", "near": "IN",
    "there": "EX", ",": ",", ".": ".", "for": "IN", "years": "NNS", "many": "JJ", "known": "VBN",
}


def _pos(word):
    if word in _POS:
        return _POS[word]
    if word.lower() in _POS:
        return _POS[word.lower()]
    if word.isdigit():
        return "CD"
    if word[0].isupper():
        return "NNP"
    if word in NATIONALITY:
        return "JJ"
    if word.endswith("ed"):
        return "VBD"
    return "NN"


class _Builder:
    def __init__(self, doc_id, name):
        self.doc_id = doc_id
        self.name = name
        self.tokens = []
        self.mentions = []
        self.events = []
        self.links = []
        self.cont_mods = []
        self.sent = 0

    def add_sentence(self, words, mentions=(), events=(), links=(), cont_mods=(), pos=None):
        """``mentions`` are (start, end, kind) offsets within ``words``."""
        base = len(self.tokens)
        pos = pos or {}
        for i, w in enumerate(words):
            tag = pos.get(i) or (_pos(w) if w not in NATIONALITY else "JJ")
            self.tokens.append(Token(base + i, w, self.sent, lemmatize(w), tag))
        for s, e, kind in mentions:
            self.mentions.append(EntityMention(base + s, base + e, kind))
        for i, unc in events:
            self.events.append(EventMention(base + i, unc))
        for s, t in links:
            self.links.append(LinkRelation(base + s, base + t))
        for s, t, v in cont_mods:
            self.cont_mods.append(ContModRelation(base + s, base + t, v))
        self.sent += 1

    def build(self, group=None):
        return AnnotatedDocument(
            self.doc_id, self.name, tuple(self.tokens), tuple(self.mentions),
            tuple(sorted(self.events)), tuple(self.links), tuple(self.cont_mods), group,
        )


F = Uncertainty.FACTUAL
D = MentionKind.DIRECT


def _sentence_kinds(rng, b, first, last, pronoun, possessive):
    year = str(rng.randint(1900, 2000))
    choice = rng.randrange(9)
    prof = rng.choice(PROFESSION)
    city = rng.choice(CITY)
    title = rng.choice(TITLE)
    he = pronoun.capitalize()
    if choice == 0:
        b.add_sentence([first, last, "was", "a", rng.choice(NATIONALITY), prof, "."],
                       mentions=[(0, 1, D)], events=[(5, F)], links=[(2, 5)])
    elif choice == 1:
        b.add_sentence([he, "wrote", title, "in", year, "."], mentions=[(0, 0, D)], events=[(1, F)])
    elif choice == 2:
        b.add_sentence(["In", year, ",", pronoun, "moved", "to", city, "."], mentions=[(3, 3, D)], events=[(4, F)])
    elif choice == 3:
        b.add_sentence(["In", year, ",", "the", "novel", title, "was", "published", "."],
                       mentions=[(5, 5, MentionKind.INDIRECT)], events=[(7, F)], pos={7: "VBN"})
    elif choice == 4:
        # hedged: decided -> quit (INTENTION), stopped -> quit (NOT_HAPPENED)
        b.add_sentence([he, "decided", "to", "quit", "college", ",", "but", "was", "stopped", "."],
                       mentions=[(0, 0, D)],
                       events=[(1, F), (3, Uncertainty.NOT_HAPPENED), (8, F)],
                       cont_mods=[(1, 3, Uncertainty.INTENTION), (8, 3, Uncertainty.NOT_HAPPENED)],
                       pos={3: "VB", 8: "VBN"})
    elif choice == 5:
        b.add_sentence([possessive.capitalize(), "father", "was", "a", prof, "in", city, "."])
    elif choice == 6:
        b.add_sentence(["The", rng.choice(PLACE_NOUN), "of", city, "is", "located", "near", "the", "coast", "."])
    elif choice == 7:
        b.add_sentence([he, "returned", "to", city, "and", "taught", "for", "many", "years", "."],
                       mentions=[(0, 0, D)], events=[(1, F), (5, F)])
    else:
        b.add_sentence([he, "married", rng.choice(FIRST), rng.choice(LAST), "in", year, "."],
                       mentions=[(0, 0, D)], events=[(1, F)])


def make_biography(doc_id: str, seed: int, n_sentences: int = 12, group=None) -> AnnotatedDocument:
    rng = random.Random(f"{doc_id}:{seed}")
    first, last = rng.choice(FIRST), rng.choice(LAST)
    pronoun, possessive = rng.choice([("he", "his"), ("she", "her")])
    b = _Builder(doc_id, f"{first} {last}")
    # opening sentence always names the subject
    b.add_sentence([first, last, "was", "a", rng.choice(NATIONALITY), rng.choice(PROFESSION), "."],
                   mentions=[(0, 1, D)], events=[(5, F)], links=[(2, 5)])
    for _ in range(n_sentences - 1):
        _sentence_kinds(rng, b, first, last, pronoun, possessive)
    return b.build(group)


def make_corpus(n_docs: int = 10, seed: int = 0, n_sentences: int = 12, name: str = "synthetic",
                provenance: Provenance = Provenance.SYNTHETIC, group=None) -> Corpus:
    docs = tuple(
        make_biography(f"{name}-{i:04d}", seed, n_sentences, group) for i in range(n_docs)
    )
    return Corpus(name, docs, provenance)


def pretokenized_text(doc: AnnotatedDocument) -> str:
    """Whitespace-joined tokens, one sentence per paragraph."""
    sents = []
    for _, lo, hi in doc.sentence_spans():
        sents.append(" ".join(t.text for t in doc.tokens[lo:hi]))
    return "\n\n".join(sents) + "\n"


def event_documents(group, type_probs: dict, n_bios: int, events_per_bio, seed: int, prefix: str | None = None):
    """Biographies whose events are drawn i.i.d. from ``type_probs``.

    Each biography is a single pronoun-led sentence per event ("She <event> .")
    so the event token's lemma is the type itself. ``events_per_bio`` is an int
    or a ``(low, high)`` range.
    """
    rng = random.Random(seed)
    types = sorted(type_probs)
    weights = [type_probs[t] for t in types]
    prefix = prefix or group.code
    docs = []
    for b in range(n_bios):
        n = events_per_bio if isinstance(events_per_bio, int) else rng.randint(*events_per_bio)
        builder = _Builder(f"{prefix}-{b:05d}", f"{prefix} person {b}")
        for t in rng.choices(types, weights, k=n):
            builder.add_sentence(["They", t, "."], mentions=[(0, 0, D)], events=[(1, F)])
        doc = builder.build(group)
        # type lemma must equal the planted type exactly
        doc = doc.evolve(tokens=tuple(
            Token(tok.index, tok.text, tok.sentence_index, tok.text if tok.index % 3 == 1 else tok.lemma, tok.pos)
            for tok in doc.tokens
        ))
        docs.append(doc)
    return docs
