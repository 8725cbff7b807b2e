from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .divergence import token_lemma


@dataclass
class CorpusProfile:
    name: str
    n_documents: int
    n_sentences: int
    n_tokens: int
    n_mention_tokens: int
    n_mention_sentences: int
    n_events: int
    event_lemma_counts: Counter = field(repr=False)
    lemma_source: str = "annotated"  # annotated | lemmatizer | surface | mixed
    top_n: int = 10

    @property
    def surface_based(self) -> bool:
        return self.lemma_source in ("surface", "mixed")

    @property
    def mention_token_ratio(self) -> float:
        return self.n_mention_tokens / self.n_tokens if self.n_tokens else 0.0

    @property
    def mention_sentence_ratio(self) -> float:
        return self.n_mention_sentences / self.n_sentences if self.n_sentences else 0.0

    @property
    def avg_doc_length_tokens(self) -> float:
        return self.n_tokens / self.n_documents if self.n_documents else 0.0

    @property
    def top_event_lemmas(self) -> list[tuple[str, float]]:
        if not self.n_events:
            return []
        ranked = sorted(self.event_lemma_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [(lemma, c / self.n_events) for lemma, c in ranked[: self.top_n]]

    def __add__(self, other: "CorpusProfile") -> "CorpusProfile":
        src = self.lemma_source if self.lemma_source == other.lemma_source else "mixed"
        return CorpusProfile(
            self.name, self.n_documents + other.n_documents, self.n_sentences + other.n_sentences,
            self.n_tokens + other.n_tokens, self.n_mention_tokens + other.n_mention_tokens,
            self.n_mention_sentences + other.n_mention_sentences, self.n_events + other.n_events,
            self.event_lemma_counts + other.event_lemma_counts, src, self.top_n,
        )

    def row(self) -> dict:
        top = ";".join(f"{lemma}:{freq:.4f}" for lemma, freq in self.top_event_lemmas)
        return {
            "corpus": self.name, "n_documents": self.n_documents, "n_sentences": self.n_sentences,
            "n_tokens": self.n_tokens, "n_events": self.n_events,
            "mention_token_ratio": self.mention_token_ratio,
            "mention_sentence_ratio": self.mention_sentence_ratio,
            "avg_doc_length_tokens": self.avg_doc_length_tokens,
            "lemma_source": self.lemma_source, "top_event_lemmas": top,
        }


def corpus_profile(corpus, top_n=10, lemma_fallback="lemmatizer") -> CorpusProfile:
    """Size, target-entity density and most frequent event lemmas.

    A mention token is any token inside a mention of the target entity; a
    mention sentence holds at least one such token.
    """
    n_docs = n_sents = n_tokens = n_mtok = n_msent = 0
    lemmas = Counter()
    sources = set()
    for doc in corpus:
        n_docs += 1
        n_sents += doc.n_sentences
        n_tokens += len(doc.tokens)
        mention_idx = doc.mention_indices()
        n_mtok += len(mention_idx)
        n_msent += len({doc.tokens[i].sentence_index for i in mention_idx})
        for ev in doc.events:
            tok = doc.tokens[ev.token_index]
            sources.add("annotated" if tok.lemma else lemma_fallback)
            lemmas[token_lemma(tok, lemma_fallback)] += 1
    if not sources:
        source = "annotated"
    elif len(sources) == 1:
        source = sources.pop()
    else:
        source = "mixed"
    return CorpusProfile(getattr(corpus, "name", ""), n_docs, n_sents, n_tokens, n_mtok, n_msent,
                         sum(lemmas.values()), lemmas, source, top_n)


def write_profiles_csv(profiles, path) -> None:
    rows = [p.row() for p in profiles]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["corpus"])
        w.writeheader()
        w.writerows(rows)


