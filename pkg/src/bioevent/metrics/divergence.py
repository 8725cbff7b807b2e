"""Jensen-Shannon divergence between corpora (base 2, range [0, 1])."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from ..errors import NotNormalizedError
from ..text import lemmatize

NORMALIZATION_TOL = 1e-9


class Basis(str, Enum):
    LEMMA_UNIGRAM = "LEMMA_UNIGRAM"
    SURFACE_UNIGRAM = "SURFACE_UNIGRAM"
    EVENT_TYPE = "EVENT_TYPE"


BASIS_ALIASES = {"lemma": Basis.LEMMA_UNIGRAM, "surface": Basis.SURFACE_UNIGRAM, "event": Basis.EVENT_TYPE}


def parse_basis(value) -> Basis:
    if isinstance(value, Basis):
        return value
    return BASIS_ALIASES.get(str(value).lower()) or Basis(str(value).upper())


def _entropy(probs) -> float:
    # 0 log 0 = 0
    return -sum(p * math.log2(p) for p in probs if p > 0)


def _as_aligned(p, q):
    if isinstance(p, dict) or isinstance(q, dict):
        keys = sorted(set(p) | set(q), key=str)
        return [float(p.get(k, 0.0)) for k in keys], [float(q.get(k, 0.0)) for k in keys]
    p, q = [float(x) for x in p], [float(x) for x in q]
    if len(p) != len(q):
        raise ValueError("distributions have different lengths")
    return p, q


def check_distribution(p, name="p"):
    if any(x < 0 or math.isnan(x) for x in p):
        raise NotNormalizedError(f"{name} has negative or NaN entries")
    s = math.fsum(p)
    if abs(s - 1.0) > NORMALIZATION_TOL:
        raise NotNormalizedError(f"{name} sums to {s!r}, not 1")


def jsd(p, q) -> float:
    """JSD(P, Q) = H(M) - (H(P) + H(Q)) / 2 with M = (P + Q) / 2.

    ``p`` and ``q`` are dicts (missing keys are 0) or equal-length sequences.
    """
    p, q = _as_aligned(p, q)
    check_distribution(p, "p")
    check_distribution(q, "q")
    m = [0.5 * (x + y) for x, y in zip(p, q)]
    value = _entropy(m) - 0.5 * (_entropy(p) + _entropy(q))
    return min(1.0, max(0.0, value))


def normalize(counts: dict) -> dict:
    total = math.fsum(counts.values())
    if total <= 0:
        raise NotNormalizedError("cannot normalize an empty or all-zero distribution")
    return {k: v / total for k, v in counts.items() if v > 0}


LEMMA_FALLBACKS = ("lemmatizer", "surface")


def token_lemma(tok, fallback="lemmatizer") -> str:
    """Annotated lemma if present, else the dictionary lemmatizer or the
    lowercased surface form."""
    if tok.lemma:
        return tok.lemma.lower()
    if fallback == "surface":
        return tok.text.lower()
    return lemmatize(tok.text)


def basis_counts(corpus, basis, fallback="lemmatizer") -> Counter:
    basis = parse_basis(basis)
    counts = Counter()
    for doc in corpus:
        if basis is Basis.EVENT_TYPE:
            counts.update(token_lemma(doc.tokens[e.token_index], fallback) for e in doc.events)
        elif basis is Basis.LEMMA_UNIGRAM:
            counts.update(token_lemma(t, fallback) for t in doc.tokens)
        else:
            counts.update(t.text.lower() for t in doc.tokens)
    return counts


@dataclass(frozen=True)
class DivergenceResult:
    corpus_a: str
    corpus_b: str
    jsd: float
    distribution_basis: Basis


@dataclass
class DivergenceMatrix:
    names: list[str]
    values: np.ndarray
    basis: Basis

    def __getitem__(self, pair) -> float:
        a, b = pair
        return float(self.values[self.names.index(a), self.names.index(b)])

    def results(self) -> list[DivergenceResult]:
        n = len(self.names)
        return [
            DivergenceResult(self.names[i], self.names[j], float(self.values[i, j]), self.basis)
            for i in range(n) for j in range(n)
        ]

    def row_order(self, name) -> list[str]:
        """Other corpora sorted by divergence from ``name``, closest first."""
        i = self.names.index(name)
        others = [j for j in range(len(self.names)) if j != i]
        return [self.names[j] for j in sorted(others, key=lambda j: (self.values[i, j], self.names[j]))]

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"basis={self.basis.value}"] + self.names)
            for name, row in zip(self.names, self.values):
                w.writerow([name] + [repr(float(x)) for x in row])


def jsd_matrix(corpora, basis=Basis.LEMMA_UNIGRAM, fallback="lemmatizer") -> DivergenceMatrix:
    corpora = list(corpora)
    if len(corpora) < 2:
        raise ValueError("need at least two corpora")
    basis = parse_basis(basis)
    dists = [normalize(basis_counts(c, basis, fallback)) for c in corpora]
    n = len(corpora)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = jsd(dists[i], dists[j])
    return DivergenceMatrix([c.name for c in corpora], values, basis)
