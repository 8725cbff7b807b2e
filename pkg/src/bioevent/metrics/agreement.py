from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..core.labels import Layer, to_token_labels
from ..errors import TokenizationMismatchError, UndefinedKappaError


def cohen_kappa(labels_a, labels_b) -> float:
    """Cohen's kappa, ``(p_o - p_e) / (1 - p_e)`` with chance agreement from
    each annotator's own label marginals.

    Raises :class:`UndefinedKappaError` when ``p_e == 1`` (both annotators
    used the same single label throughout).
    """
    a = list(labels_a)
    b = list(labels_b)
    if len(a) != len(b):
        raise ValueError(f"sequences differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        raise ValueError("cannot compute kappa on empty sequences")
    p_o = sum(x == y for x, y in zip(a, b)) / n
    ca, cb = Counter(a), Counter(b)
    p_e = sum(ca[k] * cb[k] for k in ca) / (n * n)
    if p_e == 1.0:
        raise UndefinedKappaError("kappa undefined: chance agreement is 1 (constant, identical labelings)")
    return (p_o - p_e) / (1 - p_e)


@dataclass(frozen=True)
class AgreementReport:
    layer: Layer
    annotator_pair: tuple[str, str]
    kappa: float  # nan when undefined
    n_items: int
    undefined: bool = False


def _align(docs_a, docs_b):
    a = {d.doc_id: d for d in docs_a}
    b = {d.doc_id: d for d in docs_b}
    if set(a) != set(b):
        missing = sorted(set(a) ^ set(b))
        raise ValueError(f"annotator sets cover different documents: {missing[:5]}")
    for doc_id in sorted(a):
        da, db = a[doc_id], b[doc_id]
        for i in range(max(len(da.tokens), len(db.tokens))):
            if i >= len(da.tokens) or i >= len(db.tokens) or da.tokens[i].text != db.tokens[i].text:
                raise TokenizationMismatchError(doc_id, i)
        yield da, db


def pairwise_iaa(docs_a, docs_b, layer, annotators=("A", "B")) -> AgreementReport:
    """Token-level kappa between two annotators' versions of the same
    sentences. Relation layers compare per-token participation labels
    (SRC / TGT / SRC+TGT / O)."""
    layer = Layer(layer)
    la, lb = [], []
    for da, db in _align(docs_a, docs_b):
        la.extend(to_token_labels(da, layer))
        lb.extend(to_token_labels(db, layer))
    try:
        k = cohen_kappa(la, lb)
        undefined = False
    except UndefinedKappaError:
        k, undefined = math.nan, True
    return AgreementReport(layer, tuple(annotators), k, len(la), undefined)
