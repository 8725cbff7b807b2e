"""Projection of annotation layers onto per-token label sequences."""

from __future__ import annotations

from enum import Enum

from .model import AnnotatedDocument, EntityMention, EventMention, MentionKind

B_ENT, I_ENT, O = "B-ENT", "I-ENT", "O"
EVENT = "EVENT"

ENTITY_LABELS = (O, B_ENT, I_ENT)
EVENT_LABELS = (O, EVENT)


class Layer(str, Enum):
    ENTITY = "ENTITY"
    EVENT = "EVENT"
    LINK = "LINK"
    CONT_MOD = "CONT_MOD"


def label_set(layer) -> tuple[str, ...]:
    layer = Layer(layer)
    if layer is Layer.ENTITY:
        return ENTITY_LABELS
    if layer is Layer.EVENT:
        return EVENT_LABELS
    return (O, "SRC", "TGT", "SRC+TGT")


def to_token_labels(doc: AnnotatedDocument, layer) -> list[str]:
    """One label per token.

    ENTITY uses B-ENT/I-ENT/O. EVENT uses EVENT/O (events are single tokens).
    LINK and CONT_MOD give relation participation: SRC, TGT, SRC+TGT or O.
    """
    layer = Layer(layer)
    labels = [O] * len(doc.tokens)
    if layer is Layer.ENTITY:
        for m in doc.entity_mentions:
            labels[m.start] = B_ENT
            for i in range(m.start + 1, m.end + 1):
                labels[i] = I_ENT
    elif layer is Layer.EVENT:
        for e in doc.events:
            labels[e.token_index] = EVENT
    else:
        rels = doc.links if layer is Layer.LINK else doc.cont_mods
        src = {r.source_token for r in rels}
        tgt = {r.target_token for r in rels}
        for i in src | tgt:
            labels[i] = "SRC+TGT" if (i in src and i in tgt) else ("SRC" if i in src else "TGT")
    return labels


def mentions_from_labels(labels) -> list[EntityMention]:
    """Rebuild DIRECT mention spans from a B/I/O sequence.

    A stray I-ENT without a preceding B-ENT or I-ENT opens a new span, which
    is how a span cut at a window boundary is read back.
    """
    spans = []
    start = None
    for i, lab in enumerate(labels):
        if lab == B_ENT or (lab == I_ENT and start is None):
            if start is not None:
                spans.append(EntityMention(start, i - 1, MentionKind.DIRECT))
            start = i
        elif lab != I_ENT and start is not None:
            spans.append(EntityMention(start, i - 1, MentionKind.DIRECT))
            start = None
    if start is not None:
        spans.append(EntityMention(start, len(labels) - 1, MentionKind.DIRECT))
    return spans


def events_from_labels(labels) -> list[EventMention]:
    return [EventMention(i) for i, lab in enumerate(labels) if lab == EVENT]
