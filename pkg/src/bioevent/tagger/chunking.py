from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..core.labels import to_token_labels


class Batching(str, Enum):
    ONE_BATCH_PER_DOCUMENT = "ONE_BATCH_PER_DOCUMENT"
    FIXED = "FIXED"  # small-memory mode, not used for replication


@dataclass(frozen=True)
class ChunkingSpec:
    max_sequence_length: int = 128
    batching: Batching = Batching.ONE_BATCH_PER_DOCUMENT
    batch_size: int = 16  # FIXED mode only

    def __post_init__(self):
        if self.max_sequence_length < 2:
            raise ValueError("max_sequence_length must be at least 2")
        object.__setattr__(self, "batching", Batching(self.batching))


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    start: int
    tokens: tuple[str, ...]
    labels: tuple[str, ...] | None = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.start)


def windows(n: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def chunk_document(doc, spec: ChunkingSpec = ChunkingSpec(), layer=None) -> list[Chunk]:
    """Consecutive non-overlapping windows of at most ``max_sequence_length``
    tokens; labels of ``layer`` are sliced in parallel when given."""
    toks = tuple(t.text for t in doc.tokens)
    labels = tuple(to_token_labels(doc, layer)) if layer is not None else None
    return [
        Chunk(doc.doc_id, lo, toks[lo:hi], labels[lo:hi] if labels is not None else None)
        for lo, hi in windows(len(toks), spec.max_sequence_length)
    ]


def unchunk(chunks, values=None) -> dict[str, list]:
    """Join per-window values (default: the chunk labels) back per document."""
    out: dict[str, list] = {}
    values = values if values is not None else [c.labels for c in chunks]
    for c, v in sorted(zip(chunks, values), key=lambda cv: cv[0].key):
        seq = out.setdefault(c.doc_id, [])
        if len(seq) != c.start:
            raise ValueError(f"gap or overlap in windows of {c.doc_id!r} at {c.start}")
        seq.extend(v)
    return out


def batch_groups(chunks, spec: ChunkingSpec) -> list[int]:
    """Batch id per chunk: one batch per document, or fixed-size batches."""
    if spec.batching is Batching.FIXED:
        return [i // spec.batch_size for i in range(len(chunks))]
    ids: dict[str, int] = {}
    return [ids.setdefault(c.doc_id, len(ids)) for c in chunks]
