from __future__ import annotations

from ..core.model import AnnotatedDocument, EntityMention, MentionKind
from ..errors import NoPersonEntityError
from .readers import SourceDocument


def person_chains(src: SourceDocument) -> dict[str, list[tuple[int, int]]]:
    return {cid: spans for cid, spans in src.chains.items() if src.chain_types.get(cid, "").lower() == "person"}


def select_target_chain(src: SourceDocument) -> tuple[str, list[tuple[int, int]]]:
    """The PERSON chain with the most mentions; ties go to the chain whose
    first mention comes earliest."""
    chains = person_chains(src)
    if not chains:
        raise NoPersonEntityError(f"NO_PERSON_ENTITY: {src.doc_id}")
    cid = min(chains, key=lambda c: (-len(chains[c]), min(chains[c]), c))
    return cid, chains[cid]


def _clean_spans(src: SourceDocument, spans):
    """Drop spans that cross a sentence or overlap an earlier kept span."""
    kept = []
    taken = set()
    # longer spans first at equal start so a nested duplicate loses
    for s, e in sorted(set(spans), key=lambda x: (x[0], -(x[1] - x[0]))):
        if src.tokens[s].sentence_index != src.tokens[e].sentence_index:
            continue
        if any(i in taken for i in range(s, e + 1)):
            continue
        taken.update(range(s, e + 1))
        kept.append(EntityMention(s, e, MentionKind.DIRECT))
    return kept


def harmonize_person_entities(src: SourceDocument) -> AnnotatedDocument:
    """Keep only the mentions of the most frequent PERSON chain.

    Tokens and events pass through unchanged. Raises
    :class:`NoPersonEntityError` when the document has no PERSON chain.
    """
    cid, spans = select_target_chain(src)
    first = min(spans)
    name = " ".join(t.text for t in src.tokens[first[0]:first[1] + 1])
    doc = src.to_document(_clean_spans(src, spans))
    return doc.evolve(target_entity_name=name)
