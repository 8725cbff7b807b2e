from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..core.lexicon import LightVerbLexicon, default_lexicon
from ..core.model import Corpus
from ..core.validate import validate_document
from ..errors import NoPersonEntityError, ValidationError
from .compose import (
    ENTITY_DOCUMENT_CAP,
    EVENT_SENTENCE_CAP,
    MISC_MEMBERS,
    TrainingSetSpec,
    Unit,
    compose_training_set,
    equal_share_spec,
    largest_remainder,
    misc_spec,
)
from .harmonize import harmonize_person_entities, select_target_chain
from .lightverbs import complement_head, resolve_complement, rewrite_light_verbs
from .readers import SOURCE_READERS, SourceDocument

log = logging.getLogger(__name__)

VERB_ONLY_FORMATS = {"ontonotes"}


@dataclass
class AdapterConfig:
    source_format: str
    person_entity_filter: bool = False
    light_verb_rewrite: bool = False
    light_verb_lexicon: LightVerbLexicon = field(default_factory=default_lexicon)
    rng_seed: int = 0

    def __post_init__(self):
        if self.source_format not in SOURCE_READERS:
            raise ValueError(f"unknown source format {self.source_format!r}")
        if self.light_verb_rewrite and self.source_format not in VERB_ONLY_FORMATS:
            raise ValueError(f"light verb rewrite needs verb-only events; {self.source_format!r} is not")


@dataclass
class AdaptStats:
    read: int = 0
    kept: int = 0
    no_person: list = field(default_factory=list)


def adapt(path, config: AdapterConfig, name=None) -> tuple[Corpus, AdaptStats]:
    """Read an external corpus and convert it to the canonical scheme.

    With ``person_entity_filter`` documents lacking a PERSON chain are
    dropped; otherwise they keep their events and get no entity layer.
    """
    path = Path(path)
    reader = SOURCE_READERS[config.source_format]
    files = sorted(p for p in path.iterdir() if p.is_file()) if path.is_dir() else [path]
    sources = []
    for f in files:
        sources.extend(reader(f))
    stats = AdaptStats(read=len(sources))
    docs = []
    for src in sources:
        try:
            doc = harmonize_person_entities(src)
        except NoPersonEntityError:
            stats.no_person.append(src.doc_id)
            if config.person_entity_filter:
                continue
            doc = src.to_document()
        if config.light_verb_rewrite:
            doc = rewrite_light_verbs(doc, src.arguments, config.light_verb_lexicon)
        report = validate_document(doc, config.light_verb_lexicon)
        if report.errors:
            raise ValidationError(doc.doc_id, report.errors)
        docs.append(doc)
    stats.kept = len(docs)
    if stats.no_person:
        log.info("%d of %d documents have no PERSON chain", len(stats.no_person), stats.read)
    prov = sources[0].provenance if sources else None
    corpus = Corpus(name or (path.stem if path.is_file() else path.name), tuple(docs),
                    prov or _provenance_for(config.source_format))
    return corpus, stats


def _provenance_for(fmt):
    from ..core.model import Provenance

    return {
        "ontonotes": Provenance.ONTONOTES, "gum": Provenance.GUM, "timeml": Provenance.TIMEBANK,
        "newsreader": Provenance.NEWSREADER, "litbank": Provenance.LITBANK,
    }[fmt]
