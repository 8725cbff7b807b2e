from .io import (
    READERS,
    corpus_to_bytes,
    document_from_record,
    document_to_record,
    dumps_document,
    load_corpus,
    read_jsonl_documents,
    read_tsv_documents,
    register_reader,
    save_corpus,
    write_jsonl_documents,
    write_tsv,
)
from .labels import (
    B_ENT,
    EVENT,
    I_ENT,
    O,
    Layer,
    events_from_labels,
    label_set,
    mentions_from_labels,
    to_token_labels,
)
from .lexicon import LightVerbLexicon, default_lexicon
from .model import (
    ALL_GROUPS,
    AnnotatedDocument,
    ContModRelation,
    Corpus,
    CorpusCounts,
    EntityMention,
    EventMention,
    Gender,
    GroupLabel,
    LinkRelation,
    MentionKind,
    Origin,
    Provenance,
    Token,
    Uncertainty,
    count_corpus,
    sentence_documents,
)
from .validate import Severity, ValidationReport, Violation, validate_document
