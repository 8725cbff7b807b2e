"""Reading and writing corpora.

The canonical format is line-delimited JSON, one document per line, with
uppercase enum strings and mention spans as ``[start, end]`` pairs. Corpus
name and provenance go to a ``<stem>.meta.json`` sidecar. A tab-separated
per-token view is available for sequence-labeling tools and reads back
losslessly apart from lemma/POS.
"""

from __future__ import annotations

import importlib
import io
import json
from pathlib import Path

from ..errors import CorpusParseError, ValidationError
from .lexicon import LightVerbLexicon
from .model import (
    AnnotatedDocument,
    ContModRelation,
    Corpus,
    EntityMention,
    EventMention,
    GroupLabel,
    Gender,
    LinkRelation,
    MentionKind,
    Origin,
    Provenance,
    Token,
    Uncertainty,
)
from .validate import validate_document

TSV_COLUMNS = ("doc_id", "sent_idx", "tok_idx", "text", "entity_bio", "event", "link_src_of", "contmod_value")


# ---------------------------------------------------------------- JSON records

def document_to_record(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "target_entity_name": doc.target_entity_name,
        "tokens": [
            {"index": t.index, "text": t.text, "sentence_index": t.sentence_index, "lemma": t.lemma, "pos": t.pos}
            for t in doc.tokens
        ],
        "entity_mentions": [{"token_span": [m.start, m.end], "kind": m.kind.value} for m in doc.entity_mentions],
        "events": [{"token_index": e.token_index, "uncertainty": e.uncertainty.value} for e in doc.events],
        "links": [{"source_token": r.source_token, "target_token": r.target_token} for r in doc.links],
        "cont_mods": [
            {"source_token": r.source_token, "target_token": r.target_token, "value": r.value.value}
            for r in doc.cont_mods
        ],
        "group": None if doc.group is None else {"origin": doc.group.origin.value, "gender": doc.group.gender.value},
    }


def document_from_record(rec: dict) -> AnnotatedDocument:
    group = rec.get("group")
    return AnnotatedDocument(
        doc_id=str(rec["doc_id"]),
        target_entity_name=rec.get("target_entity_name") or "",
        tokens=tuple(
            Token(int(t["index"]), t["text"], int(t["sentence_index"]), t.get("lemma"), t.get("pos"))
            for t in rec["tokens"]
        ),
        entity_mentions=tuple(
            EntityMention(int(m["token_span"][0]), int(m["token_span"][1]), MentionKind(m.get("kind", "DIRECT")))
            for m in rec.get("entity_mentions", ())
        ),
        events=tuple(
            EventMention(int(e["token_index"]), Uncertainty(e.get("uncertainty", "FACTUAL")))
            for e in rec.get("events", ())
        ),
        links=tuple(LinkRelation(int(r["source_token"]), int(r["target_token"])) for r in rec.get("links", ())),
        cont_mods=tuple(
            ContModRelation(int(r["source_token"]), int(r["target_token"]), Uncertainty(r["value"]))
            for r in rec.get("cont_mods", ())
        ),
        group=None if not group else GroupLabel(Origin(group["origin"]), Gender(group["gender"])),
    )


def dumps_document(doc: AnnotatedDocument) -> str:
    """Canonical single-line serialization; equal documents give equal bytes."""
    return json.dumps(document_to_record(doc), sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def read_jsonl_documents(path) -> list[AnnotatedDocument]:
    docs = []
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                docs.append(document_from_record(rec))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
                raise CorpusParseError(path, lineno, f"{type(exc).__name__}: {exc}") from exc
    return docs


def write_jsonl_documents(docs, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(dumps_document(doc))
            fh.write("\n")


# ----------------------------------------------------------------- TSV view

def _tsv_rows(doc: AnnotatedDocument):
    from .labels import B_ENT, I_ENT, Layer, to_token_labels

    ent = to_token_labels(doc, Layer.ENTITY)
    kinds = {}
    for m in doc.entity_mentions:
        for i in range(m.start, m.end + 1):
            kinds[i] = m.kind
    events = {e.token_index: e for e in doc.events}
    link_src = {}
    for r in doc.links:
        link_src.setdefault(r.source_token, []).append(str(r.target_token))
    contmod = {}
    for r in doc.cont_mods:
        contmod.setdefault(r.source_token, []).append(f"{r.value.value}->{r.target_token}")
    for t in doc.tokens:
        lab = ent[t.index]
        if lab in (B_ENT, I_ENT) and kinds.get(t.index) is MentionKind.INDIRECT:
            lab += ":INDIRECT"
        ev = events.get(t.index)
        if ev is None:
            ev_lab = "O"
        elif ev.uncertainty is Uncertainty.FACTUAL:
            ev_lab = "EVENT"
        else:
            ev_lab = f"EVENT:{ev.uncertainty.value}"
        yield (
            doc.doc_id,
            str(t.sentence_index),
            str(t.index),
            t.text,
            lab,
            ev_lab,
            "|".join(link_src.get(t.index, [])) or "_",
            "|".join(contmod.get(t.index, [])) or "_",
        )


def write_tsv(docs, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TSV_COLUMNS) + "\n")
        for doc in docs:
            fh.write(f"# doc\t{doc.doc_id}\t{doc.target_entity_name}\n")
            for row in _tsv_rows(doc):
                fh.write("\t".join(row) + "\n")


def read_tsv_documents(path) -> list[AnnotatedDocument]:
    path = Path(path)
    docs = []
    names = {}
    rows_by_doc: dict[str, list] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or (lineno == 1 and line.startswith("doc_id")):
                continue
            if line.startswith("# doc\t"):
                parts = line.split("\t")
                names[parts[1]] = parts[2] if len(parts) > 2 else ""
                continue
            cols = line.split("\t")
            if len(cols) != len(TSV_COLUMNS):
                raise CorpusParseError(path, lineno, f"expected {len(TSV_COLUMNS)} columns, got {len(cols)}")
            rows_by_doc.setdefault(cols[0], []).append((lineno, cols))
    for doc_id, rows in rows_by_doc.items():
        try:
            docs.append(_doc_from_tsv_rows(doc_id, names.get(doc_id, ""), rows))
        except (ValueError, KeyError) as exc:
            raise CorpusParseError(path, rows[0][0], f"{doc_id}: {exc}") from exc
    return docs


def _doc_from_tsv_rows(doc_id, name, rows):
    tokens, mentions, events, links, cont_mods = [], [], [], [], []
    open_span = None
    for _, cols in rows:
        _, sent, idx, text, ent, ev, link_src, cm = cols
        i = int(idx)
        tokens.append(Token(i, text, int(sent)))
        base, _, kind = ent.partition(":")
        kind = MentionKind(kind) if kind else MentionKind.DIRECT
        if base == "B-ENT" or (base == "I-ENT" and open_span is None):
            if open_span:
                mentions.append(EntityMention(open_span[0], i - 1, open_span[1]))
            open_span = (i, kind)
        elif base != "I-ENT" and open_span:
            mentions.append(EntityMention(open_span[0], i - 1, open_span[1]))
            open_span = None
        if ev != "O":
            _, _, unc = ev.partition(":")
            events.append(EventMention(i, Uncertainty(unc) if unc else Uncertainty.FACTUAL))
        if link_src != "_":
            links.extend(LinkRelation(i, int(t)) for t in link_src.split("|"))
        if cm != "_":
            for item in cm.split("|"):
                value, _, tgt = item.partition("->")
                cont_mods.append(ContModRelation(i, int(tgt), Uncertainty(value)))
    if open_span:
        mentions.append(EntityMention(open_span[0], len(tokens) - 1, open_span[1]))
    return AnnotatedDocument(doc_id, name, tuple(tokens), tuple(mentions), tuple(events), tuple(links), tuple(cont_mods))


# ------------------------------------------------------------ format registry

# format id -> (file suffixes, "module:function" or callable, default provenance)
READERS = {
    "jsonl": ((".jsonl",), read_jsonl_documents, None),
    "tsv": ((".tsv",), read_tsv_documents, None),
    "ontonotes": ((".gold_conll", ".v4_gold_conll", ".conll"), "bioevent.adapters.readers:read_ontonotes", Provenance.ONTONOTES),
    "gum": ((".conllu",), "bioevent.adapters.readers:read_gum", Provenance.GUM),
    "timeml": ((".tml", ".xml"), "bioevent.adapters.readers:read_timeml", Provenance.TIMEBANK),
    "newsreader": ((".tml", ".xml"), "bioevent.adapters.readers:read_newsreader", Provenance.NEWSREADER),
    "litbank": ((".txt", ".litbank"), "bioevent.adapters.readers:read_litbank", Provenance.LITBANK),
}


def register_reader(fmt, suffixes, reader, provenance=None):
    READERS[fmt] = (tuple(suffixes), reader, provenance)


def _resolve(reader):
    if callable(reader):
        return reader
    mod, _, fn = reader.partition(":")
    return getattr(importlib.import_module(mod), fn)


def _read_meta(path: Path):
    meta = path.with_suffix(".meta.json") if path.is_file() else None
    if path.is_dir():
        metas = sorted(path.glob("*.meta.json"))
        meta = metas[0] if len(metas) == 1 else None
    if meta is not None and meta.exists():
        return json.loads(meta.read_text("utf-8"))
    return {}


def load_corpus(path, format: str = "jsonl", *, name=None, provenance=None, validate=True,
                lexicon: LightVerbLexicon | None = None) -> Corpus:
    """Read a corpus file or directory and validate every document.

    Directories are read file by file in sorted order, keeping files whose
    suffix belongs to ``format``.
    """
    path = Path(path)
    if format not in READERS:
        raise ValueError(f"unknown corpus format {format!r}; known: {sorted(READERS)}")
    if not path.exists():
        raise FileNotFoundError(path)
    suffixes, reader, default_prov = READERS[format]
    reader = _resolve(reader)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file() and p.name.endswith(suffixes) and not p.name.endswith(".meta.json"))
    else:
        files = [path]
    docs = []
    for f in files:
        docs.extend(reader(f))

    meta = _read_meta(path)
    name = name or meta.get("name") or (path.stem if path.is_file() else path.name)
    if provenance is None:
        provenance = meta.get("provenance") or default_prov or Provenance.SYNTHETIC
    corpus = Corpus(name, tuple(docs), Provenance(provenance))

    if validate:
        for doc in corpus.documents:
            report = validate_document(doc, lexicon)
            if report.errors:
                raise ValidationError(doc.doc_id, report.errors)
    return corpus


def save_corpus(corpus: Corpus, path, format: str = "jsonl") -> Path:
    """Write ``corpus``; a directory ``path`` receives ``<name>.<format>``.

    Returns the written data file.
    """
    path = Path(path)
    if format not in ("jsonl", "tsv"):
        raise ValueError(f"cannot write format {format!r}")
    if path.is_dir() or not path.suffix:
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{corpus.name}.{format}"
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    if format == "jsonl":
        write_jsonl_documents(corpus.documents, path)
    else:
        write_tsv(corpus.documents, path)
    meta = {"name": corpus.name, "provenance": corpus.provenance.value}
    path.with_suffix(".meta.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return path


def corpus_to_bytes(corpus: Corpus) -> bytes:
    buf = io.StringIO()
    for doc in corpus.documents:
        buf.write(dumps_document(doc))
        buf.write("\n")
    return buf.getvalue().encode("utf-8")
