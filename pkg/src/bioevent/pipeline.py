"""Two-stage annotation of raw biographies with a resumable checkpoint.

Mentions of the target entity are predicted first; sentences without one
are dropped and events are detected in the rest. Every finished document is
appended to a checkpoint log, so an interrupted run resumes where it
stopped and yields the same bytes as an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .core.io import document_from_record, document_to_record, dumps_document
from .core.labels import B_ENT, EVENT, I_ENT, mentions_from_labels
from .core.model import AnnotatedDocument, EventMention, GroupLabel, Origin, Gender
from .errors import BioEventError, ClassifierError, RebuildRequiredError
from .tagger.base import argmax
from .tagger.chunking import windows
from .text import SPLITTER_VERSION, document_from_text

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
MAX_SEQUENCE_LENGTH = 128


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    title: str
    text_path: str
    group: GroupLabel | None = None
    pretokenized: bool = False


def _group(value):
    if value in (None, ""):
        return None
    if isinstance(value, dict):
        return GroupLabel(Origin(value["origin"]), Gender(value["gender"]))
    return GroupLabel.from_code(str(value))


def read_manifest(path) -> list[ManifestRecord]:
    """One JSON object per line: id, title, group (code or object),
    text_path (relative paths resolve against the manifest's folder) and
    an optional pretokenized flag."""
    path = Path(path)
    out, seen = [], set()
    for n, line in enumerate(path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        rid = str(rec["id"])
        if rid in seen:
            raise ValueError(f"{path}:{n}: duplicate manifest id {rid!r}")
        seen.add(rid)
        text_path = Path(rec["text_path"])
        if not text_path.is_absolute():
            text_path = path.parent / text_path
        out.append(ManifestRecord(rid, rec.get("title", ""), str(text_path), _group(rec.get("group")),
                                  bool(rec.get("pretokenized", False))))
    return out


def write_manifest(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for r in records:
            tp = Path(r.text_path)
            try:
                tp = tp.relative_to(path.parent)
            except ValueError:
                pass
            fh.write(json.dumps({"id": r.id, "title": r.title, "group": r.group.code if r.group else None,
                                 "text_path": str(tp), "pretokenized": r.pretokenized}, sort_keys=True) + "\n")
    return path


def manifest_from_corpus(corpus, out_dir) -> Path:
    """Write each document's tokens as pretokenized text plus a manifest,
    so an annotated corpus can be pushed through the pipeline."""
    from .synthetic import pretokenized_text

    out_dir = Path(out_dir)
    (out_dir / "texts").mkdir(parents=True, exist_ok=True)
    records = []
    for i, doc in enumerate(corpus):
        tp = out_dir / "texts" / f"{i:06d}.txt"
        tp.write_text(pretokenized_text(doc), encoding="utf-8")
        records.append(ManifestRecord(doc.doc_id, doc.target_entity_name, str(tp), doc.group, True))
    return write_manifest(records, out_dir / "manifest.jsonl")


# stages

@dataclass
class FilterResult:
    n_sentences: int
    retained: list[int]
    entity_labels: dict[int, list[str]] = field(default_factory=dict)

    @property
    def retention(self) -> float:
        return len(self.retained) / self.n_sentences if self.n_sentences else 0.0


def _sentence_sequences(doc, sentence_ids=None, size=MAX_SEQUENCE_LENGTH):
    wanted = None if sentence_ids is None else set(sentence_ids)
    seqs, keys, owners = [], [], []
    for s, lo, hi in doc.sentence_spans():
        if wanted is not None and s not in wanted:
            continue
        for a, b in windows(hi - lo, size):
            seqs.append([t.text for t in doc.tokens[lo + a:lo + b]])
            keys.append((doc.doc_id, lo + a))
            owners.append(s)
    return seqs, keys, owners


def _predict(model, seqs, keys):
    if not seqs:
        return []
    try:
        return [[argmax(d) for d in row] for row in model.predict(seqs, keys)]
    except BioEventError:
        raise
    except Exception as exc:
        raise ClassifierError(f"{getattr(model, 'name', 'model')}: {exc}") from exc


def filter_sentences(doc: AnnotatedDocument, entity_model, size=MAX_SEQUENCE_LENGTH) -> FilterResult:
    """Keep the sentences with at least one predicted mention token.

    Each sentence is classified on its own, so adding sentences to a
    document never changes the verdict on the others.
    """
    seqs, keys, owners = _sentence_sequences(doc, size=size)
    labels: dict[int, list[str]] = {}
    for owner, row in zip(owners, _predict(entity_model, seqs, keys)):
        labels.setdefault(owner, []).extend(row)
    retained = [s for s in sorted(labels) if any(lab in (B_ENT, I_ENT) for lab in labels[s])]
    return FilterResult(doc.n_sentences, retained, {s: labels[s] for s in retained})


def detect_events(doc: AnnotatedDocument, sentence_ids, event_model, size=MAX_SEQUENCE_LENGTH) -> list[EventMention]:
    seqs, keys, _ = _sentence_sequences(doc, sentence_ids, size)
    events = []
    for (_, start), row in zip(keys, _predict(event_model, seqs, keys)):
        events.extend(EventMention(start + i) for i, lab in enumerate(row) if lab == EVENT)
    return sorted(events, key=lambda e: e.token_index)


def annotate_document(doc: AnnotatedDocument, entity_model, event_model) -> tuple[AnnotatedDocument, FilterResult]:
    filt = filter_sentences(doc, entity_model)
    spans = {s: lo for s, lo, _ in doc.sentence_spans()}
    mentions = []
    for s in filt.retained:
        lo = spans[s]
        for m in mentions_from_labels(filt.entity_labels[s]):
            mentions.append(type(m)(m.start + lo, m.end + lo, m.kind))
    events = detect_events(doc, filt.retained, event_model)
    return doc.evolve(entity_mentions=tuple(mentions), events=tuple(events)), filt


# checkpoint

def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _entry_body(entry: dict) -> str:
    body = {k: v for k, v in entry.items() if k != "digest"}
    return json.dumps(body, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class Checkpoint:
    """Append-only JSON-lines log: a header, then one entry per finished
    document. A torn final line (crash mid-write) is dropped on open; any
    other damage means the log cannot be trusted and must be rebuilt."""

    def __init__(self, path, header: dict):
        self.path = Path(path)
        self.header = header
        self.entries: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._open()

    def _open(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists() or self.path.stat().st_size == 0:
            self._write_line({"header": self.header}, fresh=True)
            return
        raw = self.path.read_bytes()
        lines = raw.split(b"\n")
        torn = lines[-1] != b""
        complete, tail = lines[:-1], lines[-1]
        if torn:
            log.warning("dropping torn last checkpoint line (%d bytes)", len(tail))
            with self.path.open("r+b") as fh:
                fh.truncate(len(raw) - len(tail))
        if not complete:
            self._write_line({"header": self.header}, fresh=True)
            return
        try:
            first = json.loads(complete[0])
        except ValueError as exc:
            raise RebuildRequiredError(f"REBUILD_REQUIRED: unreadable checkpoint header in {self.path}") from exc
        if first.get("header") != self.header:
            raise RebuildRequiredError(
                f"REBUILD_REQUIRED: checkpoint {self.path} was written for a different manifest, "
                "splitter or model set")
        for n, line in enumerate(complete[1:], 2):
            try:
                entry = json.loads(line)
            except ValueError as exc:
                raise RebuildRequiredError(f"REBUILD_REQUIRED: corrupt checkpoint line {n} in {self.path}") from exc
            if entry.get("digest") != _digest(_entry_body(entry)):
                raise RebuildRequiredError(f"REBUILD_REQUIRED: digest mismatch at checkpoint line {n} in {self.path}")
            self.entries[entry["id"]] = entry

    def _write_line(self, obj, fresh=False):
        line = json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"
        with self.path.open("w" if fresh else "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def append(self, entry: dict):
        entry = dict(entry)
        entry["digest"] = _digest(_entry_body(entry))
        with self._lock:
            self._write_line(entry)
            self.entries[entry["id"]] = entry


# orchestration

@dataclass
class PipelineModels:
    entity: object
    event: object

    @property
    def reentrant(self) -> bool:
        return bool(getattr(self.entity, "reentrant", False) and getattr(self.event, "reentrant", False))

    def versions(self) -> dict:
        def desc(m):
            d = m.describe() if hasattr(m, "describe") else {"name": type(m).__name__}
            return {k: d[k] for k in ("name", "version") if k in d}

        return {"entity": desc(self.entity), "event": desc(self.event)}


@dataclass
class PipelineRun:
    input_manifest: list[str]
    stage_counts: dict
    outputs: Path | None
    cursor: int
    report: dict
    complete: bool

    @property
    def quarantined(self) -> list[dict]:
        return self.report.get("quarantine", [])


def _process(rec: ManifestRecord, models: PipelineModels) -> dict:
    try:
        text = Path(rec.text_path).read_text("utf-8")
        doc = document_from_text(rec.id, text, rec.title, rec.group, rec.pretokenized)
        annotated, filt = annotate_document(doc, models.entity, models.event)
        return {"id": rec.id, "status": "ok", "doc": document_to_record(annotated),
                "sentences_before": filt.n_sentences, "sentences_after": len(filt.retained)}
    except (OSError, UnicodeDecodeError, BioEventError, ValueError) as exc:
        log.warning("quarantined %s: %s", rec.id, exc)
        return {"id": rec.id, "status": "quarantined", "error": f"{type(exc).__name__}: {exc}"}


def _manifest_digest(records) -> str:
    payload = json.dumps([[r.id, r.title, r.text_path, r.group.code if r.group else None, r.pretokenized]
                          for r in records], sort_keys=True)
    return _digest(payload)


def _mention_recall(docs, gold) -> dict:
    """Share of gold mention tokens predicted as mention tokens, per kind."""
    gold_by_id = {d.doc_id: d for d in gold}
    found, total = {}, {}
    for doc in docs:
        g = gold_by_id.get(doc.doc_id)
        if g is None:
            continue
        predicted = doc.mention_indices()
        for m in g.entity_mentions:
            k = m.kind.value
            idx = range(m.start, m.end + 1)
            total[k] = total.get(k, 0) + len(idx)
            found[k] = found.get(k, 0) + sum(i in predicted for i in idx)
    return {k: {"gold_tokens": total[k], "recall": found[k] / total[k] if total[k] else 0.0} for k in sorted(total)}


def build_report(records, entries, models: PipelineModels, gold=None) -> dict:
    groups: dict[str, dict] = {}
    before = after = events = mentions = 0
    quarantine = []
    docs = []
    for r in records:
        e = entries[r.id]
        g = groups.setdefault(r.group.code if r.group else "NONE",
                              {"documents": 0, "sentences_before": 0, "sentences_after": 0, "events": 0})
        if e["status"] != "ok":
            quarantine.append({"id": r.id, "error": e["error"]})
            continue
        n_ev = len(e["doc"]["events"])
        g["documents"] += 1
        g["sentences_before"] += e["sentences_before"]
        g["sentences_after"] += e["sentences_after"]
        g["events"] += n_ev
        before += e["sentences_before"]
        after += e["sentences_after"]
        events += n_ev
        mentions += len(e["doc"]["entity_mentions"])
        if gold is not None:
            docs.append(document_from_record(e["doc"]))
    report = {
        "splitter_version": SPLITTER_VERSION,
        "checkpoint_version": CHECKPOINT_VERSION,
        "models": models.versions(),
        "documents": {"manifest": len(records), "annotated": len(records) - len(quarantine),
                      "quarantined": len(quarantine)},
        "stage_counts": {"sentences_before": before, "sentences_after": after,
                         "retention": after / before if before else 0.0},
        "events": events,
        "mentions": mentions,
        "per_group": dict(sorted(groups.items())),
        "quarantine": quarantine,
    }
    if gold is not None:
        report["mention_recall_by_kind"] = _mention_recall(docs, gold)
    return report


def run_corpus_pipeline(manifest, models: PipelineModels, checkpoint_path, out_dir=None, *, workers: int = 1,
                        stop_after: int | None = None, gold=None) -> PipelineRun:
    """Annotate every manifest record not yet in the checkpoint.

    ``stop_after`` processes at most that many new documents and returns an
    incomplete run, which is how interruption is exercised in tests. Outputs
    (``annotated.jsonl`` in manifest order, ``run_report.json``) are written
    only once every record is done.
    """
    records = read_manifest(manifest) if not isinstance(manifest, list) else manifest
    header = {"version": CHECKPOINT_VERSION, "manifest": _manifest_digest(records),
              "splitter": SPLITTER_VERSION, "models": models.versions()}
    ckpt = Checkpoint(checkpoint_path, header)
    pending = [r for r in records if r.id not in ckpt.entries]
    if stop_after is not None:
        pending = pending[:stop_after]

    if workers > 1 and models.reentrant and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for entry in pool.map(lambda r: _process(r, models), pending):
                ckpt.append(entry)
    else:
        if workers > 1:
            log.info("models are not reentrant; running single-threaded")
        for r in pending:
            ckpt.append(_process(r, models))

    done = sum(r.id in ckpt.entries for r in records)
    complete = done == len(records)
    counts = {"sentences_before": sum(e.get("sentences_before", 0) for e in ckpt.entries.values()),
              "sentences_after": sum(e.get("sentences_after", 0) for e in ckpt.entries.values())}
    if not complete or out_dir is None:
        return PipelineRun([r.id for r in records], counts, None, done, {}, complete)

    report = build_report(records, ckpt.entries, models, gold)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "annotated.jsonl"
    tmp = out.with_suffix(".jsonl.tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for r in records:
            e = ckpt.entries[r.id]
            if e["status"] == "ok":
                fh.write(dumps_document(document_from_record(e["doc"])) + "\n")
    os.replace(tmp, out)
    (out_dir / "run_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return PipelineRun([r.id for r in records], report["stage_counts"], out, done, report, True)
