"""Writer metadata and biographies from Wikidata and Wikipedia."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..errors import NotFoundError
from .groups import GENDER_MAP, GroupingConfig, IdList, Partition, classify_group, partition_records
from .transport import HttpTransport, RecordingTransport, ReplayTransport, Response, Transport, request_key
from .wikidata import PersonRecord, build_query, fetch_writers, harvest_writers, parse_bindings, read_records
from .wikipedia import cached_biography, fetch_biography, strip_wikitext

log = logging.getLogger(__name__)


def build_manifest(partition: Partition, transport: Transport, cache_root, out_dir, config: GroupingConfig,
                   endpoint=None) -> dict:
    """Fetch the article of every grouped writer and write a pipeline
    manifest plus ``ingest_report.json``; returns the report."""
    from ..pipeline import ManifestRecord, write_manifest
    from ..core.model import GroupLabel

    out_dir = Path(out_dir)
    texts = out_dir / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    records, missing = [], []
    kw = {"endpoint": endpoint} if endpoint else {}
    for code in sorted(partition.groups):
        for rec in sorted(partition.groups[code], key=lambda r: r.person_id):
            try:
                revid, text = fetch_biography(rec.person_id, rec.article_title, transport, cache_root, **kw)
            except NotFoundError as exc:
                missing.append({"person_id": rec.person_id, "reason": str(exc)})
                continue
            path = texts / f"{rec.person_id}.txt"
            path.write_text(text + "\n", encoding="utf-8")
            records.append(ManifestRecord(rec.person_id, rec.name or rec.article_title or rec.person_id,
                                          str(path), GroupLabel.from_code(code)))
    write_manifest(records, out_dir / "manifest.jsonl")
    report = {"partition": partition.summary(), "reconciles": partition.reconciles(),
              "lists": config.versions(), "articles": {"fetched": len(records), "missing": missing}}
    (out_dir / "ingest_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return report


__all__ = [
    "GENDER_MAP", "GroupingConfig", "HttpTransport", "IdList", "Partition", "PersonRecord", "RecordingTransport",
    "ReplayTransport", "Response", "Transport", "build_manifest", "build_query", "cached_biography",
    "classify_group", "fetch_biography", "fetch_writers", "harvest_writers", "parse_bindings",
    "partition_records", "read_records", "request_key", "strip_wikitext",
]
