"""Writers and their metadata from the Wikidata SPARQL endpoint."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import MissingFieldError, SchemaChangeError
from .transport import Transport, atomic_write

log = logging.getLogger(__name__)

WDQS_ENDPOINT = os.environ.get("BIOEVENT_SPARQL_ENDPOINT", "https://query.wikidata.org/sparql")
WRITER = "Q36180"
ENTITY_PREFIX = "http://www.wikidata.org/entity/"
SEP = "|"

# one row per person; multi-valued properties are concatenated
QUERY_TEMPLATE = """\
SELECT ?person (SAMPLE(?name) AS ?label) (SAMPLE(?gender) AS ?genders) (MIN(?birth) AS ?born)
       (GROUP_CONCAT(DISTINCT ?country; separator="|") AS ?countries)
       (GROUP_CONCAT(DISTINCT ?ethnic; separator="|") AS ?ethnics)
       (GROUP_CONCAT(DISTINCT ?occupation; separator="|") AS ?occupations)
       (SAMPLE(?title) AS ?article)
WHERE {{
  ?person wdt:P106 wd:{occupation} ;
          wdt:P569 ?birth .
  FILTER(YEAR(?birth) >= {year_min})
  ?article_node schema:about ?person ;
                schema:isPartOf <https://en.wikipedia.org/> ;
                schema:name ?title .
  OPTIONAL {{ ?person rdfs:label ?name . FILTER(LANG(?name) = "en") }}
  OPTIONAL {{ ?person wdt:P21 ?gender . }}
  OPTIONAL {{ ?person wdt:P19/wdt:P17 ?country . }}
  OPTIONAL {{ ?person wdt:P172 ?ethnic . }}
  OPTIONAL {{ ?person wdt:P106 ?occupation . }}
}}
GROUP BY ?person
ORDER BY ?person
LIMIT {limit} OFFSET {offset}
"""

REQUIRED_VARS = ("person", "label", "genders", "born", "countries", "ethnics", "occupations", "article")


@dataclass(frozen=True)
class PersonRecord:
    person_id: str
    name: str
    gender: str | None
    year_of_birth: int | None
    country_of_birth: str | None
    ethnic_groups: tuple[str, ...] = ()
    occupations: tuple[str, ...] = ()
    article_title: str | None = None
    biography_text: str | None = None
    flags: tuple[str, ...] = ()

    @property
    def ethnic_group(self) -> str | None:
        return self.ethnic_groups[0] if self.ethnic_groups else None

    def require(self, *fields):
        for f in fields:
            if getattr(self, f) in (None, ""):
                raise MissingFieldError(f)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ethnic_groups"] = list(self.ethnic_groups)
        d["occupations"] = list(self.occupations)
        d["flags"] = list(self.flags)
        return d

    @classmethod
    def from_dict(cls, d) -> "PersonRecord":
        d = dict(d)
        for k in ("ethnic_groups", "occupations", "flags"):
            d[k] = tuple(d.get(k) or ())
        return cls(**d)


def _qid(uri: str | None) -> str | None:
    if not uri:
        return None
    return uri[len(ENTITY_PREFIX):] if uri.startswith(ENTITY_PREFIX) else uri


def _year(value: str | None) -> int | None:
    # xsd:dateTime, possibly negative ("-0500-01-01T00:00:00Z")
    if not value:
        return None
    neg = value.startswith("-")
    digits = value.lstrip("-+").split("-", 1)[0]
    return -int(digits) if neg else int(digits)


def _multi(binding, var) -> tuple[str, ...]:
    raw = binding.get(var, {}).get("value", "")
    return tuple(sorted({_qid(v) for v in raw.split(SEP) if v}))


def parse_bindings(payload: dict) -> list[PersonRecord]:
    """Turn a SPARQL JSON result into records; a result whose variables no
    longer match the query is a schema change, not missing data."""
    try:
        head = payload["head"]["vars"]
        rows = payload["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise SchemaChangeError(f"SPARQL response lacks head/results: {exc}") from exc
    missing = [v for v in REQUIRED_VARS if v not in head]
    if missing:
        raise SchemaChangeError(f"SPARQL response lacks variables {missing}; got {head}")
    out = []
    for b in rows:
        if "person" not in b:
            raise SchemaChangeError("SPARQL row without ?person")
        countries = _multi(b, "countries")
        rec = PersonRecord(
            person_id=_qid(b["person"]["value"]),
            name=b.get("label", {}).get("value", ""),
            gender=_qid(b.get("genders", {}).get("value")),
            year_of_birth=_year(b.get("born", {}).get("value")),
            country_of_birth=countries[0] if countries else None,
            ethnic_groups=_multi(b, "ethnics"),
            occupations=_multi(b, "occupations"),
            article_title=b.get("article", {}).get("value"),
        )
        flags = [f"MISSING_FIELD:{f}" for f in ("gender", "country_of_birth", "year_of_birth")
                 if getattr(rec, f) in (None, "")]
        if len(countries) > 1:
            flags.append("AMBIGUOUS_COUNTRY")
        out.append(PersonRecord(**{**asdict(rec), "ethnic_groups": rec.ethnic_groups,
                                   "occupations": rec.occupations, "flags": tuple(flags)}))
    return out


def build_query(limit: int, offset: int, year_min: int = 1808, occupation: str = WRITER) -> str:
    return QUERY_TEMPLATE.format(limit=int(limit), offset=int(offset), year_min=int(year_min), occupation=occupation)


def fetch_page(transport: Transport, offset, limit, year_min=1808, endpoint=WDQS_ENDPOINT) -> list[PersonRecord]:
    params = {"query": build_query(limit, offset, year_min), "format": "json"}
    resp = transport.get(endpoint, params, {"Accept": "application/sparql-results+json"})
    if resp.status != 200:
        from ..errors import NetworkError

        raise NetworkError(f"SPARQL endpoint returned HTTP {resp.status}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise SchemaChangeError(f"SPARQL endpoint returned non-JSON content: {resp.text[:200]!r}") from exc
    return parse_bindings(payload)


def fetch_writers(transport: Transport, config, *, page_size=5000, endpoint=WDQS_ENDPOINT, start_offset=0,
                  max_pages=None, on_page=None):
    """Yield writer records born in or after ``config.birth_year_min``.

    Pages of ``page_size`` rows are requested until a short page. After each
    page ``on_page(next_offset, page_rows)`` is called, which is how a cursor
    is saved.
    """
    offset, pages = start_offset, 0
    while max_pages is None or pages < max_pages:
        page = fetch_page(transport, offset, page_size, config.birth_year_min, endpoint)
        for rec in page:
            # the query filters already; this guards replayed or edited data
            if rec.year_of_birth is not None and rec.year_of_birth < config.birth_year_min:
                continue
            yield rec
        offset += len(page)
        pages += 1
        if on_page is not None:
            on_page(offset, len(page))
        if len(page) < page_size:
            return


@dataclass
class HarvestState:
    offset: int = 0
    done: bool = False
    query_digest: str = ""


def harvest_writers(transport, config, out_path, *, page_size=5000, endpoint=WDQS_ENDPOINT, max_pages=None):
    """Append records to ``out_path`` (JSON lines) with a resumable cursor
    in ``<out_path>.cursor``; rerunning after an interruption continues at
    the saved offset. Returns the number of records in the file."""
    out_path = Path(out_path)
    cursor = out_path.with_name(out_path.name + ".cursor")
    digest = hashlib.sha256(build_query(page_size, 0, config.birth_year_min).encode()).hexdigest()[:16]
    state = HarvestState(query_digest=digest)
    if cursor.exists():
        saved = HarvestState(**json.loads(cursor.read_text("utf-8")))
        if saved.query_digest == digest:
            state = saved
        else:
            log.warning("query changed since last harvest; starting over")
    if state.offset == 0 and not state.done:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text("", encoding="utf-8")
    if not state.done:
        buffer = []

        def flush(next_offset, rows):
            with out_path.open("a", encoding="utf-8") as fh:
                for r in buffer:
                    fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
            buffer.clear()
            state.offset = next_offset
            state.done = rows < page_size
            atomic_write(cursor, json.dumps(asdict(state), sort_keys=True))

        for rec in fetch_writers(transport, config, page_size=page_size, endpoint=endpoint,
                                 start_offset=state.offset, max_pages=max_pages, on_page=flush):
            buffer.append(rec)
    return read_records(out_path)


def read_records(path) -> list[PersonRecord]:
    out = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            out.append(PersonRecord.from_dict(json.loads(line)))
    return out
