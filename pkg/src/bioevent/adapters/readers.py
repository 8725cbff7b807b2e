"""Readers for the external corpus formats.

Each ``read_*_sources`` function returns :class:`SourceDocument` objects that
keep what the harmonization steps need (entity chains with types, verbal
predicates with their argument spans). The ``read_*`` variants plug into
``core.load_corpus`` and return documents with the default adaptation:
events kept, entity layer taken from the most frequent PERSON chain when one
exists.

Formats (see ``tests/fixtures`` for a small sample of each):

* ``ontonotes`` -- CoNLL-2012 columns: doc, part, index, word, POS, parse
  bit, predicate lemma, frameset, sense, speaker, named entity, one argument
  column per predicate, coreference.
* ``gum`` -- CoNLL-U with CorefUD ``Entity=`` brackets in MISC, e.g.
  ``Entity=(e1-person-1`` ... ``Entity=e1)``.
* ``timeml`` -- inline XML, ``<EVENT eid=...>word</EVENT>`` inside running
  text (TimeBank, NewsReader/MEANTIME exports).
* ``litbank`` -- one sentence per line: ``doc_id<TAB>space-separated
  tokens<TAB>comma-separated event token offsets``.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..core.model import AnnotatedDocument, EventMention, Provenance, Token
from ..errors import CorpusParseError, NoPersonEntityError
from ..text import lemmatize, sentence_breaks, tokenize


@dataclass
class SourceDocument:
    doc_id: str
    tokens: tuple[Token, ...]
    events: tuple[int, ...] = ()
    chains: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    chain_types: dict[str, str] = field(default_factory=dict)
    arguments: dict[int, list[tuple[str, int, int]]] = field(default_factory=dict)
    provenance: Provenance = Provenance.SYNTHETIC

    def to_document(self, mentions=()) -> AnnotatedDocument:
        return AnnotatedDocument(
            self.doc_id, "", self.tokens, tuple(mentions),
            tuple(EventMention(i) for i in sorted(set(self.events))),
        )


def _bracket_spans(cells, keep_label=True):
    """Spans from CoNLL bracket cells such as ``(PERSON*``, ``*``, ``*)``."""
    spans = []
    stack = []
    for i, cell in enumerate(cells):
        for label in re.findall(r"\(([^()*]+)", cell):
            stack.append((label, i))
        for _ in range(cell.count(")")):
            if not stack:
                raise ValueError(f"unbalanced bracket at token {i}")
            label, start = stack.pop()
            spans.append((label if keep_label else None, start, i))
    if stack:
        raise ValueError("unclosed bracket")
    return spans


def _coref_spans(cells):
    chains: dict[str, list] = {}
    open_: dict[str, list[int]] = {}
    for i, cell in enumerate(cells):
        if cell in ("-", "_", ""):
            continue
        for part in cell.split("|"):
            m = re.fullmatch(r"(\()?(\d+)(\))?", part)
            if not m:
                raise ValueError(f"bad coreference cell {cell!r}")
            cid = m.group(2)
            if m.group(1) and m.group(3):
                chains.setdefault(cid, []).append((i, i))
            elif m.group(1):
                open_.setdefault(cid, []).append(i)
            else:
                if not open_.get(cid):
                    raise ValueError(f"chain {cid} closed before opening")
                chains.setdefault(cid, []).append((open_[cid].pop(), i))
    return chains


def read_ontonotes_sources(path) -> list[SourceDocument]:
    path = Path(path)
    docs = []
    state = None

    def flush_sentence(rows, lineno):
        if not rows:
            return
        try:
            _add_conll_sentence(state, rows)
        except (ValueError, IndexError) as exc:
            raise CorpusParseError(path, lineno, str(exc)) from exc

    rows = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if line.startswith("#begin document"):
                m = re.match(r"#begin document \(?([^);]+)\)?;?\s*part\s*(\d+)", line)
                if not m:
                    raise CorpusParseError(path, lineno, "malformed #begin document line")
                state = {"doc_id": f"{m.group(1)}_{m.group(2)}", "tokens": [], "events": [], "ne": [],
                         "chains": {}, "arguments": {}, "sent": 0}
                continue
            if line.startswith("#end document"):
                flush_sentence(rows, lineno)
                rows = []
                if state is None:
                    raise CorpusParseError(path, lineno, "#end document without #begin")
                docs.append(_finish_ontonotes(state))
                state = None
                continue
            if not line.strip():
                flush_sentence(rows, lineno)
                rows = []
                continue
            if state is None:
                raise CorpusParseError(path, lineno, "token line outside a document")
            cols = line.split()
            if len(cols) < 12:
                raise CorpusParseError(path, lineno, f"expected at least 12 columns, got {len(cols)}")
            rows.append(cols)
    if state is not None:
        raise CorpusParseError(path, lineno, "missing #end document")
    return docs


def _add_conll_sentence(state, rows):
    base = len(state["tokens"])
    sent = state["sent"]
    preds = []
    for k, cols in enumerate(rows):
        word, pos, pred_lemma, frameset = cols[3], cols[4], cols[6], cols[7]
        lemma = pred_lemma if pred_lemma != "-" else lemmatize(word)
        state["tokens"].append(Token(base + k, word, sent, lemma, pos))
        if frameset != "-":
            preds.append(base + k)
    state["events"].extend(preds)

    for label, s, e in _bracket_spans([c[10] for c in rows]):
        state["ne"].append((label, base + s, base + e))

    n_arg_cols = len(rows[0]) - 12
    if n_arg_cols != len(preds):
        raise ValueError(f"{len(preds)} predicates but {n_arg_cols} argument columns")
    for j, pred in enumerate(preds):
        spans = _bracket_spans([c[11 + j] for c in rows])
        state["arguments"][pred] = [(label, base + s, base + e) for label, s, e in spans if label != "V"]

    for cid, spans in _coref_spans([c[-1] for c in rows]).items():
        state["chains"].setdefault(cid, []).extend((base + s, base + e) for s, e in spans)
    state["sent"] += 1


def _finish_ontonotes(state) -> SourceDocument:
    persons = [(s, e) for label, s, e in state["ne"] if label == "PERSON"]
    types = {}
    for cid, mentions in state["chains"].items():
        is_person = any(ms <= ps and pe <= me for ms, me in mentions for ps, pe in persons)
        types[cid] = "person" if is_person else "other"
    return SourceDocument(
        state["doc_id"], tuple(state["tokens"]), tuple(state["events"]),
        {k: sorted(v) for k, v in state["chains"].items()}, types, state["arguments"], Provenance.ONTONOTES,
    )


_ENTITY_RE = re.compile(r"\(([^()\-]+)(-[^()]*)?(\))?|([^()]+)\)")


def read_gum_sources(path) -> list[SourceDocument]:
    path = Path(path)
    docs = []
    cur = None
    open_: dict[str, list[int]] = {}
    sent_rows = []
    sent_idx = 0

    def finish():
        if cur is not None:
            if any(open_.values()):
                raise CorpusParseError(path, lineno, f"unclosed entity in {cur.doc_id}")
            docs.append(cur)

    def flush():
        nonlocal sent_rows, sent_idx
        if sent_rows:
            cur_sent = sent_idx
            for tid, form, lemma, xpos, misc, ln in sent_rows:
                idx = len(cur.tokens)
                cur.tokens += (Token(idx, form, cur_sent, lemma.lower() if lemma != "_" else lemmatize(form), xpos),)
                for item in misc.split("|"):
                    if not item.startswith("Entity="):
                        continue
                    for m in _ENTITY_RE.finditer(item[len("Entity="):]):
                        if m.group(1):
                            eid = m.group(1)
                            etype = (m.group(2) or "-").split("-")[1] if m.group(2) else ""
                            if etype:
                                cur.chain_types.setdefault(eid, etype)
                            if m.group(3):
                                cur.chains.setdefault(eid, []).append((idx, idx))
                            else:
                                open_.setdefault(eid, []).append(idx)
                        else:
                            eid = m.group(4)
                            if not open_.get(eid):
                                raise CorpusParseError(path, ln, f"entity {eid} closed before opening")
                            cur.chains.setdefault(eid, []).append((open_[eid].pop(), idx))
            sent_idx += 1
        sent_rows = []

    lineno = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if line.startswith("# newdoc"):
                flush()
                finish()
                m = re.search(r"id\s*=\s*(\S+)", line)
                cur = SourceDocument(m.group(1) if m else f"{path.stem}-{len(docs)}", (), provenance=Provenance.GUM)
                sent_idx = 0
                open_.clear()
                continue
            if line.startswith("#"):
                continue
            if not line.strip():
                if cur is not None:
                    flush()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise CorpusParseError(path, lineno, f"expected 10 tab-separated columns, got {len(cols)}")
            if "-" in cols[0] or "." in cols[0]:
                continue  # multiword token ranges and empty nodes
            if cur is None:
                cur = SourceDocument(path.stem, (), provenance=Provenance.GUM)
            sent_rows.append((cols[0], cols[1], cols[2], cols[4] if cols[4] != "_" else cols[3], cols[9], lineno))
    flush()
    finish()
    for d in docs:
        d.chains = {k: sorted(v) for k, v in d.chains.items()}
    return docs


def read_timeml_sources(path, provenance=Provenance.TIMEBANK) -> list[SourceDocument]:
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise CorpusParseError(path, exc.position[0], f"XML error: {exc}") from exc
    text_root = root.find(".//TEXT")
    if text_root is None:
        text_root = root
    docid = root.findtext(".//DOCID")
    doc_id = docid.strip() if docid and docid.strip() else path.stem

    pieces = []  # (text, is_event)

    def walk(elem, in_event):
        here = in_event or elem.tag == "EVENT"
        if elem.text:
            pieces.append((elem.text, here))
        for child in elem:
            if child.tag in ("MAKEINSTANCE", "TLINK", "SLINK", "ALINK", "DOCID", "DCT"):
                if child.tail:
                    pieces.append((child.tail, in_event))
                continue
            walk(child, here)
            if child.tail:
                pieces.append((child.tail, in_event))

    walk(text_root, False)

    words, event_positions = [], []
    # paragraphs (blank lines) break sentences, as in raw text
    paragraphs = [[]]
    for text, is_event in pieces:
        chunks = re.split(r"(\n\s*\n)", text)
        for chunk in chunks:
            if re.fullmatch(r"\n\s*\n", chunk):
                paragraphs.append([])
                continue
            toks = tokenize(chunk)
            if is_event and toks:
                event_positions.append(len(words) + len(toks) - 1)  # head = last token
            for t in toks:
                paragraphs[-1].append(len(words))
                words.append(t)

    sent_of = {}
    s = 0
    for para in paragraphs:
        if not para:
            continue
        para_words = [words[i] for i in para]
        for sent in sentence_breaks(para_words):
            for j in sent:
                sent_of[para[j]] = s
            s += 1
    tokens = tuple(Token(i, w, sent_of[i], lemmatize(w)) for i, w in enumerate(words))
    return [SourceDocument(doc_id, tokens, tuple(event_positions), provenance=provenance)]


def read_litbank_sources(path) -> list[SourceDocument]:
    path = Path(path)
    order = []
    by_doc: dict[str, dict] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3):
                raise CorpusParseError(path, lineno, f"expected 2 or 3 tab-separated columns, got {len(cols)}")
            doc_id, sent = cols[0], cols[1].split()
            offsets = cols[2].strip() if len(cols) == 3 else ""
            if doc_id not in by_doc:
                by_doc[doc_id] = {"tokens": [], "events": [], "sent": 0}
                order.append(doc_id)
            d = by_doc[doc_id]
            base = len(d["tokens"])
            for k, w in enumerate(sent):
                d["tokens"].append(Token(base + k, w, d["sent"], lemmatize(w)))
            if offsets:
                try:
                    idxs = [int(x) for x in offsets.split(",")]
                except ValueError as exc:
                    raise CorpusParseError(path, lineno, f"bad event offsets {offsets!r}") from exc
                for i in idxs:
                    if not 0 <= i < len(sent):
                        raise CorpusParseError(path, lineno, f"event offset {i} outside sentence of {len(sent)} tokens")
                    d["events"].append(base + i)
            d["sent"] += 1
    return [
        SourceDocument(k, tuple(by_doc[k]["tokens"]), tuple(by_doc[k]["events"]), provenance=Provenance.LITBANK)
        for k in order
    ]


SOURCE_READERS = {
    "ontonotes": read_ontonotes_sources,
    "gum": read_gum_sources,
    "timeml": read_timeml_sources,
    "newsreader": lambda p: read_timeml_sources(p, Provenance.NEWSREADER),
    "litbank": read_litbank_sources,
}


def _default_adapt(sources):
    from .harmonize import harmonize_person_entities

    out = []
    for src in sources:
        try:
            out.append(harmonize_person_entities(src))
        except NoPersonEntityError:
            out.append(src.to_document())
    return out


def read_ontonotes(path):
    return _default_adapt(read_ontonotes_sources(path))


def read_gum(path):
    return _default_adapt(read_gum_sources(path))


def read_timeml(path):
    return _default_adapt(read_timeml_sources(path))


def read_newsreader(path):
    return _default_adapt(read_timeml_sources(path, Provenance.NEWSREADER))


def read_litbank(path):
    return _default_adapt(read_litbank_sources(path))
