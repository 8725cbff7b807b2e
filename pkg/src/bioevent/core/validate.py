from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

from .lexicon import LightVerbLexicon, default_lexicon
from .model import AnnotatedDocument, Uncertainty


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    token_indices: tuple[int, ...] = ()
    severity: Severity = Severity.ERROR

    def __str__(self):
        where = f" at tokens {list(self.token_indices)}" if self.token_indices else ""
        return f"[{self.code}] {self.message}{where}"


@dataclass
class ValidationReport:
    doc_id: str
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.violations)

    def __len__(self):
        return len(self.violations)

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_document(doc: AnnotatedDocument, lexicon: LightVerbLexicon | None = None) -> ValidationReport:
    """Check every scheme invariant of ``doc`` and report all breaches.

    Structural breaches are errors. A LINK whose source verb is missing from
    the light/copular lexicon is only a warning: annotators are known to
    apply LINK to verbs outside the closed list.
    """
    lexicon = lexicon or default_lexicon()
    report = ValidationReport(doc.doc_id)
    add = report.violations.append
    n = len(doc.tokens)

    prev_sent = None
    for pos, tok in enumerate(doc.tokens):
        if tok.index != pos:
            add(Violation("TOKEN_INDEX", f"token at position {pos} has index {tok.index}", (pos,)))
        if tok.sentence_index < 0 or (prev_sent is not None and tok.sentence_index < prev_sent):
            add(Violation("SENTENCE_ORDER", "sentence_index decreases", (pos,)))
        prev_sent = tok.sentence_index

    def in_range(i):
        return 0 <= i < n

    covered = {}
    for m in doc.entity_mentions:
        span = (m.start, m.end)
        if not (in_range(m.start) and in_range(m.end)) or m.start > m.end:
            add(Violation("MENTION_RANGE", f"mention span {list(span)} out of range", span))
            continue
        if doc.tokens[m.start].sentence_index != doc.tokens[m.end].sentence_index:
            add(Violation("MENTION_CROSSES_SENTENCE", f"mention span {list(span)} crosses a sentence boundary", span))
        for i in range(m.start, m.end + 1):
            if i in covered:
                add(Violation("MENTION_OVERLAP", f"mentions {list(covered[i])} and {list(span)} overlap", (i,)))
                break
        for i in range(m.start, m.end + 1):
            covered.setdefault(i, span)

    events = {}
    for e in doc.events:
        if not in_range(e.token_index):
            add(Violation("EVENT_RANGE", f"event token {e.token_index} out of range", (e.token_index,)))
            continue
        if e.token_index in events:
            add(Violation("EVENT_DUPLICATE", "token carries two events", (e.token_index,)))
        events[e.token_index] = e

    for r in doc.links:
        pair = (r.source_token, r.target_token)
        bad = [i for i in pair if not in_range(i)]
        if bad:
            add(Violation("LINK_RANGE", f"LINK {list(pair)} references missing token(s) {bad}", pair))
            continue
        if r.source_token in events:
            add(Violation("LINK_SOURCE_IS_EVENT", "LINK source tagged as event", (r.source_token,)))
        if r.target_token not in events:
            add(Violation("LINK_TARGET_NOT_EVENT", "LINK target carries no event", (r.target_token,)))
        src = doc.tokens[r.source_token]
        if src.text.lower() not in lexicon and (src.lemma or "").lower() not in lexicon:
            add(Violation(
                "LINK_SOURCE_NOT_IN_LEXICON",
                f"LINK source {src.text!r} not in light/copular lexicon",
                (r.source_token,),
                Severity.WARNING,
            ))

    targeted = defaultdict(list)
    for r in doc.cont_mods:
        pair = (r.source_token, r.target_token)
        bad = [i for i in pair if not in_range(i)]
        if bad:
            add(Violation("CONT_MOD_RANGE", f"CONT_MOD {list(pair)} references missing token(s) {bad}", pair))
            continue
        if r.target_token not in events:
            add(Violation("CONT_MOD_TARGET_NOT_EVENT", "CONT_MOD target carries no event", (r.target_token,)))
            continue
        targeted[r.target_token].append(r)

    for idx, rels in sorted(targeted.items()):
        values = {r.value for r in rels}
        actual = events[idx].uncertainty
        # an event may be hedged twice (an intention that did not happen);
        # it must then carry one of the values
        if actual not in values:
            add(Violation(
                "CONT_MOD_VALUE_MISMATCH",
                f"CONT_MOD value {'/'.join(sorted(v.value for v in values))} "
                f"but event uncertainty {actual.value}",
                (idx,),
            ))

    for idx, e in sorted(events.items()):
        if e.uncertainty is not Uncertainty.FACTUAL and idx not in targeted:
            add(Violation("UNCERTAINTY_WITHOUT_CONT_MOD", f"event is {e.uncertainty.value} without a CONT_MOD", (idx,)))

    return report
