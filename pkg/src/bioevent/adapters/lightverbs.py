"""Moving events off copular and light verbs onto their predicative
complements ("was a writer": EVENT on ``writer``, LINK was -> writer)."""

from __future__ import annotations

import logging

from ..core.lexicon import LightVerbLexicon, default_lexicon
from ..core.model import AnnotatedDocument, ContModRelation, EventMention, LinkRelation

log = logging.getLogger(__name__)

COPULA_ROLES = ("ARG2", "ARGM-PRD", "ARGM-PRR")
LIGHT_ROLES = ("ARGM-PRR", "ARG1", "ARG2")
HEURISTIC_WINDOW = 5

_PHRASE_POS = ("DT", "PDT", "PRP$", "JJ", "NN", "CD", "POS", "HYPH", "RB")
_CLAUSE_BREAK = {",", ";", ":", ".", "!", "?", "(", ")", "--"}
_FUNCTION_WORDS = frozenset(
    "a an the this that these those his her its their my our your some any no every each "
    "there here then so very too also not in on at to of for by with from as into about "
    "and or but if when while because than who whom which what where how it he she they we i you".split()
)
_DETERMINERS = frozenset("a an the this that these those his her its their my our your some any every each".split())


def _head_from_pos(tokens):
    run = []
    for t in tokens:
        if t.pos and t.pos.startswith(_PHRASE_POS):
            run.append(t)
        elif run:
            break
        else:
            return None  # complement must start right away
    nouns = [t for t in run if t.pos.startswith("NN")]
    if nouns:
        return nouns[-1].index
    adjs = [t for t in run if t.pos.startswith("JJ")]
    return adjs[-1].index if adjs else None


def _head_without_pos(tokens):
    run = []
    for t in tokens:
        w = t.text.lower()
        if w in _DETERMINERS and not run:
            continue
        if w in _FUNCTION_WORDS or not t.text.isalpha():
            break
        run.append(t)
    return run[-1].index if run else None


def complement_head(doc: AnnotatedDocument, lo: int, hi: int):
    """Head token of the nominal/adjectival phrase starting at ``lo``
    (``hi`` inclusive), or None."""
    toks = list(doc.tokens[lo:hi + 1])
    if not toks:
        return None
    if all(t.pos for t in toks):
        return _head_from_pos(toks)
    return _head_without_pos(toks)


def _heuristic_span(doc, verb):
    sent = doc.tokens[verb].sentence_index
    lo = verb + 1
    hi = lo - 1
    while hi + 1 < len(doc.tokens) and hi + 1 <= verb + HEURISTIC_WINDOW:
        t = doc.tokens[hi + 1]
        if t.sentence_index != sent or t.text in _CLAUSE_BREAK:
            break
        if t.pos and (t.pos.startswith("VB") or t.pos == "MD"):
            break
        hi += 1
    return lo, hi


def resolve_complement(doc, verb, arguments=None, lexicon=None):
    lexicon = lexicon or default_lexicon()
    word = doc.tokens[verb]
    roles = COPULA_ROLES if (lexicon.is_copula(word.text) or lexicon.is_copula(word.lemma or "")) else LIGHT_ROLES
    sent = word.sentence_index
    if arguments and verb in arguments:
        by_role = {}
        for role, s, e in arguments[verb]:
            by_role.setdefault(role, (s, e))
        for role in roles:
            if role in by_role:
                s, e = by_role[role]
                head = complement_head(doc, s, e)
                if head is not None and doc.tokens[head].sentence_index == sent:
                    return head
    lo, hi = _heuristic_span(doc, verb)
    if hi < lo:
        return None
    return complement_head(doc, lo, hi)


def rewrite_light_verbs(doc: AnnotatedDocument, arguments=None, lexicon: LightVerbLexicon | None = None) -> AnnotatedDocument:
    """Move each light/copular verb event to its complement head.

    ``arguments`` maps a predicate token to ``(role, start, end)`` spans (gold
    PropBank arguments). Without a usable gold argument, a right-window
    heuristic looks for the nearest noun/adjective head within the clause.
    Verbs whose complement cannot be resolved keep their event and are logged.
    """
    lexicon = lexicon or default_lexicon()
    events = {e.token_index: e for e in doc.events}
    links = list(doc.links)
    cont_mods = list(doc.cont_mods)
    for verb in sorted(events):
        tok = doc.tokens[verb]
        if tok.text.lower() not in lexicon and (tok.lemma or "").lower() not in lexicon:
            continue
        head = resolve_complement(doc, verb, arguments, lexicon)
        if head is None or head in events:
            log.warning("unresolved light verb %r at token %d in %s", tok.text, verb, doc.doc_id)
            continue
        ev = events.pop(verb)
        events[head] = EventMention(head, ev.uncertainty)
        links.append(LinkRelation(verb, head))
        cont_mods = [
            ContModRelation(r.source_token, head, r.value) if r.target_token == verb else r for r in cont_mods
        ]
    return doc.evolve(
        events=tuple(sorted(events.values())),
        links=tuple(links),
        cont_mods=tuple(cont_mods),
    )
