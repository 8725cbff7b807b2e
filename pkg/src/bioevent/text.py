"""Deterministic tokenization, sentence splitting and lemmatization for raw
biography text.

Group statistics depend on sentence counts, so the splitter is frozen:
any change to the rules below must bump ``SPLITTER_VERSION``.
"""

from __future__ import annotations

import re
from functools import lru_cache

import simplemma

from .core.model import AnnotatedDocument, Token

SPLITTER_VERSION = "rules-1"

_TOKEN_RE = re.compile(
    r"""
    \d+(?:[.,]\d+)*            # numbers, 1,486,320 / 3.5
    | [^\W\d_]+\.(?:[^\W\d_]+\.)+  # dotted abbreviations, U.S.
    | '(?:s|re|ve|ll|d|m|t)\b  # clitics split off the host word
    | n't\b
    | \w+(?:[-'’]\w+)*?(?=n't\b)  # host of a negative clitic
    | \w+(?:'[A-Z]\w*)+         # O'Brien
    | \w+(?:[-’]\w+)*          # words, Saro-Wiwa
    | \.\.\.
    | [^\w\s]                  # any single punctuation mark
    """,
    re.VERBOSE | re.UNICODE,
)

_ABBREVIATIONS = frozenset(
    "mr mrs ms dr prof st jr sr rev gen col capt lt sgt gov sen rep hon fr "
    "vs etc no vol ed eds pp ca c b d approx dept univ inc ltd co corp est".split()
)
_CLOSERS = frozenset("\"')]»’”")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def _ends_sentence(tokens: list[str], i: int) -> bool:
    tok = tokens[i]
    if tok not in {".", "!", "?", "..."}:
        return False
    if tok == "." and i > 0:
        prev = tokens[i - 1]
        if prev.lower() in _ABBREVIATIONS:
            return False
        # initials such as "J. R. R. Tolkien"
        if len(prev) == 1 and prev.isalpha() and prev.isupper():
            return False
    return True


def sentence_breaks(tokens: list[str]) -> list[list[int]]:
    """Group token positions of one paragraph into sentences.

    A sentence ends at ``.``, ``!``, ``?`` (plus trailing quotes/brackets)
    when the next token starts with an uppercase letter, a digit or an
    opening quote.
    """
    sentences = []
    current = []
    i = 0
    while i < len(tokens):
        current.append(i)
        if _ends_sentence(tokens, i):
            while i + 1 < len(tokens) and tokens[i + 1] in _CLOSERS:
                i += 1
                current.append(i)
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or nxt[0].isupper() or nxt[0].isdigit() or nxt[0] in "\"'“‘(":
                sentences.append(current)
                current = []
        i += 1
    if current:
        sentences.append(current)
    return sentences


def split_sentences(text: str) -> list[list[str]]:
    """Split ``text`` into sentences of tokens; blank lines always end one."""
    out = []
    for para in re.split(r"\n\s*\n", text):
        tokens = tokenize(para)
        out.extend([tokens[i] for i in sent] for sent in sentence_breaks(tokens))
    return out


def split_pretokenized(text: str) -> list[list[str]]:
    """One sentence per paragraph, tokens separated by whitespace."""
    return [para.split() for para in re.split(r"\n\s*\n", text) if para.strip()]


@lru_cache(maxsize=200_000)
def lemmatize(word: str) -> str:
    """Lowercased English lemma of a single token."""
    w = word.lower()
    if not any(ch.isalpha() for ch in w):
        return w
    return simplemma.lemmatize(w, lang="en").lower()


def document_from_text(doc_id: str, text: str, target_entity_name: str = "", group=None,
                       pretokenized: bool = False) -> AnnotatedDocument:
    tokens = []
    sentences = split_pretokenized(text) if pretokenized else split_sentences(text)
    for s, sent in enumerate(sentences):
        for tok in sent:
            tokens.append(Token(len(tokens), tok, s))
    return AnnotatedDocument(doc_id, target_entity_name, tuple(tokens), group=group)
