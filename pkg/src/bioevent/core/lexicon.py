"""Configurable copular/light verb lexicon."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

DEFAULT_LEXICON_RESOURCE = "light_verbs.txt"


@dataclass(frozen=True)
class LightVerbLexicon:
    copulas: frozenset[str]
    light_verbs: frozenset[str]
    version: str = "unversioned"

    def __contains__(self, word: str) -> bool:
        w = word.lower()
        return w in self.copulas or w in self.light_verbs

    def is_copula(self, word: str) -> bool:
        return word.lower() in self.copulas

    @property
    def words(self) -> frozenset[str]:
        return self.copulas | self.light_verbs

    @classmethod
    def from_text(cls, text: str) -> "LightVerbLexicon":
        sections = {"copula": set(), "light": set()}
        current = "copula"
        version = "unversioned"
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("#"):
                if line[1:].strip().startswith("version:"):
                    version = line.split(":", 1)[1].strip()
                continue
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in sections:
                    raise ValueError(f"unknown lexicon section {line!r}")
                continue
            sections[current].add(line.lower())
        return cls(frozenset(sections["copula"]), frozenset(sections["light"]), version)

    @classmethod
    def from_words(cls, words, version="inline") -> "LightVerbLexicon":
        return cls(frozenset(w.lower() for w in words), frozenset(), version)

    @classmethod
    def load(cls, path=None) -> "LightVerbLexicon":
        if path is None:
            text = resources.files("bioevent.data").joinpath(DEFAULT_LEXICON_RESOURCE).read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        return cls.from_text(text)


_default = None


def default_lexicon() -> LightVerbLexicon:
    global _default
    if _default is None:
        _default = LightVerbLexicon.load()
    return _default
