"""Plain biography text from the Wikipedia API, cached per revision."""

from __future__ import annotations

import json
import os
import re
from pathlib import Path

import mwparserfromhell

from ..errors import NetworkError, NotFoundError
from .transport import Transport, atomic_write

API_ENDPOINT = os.environ.get("BIOEVENT_WIKIPEDIA_API", "https://en.wikipedia.org/w/api.php")

# trailing sections that are not part of the life story
STOP_SECTIONS = {"references", "notes", "external links", "see also", "further reading", "sources",
                 "citations", "footnotes", "bibliography", "works cited", "notes and references"}
DROP_TAGS = {"ref", "table", "gallery", "math", "timeline", "score", "syntaxhighlight", "references", "imagemap"}
MEDIA_PREFIXES = ("file:", "image:", "category:", "media:")
MARKUP = ("{{", "}}", "[[", "]]", "{|", "|}", "<ref", "</", "''", "==", "__")


def strip_wikitext(wikitext: str) -> str:
    """Article body as plain paragraphs, without templates, references,
    tables, media, categories, headings or trailing reference sections."""
    code = mwparserfromhell.parse(wikitext)
    for heading in code.filter_headings(recursive=False):
        if heading.title.strip_code().strip().lower() in STOP_SECTIONS:
            idx = code.index(heading)
            for node in list(code.nodes[idx:]):
                code.remove(node)
            break
    for node in code.filter_tags(recursive=True, matches=lambda n: str(n.tag).lower() in DROP_TAGS):
        _remove(code, node)
    for node in code.filter_wikilinks(recursive=True,
                                      matches=lambda n: str(n.title).strip().lower().startswith(MEDIA_PREFIXES)):
        _remove(code, node)
    for node in code.filter_templates(recursive=False):
        _remove(code, node)
    for node in code.filter_headings(recursive=False):
        _remove(code, node)
    text = code.strip_code(normalize=True, collapse=True)
    paragraphs = []
    for para in re.split(r"\n\s*\n", text):
        lines = [ln.strip() for ln in para.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith(("{|", "|", "!", "*", "#", ":", ";"))]
        para = re.sub(r"\s+", " ", " ".join(lines)).strip()
        # parentheses emptied or left with a leading separator by template removal
        para = re.sub(r"\(\s*[;,]?\s*\)", "", para)
        para = re.sub(r"\(\s*[;,]\s*", "(", para)
        para = re.sub(r"\s+([,.;:])", r"\1", para).strip()
        if para and not any(m in para for m in MARKUP):
            paragraphs.append(para)
    return "\n\n".join(paragraphs)


def _remove(code, node):
    try:
        code.remove(node)
    except ValueError:
        pass  # already gone with an enclosing node


def _cache_dir(cache_root, person_id):
    return Path(cache_root) / re.sub(r"[^\w.-]", "_", person_id)


def cached_biography(cache_root, person_id) -> tuple[int, str] | None:
    d = _cache_dir(cache_root, person_id)
    latest = d / "latest.json"
    if not latest.exists():
        return None
    rev = json.loads(latest.read_text("utf-8"))["revision"]
    path = d / f"{rev}.txt"
    return (rev, path.read_text("utf-8")) if path.exists() else None


def fetch_biography(person_id: str, title: str, transport: Transport, cache_root, *, endpoint=API_ENDPOINT,
                    refresh=False) -> tuple[int, str]:
    """``(revision_id, plain_text)`` of the article ``title``.

    Text is cached as ``<cache>/<person_id>/<revision>.txt`` with a
    ``latest.json`` pointer; a cached person is served without any request
    unless ``refresh`` is set.
    """
    if not refresh:
        hit = cached_biography(cache_root, person_id)
        if hit is not None:
            return hit
    if not title:
        raise NotFoundError(f"NOT_FOUND: {person_id} has no article title")
    params = {"action": "query", "prop": "revisions", "rvprop": "ids|content", "rvslots": "main",
              "titles": title, "redirects": "1", "format": "json", "formatversion": "2"}
    resp = transport.get(endpoint, params)
    if resp.status == 404:
        raise NotFoundError(f"NOT_FOUND: {title!r}")
    if resp.status != 200:
        raise NetworkError(f"article API returned HTTP {resp.status} for {title!r}")
    pages = resp.json().get("query", {}).get("pages", [])
    if not pages or pages[0].get("missing") or pages[0].get("invalid") or not pages[0].get("revisions"):
        raise NotFoundError(f"NOT_FOUND: no article {title!r} for {person_id}")
    rev = pages[0]["revisions"][0]
    revid = int(rev["revid"])
    wikitext = rev["slots"]["main"]["content"] if "slots" in rev else rev.get("content", "")
    text = strip_wikitext(wikitext)
    d = _cache_dir(cache_root, person_id)
    atomic_write(d / f"{revid}.txt", text)
    atomic_write(d / "latest.json", json.dumps({"revision": revid, "title": pages[0].get("title", title)}))
    return revid, text
