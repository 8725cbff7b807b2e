"""Per-group event distributions and the JSD word shift between two groups.

The shift splits JSD(P1, P2) into per-type contributions

    delta_i = m_i log2(1/m_i) - p1_i log2(1/p1_i) / 2 - p2_i log2(1/p2_i) / 2

with M = (P1 + P2) / 2, so the contributions are non-negative and sum to
the divergence. A type sits on the SECOND side iff p2 > p1 (ties: FIRST).
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from pathlib import Path

from .errors import NotNormalizedError
from .metrics.divergence import jsd, token_lemma

TYPE_MODES = ("lemma", "surface")


class Side(str, Enum):
    FIRST = "FIRST"
    SECOND = "SECOND"


def _name(group) -> str:
    return getattr(group, "code", None) or str(group)


def event_type(tok, mode="lemma") -> str:
    """Lowercased lemma of the event token, or the lowercased surface form
    in ``surface`` mode."""
    if mode not in TYPE_MODES:
        raise ValueError(f"unknown type mode {mode!r}")
    return tok.text.lower() if mode == "surface" else token_lemma(tok, "lemmatizer")


@dataclass
class EventDistribution:
    group: object
    counts: Counter
    n_biographies: int
    type_mode: str = "lemma"

    @property
    def freq(self) -> dict[str, float]:
        """Average occurrences per biography of each event type."""
        return {t: c / self.n_biographies for t, c in sorted(self.counts.items()) if c > 0}

    @property
    def n_events(self) -> int:
        return sum(self.counts.values())

    @property
    def n_types(self) -> int:
        return sum(1 for c in self.counts.values() if c > 0)

    @property
    def avg_events(self) -> float:
        return self.n_events / self.n_biographies

    @property
    def name(self) -> str:
        return _name(self.group)

    def normalized(self) -> dict[str, float]:
        total = self.n_events
        if total <= 0:
            raise NotNormalizedError(f"NOT_NORMALIZABLE: group {self.name} has no events")
        return {t: c / total for t, c in sorted(self.counts.items()) if c > 0}

    def __add__(self, other: "EventDistribution") -> "EventDistribution":
        if self.type_mode != other.type_mode:
            raise ValueError("cannot merge distributions built with different type modes")
        return EventDistribution(self.group, self.counts + other.counts,
                                 self.n_biographies + other.n_biographies, self.type_mode)

    def summary_row(self) -> dict:
        return {"group": self.name, "events": self.n_events, "avg": round(self.avg_events, 2), "types": self.n_types}


def group_distribution(docs, group=None, mode="lemma") -> EventDistribution:
    """Event-type counts over one group's biographies. ``group`` defaults to
    the documents' common group label."""
    docs = list(docs)
    if not docs:
        raise ValueError(f"empty group {_name(group) if group is not None else ''}".strip())
    if group is None:
        labels = {d.group for d in docs}
        if len(labels) != 1:
            raise ValueError(f"documents carry several group labels: {sorted(map(str, labels))}")
        group = labels.pop()
    counts = Counter()
    for doc in docs:
        counts.update(event_type(doc.tokens[e.token_index], mode) for e in doc.events)
    return EventDistribution(group, counts, len(docs), mode)


def group_distributions(corpus, mode="lemma") -> dict[str, EventDistribution]:
    """One distribution per group code present in ``corpus``."""
    by_group = {}
    for doc in corpus:
        if doc.group is None:
            raise ValueError(f"document {doc.doc_id!r} has no group label")
        by_group.setdefault(doc.group.code, []).append(doc)
    return {code: group_distribution(docs, None, mode) for code, docs in sorted(by_group.items())}


@dataclass(frozen=True)
class Contribution:
    type: str
    p1: float
    p2: float
    delta: float
    side: Side


@dataclass
class ShiftResult:
    pair: tuple[str, str]
    total_jsd: float
    contributions: list[Contribution] = field(repr=False)
    type_mode: str = "lemma"

    def ranked(self) -> list[Contribution]:
        return sorted(self.contributions, key=lambda c: (-c.delta, c.type))

    def side_total(self, side) -> float:
        return math.fsum(c.delta for c in self.contributions if c.side == Side(side))


def _h(p) -> float:
    return -p * math.log2(p) if p > 0 else 0.0


def shift_from_probs(p1: dict, p2: dict, pair=("1", "2"), type_mode="lemma") -> ShiftResult:
    total = jsd(p1, p2)  # also validates both distributions
    contribs = []
    for t in sorted(set(p1) | set(p2)):
        a, b = float(p1.get(t, 0.0)), float(p2.get(t, 0.0))
        if a == 0 and b == 0:
            continue
        m = 0.5 * (a + b)
        # concavity makes this >= 0; clamp float rounding near a == b
        delta = max(0.0, _h(m) - 0.5 * _h(a) - 0.5 * _h(b))
        contribs.append(Contribution(t, a, b, delta, Side.SECOND if b > a else Side.FIRST))
    return ShiftResult(tuple(pair), total, contribs, type_mode)


def jsd_shift(d1: EventDistribution, d2: EventDistribution) -> ShiftResult:
    if d1.type_mode != d2.type_mode:
        raise ValueError("distributions use different event-type modes")
    return shift_from_probs(d1.normalized(), d2.normalized(), (d1.name, d2.name), d1.type_mode)


def top_k_shift(result: ShiftResult, k: int, side=None) -> list[Contribution]:
    """The ``k`` largest contributions, optionally restricted to one side;
    ties broken by type name."""
    if k < 1:
        raise ValueError("k must be >= 1")
    side = Side(side) if side is not None else None
    return [c for c in result.ranked() if side is None or c.side == side][:k]


@dataclass(frozen=True)
class OverlapStats:
    focal: str
    other: str
    shared: int
    focal_types: int
    other_types: int

    @property
    def ratio(self) -> float:
        """Share of the focal group's types also used by the other group."""
        return self.shared / self.focal_types

    @property
    def reverse_ratio(self) -> float:
        return self.shared / self.other_types

    def to_dict(self) -> dict:
        return {"focal": self.focal, "other": self.other, "shared": self.shared, "focal_types": self.focal_types,
                "other_types": self.other_types, "ratio": self.ratio, "reverse_ratio": self.reverse_ratio}


def overlap_stats(d1: EventDistribution, d2: EventDistribution) -> OverlapStats:
    s1 = {t for t, c in d1.counts.items() if c > 0}
    s2 = {t for t, c in d2.counts.items() if c > 0}
    if not s1 or not s2:
        raise ValueError("overlap needs two non-empty supports")
    return OverlapStats(d1.name, d2.name, len(s1 & s2), len(s1), len(s2))


def focal_pairs(names, focal=None) -> list[tuple[str, str]]:
    """Pairs of ``focal`` against every other group, or all pairs."""
    names = list(names)
    if focal is None:
        return list(combinations(names, 2))
    if focal not in names:
        raise ValueError(f"focal group {focal!r} not among {names}")
    return [(focal, n) for n in names if n != focal]


CSV_FIELDS = ["type", "p1", "p2", "delta", "side", "rank"]


def write_shift_csv(result: ShiftResult, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for rank, c in enumerate(result.ranked(), 1):
            w.writerow([c.type, repr(c.p1), repr(c.p2), repr(c.delta), c.side.value, rank])


def read_shift_csv(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in ("p1", "p2", "delta"):
            r[k] = float(r[k])
        r["rank"] = int(r["rank"])
    return rows


def plot_shift(result: ShiftResult, path, top_k=20) -> None:
    """Horizontal bars: FIRST-side types extend left, SECOND-side right."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    first = top_k_shift(result, top_k, Side.FIRST)
    second = top_k_shift(result, top_k, Side.SECOND)
    rows = sorted(first + second, key=lambda c: (c.delta, c.type))
    a, b = result.pair
    with matplotlib.rc_context({"svg.hashsalt": "bioevent", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, max(2.5, 0.28 * len(rows) + 1.5)))
        ax.barh(range(len(rows)), [-c.delta if c.side is Side.FIRST else c.delta for c in rows],
                color=["#4477aa" if c.side is Side.FIRST else "#ee6677" for c in rows])
        ax.set_yticks(range(len(rows)), [c.type for c in rows])
        ax.axvline(0, color="black", linewidth=0.8)
        ax.set_xlabel(f"per-type JSD contribution  (left: {a}, right: {b})")
        ax.set_title(f"{a} vs {b}: JSD = {result.total_jsd:.4f}")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={
            "Date": None, "Title": f"{a}__vs__{b}", "Description": f"total_jsd={result.total_jsd!r}"})
        plt.close(fig)


def emit_report(results, out_dir, distributions=None, top_k=20) -> dict:
    """Write per-pair CSV and SVG, ``summary.csv`` and ``manifest.json``;
    returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dists = {d.name: d for d in (distributions.values() if isinstance(distributions, dict) else distributions or [])}
    pairs = []
    for r in results:
        stem = f"{r.pair[0]}__vs__{r.pair[1]}"
        write_shift_csv(r, out / f"{stem}.csv")
        plot_shift(r, out / f"{stem}.svg", top_k)
        entry = {"pair": list(r.pair), "csv": f"{stem}.csv", "plot": f"{stem}.svg", "total_jsd": r.total_jsd,
                 "first_side_total": r.side_total(Side.FIRST), "second_side_total": r.side_total(Side.SECOND),
                 "n_types": len(r.contributions)}
        if r.pair[0] in dists and r.pair[1] in dists:
            entry["overlap"] = overlap_stats(dists[r.pair[0]], dists[r.pair[1]]).to_dict()
        pairs.append(entry)
    files = [p["csv"] for p in pairs] + [p["plot"] for p in pairs]
    if dists:
        with (out / "summary.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=["group", "events", "avg", "types"])
            w.writeheader()
            w.writerows(d.summary_row() for _, d in sorted(dists.items()))
        files.append("summary.csv")
    modes = sorted({r.type_mode for r in results} | {d.type_mode for d in dists.values()})
    manifest = {"type_mode": modes[0] if len(modes) == 1 else modes, "top_k": top_k, "pairs": pairs,
                "groups": {n: d.summary_row() for n, d in sorted(dists.items())}, "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
