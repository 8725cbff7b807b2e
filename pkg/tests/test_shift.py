import csv
import math
import re
from collections import Counter

import pytest
from hypothesis import given, strategies as st
from scipy.spatial.distance import jensenshannon

from bioevent.core.model import AnnotatedDocument, EventMention, GroupLabel, Token
from bioevent.errors import NotNormalizedError
from bioevent.metrics import jsd
from bioevent.shift import (
    EventDistribution, Side, emit_report, focal_pairs, group_distribution, group_distributions, jsd_shift,
    overlap_stats, read_shift_csv, shift_from_probs, top_k_shift,
)
from bioevent.synthetic import event_documents

TW, TM = GroupLabel.from_code("TW"), GroupLabel.from_code("TM")


def dist(counts, group="TW", n=1, mode="lemma"):
    return EventDistribution(GroupLabel.from_code(group), Counter(counts), n, mode)


def bio(words, events, group=TW):
    toks = [Token(i, w, 0) for i, w in enumerate(words)]
    return AnnotatedDocument("d", "X", toks, events=[EventMention(i) for i in events], group=group)


def test_group_distribution_lemmatizes():
    d = group_distribution([bio(["She", "wrote", ",", "wrote", "and", "moved", "."], [1, 3, 5])])
    assert d.freq == {"write": 2.0, "move": 1.0}
    assert d.avg_events == 3 and d.n_types == 2 and d.n_events == 3
    s = group_distribution([bio(["She", "wrote", ",", "wrote", "and", "moved", "."], [1, 3, 5])], mode="surface")
    assert s.freq == {"wrote": 2.0, "moved": 1.0}


def test_group_distribution_zero_events_and_empty():
    d = group_distribution([bio(["She", "slept", "."], [])])
    assert d.freq == {} and d.n_events == 0
    with pytest.raises(NotNormalizedError):
        jsd_shift(d, d)
    with pytest.raises(ValueError):
        group_distribution([])


def test_swapped_distribution_example():
    r = shift_from_probs({"a": 0.75, "b": 0.25}, {"a": 0.25, "b": 0.75})
    by = {c.type: c for c in r.contributions}
    assert by["a"].delta == pytest.approx(0.094361, abs=1e-6)
    assert by["b"].delta == pytest.approx(0.094361, abs=1e-6)
    assert r.total_jsd == pytest.approx(0.188722, abs=1e-6)
    assert (by["a"].side, by["b"].side) == (Side.FIRST, Side.SECOND)


def test_disjoint_and_identical():
    r = shift_from_probs({"a": 1.0}, {"b": 1.0})
    assert [c.delta for c in r.contributions] == [0.5, 0.5] and r.total_jsd == 1.0
    same = jsd_shift(dist({"a": 2, "b": 1}), dist({"a": 2, "b": 1}, "TM"))
    assert same.total_jsd == 0 and all(c.delta == 0 and c.side is Side.FIRST for c in same.contributions)


def test_top_k_brute_force():
    p1 = {"a": 0.4, "b": 0.3, "c": 0.1, "d": 0.1, "e": 0.1}
    p2 = {"a": 0.1, "b": 0.3, "c": 0.4, "d": 0.05, "e": 0.15}
    r = shift_from_probs(p1, p2)

    def delta(t):
        a, b = p1[t], p2[t]
        m = (a + b) / 2
        return -m * math.log2(m) + 0.5 * a * math.log2(a) + 0.5 * b * math.log2(b)

    expected = sorted(p1, key=lambda t: (-delta(t), t))
    assert [c.type for c in top_k_shift(r, 5)] == expected
    assert [c.type for c in top_k_shift(r, 2, Side.SECOND)] == ["c", "e"]
    assert [c.type for c in top_k_shift(r, 99, Side.FIRST)] == ["a", "d", "b"]  # b is a tie, so FIRST
    with pytest.raises(ValueError):
        top_k_shift(r, 0)


def test_overlap():
    d1 = dist({"a": 1, "b": 1, "c": 1, "d": 1})
    d2 = dist({"a": 1, "b": 1, "e": 1}, "TM")
    o = overlap_stats(d1, d2)
    assert o.ratio == 0.5 and o.reverse_ratio == pytest.approx(2 / 3)
    assert overlap_stats(d1, d1).ratio == 1.0
    with pytest.raises(ValueError):
        overlap_stats(d1, dist({}, "TM"))


def test_focal_pairs():
    assert focal_pairs(["TM", "TW", "WM", "WW"], "TW") == [("TW", "TM"), ("TW", "WM"), ("TW", "WW")]
    assert len(focal_pairs(["TM", "TW", "WM", "WW"])) == 6


def test_emit_report_two_groups(tmp_path):
    docs = event_documents(TW, {"marry": 0.5, "write": 0.5}, 6, 4, seed=1) + \
        event_documents(TM, {"elect": 0.5, "write": 0.5}, 6, 4, seed=2)
    dists = group_distributions(docs)
    r = jsd_shift(dists["TW"], dists["TM"])
    manifest = emit_report([r], tmp_path, dists, top_k=5)
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "TW__vs__TM.csv", "TW__vs__TM.svg", "manifest.json", "summary.csv"]
    rows = read_shift_csv(tmp_path / "TW__vs__TM.csv")
    assert list(rows[0]) == ["type", "p1", "p2", "delta", "side", "rank"]
    assert abs(math.fsum(x["delta"] for x in rows) - manifest["pairs"][0]["total_jsd"]) < 1e-9
    svg = (tmp_path / "TW__vs__TM.svg").read_text()
    plotted = float(re.search(r"total_jsd=([0-9.e-]+)", svg).group(1))
    assert abs(math.fsum(x["delta"] for x in rows) - plotted) < 1e-9
    summary = list(csv.DictReader((tmp_path / "summary.csv").open()))
    assert [s["group"] for s in summary] == ["TM", "TW"] and summary[0]["events"] == "24"
    assert manifest["pairs"][0]["overlap"]["ratio"] == pytest.approx(0.5)


def test_emit_report_is_deterministic(tmp_path):
    r = shift_from_probs({"a": 0.7, "b": 0.3}, {"a": 0.2, "b": 0.8}, ("TW", "WM"))
    emit_report([r], tmp_path / "1")
    emit_report([r], tmp_path / "2")
    for name in ("TW__vs__WM.svg", "TW__vs__WM.csv", "manifest.json"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()


probs = st.dictionaries(st.sampled_from("abcdefghij"), st.floats(0.0, 1.0), min_size=1).filter(
    lambda d: sum(d.values()) > 1e-6).map(lambda d: {k: v / math.fsum(d.values()) for k, v in d.items()})


@given(probs, probs)
def test_decomposition_sums_to_jsd(p, q):
    r = shift_from_probs(p, q)
    assert all(c.delta >= 0 for c in r.contributions)
    assert abs(math.fsum(c.delta for c in r.contributions) - jsd(p, q)) < 1e-9
    keys = sorted(set(p) | set(q))
    oracle = jensenshannon([p.get(k, 0) for k in keys], [q.get(k, 0) for k in keys], base=2) ** 2
    assert abs(r.total_jsd - oracle) < 1e-9


@given(probs, probs)
def test_swap_flips_sides(p, q):
    r, s = shift_from_probs(p, q), shift_from_probs(q, p)
    assert abs(r.total_jsd - s.total_jsd) < 1e-12
    sides = {c.type: c.side for c in s.contributions}
    for c in r.contributions:
        if c.p1 != c.p2:
            assert sides[c.type] != c.side


@given(st.lists(st.sampled_from(["write", "marry", "move", "elect"]), max_size=20),
       st.lists(st.sampled_from(["write", "marry", "move", "elect"]), max_size=20),
       st.integers(1, 5), st.integers(1, 5))
def test_distribution_additivity(e1, e2, n1, n2):
    a, b = dist(Counter(e1), n=n1), dist(Counter(e2), n=n2)
    merged = a + b
    for t in set(e1) | set(e2):
        expected = (a.freq.get(t, 0) * n1 + b.freq.get(t, 0) * n2) / (n1 + n2)
        assert merged.freq[t] == pytest.approx(expected)
    assert merged.n_events == len(e1) + len(e2)
