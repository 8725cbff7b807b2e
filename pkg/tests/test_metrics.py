import csv
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.spatial.distance import jensenshannon
from sklearn.metrics import cohen_kappa_score

from bioevent.core import AnnotatedDocument, Corpus, EntityMention, EventMention, Layer, LinkRelation, Token
from bioevent.errors import NotNormalizedError, TokenizationMismatchError, UndefinedKappaError
from bioevent.metrics import (
    Basis,
    cohen_kappa,
    corpus_profile,
    jsd,
    jsd_matrix,
    pairwise_iaa,
    write_profiles_csv,
)
from bioevent.synthetic import make_corpus


def doc_of(words, doc_id="d", events=(), mentions=(), links=(), sentences=None):
    sentences = sentences or [0] * len(words)
    tokens = tuple(Token(i, w, s) for i, (w, s) in enumerate(zip(words, sentences)))
    return AnnotatedDocument(doc_id, "x", tokens, tuple(mentions), tuple(EventMention(i) for i in events), tuple(links))


# kappa

def test_kappa_hand_example():
    a = [1, 1, 0, 0, 1, 0, 0, 0, 1, 0]
    b = [1, 0, 0, 0, 1, 0, 0, 1, 1, 0]
    assert cohen_kappa(a, b) == pytest.approx(0.28 / 0.48, abs=1e-12)


def test_kappa_identical_is_one():
    assert cohen_kappa(list("abcab"), list("abcab")) == 1.0


def test_kappa_constant_sequences_undefined():
    with pytest.raises(UndefinedKappaError):
        cohen_kappa(["O"] * 8, ["O"] * 8)


labels = st.lists(st.tuples(st.sampled_from("xyz"), st.sampled_from("xyz")), min_size=2, max_size=60)


@given(labels)
def test_kappa_matches_sklearn(pairs):
    a, b = zip(*pairs)
    assume(len(set(a) | set(b)) > 1)
    try:
        got = cohen_kappa(a, b)
    except UndefinedKappaError:
        return
    assert got == pytest.approx(cohen_kappa_score(a, b), abs=1e-9)
    assert got <= 1.0


@given(labels, st.permutations("xyz"))
def test_kappa_invariant_under_renaming(pairs, perm):
    a, b = zip(*pairs)
    ren = dict(zip("xyz", perm))
    try:
        k = cohen_kappa(a, b)
    except UndefinedKappaError:
        return
    assert cohen_kappa([ren[x] for x in a], [ren[x] for x in b]) == pytest.approx(k, abs=1e-12)


@given(labels)
def test_kappa_one_iff_identical(pairs):
    a, b = zip(*pairs)
    try:
        k = cohen_kappa(a, b)
    except UndefinedKappaError:
        return
    assert (k == pytest.approx(1.0, abs=1e-12)) == (a == b)


# jsd

def test_jsd_examples():
    assert jsd({"a": 1.0}, {"b": 1.0}) == 1.0
    assert jsd({"a": 0.75, "b": 0.25}, {"a": 0.25, "b": 0.75}) == pytest.approx(0.188722, abs=1e-6)
    assert jsd([0.2, 0.8], [0.2, 0.8]) == 0.0


def test_jsd_not_normalized():
    with pytest.raises(NotNormalizedError):
        jsd({"a": 0.5}, {"a": 1.0})
    jsd({"a": 0.5 + 5e-10, "b": 0.5}, {"a": 1.0})


dists = st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda xs: sum(xs) > 1e-6).map(
    lambda xs: [x / math.fsum(xs) for x in xs])


@st.composite
def dist_pairs(draw):
    p = draw(dists)
    q = draw(st.lists(st.floats(0, 1), min_size=len(p), max_size=len(p)).filter(lambda xs: sum(xs) > 1e-6))
    q = [x / math.fsum(q) for x in q]
    return p, q


@given(dist_pairs())
def test_jsd_properties(pq):
    p, q = pq
    assume(abs(math.fsum(p) - 1) < 1e-9 and abs(math.fsum(q) - 1) < 1e-9)
    d = jsd(p, q)
    assert d == jsd(q, p)
    assert 0.0 <= d <= 1.0
    assert jsd(p, p) == 0.0
    assert d == pytest.approx(jensenshannon(p, q, base=2) ** 2, abs=1e-9)
    overlap = sum(min(x, y) for x, y in zip(p, q))
    if overlap == 0:
        assert d == 1.0
    elif overlap > 1e-6:
        # an overlap below rounding scale is numerically disjoint
        assert d < 1.0


# matrix

def test_matrix_identical_and_disjoint():
    c = make_corpus(3, seed=0)
    twin = Corpus("twin", c.documents)
    m = jsd_matrix([c, twin])
    assert m.values[0, 1] == 0.0
    a = Corpus("a", (doc_of(["alpha", "beta"]),))
    b = Corpus("b", (doc_of(["gamma", "delta"]),))
    m = jsd_matrix([a, b], Basis.SURFACE_UNIGRAM)
    assert m["a", "b"] == 1.0 and m.basis is Basis.SURFACE_UNIGRAM


def test_matrix_symmetric_zero_diagonal_and_csv(tmp_path):
    cs = [make_corpus(3, seed=s, name=f"c{s}") for s in range(4)]
    m = jsd_matrix(cs)
    assert np.array_equal(m.values, m.values.T) and not np.diag(m.values).any()
    assert m.row_order("c0")[0] in {"c1", "c2", "c3"}
    path = tmp_path / "m.csv"
    m.to_csv(path)
    rows = list(csv.reader(path.open()))
    assert rows[0][1:] == [r[0] for r in rows[1:]] == ["c0", "c1", "c2", "c3"]
    assert all(r.distribution_basis is Basis.LEMMA_UNIGRAM for r in m.results())


def test_matrix_needs_two():
    with pytest.raises(ValueError):
        jsd_matrix([make_corpus(1)])


# profile

def test_profile_arithmetic():
    d = doc_of([f"w{i}" for i in range(10)], mentions=[EntityMention(2, 2)], events=[5])
    p = corpus_profile(Corpus("one", (d,)))
    assert p.mention_token_ratio == pytest.approx(0.1)
    assert p.mention_sentence_ratio == 1.0
    assert p.avg_doc_length_tokens == 10
    assert p.lemma_source == "lemmatizer"


@given(st.integers(2, 8), st.integers(0, 100), st.data())
def test_profile_additive_over_partitions(n, seed, data):
    c = make_corpus(n, seed=seed, n_sentences=5)
    cut = data.draw(st.integers(1, n - 1))
    whole = corpus_profile(c)
    parts = corpus_profile(Corpus("a", c.documents[:cut])) + corpus_profile(Corpus("b", c.documents[cut:]))
    for f in ("n_documents", "n_sentences", "n_tokens", "n_mention_tokens", "n_mention_sentences", "n_events"):
        assert getattr(parts, f) == getattr(whole, f)
    assert parts.event_lemma_counts == whole.event_lemma_counts
    assert 0 <= whole.mention_token_ratio <= 1 and 0 <= whole.mention_sentence_ratio <= 1
    assert sum(f for _, f in whole.top_event_lemmas) <= 1 + 1e-12


def test_profile_surface_flag_and_csv(tmp_path):
    d = doc_of(["He", "wrote", "books"], events=[1])
    p = corpus_profile(Corpus("s", (d,)), lemma_fallback="surface")
    assert p.surface_based and p.top_event_lemmas == [("wrote", 1.0)]
    assert corpus_profile(Corpus("s", (d,))).top_event_lemmas == [("write", 1.0)]
    write_profiles_csv([p], tmp_path / "p.csv")
    assert "mention_token_ratio" in (tmp_path / "p.csv").read_text()


# pairwise iaa

def test_iaa_identical_files_all_layers():
    c = make_corpus(3, seed=5)
    for layer in Layer:
        r = pairwise_iaa(c.documents, c.documents, layer)
        assert r.kappa == 1.0 and not r.undefined


def test_iaa_single_nominal_disagreement():
    words = [f"t{i}" for i in range(20)]
    a = doc_of(words, events=[2, 7, 12])
    b = doc_of(words, events=[2, 7, 12, 15])
    r = pairwise_iaa([a], [b], "EVENT", ("A0", "A2"))
    # p_o = 19/20, p_e = (3*4 + 17*16)/400 = 0.71
    assert r.kappa == pytest.approx(24 / 29, abs=1e-12)
    assert r.n_items == 20 and r.annotator_pair == ("A0", "A2")


def test_iaa_undefined_is_flagged():
    d = doc_of(["a", "b"])
    r = pairwise_iaa([d], [d], Layer.LINK)
    assert r.undefined and math.isnan(r.kappa)


def test_iaa_relation_layer_participation():
    words = ["Ann", "was", "a", "poet", "."]
    a = doc_of(words, events=[3], links=[LinkRelation(1, 3)])
    b = doc_of(words, events=[3])
    r = pairwise_iaa([a], [b], Layer.LINK)
    assert r.kappa == pytest.approx(cohen_kappa_score(["O", "SRC", "O", "TGT", "O"], ["O"] * 5))


def test_iaa_tokenization_mismatch():
    a = doc_of(["a", "b", "c"])
    b = doc_of(["a", "x", "c"])
    with pytest.raises(TokenizationMismatchError) as exc:
        pairwise_iaa([a], [b], "EVENT")
    assert exc.value.index == 1
