import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bioevent.core import AnnotatedDocument, Corpus, EntityMention, EventMention, Token, read_jsonl_documents
from bioevent.errors import RebuildRequiredError
from bioevent.pipeline import (
    ManifestRecord,
    PipelineModels,
    detect_events,
    filter_sentences,
    manifest_from_corpus,
    read_manifest,
    run_corpus_pipeline,
    write_manifest,
)
from bioevent.synthetic import make_corpus
from bioevent.tagger import GoldReplayClassifier, MemorizingClassifier, TrainConfig
from bioevent.tagger.chunking import chunk_document


def oracle(corpus):
    return PipelineModels(GoldReplayClassifier(corpus, "ENTITY"), GoldReplayClassifier(corpus, "EVENT"))


def planted():
    # 10 sentences of 5 tokens; mentions in sentences 1, 4, 7; 7 events
    toks = tuple(Token(i, f"t{i}", i // 5) for i in range(50))
    mentions = tuple(EntityMention(s * 5, s * 5) for s in (1, 4, 7))
    events = tuple(EventMention(i) for i in (6, 8, 21, 22, 23, 36, 38))
    return AnnotatedDocument("p", "P", toks, mentions, events)


def test_planted_filter_and_events():
    doc = planted()
    gold = Corpus("g", (doc,))
    filt = filter_sentences(doc, GoldReplayClassifier(gold, "ENTITY"))
    assert filt.retained == [1, 4, 7] and filt.retention == pytest.approx(0.3)
    events = detect_events(doc, filt.retained, GoldReplayClassifier(gold, "EVENT"))
    assert [e.token_index for e in events] == [6, 8, 21, 22, 23, 36, 38]
    assert detect_events(doc, [], GoldReplayClassifier(gold, "EVENT")) == []


def test_oracle_marking_every_sentence_keeps_all():
    doc = make_corpus(1, seed=3)[0]
    marked = doc.evolve(entity_mentions=tuple(EntityMention(lo, lo) for _, lo, _ in doc.sentence_spans()))
    filt = filter_sentences(doc, GoldReplayClassifier(Corpus("g", (marked,)), "ENTITY"))
    assert filt.retained == list(range(doc.n_sentences))


def test_oracle_pipeline_reproduces_gold(tmp_path):
    gold = make_corpus(12, seed=5)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    run = run_corpus_pipeline(manifest, oracle(gold), tmp_path / "ck.jsonl", tmp_path / "out", gold=gold)
    out = read_jsonl_documents(run.outputs)
    assert [d.doc_id for d in out] == [d.doc_id for d in gold]
    for o, g in zip(out, gold):
        assert o.event_indices() == g.event_indices()
        assert {(m.start, m.end) for m in o.entity_mentions} == {(m.start, m.end) for m in g.entity_mentions}
    report = json.loads((tmp_path / "out" / "run_report.json").read_text())
    assert report["events"] == sum(len(d.events) for d in gold)
    assert report["splitter_version"] and report["models"]["event"]["name"] == "gold-replay"
    assert report["mention_recall_by_kind"]["INDIRECT"]["recall"] == 1.0
    sc = report["stage_counts"]
    assert sc["sentences_after"] <= sc["sentences_before"]


def _uninterrupted(tmp_path, gold, manifest):
    run_corpus_pipeline(manifest, oracle(gold), tmp_path / "a.ck", tmp_path / "a")
    return (tmp_path / "a" / "annotated.jsonl").read_bytes(), (tmp_path / "a" / "run_report.json").read_bytes()


def test_resume_is_byte_identical_and_skips_done(tmp_path):
    gold = make_corpus(15, seed=1)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    ref = _uninterrupted(tmp_path, gold, manifest)
    ck = tmp_path / "b.ck"
    first = run_corpus_pipeline(manifest, oracle(gold), ck, tmp_path / "b", stop_after=6)
    assert not first.complete and first.cursor == 6 and first.outputs is None
    # simulate a crash in the middle of the next append
    with ck.open("a") as fh:
        fh.write('{"id": "synthetic-0006", "status": "o')

    class Counting(GoldReplayClassifier):
        calls = []

        def predict(self, sequences, keys=None):
            self.calls.extend(k[0] for k in keys)
            return super().predict(sequences, keys)

    models = PipelineModels(Counting(gold, "ENTITY"), GoldReplayClassifier(gold, "EVENT"))
    run = run_corpus_pipeline(manifest, models, ck, tmp_path / "b")
    assert run.complete
    assert not {f"synthetic-{i:04d}" for i in range(6)} & set(Counting.calls)
    got = (tmp_path / "b" / "annotated.jsonl").read_bytes(), (tmp_path / "b" / "run_report.json").read_bytes()
    assert got == ref


def test_worker_pool_matches_single_thread(tmp_path):
    gold = make_corpus(10, seed=2)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    ref = _uninterrupted(tmp_path, gold, manifest)
    run_corpus_pipeline(manifest, oracle(gold), tmp_path / "c.ck", tmp_path / "c", workers=4)
    assert (tmp_path / "c" / "annotated.jsonl").read_bytes() == ref[0]


def test_corrupt_checkpoint_requires_rebuild(tmp_path):
    gold = make_corpus(4, seed=2)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    ck = tmp_path / "x.ck"
    run_corpus_pipeline(manifest, oracle(gold), ck, stop_after=3)
    lines = ck.read_text().splitlines(keepends=True)
    lines[2] = lines[2].replace('"status":"ok"', '"status":"ko"')
    ck.write_text("".join(lines))
    with pytest.raises(RebuildRequiredError):
        run_corpus_pipeline(manifest, oracle(gold), ck)


def test_checkpoint_from_other_models_requires_rebuild(tmp_path):
    gold = make_corpus(3, seed=2)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    ck = tmp_path / "x.ck"
    run_corpus_pipeline(manifest, oracle(gold), ck, stop_after=1)
    other = PipelineModels(MemorizingClassifier(), MemorizingClassifier())
    with pytest.raises(RebuildRequiredError):
        run_corpus_pipeline(manifest, other, ck)


def test_empty_manifest(tmp_path):
    (tmp_path / "m.jsonl").write_text("")
    run = run_corpus_pipeline(tmp_path / "m.jsonl", oracle(Corpus("e", ())), tmp_path / "ck", tmp_path / "out")
    assert run.complete and run.report["documents"]["manifest"] == 0 and run.report["events"] == 0


def test_bad_document_is_quarantined(tmp_path):
    gold = make_corpus(3, seed=2)
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    recs = read_manifest(manifest)
    recs.append(ManifestRecord("missing", "Nobody", str(tmp_path / "nope.txt")))
    write_manifest(recs, manifest)
    run = run_corpus_pipeline(manifest, oracle(gold), tmp_path / "ck", tmp_path / "out")
    assert [q["id"] for q in run.quarantined] == ["missing"]
    assert run.report["documents"]["annotated"] == 3


def test_per_group_counts(tmp_path):
    from bioevent.core.model import GroupLabel

    docs = [d.evolve(group=GroupLabel.from_code(code))
            for d, code in zip(make_corpus(4, seed=0), ["TW", "TW", "WM", "TM"])]
    gold = Corpus("g", docs)
    run = run_corpus_pipeline(manifest_from_corpus(gold, tmp_path / "in"), oracle(gold), tmp_path / "ck", tmp_path / "o")
    pg = run.report["per_group"]
    assert pg["TW"]["documents"] == 2 and set(pg) == {"TM", "TW", "WM"}
    assert sum(g["events"] for g in pg.values()) == run.report["events"]


@given(st.integers(0, 300), st.integers(1, 5))
def test_filtering_is_monotone_under_added_sentences(seed, extra):
    # a context-free model: adding sentences cannot change verdicts on old ones
    base = make_corpus(1, seed=seed, n_sentences=4)[0]
    clf = MemorizingClassifier()
    train = make_corpus(3, seed=seed + 1)
    chunks = [c for d in train for c in chunk_document(d, layer="ENTITY")]
    clf.train([c.tokens for c in chunks], [c.labels for c in chunks], TrainConfig("ENTITY", 1))
    bigger = make_corpus(1, seed=seed, n_sentences=4 + extra)[0]
    assert bigger.tokens[: len(base.tokens)] == base.tokens
    small = filter_sentences(base, clf).retained
    large = filter_sentences(bigger, clf).retained
    assert set(small) <= set(large)
