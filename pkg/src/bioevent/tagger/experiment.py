"""Train/evaluate harness and the run log that records provenance."""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path

from ..errors import BioEventError, ClassifierError
from .base import TokenClassifier, TrainConfig
from .chunking import ChunkingSpec, batch_groups, chunk_document, unchunk
from .evaluate import SPLITS, EvalReport, F1Score, evaluate_f1, per_label_scores

log = logging.getLogger(__name__)


def corpus_sequences(corpus, task, chunking: ChunkingSpec):
    chunks = []
    for doc in corpus:
        if doc.tokens:
            chunks.extend(chunk_document(doc, chunking, task.layer))
    return chunks


def predict_corpus(classifier: TokenClassifier, corpus, task, chunking=ChunkingSpec()):
    """Predicted and gold label sequences per document, windows joined back."""
    chunks = corpus_sequences(corpus, task, chunking)
    if not chunks:
        return [], []
    pred = classifier.predict_labels([list(c.tokens) for c in chunks], [c.key for c in chunks])
    gold_docs = unchunk(chunks)
    pred_docs = unchunk(chunks, pred)
    ids = sorted(gold_docs)
    return [gold_docs[i] for i in ids], [pred_docs[i] for i in ids]


def composition(corpus) -> dict:
    by_source = {}
    for d in corpus:
        src = d.doc_id.split(":", 1)[0] if ":" in d.doc_id else corpus.name
        by_source[src] = by_source.get(src, 0) + 1
    return {"name": corpus.name, "provenance": corpus.provenance.value, "units": len(corpus),
            "by_source": by_source, "ids": [d.doc_id for d in corpus]}


def _make(classifier, seed):
    if isinstance(classifier, TokenClassifier):
        return classifier
    return classifier(seed)


def run_experiment(training, dev, test, config: TrainConfig, classifier, *, chunking=ChunkingSpec(),
                   n_runs: int = 1, run_log=None, preset: str | None = None) -> EvalReport:
    """Train on ``training`` and score train, dev and test.

    ``classifier`` is an instance or a factory ``seed -> TokenClassifier``;
    with ``n_runs > 1`` a factory is required and run ``i`` uses seed
    ``config.seed + i``.
    """
    if n_runs > 1 and isinstance(classifier, TokenClassifier):
        raise ValueError("several runs need a classifier factory")
    task = config.task
    splits = dict(zip(SPLITS, (training, dev, test)))
    pooled = {s: F1Score(0, 0, 0) for s in SPLITS}
    per_label = {s: {} for s in SPLITS}
    run_scores = {s: [] for s in SPLITS}
    clf = None
    for run in range(n_runs):
        seed = config.seed + run
        cfg = TrainConfig(config.task, config.epochs, seed, config.learning_rate, dict(config.extra))
        clf = _make(classifier, seed)
        chunks = corpus_sequences(training, task, chunking)
        t0 = time.time()
        try:
            clf.train([list(c.tokens) for c in chunks], [list(c.labels) for c in chunks], cfg,
                      groups=batch_groups(chunks, chunking), keys=[c.key for c in chunks])
            for split, corpus in splits.items():
                gold, pred = predict_corpus(clf, corpus, task, chunking)
                score = evaluate_f1(gold, pred, task)
                pooled[split] = pooled[split] + score
                run_scores[split].append(score.f1)
                for lab, sc in per_label_scores(gold, pred, task).items():
                    per_label[split][lab] = per_label[split].get(lab, F1Score(0, 0, 0)) + sc
        except BioEventError:
            raise
        except Exception as exc:
            raise ClassifierError(f"{clf.name} failed (config={cfg.to_dict()}, preset={preset}): {exc}") from exc
        log.info("run %d: %s in %.1fs", run, {s: round(v[-1], 4) for s, v in run_scores.items()}, time.time() - t0)

    report = EvalReport(task, pooled, per_label, run_scores, n_runs,
                        {s: composition(c) for s, c in splits.items()})
    if run_log is not None:
        write_run_log(run_log, report, config, chunking, clf, preset)
    return report


def write_run_log(path, report: EvalReport, config, chunking, classifier, preset=None):
    entry = {
        "preset": preset,
        "config": config.to_dict(),
        "replication_config": config.is_replication and chunking.batching.value == "ONE_BATCH_PER_DOCUMENT",
        "chunking": {"max_sequence_length": chunking.max_sequence_length, "batching": chunking.batching.value},
        "classifier": classifier.describe() if classifier else None,
        "seed": config.seed,
        "report": report.to_dict(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")
