"""Sequence-labeling harness for entity and event detection."""

from .base import REPLICATION_EPOCHS, Task, TokenClassifier, TrainConfig, argmax
from .chunking import Batching, Chunk, ChunkingSpec, batch_groups, chunk_document, unchunk
from .evaluate import EvalReport, F1Score, evaluate_f1, per_label_scores, positive_labels
from .experiment import predict_corpus, run_experiment
from .mock import GoldReplayClassifier, MemorizingClassifier
from .presets import ANOVA_PRESETS, PRESETS, Preset, build_preset_training, get_preset, preset_training_spec
from .splits import ENTITY_SPLIT, EVENT_SPLIT, SPLIT_PRESETS, SplitSpec, build_splits
from .stats import AnovaResult, anova_significance


def load_classifier(path):
    """Load a classifier saved by ``bioevent train``."""
    import json
    from pathlib import Path

    meta = json.loads((Path(path) / "bioevent.json").read_text("utf-8"))
    if meta.get("kind") == "memorizing":
        return MemorizingClassifier.load(path)
    from .encoder import EncoderClassifier

    return EncoderClassifier.load(path)
