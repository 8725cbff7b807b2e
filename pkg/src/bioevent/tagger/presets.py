"""Named experiment configurations with their published reference scores.

Each preset fixes the task, epoch count and training-set recipe; dev and
test always come from the WikiBio splits.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..adapters.compose import (
    ENTITY_DOCUMENT_CAP,
    EVENT_SENTENCE_CAP,
    MISC_MEMBERS,
    TrainingSetSpec,
    Unit,
    compose_training_set,
    largest_remainder,
)
from ..core.model import Corpus
from .base import Task
from .splits import split_units, SplitSpec


@dataclass(frozen=True)
class Preset:
    name: str
    task: Task
    epochs: int
    members: tuple[str, ...]  # corpora sharing the non-WikiBio part equally
    with_wikibio: bool
    reference: tuple[float, float, float]  # reported (train, dev, test) F1

    @property
    def unit(self) -> Unit:
        return Unit.DOCUMENTS if self.task is Task.ENTITY else Unit.SENTENCES

    @property
    def cap(self) -> int:
        return ENTITY_DOCUMENT_CAP if self.task is Task.ENTITY else EVENT_SENTENCE_CAP


ALIASES = {"onto": "ontonotes", "onto_mod": "ontonotes_mod", "gum": "gum", "timebank": "timebank",
           "litbank": "litbank", "newsreader": "newsreader"}

_ENTITY_ROWS = {
    "gum": (("gum",), (0.820, 0.728, 0.752)),
    "gum+wikibio": (("gum",), (0.819, 0.728, 0.753)),
    "onto": (("onto",), (0.896, 0.782, 0.808)),
    "onto+wikibio": (("onto",), (0.846, 0.774, 0.800)),
    "misc": (("onto", "gum"), (0.824, 0.766, 0.792)),
    "misc+wikibio": (("onto", "gum"), (0.828, 0.764, 0.789)),
}

_EVENT_ROWS = {
    "wikibio": ((), (0.479, 0.479, 0.479)),
    "litbank": (("litbank",), (0.847, 0.640, 0.622)),
    "litbank+wikibio": (("litbank",), (0.835, 0.814, 0.813)),
    "misc_01": (MISC_MEMBERS["misc_01"], (0.885, 0.863, 0.801)),
    "misc_01+wikibio": (MISC_MEMBERS["misc_01"], (0.871, 0.831, 0.827)),
    "misc_02": (MISC_MEMBERS["misc_02"], (0.866, 0.816, 0.819)),
    "misc_02+wikibio": (MISC_MEMBERS["misc_02"], (0.861, 0.837, 0.832)),
    "misc_03": (MISC_MEMBERS["misc_03"], (0.850, 0.811, 0.817)),
    "misc_03+wikibio": (MISC_MEMBERS["misc_03"], (0.844, 0.839, 0.831)),
    "onto": (("onto",), (0.950, 0.800, 0.790)),
    "onto+wikibio": (("onto",), (0.936, 0.873, 0.809)),
    "onto_mod": (("onto_mod",), (0.997, 0.823, 0.814)),
    "onto_mod+wikibio": (("onto_mod",), (0.888, 0.869, 0.829)),
    "timebank": (("timebank",), (0.89, 0.801, 0.790)),
    "timebank+wikibio": (("timebank",), (0.865, 0.856, 0.821)),
    "newsreader": (("newsreader",), (0.453, 0.479, 0.479)),
    "newsreader+wikibio": (("newsreader",), (0.467, 0.479, 0.479)),
}

_EVENT_ROWS_15 = {
    "misc_01+wikibio": (0.890, 0.852, 0.853),
    "misc_02+wikibio": (0.900, 0.855, 0.856),
    "misc_03+wikibio": (0.896, 0.859, 0.855),
    "timebank+wikibio": (0.919, 0.850, 0.859),
}


def _build():
    out = {}
    for row, (members, ref) in _ENTITY_ROWS.items():
        out[f"entity/{row}"] = Preset(f"entity/{row}", Task.ENTITY, 30, members, row.endswith("+wikibio"), ref)
    for row, (members, ref) in _EVENT_ROWS.items():
        wb = row.endswith("+wikibio") or row == "wikibio"
        out[f"event/{row}"] = Preset(f"event/{row}", Task.EVENT, 5, tuple(members), wb, ref)
    for row, ref in _EVENT_ROWS_15.items():
        base = out[f"event/{row}"]
        out[f"event/{row}@15"] = Preset(f"event/{row}@15", Task.EVENT, 15, base.members, True, ref)
    return out


PRESETS = _build()
# the two entity rows compared by one-way ANOVA
ANOVA_PRESETS = ("entity/onto", "entity/misc")


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


def preset_training_spec(preset: Preset, corpora: dict, wikibio_train: Corpus | None = None) -> TrainingSetSpec:
    """Counts per component: the WikiBio training split (if any) plus equal
    shares of the remaining cap. A single external corpus smaller than the
    cap contributes everything it has."""
    extra = ()
    if preset.with_wikibio:
        if wikibio_train is None:
            raise ValueError(f"{preset.name} needs the WikiBio training split")
        extra = (("wikibio", len(wikibio_train)),)
    remaining = preset.cap - sum(c for _, c in extra)
    names = [ALIASES[m] for m in preset.members]
    shares = largest_remainder(remaining, names)
    if len(names) == 1 and names[0] in corpora:
        probe = SplitSpec(preset.unit, 0, 0, 0)
        shares[names[0]] = min(remaining, len(split_units(corpora[names[0]], probe)))
    return TrainingSetSpec(preset.name, tuple(shares.items()) + extra, preset.cap, preset.unit)


def build_preset_training(preset: Preset, corpora: dict, wikibio_train: Corpus | None = None,
                          seed: int = 0) -> Corpus:
    spec = preset_training_spec(preset, corpora, wikibio_train)
    pool = [c if c.name == n else Corpus(n, c.documents, c.provenance) for n, c in corpora.items()]
    if wikibio_train is not None and preset.with_wikibio:
        pool.append(Corpus("wikibio", wikibio_train.documents, wikibio_train.provenance))
    return compose_training_set(spec, pool, seed)
