"""Assignment of writers to the four origin x gender groups."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..core.model import Gender, GroupLabel, Origin
from ..errors import ExclusionError, MissingFieldError

GENDER_MAP = {"Q6581097": Gender.MAN, "Q6581072": Gender.WOMAN}
BIRTH_YEAR_MIN = 1808


@dataclass(frozen=True)
class IdList:
    ids: frozenset
    version: str
    source: str

    @classmethod
    def parse(cls, text: str, source: str = "") -> "IdList":
        ids, version = set(), "unversioned"
        for line in text.splitlines():
            m = re.match(r"#\s*version:\s*(\S+)", line)
            if m:
                version = m.group(1)
            line = line.split("#", 1)[0].strip()
            if line:
                ids.add(line.split()[0])
        if not ids:
            raise ValueError(f"id list {source or '<text>'} is empty")
        return cls(frozenset(ids), version, source)

    @classmethod
    def load(cls, path=None, default=None) -> "IdList":
        if path is None:
            text = resources.files("bioevent.data").joinpath(default).read_text("utf-8")
            return cls.parse(text, f"bioevent:{default}")
        return cls.parse(Path(path).read_text("utf-8"), str(path))


@dataclass(frozen=True)
class GroupingConfig:
    western_countries: IdList
    minority_ethnic_groups: IdList
    birth_year_min: int = BIRTH_YEAR_MIN

    @classmethod
    def load(cls, western=None, minorities=None, birth_year_min=BIRTH_YEAR_MIN) -> "GroupingConfig":
        return cls(IdList.load(western, "western_countries.txt"),
                   IdList.load(minorities, "minority_ethnic_groups.txt"), birth_year_min)

    def versions(self) -> dict:
        return {"western_countries": {"version": self.western_countries.version,
                                      "source": self.western_countries.source,
                                      "size": len(self.western_countries.ids)},
                "minority_ethnic_groups": {"version": self.minority_ethnic_groups.version,
                                           "source": self.minority_ethnic_groups.source,
                                           "size": len(self.minority_ethnic_groups.ids)},
                "birth_year_min": self.birth_year_min}


def classify_group(record, config: GroupingConfig) -> GroupLabel:
    """TRANSNATIONAL iff born outside the Western list or member of a listed
    minority. Raises ExclusionError with a stable reason otherwise."""
    record.require("gender", "country_of_birth")
    gender = GENDER_MAP.get(record.gender)
    if gender is None:
        raise ExclusionError("UNMAPPED_GENDER", record.gender)
    if record.year_of_birth is not None and record.year_of_birth < config.birth_year_min:
        raise ExclusionError("OUT_OF_SCOPE_BIRTH_YEAR", str(record.year_of_birth))
    minority = any(e in config.minority_ethnic_groups.ids for e in record.ethnic_groups)
    western = record.country_of_birth in config.western_countries.ids
    origin = Origin.WESTERN if western and not minority else Origin.TRANSNATIONAL
    return GroupLabel(origin, gender)


@dataclass
class Partition:
    groups: dict[str, list] = field(default_factory=dict)
    excluded: dict[str, list] = field(default_factory=dict)
    total: int = 0

    @property
    def n_grouped(self) -> int:
        return sum(len(v) for v in self.groups.values())

    @property
    def n_excluded(self) -> int:
        return sum(len(v) for v in self.excluded.values())

    def reconciles(self) -> bool:
        ids = [r.person_id for v in self.groups.values() for r in v] + [i for v in self.excluded.values() for i in v]
        return self.n_grouped + self.n_excluded == self.total and len(ids) == len(set(ids))

    def summary(self) -> dict:
        return {"total": self.total, "grouped": self.n_grouped, "excluded": self.n_excluded,
                "groups": {k: len(v) for k, v in sorted(self.groups.items())},
                "exclusions": {k: len(v) for k, v in sorted(self.excluded.items())}}


def partition_records(records, config: GroupingConfig) -> Partition:
    """Every record lands in exactly one group or one exclusion reason.
    Duplicate person ids after the first are excluded as DUPLICATE."""
    part = Partition(groups={g.code: [] for g in sorted({GroupLabel(o, x) for o in Origin for x in Gender})})
    seen = set()
    for rec in records:
        part.total += 1
        if rec.person_id in seen:
            part.excluded.setdefault("DUPLICATE", []).append(rec.person_id + "#dup" + str(part.total))
            continue
        seen.add(rec.person_id)
        try:
            label = classify_group(rec, config)
        except MissingFieldError as exc:
            part.excluded.setdefault(f"MISSING_FIELD:{exc.field}", []).append(rec.person_id)
            continue
        except ExclusionError as exc:
            part.excluded.setdefault(exc.reason, []).append(rec.person_id)
            continue
        part.groups[label.code].append(rec)
    return part


def reason_counts(part: Partition) -> Counter:
    return Counter({k: len(v) for k, v in part.excluded.items()})
