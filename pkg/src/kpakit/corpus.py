"""Argument / key point corpus: types, CSV loading, statistics, topic splits.

File formats (CSV with header row, UTF-8):

* arguments:  ``arg_id,argument,topic,stance[,quality]`` with stance 1 or -1
  and quality an optional float in [0, 1].
* key points: ``key_point_id,key_point,topic,stance``.
* labels:     ``arg_id,key_point_id,label[,ambiguous]`` with label 0/1 and an
  optional ambiguous 0/1 column that marks pairs the annotators could not
  decide; an ambiguous flag overrides the label column.

Pairs that are absent from the labels file count as non-matches downstream.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Malformed or inconsistent corpus data; messages carry file/row context."""


class Stance(Enum):
    PRO = 1
    CON = -1

    @classmethod
    def parse(cls, raw: str, context: str = "") -> "Stance":
        try:
            value = int(raw.strip())
        except (ValueError, AttributeError):
            raise CorpusError(f"{context}invalid stance {raw!r} (expected 1 or -1)") from None
        if value == 1:
            return cls.PRO
        if value == -1:
            return cls.CON
        raise CorpusError(f"{context}invalid stance {raw!r} (expected 1 or -1)")

    def file_value(self) -> str:
        return str(self.value)


class MatchLabel(Enum):
    MATCH = "match"
    NO_MATCH = "no-match"
    AMBIGUOUS = "ambiguous"


class Split(Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


@dataclass(frozen=True)
class Argument:
    id: str
    text: str
    topic: str
    stance: Stance
    quality: Optional[float] = None


@dataclass(frozen=True)
class KeyPoint:
    id: str
    text: str
    topic: str
    stance: Stance


@dataclass(frozen=True)
class LabeledPair:
    argument_id: str
    key_point_id: str
    label: MatchLabel


@dataclass(frozen=True)
class Dataset:
    """Immutable corpus snapshot; safe to share across workers."""

    arguments: tuple[Argument, ...]
    key_points: tuple[KeyPoint, ...]
    pairs: tuple[LabeledPair, ...]
    split: Optional[Split] = None

    def argument_by_id(self) -> dict[str, Argument]:
        return {a.id: a for a in self.arguments}

    def key_point_by_id(self) -> dict[str, KeyPoint]:
        return {k.id: k for k in self.key_points}

    def topics(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in self.arguments:
            seen.setdefault(a.topic)
        for k in self.key_points:
            seen.setdefault(k.topic)
        return list(seen)

    def groups(self) -> list[tuple[str, Stance]]:
        """Distinct (topic, stance) combinations, sorted for deterministic iteration."""
        seen = {(a.topic, a.stance) for a in self.arguments}
        seen.update((k.topic, k.stance) for k in self.key_points)
        return sorted(seen, key=lambda g: (g[0], g[1].value))

    def label_map(self) -> dict[tuple[str, str], MatchLabel]:
        return {(p.argument_id, p.key_point_id): p.label for p in self.pairs}


@dataclass(frozen=True)
class StatisticsReport:
    topic_count: int
    argument_count: int
    key_point_count: int
    pair_count: int
    matching_pair_count: int
    match_rate: float
    # Per-argument match multiplicity buckets; they partition the arguments.
    unmatched: int
    single: int
    multiple: int
    ambiguous: int


def _require_columns(fieldnames: Optional[Sequence[str]], required: Sequence[str], path: Path) -> None:
    have = set(fieldnames or ())
    missing = [c for c in required if c not in have]
    if missing:
        raise CorpusError(f"{path}: missing required column(s) {', '.join(missing)}")


def _cell(row: Mapping[str, Optional[str]], column: str, path: Path, row_no: int) -> str:
    value = row.get(column)
    if value is None or not value.strip():
        raise CorpusError(f"{path}:{row_no}: empty {column}")
    return value.strip()


def _read_rows(path: Path, required: Sequence[str]) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        _require_columns(reader.fieldnames, required, path)
        for row_no, row in enumerate(reader, start=2):
            yield row_no, row


def load_arguments(path: str | Path) -> tuple[Argument, ...]:
    path = Path(path)
    out: list[Argument] = []
    seen: set[str] = set()
    for row_no, row in _read_rows(path, ("arg_id", "argument", "topic", "stance")):
        arg_id = _cell(row, "arg_id", path, row_no)
        if arg_id in seen:
            raise CorpusError(f"{path}:{row_no}: duplicate arg_id {arg_id!r}")
        seen.add(arg_id)
        quality = None
        raw_quality = (row.get("quality") or "").strip()
        if raw_quality:
            try:
                quality = float(raw_quality)
            except ValueError:
                raise CorpusError(f"{path}:{row_no}: invalid quality {raw_quality!r}") from None
            if not math.isfinite(quality) or not 0.0 <= quality <= 1.0:
                raise CorpusError(f"{path}:{row_no}: quality {quality} outside [0, 1]")
        out.append(Argument(
            id=arg_id,
            text=_cell(row, "argument", path, row_no),
            topic=_cell(row, "topic", path, row_no),
            stance=Stance.parse(_cell(row, "stance", path, row_no), f"{path}:{row_no}: "),
            quality=quality,
        ))
    return tuple(out)


def load_key_points(path: str | Path) -> tuple[KeyPoint, ...]:
    path = Path(path)
    out: list[KeyPoint] = []
    seen: set[str] = set()
    for row_no, row in _read_rows(path, ("key_point_id", "key_point", "topic", "stance")):
        kp_id = _cell(row, "key_point_id", path, row_no)
        if kp_id in seen:
            raise CorpusError(f"{path}:{row_no}: duplicate key_point_id {kp_id!r}")
        seen.add(kp_id)
        out.append(KeyPoint(
            id=kp_id,
            text=_cell(row, "key_point", path, row_no),
            topic=_cell(row, "topic", path, row_no),
            stance=Stance.parse(_cell(row, "stance", path, row_no), f"{path}:{row_no}: "),
        ))
    return tuple(out)


def _parse_binary(raw: str, column: str, path: Path, row_no: int) -> int:
    value = raw.strip()
    if value in ("0", "1"):
        return int(value)
    raise CorpusError(f"{path}:{row_no}: invalid {column} {raw!r} (expected 0 or 1)")


def load_labels(path: str | Path) -> tuple[LabeledPair, ...]:
    path = Path(path)
    out: list[LabeledPair] = []
    seen: set[tuple[str, str]] = set()
    for row_no, row in _read_rows(path, ("arg_id", "key_point_id", "label")):
        arg_id = _cell(row, "arg_id", path, row_no)
        kp_id = _cell(row, "key_point_id", path, row_no)
        if (arg_id, kp_id) in seen:
            raise CorpusError(f"{path}:{row_no}: duplicate pair ({arg_id!r}, {kp_id!r})")
        seen.add((arg_id, kp_id))
        label_bit = _parse_binary(_cell(row, "label", path, row_no), "label", path, row_no)
        ambiguous_raw = (row.get("ambiguous") or "").strip()
        ambiguous = _parse_binary(ambiguous_raw, "ambiguous", path, row_no) if ambiguous_raw else 0
        if ambiguous:
            label = MatchLabel.AMBIGUOUS
        elif label_bit:
            label = MatchLabel.MATCH
        else:
            label = MatchLabel.NO_MATCH
        out.append(LabeledPair(arg_id, kp_id, label))
    return tuple(out)


def validate_dataset(dataset: Dataset) -> None:
    """Cross-file consistency checks; raises :class:`CorpusError` on violation."""
    args = dataset.argument_by_id()
    kps = dataset.key_point_by_id()
    if len(args) != len(dataset.arguments):
        raise CorpusError("duplicate argument ids")
    if len(kps) != len(dataset.key_points):
        raise CorpusError("duplicate key point ids")
    for pair in dataset.pairs:
        arg = args.get(pair.argument_id)
        if arg is None:
            raise CorpusError(f"label references unknown arg_id {pair.argument_id!r}")
        kp = kps.get(pair.key_point_id)
        if kp is None:
            raise CorpusError(f"label references unknown key_point_id {pair.key_point_id!r}")
        if arg.topic != kp.topic or arg.stance != kp.stance:
            raise CorpusError(
                f"label pairs {pair.argument_id!r} with {pair.key_point_id!r}"
                f" across topic/stance boundaries"
            )


def load_dataset(
    arguments_path: str | Path,
    key_points_path: str | Path,
    labels_path: str | Path | None = None,
) -> Dataset:
    """Load and validate a corpus; the labels file is optional."""
    dataset = Dataset(
        arguments=load_arguments(arguments_path),
        key_points=load_key_points(key_points_path),
        pairs=load_labels(labels_path) if labels_path is not None else (),
    )
    validate_dataset(dataset)
    per_topic: dict[str, int] = {}
    for kp in dataset.key_points:
        per_topic[kp.topic] = per_topic.get(kp.topic, 0) + 1
    thin = sorted(t for t, n in per_topic.items() if n < 3)
    if thin and dataset.pairs:
        logger.info("topics with fewer than 3 key points: %s", ", ".join(thin))
    return dataset


def save_dataset(
    dataset: Dataset,
    arguments_path: str | Path,
    key_points_path: str | Path,
    labels_path: str | Path | None = None,
) -> None:
    """Write the three corpus CSVs; loading them back yields an equal Dataset."""
    with_quality = any(a.quality is not None for a in dataset.arguments)
    with open(arguments_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        header = ["arg_id", "argument", "topic", "stance"]
        if with_quality:
            header.append("quality")
        writer.writerow(header)
        for arg in dataset.arguments:
            row = [arg.id, arg.text, arg.topic, arg.stance.file_value()]
            if with_quality:
                row.append("" if arg.quality is None else repr(arg.quality))
            writer.writerow(row)
    with open(key_points_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["key_point_id", "key_point", "topic", "stance"])
        for kp in dataset.key_points:
            writer.writerow([kp.id, kp.text, kp.topic, kp.stance.file_value()])
    if labels_path is None:
        return
    with open(labels_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["arg_id", "key_point_id", "label", "ambiguous"])
        for pair in dataset.pairs:
            label_bit = 1 if pair.label is MatchLabel.MATCH else 0
            ambiguous = 1 if pair.label is MatchLabel.AMBIGUOUS else 0
            writer.writerow([pair.argument_id, pair.key_point_id, label_bit, ambiguous])


def dataset_stats(dataset: Dataset) -> StatisticsReport:
    """Corpus statistics, including per-argument match multiplicity buckets.

    Bucket rule per argument: two or more matched key points -> multiple,
    exactly one -> single, none but at least one ambiguous pair -> ambiguous,
    otherwise unmatched.
    """
    matches: dict[str, int] = {a.id: 0 for a in dataset.arguments}
    ambiguous_pairs: dict[str, int] = {a.id: 0 for a in dataset.arguments}
    matching_pair_count = 0
    for pair in dataset.pairs:
        if pair.label is MatchLabel.MATCH:
            matches[pair.argument_id] += 1
            matching_pair_count += 1
        elif pair.label is MatchLabel.AMBIGUOUS:
            ambiguous_pairs[pair.argument_id] += 1
    unmatched = single = multiple = ambiguous = 0
    for arg in dataset.arguments:
        n = matches[arg.id]
        if n >= 2:
            multiple += 1
        elif n == 1:
            single += 1
        elif ambiguous_pairs[arg.id] > 0:
            ambiguous += 1
        else:
            unmatched += 1
    pair_count = len(dataset.pairs)
    return StatisticsReport(
        topic_count=len(dataset.topics()),
        argument_count=len(dataset.arguments),
        key_point_count=len(dataset.key_points),
        pair_count=pair_count,
        matching_pair_count=matching_pair_count,
        match_rate=matching_pair_count / pair_count if pair_count else 0.0,
        unmatched=unmatched,
        single=single,
        multiple=multiple,
        ambiguous=ambiguous,
    )


def split_by_topics(
    dataset: Dataset,
    train_topics: Iterable[str],
    validation_topics: Iterable[str],
    test_topics: Iterable[str],
) -> tuple[Dataset, Dataset, Dataset]:
    """Partition by topic into train/validation/test datasets.

    The three topic sets must be disjoint and must cover every topic present
    in the data.
    """
    wanted = {
        Split.TRAIN: set(train_topics),
        Split.VALIDATION: set(validation_topics),
        Split.TEST: set(test_topics),
    }
    for a, b in ((Split.TRAIN, Split.VALIDATION), (Split.TRAIN, Split.TEST), (Split.VALIDATION, Split.TEST)):
        overlap = wanted[a] & wanted[b]
        if overlap:
            raise CorpusError(f"topics assigned to both {a.value} and {b.value}: {sorted(overlap)}")
    covered = wanted[Split.TRAIN] | wanted[Split.VALIDATION] | wanted[Split.TEST]
    stray = sorted(set(dataset.topics()) - covered)
    if stray:
        raise CorpusError(f"topics not assigned to any split: {stray}")

    def subset(split: Split) -> Dataset:
        topics = wanted[split]
        arguments = tuple(a for a in dataset.arguments if a.topic in topics)
        arg_ids = {a.id for a in arguments}
        key_points = tuple(k for k in dataset.key_points if k.topic in topics)
        pairs = tuple(p for p in dataset.pairs if p.argument_id in arg_ids)
        return Dataset(arguments=arguments, key_points=key_points, pairs=pairs, split=split)

    return subset(Split.TRAIN), subset(Split.VALIDATION), subset(Split.TEST)
