"""Evaluation: strict/relaxed mean average precision and ROUGE-1/2/L F1.

Matching protocol, per topic-stance group: take each argument's single best
predicted pair, sort pairs by score descending (ties by argument id, then key
point id), keep the top ceil(keep_fraction * n), and label the kept pairs two
ways. Strict counts only gold Match pairs as relevant; relaxed also counts
Ambiguous ones. Unlabeled pairs are non-matches in both. The mean of the
per-group average precisions gives strict/relaxed mAP.

Note a property of standard AP worth knowing: relabeling a low-ranked pair
from irrelevant to relevant can lower AP (it adds a small precision term but
grows the denominator), so relaxed mAP is not mathematically guaranteed to
reach strict mAP on adversarial score orderings, even though it does on
real model outputs.

Generation protocol: per group, concatenate the generated key point texts in
selection order and the gold key point texts in corpus order, score ROUGE-1,
ROUGE-2, and ROUGE-L F1 on the pair of concatenations, then average over
groups. Tokenization is lowercase whitespace splitting with enclosing
punctuation stripped; no stemming. Empty sides score 0.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusError, Dataset, MatchLabel, Stance
from .textutil import tokenize

logger = logging.getLogger(__name__)

DEFAULT_KEEP_FRACTION = 0.5


@dataclass(frozen=True)
class PredictionSet:
    """One topic-stance group's predictions: each argument's best pair."""

    topic: str
    stance: Stance
    entries: tuple[tuple[str, str, float], ...]  # (arg_id, kp_id, score)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for arg_id, _, _ in self.entries:
            if arg_id in seen:
                raise ValueError(f"duplicate prediction for argument {arg_id!r}")
            seen.add(arg_id)


@dataclass(frozen=True)
class APResult:
    strict: float
    relaxed: float
    kept_count: int


@dataclass(frozen=True)
class RougeScore:
    rouge1: float
    rouge2: float
    rougeL: float


def average_precision(ranked: Sequence[int]) -> float:
    """AP of a ranked 0/1 relevance list: mean of precision-at-k over the
    relevant positions; 0.0 when nothing is relevant."""
    if len(ranked) == 0:
        raise ValueError("empty ranking")
    hits = 0
    total = 0.0
    for position, relevant in enumerate(ranked, start=1):
        if relevant not in (0, 1):
            raise ValueError(f"relevance must be 0 or 1, got {relevant!r}")
        if relevant:
            hits += 1
            total += hits / position
    return total / hits if hits else 0.0


def _kept_labels(
    predictions: PredictionSet,
    gold_labels: Mapping[tuple[str, str], MatchLabel],
    keep_fraction: float,
) -> tuple[list[int], list[int]]:
    ordered = sorted(predictions.entries, key=lambda e: (-e[2], e[0], e[1]))
    kept = ordered[:math.ceil(keep_fraction * len(ordered))]
    strict = []
    relaxed = []
    for arg_id, kp_id, _ in kept:
        label = gold_labels.get((arg_id, kp_id))
        strict.append(1 if label is MatchLabel.MATCH else 0)
        relaxed.append(1 if label in (MatchLabel.MATCH, MatchLabel.AMBIGUOUS) else 0)
    return strict, relaxed


def group_average_precision(
    predictions: PredictionSet,
    gold: Dataset,
    keep_fraction: float = DEFAULT_KEEP_FRACTION,
) -> APResult:
    """Strict/relaxed AP for a single topic-stance group."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    if not predictions.entries:
        raise ValueError(f"no predictions for group ({predictions.topic!r}, {predictions.stance.name})")
    args = gold.argument_by_id()
    kps = gold.key_point_by_id()
    for arg_id, kp_id, _ in predictions.entries:
        if arg_id not in args:
            raise ValueError(f"prediction references unknown argument {arg_id!r}")
        if kp_id not in kps:
            raise ValueError(f"prediction references unknown key point {kp_id!r}")
    strict, relaxed = _kept_labels(predictions, gold.label_map(), keep_fraction)
    return APResult(
        strict=average_precision(strict),
        relaxed=average_precision(relaxed),
        kept_count=len(strict),
    )


def strict_relaxed_map(
    predictions: Sequence[PredictionSet],
    gold: Dataset,
    keep_fraction: float = DEFAULT_KEEP_FRACTION,
) -> APResult:
    """Mean strict/relaxed AP over topic-stance groups."""
    if not predictions:
        raise ValueError("no prediction groups")
    groups = {(p.topic, p.stance) for p in predictions}
    if len(groups) != len(predictions):
        raise ValueError("duplicate topic-stance groups in predictions")
    label_map = gold.label_map()
    args = gold.argument_by_id()
    kps = gold.key_point_by_id()
    strict_total = 0.0
    relaxed_total = 0.0
    kept_total = 0
    for group in predictions:
        if not group.entries:
            raise ValueError(f"no predictions for group ({group.topic!r}, {group.stance.name})")
        for arg_id, kp_id, _ in group.entries:
            if arg_id not in args:
                raise ValueError(f"prediction references unknown argument {arg_id!r}")
            if kp_id not in kps:
                raise ValueError(f"prediction references unknown key point {kp_id!r}")
        strict, relaxed = _kept_labels(group, label_map, keep_fraction)
        strict_total += average_precision(strict)
        relaxed_total += average_precision(relaxed)
        kept_total += len(strict)
    n = len(predictions)
    return APResult(strict=strict_total / n, relaxed=relaxed_total / n, kept_count=kept_total)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _f1(overlap: int, candidate_total: int, reference_total: int) -> float:
    if candidate_total == 0 or reference_total == 0:
        return 0.0
    precision = overlap / candidate_total
    recall = overlap / reference_total
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rouge_n(candidate: str, reference: str, n: int) -> float:
    """ROUGE-N F1 with clipped n-gram counts."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = tokenize(candidate)
    ref = tokenize(reference)
    cand_counts = _ngrams(cand, n)
    ref_counts = _ngrams(ref, n)
    overlap = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
    return _f1(overlap, sum(cand_counts.values()), sum(ref_counts.values()))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if token == other:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(candidate: str, reference: str) -> float:
    """ROUGE-L F1 from the longest common subsequence of token sequences."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    lcs = _lcs_length(cand, ref)
    return _f1(lcs, len(cand), len(ref))


def read_generated_csv(path: str | Path) -> list[dict]:
    """Read a generated key point CSV, skipping '#' metadata header lines."""
    path = Path(path)
    rows: list[dict] = []
    with open(path, encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.DictReader(lines)
    required = {"key_point_id", "key_point", "topic", "stance"}
    if not required <= set(reader.fieldnames or ()):
        raise CorpusError(f"{path}: expected columns {', '.join(sorted(required))}")
    for row_no, row in enumerate(reader, start=2):
        rows.append({
            "id": (row.get("key_point_id") or "").strip(),
            "text": (row.get("key_point") or "").strip(),
            "topic": (row.get("topic") or "").strip(),
            "stance": Stance.parse((row.get("stance") or ""), f"{path}:{row_no}: "),
        })
    return rows


def generation_rouge(
    generated_by_group: Mapping[tuple[str, Stance], Sequence[str]],
    gold: Dataset,
) -> tuple[RougeScore, dict[tuple[str, Stance], RougeScore]]:
    """Group-averaged ROUGE of generated vs gold key point concatenations.

    Iterates gold groups; a group with no generated output scores zero.
    Generated groups missing from gold are an error.
    """
    gold_groups: dict[tuple[str, Stance], list[str]] = {}
    for kp in gold.key_points:
        gold_groups.setdefault((kp.topic, kp.stance), []).append(kp.text)
    unknown = sorted(
        (topic, stance.name) for (topic, stance) in generated_by_group if (topic, stance) not in gold_groups
    )
    if unknown:
        raise ValueError(f"generated groups not present in gold: {unknown[:3]}")
    if not gold_groups:
        raise ValueError("gold dataset has no key points")
    per_group: dict[tuple[str, Stance], RougeScore] = {}
    totals = [0.0, 0.0, 0.0]
    for group in sorted(gold_groups, key=lambda g: (g[0], g[1].value)):
        reference = " ".join(gold_groups[group])
        candidate = " ".join(generated_by_group.get(group, ()))
        score = RougeScore(
            rouge1=rouge_n(candidate, reference, 1),
            rouge2=rouge_n(candidate, reference, 2),
            rougeL=rouge_l(candidate, reference),
        )
        per_group[group] = score
        totals[0] += score.rouge1
        totals[1] += score.rouge2
        totals[2] += score.rougeL
    n = len(gold_groups)
    return RougeScore(rouge1=totals[0] / n, rouge2=totals[1] / n, rougeL=totals[2] / n), per_group


def evaluate_generation(generated_path: str | Path, gold: Dataset) -> RougeScore:
    """Score a generated key point CSV against gold key points."""
    rows = read_generated_csv(generated_path)
    grouped: dict[tuple[str, Stance], list[str]] = {}
    for row in rows:
        grouped.setdefault((row["topic"], row["stance"]), []).append(row["text"])
    aggregate, _ = generation_rouge(grouped, gold)
    return aggregate
