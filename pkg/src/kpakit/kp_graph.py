"""Graph-based key point generation.

Pipeline per topic-stance group: split arguments into sentences, filter them
down to short self-contained candidates, connect candidates whose pairwise
match score clears a threshold, then rank nodes with a quality-biased
centrality fixed point:

    P(i) = (1 - d) * sum_j [ w(i, j) / sum_k w(j, k) ] * P(j)
         + d * qual(i) / sum_k qual(k)

solved by power iteration from the uniform distribution. High-ranking,
mutually non-redundant candidates become the generated key points.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .corpus import Argument, Stance
from .textutil import slugify, split_sentences, tokenize

logger = logging.getLogger(__name__)

# Candidate sentences must not open with one of these (lowercased first token):
# a sentence that starts with a pronoun rarely stands alone as a key point.
PRONOUN_BLOCKLIST = frozenset({
    "i", "you", "he", "she", "it", "we", "they",
    "me", "him", "her", "us", "them",
    "this", "that", "these", "those", "there",
})

MIN_TOKENS = 5
MAX_TOKENS = 20


@dataclass
class SentenceCandidate:
    """A filtered sentence, optionally enriched with quality and embedding."""

    id: str
    text: str
    source_arg_id: str
    token_count: int
    quality: Optional[float] = None
    embedding: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RankParams:
    d: float = 0.2
    quality_threshold: float = 0.8
    match_threshold: float = 0.4
    redundancy_threshold: float = 0.8
    max_iters: int = 100
    tol: float = 1e-8
    k_min: int = 5
    k_max: int = 10

    def __post_init__(self) -> None:
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"d must be in [0, 1], got {self.d}")
        if self.max_iters < 1 or self.tol <= 0:
            raise ValueError("max_iters must be >= 1 and tol positive")
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}..{self.k_max}")


@dataclass
class KPGraph:
    """Undirected weighted candidate graph; edges keyed by index pairs i < j."""

    nodes: list[SentenceCandidate]
    edges: dict[tuple[int, int], float]

    def weight(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        return self.edges.get(key, 0.0)

    def degree(self, i: int) -> int:
        return sum(1 for (a, b) in self.edges if a == i or b == i)


@dataclass
class RankResult:
    scores: dict[str, float]
    iterations: int
    residual: float
    # Per-iteration traces, mainly for diagnostics and invariant checks.
    mass_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)


def split_and_filter(
    arguments: Iterable[Argument],
    pronouns: frozenset[str] | set[str] = PRONOUN_BLOCKLIST,
) -> list[SentenceCandidate]:
    """Split arguments into sentences and keep key-point-shaped ones.

    A sentence survives when it has MIN_TOKENS..MAX_TOKENS whitespace tokens
    (enclosing punctuation stripped) and its first token is not a pronoun.
    Candidate ids are "<arg_id>#s<index>" with the index counted over all
    sentences of the argument, so ids stay stable however the filter changes.
    """
    candidates: list[SentenceCandidate] = []
    for argument in arguments:
        for index, sentence in enumerate(split_sentences(argument.text)):
            tokens = tokenize(sentence)
            if not MIN_TOKENS <= len(tokens) <= MAX_TOKENS:
                continue
            if tokens[0] in pronouns:
                continue
            candidates.append(SentenceCandidate(
                id=f"{argument.id}#s{index}",
                text=sentence,
                source_arg_id=argument.id,
                token_count=len(tokens),
                quality=argument.quality,
            ))
    return candidates


Scorer = Callable[[SentenceCandidate, SentenceCandidate], float]


def build_graph(
    candidates: Sequence[SentenceCandidate],
    scorer: Scorer,
    params: RankParams | None = None,
) -> KPGraph:
    """Score candidate pairs and keep edges at or above the match threshold.

    The scorer must be symmetric. When any candidate carries a known quality,
    only candidates with quality >= quality_threshold become nodes; when all
    qualities are unknown the quality filter is skipped entirely.
    """
    params = params or RankParams()
    pool = list(candidates)
    if any(c.quality is not None for c in pool):
        nodes = [c for c in pool if c.quality is not None and c.quality >= params.quality_threshold]
    else:
        nodes = pool
    edges: dict[tuple[int, int], float] = {}
    if len(nodes) > 1:
        matrix_fn = getattr(scorer, "matrix", None)
        if callable(matrix_fn):
            scores = np.asarray(matrix_fn(nodes), dtype=float)
            for i in range(len(nodes)):
                for j in range(i + 1, len(nodes)):
                    if scores[i, j] >= params.match_threshold:
                        edges[(i, j)] = float(scores[i, j])
        else:
            for i in range(len(nodes)):
                for j in range(i + 1, len(nodes)):
                    try:
                        value = float(scorer(nodes[i], nodes[j]))
                    except Exception as exc:
                        raise ValueError(
                            f"scorer failed on pair ({nodes[i].id!r}, {nodes[j].id!r}): {exc}"
                        ) from exc
                    if value >= params.match_threshold:
                        edges[(i, j)] = value
    return KPGraph(nodes=nodes, edges=edges)


def rank(graph: KPGraph, params: RankParams | None = None) -> RankResult:
    """Power-iterate the quality-biased centrality fixed point.

    Starts from the uniform distribution and stops when the L1 change drops
    below params.tol or after params.max_iters iterations. Nodes without
    edges redistribute nothing (their outgoing column is zero); unknown
    qualities count as 1.0, and all-unknown graphs use a uniform prior.
    """
    params = params or RankParams()
    n = len(graph.nodes)
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    qual = np.asarray([1.0 if c.quality is None else float(c.quality) for c in graph.nodes])
    if np.any(qual < 0):
        raise ValueError("negative quality values")
    qual_sum = float(qual.sum())
    if params.d > 0 and qual_sum == 0.0:
        raise ValueError("all-zero quality vector with d > 0")
    prior = params.d * (qual / qual_sum) if qual_sum > 0.0 else np.zeros(n)

    weights = np.zeros((n, n))
    for (i, j), w in graph.edges.items():
        weights[i, j] = w
        weights[j, i] = w
    out_mass = weights.sum(axis=0)
    transition = np.divide(weights, out_mass[None, :], out=np.zeros_like(weights), where=out_mass > 0)

    p = np.full(n, 1.0 / n)
    iterations = 0
    residual = float("inf")
    mass_history: list[float] = []
    residual_history: list[float] = []
    while iterations < params.max_iters:
        p_next = (1.0 - params.d) * (transition @ p) + prior
        residual = float(np.abs(p_next - p).sum())
        iterations += 1
        mass_history.append(float(p_next.sum()))
        residual_history.append(residual)
        p = p_next
        if residual < params.tol:
            break
    scores = {node.id: float(p[i]) for i, node in enumerate(graph.nodes)}
    return RankResult(
        scores=scores,
        iterations=iterations,
        residual=residual,
        mass_history=mass_history,
        residual_history=residual_history,
    )


def select_key_points(
    result: RankResult,
    graph: KPGraph,
    scorer: Scorer,
    params: RankParams | None = None,
) -> list[SentenceCandidate]:
    """Greedy redundancy-filtered selection of top-ranked candidates.

    Walk nodes by descending rank score (ties by id); admit a candidate when
    its match score against every already-admitted one stays strictly below
    redundancy_threshold; stop at k_max. If fewer than k_min survive and
    unadmitted candidates remain, backfill by rank order ignoring redundancy.
    """
    params = params or RankParams()
    missing = [node.id for node in graph.nodes if node.id not in result.scores]
    if missing:
        raise ValueError(f"rank result lacks scores for node(s): {missing[:3]}")
    order = sorted(graph.nodes, key=lambda c: (-result.scores[c.id], c.id))
    selected: list[SentenceCandidate] = []
    for candidate in order:
        if len(selected) >= params.k_max:
            break
        if all(float(scorer(candidate, other)) < params.redundancy_threshold for other in selected):
            selected.append(candidate)
    if len(selected) < params.k_min:
        chosen = {c.id for c in selected}
        for candidate in order:
            if len(selected) >= params.k_min:
                break
            if candidate.id not in chosen:
                selected.append(candidate)
                chosen.add(candidate.id)
    return selected


@dataclass(frozen=True)
class GeneratedKeyPoint:
    id: str
    text: str
    topic: str
    stance: Stance
    score: float


def generated_ids(topic: str, stance: Stance, count: int) -> list[str]:
    """Ids for generated key points: kp_<topic-slug>_<pro|con>_<rank>."""
    side = "pro" if stance is Stance.PRO else "con"
    slug = slugify(topic)
    return [f"kp_{slug}_{side}_{rank}" for rank in range(1, count + 1)]


def write_key_points_csv(
    rows: Sequence[GeneratedKeyPoint],
    path: str | Path,
    metadata: Sequence[tuple[str, object]] = (),
) -> None:
    """Write generated key points with run metadata as '#'-prefixed header lines."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for key, value in metadata:
            handle.write(f"# {key}={value}\n")
        writer = csv.writer(handle)
        writer.writerow(["key_point_id", "key_point", "topic", "stance", "score"])
        for row in rows:
            writer.writerow([row.id, row.text, row.topic, row.stance.file_value(), repr(row.score)])
