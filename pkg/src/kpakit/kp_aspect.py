"""Aspect-clustering key point generation, the alternative to the graph route.

Aspects (short phrases naming what an argument talks about) come either from
a user-supplied CSV (``arg_id,aspect``) or from a built-in heuristic that
keeps maximal runs of non-stopword tokens. Aspect embeddings are clustered
with k-means, candidate sentences are chosen greedily to cover as many
clusters as possible, and near-duplicates are filtered with a match-score
threshold.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import CorpusError, Dataset
from .kp_graph import SentenceCandidate
from .textutil import tokenize

logger = logging.getLogger(__name__)

DEFAULT_CLUSTERS = 15
DEFAULT_DEDUP_THRESHOLD = 0.65
KMEANS_MAX_ITERS = 100
KMEANS_TOL = 1e-6

# Compact English function-word list used by the heuristic aspect extractor.
# Content verbs are deliberately kept, so "vaccines prevent disease" yields
# the single aspect "vaccines prevent disease" rather than fragments.
STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be because
been before being below between both but by can cannot could couldn't did didn't
do does doesn't doing don't down during each few for from further had hadn't has
hasn't have haven't having he he'd he'll he's her here here's hers herself him
himself his how how's i i'd i'll i'm i've if in into is isn't it it's its itself
let's me more most mustn't my myself no nor not of off on once only or other
ought our ours ourselves out over own same shan't she she'd she'll she's should
shouldn't so some such than that that's the their theirs them themselves then
there there's these they they'd they'll they're they've this those through to
too under until up very was wasn't we we'd we'll we're we've were weren't what
what's when when's where where's which while who who's whom why why's with won't
would wouldn't you you'd you'll you're you've your yours yourself yourselves
""".split())


@dataclass
class AspectPhrase:
    text: str
    source_arg_id: str
    embedding: Optional[np.ndarray] = None


@dataclass
class AspectCluster:
    id: int
    centroid: np.ndarray
    members: list[AspectPhrase]


@dataclass
class CoverageState:
    covered: set[int] = field(default_factory=set)
    selected: list[SentenceCandidate] = field(default_factory=list)


def extract_aspect_phrases(text: str, stopwords: frozenset[str] = STOPWORDS) -> list[str]:
    """Heuristic aspects: maximal runs of consecutive non-stopword tokens.

    Lowercased, deduplicated, in order of first occurrence.
    """
    phrases: list[str] = []
    run: list[str] = []
    for token in tokenize(text) + [""]:
        if token and token not in stopwords:
            run.append(token)
            continue
        if run:
            phrases.append(" ".join(run))
            run = []
    seen: set[str] = set()
    unique = []
    for phrase in phrases:
        if phrase not in seen:
            seen.add(phrase)
            unique.append(phrase)
    return unique


def acquire_aspects(dataset: Dataset, aspects_path: str | Path | None = None) -> list[AspectPhrase]:
    """Aspect phrases for every argument, from file when given, else heuristic.

    The file format is CSV with columns ``arg_id,aspect``; every arg_id must
    exist in the dataset. Embeddings are left unset for the caller to fill.
    """
    if aspects_path is None:
        out: list[AspectPhrase] = []
        for argument in dataset.arguments:
            for phrase in extract_aspect_phrases(argument.text):
                out.append(AspectPhrase(text=phrase, source_arg_id=argument.id))
        return out
    path = Path(aspects_path)
    known = dataset.argument_by_id()
    out = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        have = set(reader.fieldnames or ())
        if not {"arg_id", "aspect"} <= have:
            raise CorpusError(f"{path}: expected columns arg_id,aspect")
        for row_no, row in enumerate(reader, start=2):
            arg_id = (row.get("arg_id") or "").strip()
            aspect = (row.get("aspect") or "").strip()
            if not arg_id or not aspect:
                raise CorpusError(f"{path}:{row_no}: empty arg_id or aspect")
            if arg_id not in known:
                raise CorpusError(f"{path}:{row_no}: unknown arg_id {arg_id!r}")
            out.append(AspectPhrase(text=aspect.lower(), source_arg_id=arg_id))
    return out


def _farthest_point_init(points: np.ndarray, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    first = int(rng.integers(len(points)))
    chosen = [first]
    dist2 = ((points - points[first]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(dist2))  # ties resolve to the lowest index
        chosen.append(nxt)
        dist2 = np.minimum(dist2, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def cluster_aspects(
    aspects: Sequence[AspectPhrase],
    k: int = DEFAULT_CLUSTERS,
    seed: int = 0,
    inertia_history: list[float] | None = None,
) -> list[AspectCluster]:
    """Deterministic k-means over aspect embeddings.

    Seeded farthest-point initialization, Euclidean assignments (ties to the
    lowest cluster id), Lloyd updates until centroid movement falls below
    KMEANS_TOL or KMEANS_MAX_ITERS passes. If the data has fewer distinct
    points than k, k is lowered to that count. A final assignment pass keeps
    the nearest-centroid invariant exact.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not aspects:
        raise ValueError("no aspects to cluster")
    for aspect in aspects:
        if aspect.embedding is None:
            raise ValueError(f"aspect {aspect.text!r} has no embedding")
    points = np.stack([np.asarray(a.embedding, dtype=float) for a in aspects])
    distinct = len(np.unique(points, axis=0))
    k = min(k, distinct)
    centroids = _farthest_point_init(points, k, seed)
    for _ in range(KMEANS_MAX_ITERS):
        dist2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(dist2, axis=1)
        if inertia_history is not None:
            inertia_history.append(float(dist2[np.arange(len(points)), assign].sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            members = points[assign == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        movement = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if movement < KMEANS_TOL:
            break
    dist2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assign = np.argmin(dist2, axis=1)
    clusters = [AspectCluster(id=j, centroid=centroids[j], members=[]) for j in range(k)]
    for index, aspect in enumerate(aspects):
        clusters[int(assign[index])].members.append(aspect)
    return clusters


def _contains_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    for start in range(len(haystack) - len(needle) + 1):
        if list(haystack[start:start + len(needle)]) == list(needle):
            return True
    return False


def map_candidates_to_clusters(
    candidates: Sequence[SentenceCandidate],
    clusters: Sequence[AspectCluster],
) -> dict[str, set[int]]:
    """candidate id -> ids of clusters with a member phrase appearing in it.

    A phrase "appears" when its token sequence occurs contiguously in the
    candidate's token sequence (both via the shared tokenizer).
    """
    phrase_index: list[tuple[int, tuple[str, ...]]] = []
    for cluster in clusters:
        seen: set[tuple[str, ...]] = set()
        for member in cluster.members:
            toks = tuple(tokenize(member.text))
            if toks and toks not in seen:
                seen.add(toks)
                phrase_index.append((cluster.id, toks))
    mapping: dict[str, set[int]] = {}
    for candidate in candidates:
        tokens = tokenize(candidate.text)
        hit = {cid for cid, toks in phrase_index if _contains_subsequence(tokens, toks)}
        mapping[candidate.id] = hit
    return mapping


def greedy_select(
    candidates: Sequence[SentenceCandidate],
    clusters: Sequence[AspectCluster],
    sentence_to_clusters: dict[str, set[int]],
    k_max: int = 10,
) -> list[SentenceCandidate]:
    """Greedy cluster set cover over candidate sentences.

    Each step picks the candidate covering the most not-yet-covered clusters,
    breaking ties by smaller overlap with covered clusters, then by
    lexicographic id. Stops when coverage is complete, k_max is reached, or
    no remaining candidate adds coverage.
    """
    cluster_ids = {c.id for c in clusters}
    state = CoverageState()
    chosen: set[str] = set()
    while len(state.selected) < k_max and state.covered != cluster_ids:
        best: SentenceCandidate | None = None
        best_key: tuple[int, int, str] | None = None
        best_cover: set[int] = set()
        for candidate in candidates:
            if candidate.id in chosen:
                continue
            cover = sentence_to_clusters.get(candidate.id, set()) & cluster_ids
            gain = len(cover - state.covered)
            if gain == 0:
                continue
            key = (-gain, len(cover & state.covered), candidate.id)
            if best_key is None or key < best_key:
                best, best_key, best_cover = candidate, key, cover
        if best is None:
            break
        state.selected.append(best)
        state.covered |= best_cover
        chosen.add(best.id)
    return list(state.selected)


Similarity = Callable[[SentenceCandidate, SentenceCandidate], float]


def dedup(
    selected: Sequence[SentenceCandidate],
    similarity: Similarity,
    threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> list[SentenceCandidate]:
    """Order-preserving streaming dedup: drop items whose similarity to any
    kept predecessor is >= threshold."""
    kept: list[SentenceCandidate] = []
    for candidate in selected:
        if all(float(similarity(candidate, prev)) < threshold for prev in kept):
            kept.append(candidate)
    return kept
