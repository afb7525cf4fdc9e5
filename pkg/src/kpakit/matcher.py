"""Siamese argument/key-point matcher with a trainable linear projection.

Both sides of a pair go through the same projection matrix W; the match
score is the cosine of the projected vectors rescaled from [-1, 1] to
[0, 1]:

    score = (1 + cos(W a, W k)) / 2

Training minimizes binary cross-entropy of that score against 0/1 match
labels with plain mini-batch gradient descent and an analytic gradient.
Scores are clamped away from the log singularities before taking logs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .corpus import Argument, KeyPoint
from .embedding import cosine

logger = logging.getLogger(__name__)

DEFAULT_CLAMP_EPSILON = 1e-7

# (argument vector, key point vector, label in {0.0, 1.0})
TrainingPair = tuple[np.ndarray, np.ndarray, float]


@dataclass
class ProjectionHead:
    """A single linear projection (dim_out x dim_in) shared by both inputs."""

    weight: np.ndarray
    seed: Optional[int] = None
    fold: Optional[int] = None

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=float)
        if self.weight.ndim != 2:
            raise ValueError("projection weight must be a 2-D matrix")
        if not np.all(np.isfinite(self.weight)):
            raise ValueError("projection weight contains non-finite values")

    @property
    def dim_in(self) -> int:
        return int(self.weight.shape[1])

    @property
    def dim_out(self) -> int:
        return int(self.weight.shape[0])

    @classmethod
    def identity(cls, dim: int) -> "ProjectionHead":
        return cls(weight=np.eye(dim))


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.5
    seed: int = 0
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not 0 < self.clamp_epsilon < 0.5:
            raise ValueError("clamp_epsilon must be in (0, 0.5)")


def pair_inputs(argument: Argument, key_point: KeyPoint) -> tuple[str, str]:
    """Texts fed to the two encoder branches: the argument as-is, and the
    key point prefixed with its topic ("<topic> <key point>")."""
    if argument.topic != key_point.topic:
        raise ValueError(
            f"argument {argument.id!r} (topic {argument.topic!r}) paired with"
            f" key point {key_point.id!r} (topic {key_point.topic!r})"
        )
    if not key_point.text.strip():
        raise ValueError(f"key point {key_point.id!r} has empty text")
    return argument.text, f"{key_point.topic} {key_point.text}"


def score_pair(head: ProjectionHead, e_arg: np.ndarray, e_kp: np.ndarray) -> float:
    """Match score in [0, 1] for a pair of embedding vectors."""
    u = head.weight @ np.asarray(e_arg, dtype=float)
    v = head.weight @ np.asarray(e_kp, dtype=float)
    try:
        c = cosine(u, v)
    except ValueError as exc:
        raise ValueError(f"projected vector is zero ({exc})") from None
    return 0.5 * (1.0 + c)


def contrastive_loss(score: float, y: float, clamp_epsilon: float = DEFAULT_CLAMP_EPSILON) -> float:
    """Binary cross-entropy of a [0, 1] match score against a 0/1 label."""
    if y not in (0.0, 1.0, 0, 1):
        raise ValueError(f"label must be 0 or 1, got {y!r}")
    y = float(y)
    clipped = min(max(score, clamp_epsilon), 1.0 - clamp_epsilon)
    return -(y * np.log(clipped) + (1.0 - y) * np.log1p(-clipped))


def _batch_loss_grad(
    weight: np.ndarray,
    a: np.ndarray,
    k: np.ndarray,
    y: np.ndarray,
    eps: float,
) -> tuple[float, np.ndarray]:
    """Mean loss and its gradient w.r.t. the shared weight for one batch.

    Within the clamp region the loss is constant in the score, so clamped
    pairs contribute zero gradient.
    """
    u = a @ weight.T
    v = k @ weight.T
    nu = np.linalg.norm(u, axis=1)
    nv = np.linalg.norm(v, axis=1)
    if np.any(nu == 0.0) or np.any(nv == 0.0):
        bad = int(np.argmax((nu == 0.0) | (nv == 0.0)))
        raise ValueError(f"projected vector is zero for pair index {bad}")
    c = np.clip(np.einsum("ij,ij->i", u, v) / (nu * nv), -1.0, 1.0)
    s = 0.5 * (1.0 + c)
    yhat = np.clip(s, eps, 1.0 - eps)
    losses = -(y * np.log(yhat) + (1.0 - y) * np.log1p(-yhat))
    if not np.all(np.isfinite(losses)):
        raise ValueError("non-finite loss encountered during training")
    n = len(y)
    interior = (s > eps) & (s < 1.0 - eps)
    # dL/d(score) for the mean batch loss, times d(score)/d(cos) = 1/2.
    g = np.where(interior, -y / yhat + (1.0 - y) / (1.0 - yhat), 0.0) * (0.5 / n)
    inv = 1.0 / (nu * nv)
    gu = g[:, None] * (v * inv[:, None] - u * (c / nu**2)[:, None])
    gv = g[:, None] * (u * inv[:, None] - v * (c / nv**2)[:, None])
    grad = gu.T @ a + gv.T @ k
    if not np.all(np.isfinite(grad)):
        raise ValueError("non-finite gradient encountered during training")
    return float(losses.mean()), grad


def loss_and_gradient(
    weight: np.ndarray,
    e_arg: np.ndarray,
    e_kp: np.ndarray,
    y: float,
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON,
) -> tuple[float, np.ndarray]:
    """Single-pair loss and analytic gradient w.r.t. the weight matrix."""
    weight = np.asarray(weight, dtype=float)
    a = np.asarray(e_arg, dtype=float)[None, :]
    k = np.asarray(e_kp, dtype=float)[None, :]
    return _batch_loss_grad(weight, a, k, np.asarray([float(y)]), clamp_epsilon)


def _stack_pairs(pairs: Sequence[TrainingPair]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not pairs:
        raise ValueError("no training pairs")
    a = np.stack([np.asarray(p[0], dtype=float) for p in pairs])
    k = np.stack([np.asarray(p[1], dtype=float) for p in pairs])
    y = np.asarray([float(p[2]) for p in pairs])
    if a.shape != k.shape:
        raise ValueError(f"argument/key point embedding shapes differ: {a.shape} vs {k.shape}")
    if np.any((y != 0.0) & (y != 1.0)):
        raise ValueError("training labels must be 0 or 1")
    return a, k, y


def train_projection(
    pairs: Sequence[TrainingPair],
    cfg: TrainConfig | None = None,
    on_epoch: Callable[[int, float], None] | None = None,
) -> ProjectionHead:
    """Train a shared projection with mini-batch gradient descent.

    The weight starts at identity plus seeded Gaussian noise (sigma 0.01).
    After every epoch the mean loss over all pairs is evaluated, and the
    weight snapshot with the lowest such loss (the untrained start included)
    is returned. With learning_rate 0 the start weights come back unchanged.
    """
    cfg = cfg or TrainConfig()
    a, k, y = _stack_pairs(pairs)
    dim = a.shape[1]
    rng = np.random.default_rng(cfg.seed)
    weight = np.eye(dim) + 0.01 * rng.standard_normal((dim, dim))
    eps = cfg.clamp_epsilon

    best_loss, _ = _batch_loss_grad(weight, a, k, y, eps)
    best_weight = weight.copy()
    if on_epoch is not None:
        on_epoch(0, best_loss)
    n = len(y)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, grad = _batch_loss_grad(weight, a[batch], k[batch], y[batch], eps)
            weight -= cfg.learning_rate * grad
        epoch_loss, _ = _batch_loss_grad(weight, a, k, y, eps)
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)
        if epoch_loss < best_loss:
            best_loss = epoch_loss
            best_weight = weight.copy()
    return ProjectionHead(weight=best_weight, seed=cfg.seed)


@dataclass
class Ensemble:
    """A bag of projection heads scored by the mean of member scores."""

    members: list[ProjectionHead]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        dims = {(m.dim_out, m.dim_in) for m in self.members}
        if len(dims) > 1:
            raise ValueError(f"ensemble members disagree on dimensions: {sorted(dims)}")


def ensemble_score(ensemble: Ensemble, e_arg: np.ndarray, e_kp: np.ndarray) -> float:
    scores = [score_pair(head, e_arg, e_kp) for head in ensemble.members]
    return float(sum(scores) / len(scores))


def match_arguments(scores: Mapping[tuple[str, str], float]) -> dict[str, tuple[str, float]]:
    """Pick each argument's best key point from a (arg_id, kp_id) -> score map.

    Ties go to the lexicographically smallest key point id. Returns
    arg_id -> (kp_id, score), with arguments in sorted id order.
    """
    if not scores:
        raise ValueError("no candidate scores to match")
    by_arg: dict[str, dict[str, float]] = {}
    for (arg_id, kp_id), value in scores.items():
        by_arg.setdefault(arg_id, {})[kp_id] = float(value)
    best: dict[str, tuple[str, float]] = {}
    for arg_id in sorted(by_arg):
        candidates = by_arg[arg_id]
        top_id = min(candidates, key=lambda kp_id: (-candidates[kp_id], kp_id))
        best[arg_id] = (top_id, candidates[top_id])
    return best


def save_head(head: ProjectionHead, path: str | Path) -> None:
    """Write a projection head as JSON: dims, row-major weights, seed, fold."""
    payload = {
        "dim_in": head.dim_in,
        "dim_out": head.dim_out,
        "weight": [float(v) for v in head.weight.reshape(-1)],
        "seed": head.seed,
        "fold": head.fold,
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_head(path: str | Path) -> ProjectionHead:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid model file ({exc})") from None
    try:
        dim_in = int(payload["dim_in"])
        dim_out = int(payload["dim_out"])
        flat = np.asarray(payload["weight"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: invalid model file ({exc})") from None
    if flat.size != dim_in * dim_out:
        raise ValueError(f"{path}: weight has {flat.size} entries, expected {dim_in * dim_out}")
    return ProjectionHead(
        weight=flat.reshape(dim_out, dim_in),
        seed=payload.get("seed"),
        fold=payload.get("fold"),
    )


def save_ensemble(
    ensemble: Ensemble,
    directory: str | Path,
    manifest_name: str = "ensemble.json",
    metadata: Mapping[str, object] | None = None,
) -> Path:
    """Write member model files plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for index, head in enumerate(ensemble.members):
        fold = head.fold if head.fold is not None else index
        name = f"model_fold{fold}.json"
        save_head(head, directory / name)
        names.append(name)
    manifest = {"members": names}
    if metadata:
        manifest.update(metadata)
    manifest_path = directory / manifest_name
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return manifest_path


def load_ensemble(manifest_path: str | Path) -> tuple[Ensemble, dict]:
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{manifest_path}: invalid manifest ({exc})") from None
    names = manifest.get("members")
    if not isinstance(names, list) or not names:
        raise ValueError(f"{manifest_path}: manifest lists no members")
    members = [load_head(manifest_path.parent / name) for name in names]
    return Ensemble(members=members), manifest


class EmbeddingPairScorer:
    """Symmetric pair scorer over objects that carry an ``embedding`` attribute.

    Used for sentence-graph edges, redundancy checks, and dedup. Exposes a
    vectorized ``matrix`` path so O(n^2) scoring stays cheap.
    """

    def __init__(self, heads: ProjectionHead | Ensemble) -> None:
        if isinstance(heads, ProjectionHead):
            heads = Ensemble(members=[heads])
        self.ensemble = heads

    def __call__(self, left, right) -> float:
        for item in (left, right):
            if item.embedding is None:
                raise ValueError(f"candidate {item.id!r} has no embedding")
        return ensemble_score(self.ensemble, left.embedding, right.embedding)

    def matrix(self, items: Sequence) -> np.ndarray:
        """All-pairs score matrix; entry [i, j] matches __call__(items[i], items[j])."""
        for item in items:
            if item.embedding is None:
                raise ValueError(f"candidate {item.id!r} has no embedding")
        stacked = np.stack([np.asarray(item.embedding, dtype=float) for item in items])
        total = np.zeros((len(items), len(items)))
        for head in self.ensemble.members:
            projected = stacked @ head.weight.T
            norms = np.linalg.norm(projected, axis=1)
            if np.any(norms == 0.0):
                bad = items[int(np.argmax(norms == 0.0))]
                raise ValueError(f"candidate {bad.id!r} projects to a zero vector")
            unit = projected / norms[:, None]
            total += 0.5 * (1.0 + np.clip(unit @ unit.T, -1.0, 1.0))
        return total / len(self.ensemble.members)
