import math

import numpy as np
import pytest

from kpakit.corpus import Argument, KeyPoint, Stance
from kpakit.matcher import (
    DEFAULT_CLAMP_EPSILON,
    EmbeddingPairScorer,
    Ensemble,
    ProjectionHead,
    TrainConfig,
    contrastive_loss,
    ensemble_score,
    load_ensemble,
    load_head,
    loss_and_gradient,
    match_arguments,
    pair_inputs,
    save_ensemble,
    save_head,
    score_pair,
    train_projection,
)


def reference_pair_loss(weight, a, k, y, eps=DEFAULT_CLAMP_EPSILON):
    """Loss recomputed with plain scalar numpy, independent of the module."""
    u = weight @ a
    v = weight @ k
    c = float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
    c = max(-1.0, min(1.0, c))
    s = 0.5 * (1.0 + c)
    s = min(max(s, eps), 1.0 - eps)
    return -(y * math.log(s) + (1.0 - y) * math.log(1.0 - s)), s, c


def test_score_pair_is_rescaled_cosine():
    rng = np.random.default_rng(1)
    head = ProjectionHead.identity(6)
    for _ in range(20):
        a = rng.standard_normal(6)
        k = rng.standard_normal(6)
        c = float(a @ k) / (np.linalg.norm(a) * np.linalg.norm(k))
        assert score_pair(head, a, k) == pytest.approx(0.5 * (1 + c), abs=1e-12)


def test_contrastive_loss_hand_values():
    assert contrastive_loss(0.5, 1.0) == pytest.approx(math.log(2), abs=1e-12)
    assert contrastive_loss(0.5, 0.0) == pytest.approx(math.log(2), abs=1e-12)
    # Perfect confident answers cost ~clamp_epsilon, wrong ones ~ -log(eps).
    assert contrastive_loss(1.0, 1.0) < 1e-6
    assert contrastive_loss(1.0, 0.0) == pytest.approx(-math.log(1e-7), rel=1e-9)
    with pytest.raises(ValueError):
        contrastive_loss(0.5, 0.25)


def test_loss_matches_reference_implementation():
    rng = np.random.default_rng(5)
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        weight = np.eye(dim) + 0.1 * rng.standard_normal((dim, dim))
        a = rng.standard_normal(dim)
        k = rng.standard_normal(dim)
        y = float(rng.integers(0, 2))
        expected, _, _ = reference_pair_loss(weight, a, k, y)
        got, _ = loss_and_gradient(weight, a, k, y)
        assert got == pytest.approx(expected, abs=1e-12)


def finite_difference_gradient(weight, a, k, y, h=1e-5):
    grad = np.zeros_like(weight)
    for i in range(weight.shape[0]):
        for j in range(weight.shape[1]):
            plus = weight.copy()
            minus = weight.copy()
            plus[i, j] += h
            minus[i, j] -= h
            lp, _, _ = reference_pair_loss(plus, a, k, y)
            lm, _, _ = reference_pair_loss(minus, a, k, y)
            grad[i, j] = (lp - lm) / (2 * h)
    return grad


def sample_smooth_trial(rng, eps=DEFAULT_CLAMP_EPSILON):
    """Draw a pair away from the clamp boundary and the |cos|=1 kink so the
    central difference sits on a smooth patch of the loss."""
    while True:
        dim = int(rng.integers(3, 7))
        weight = np.eye(dim) + 0.1 * rng.standard_normal((dim, dim))
        a = rng.standard_normal(dim)
        k = rng.standard_normal(dim)
        y = float(rng.integers(0, 2))
        _, s, c = reference_pair_loss(weight, a, k, y)
        if eps * 10 < s < 1 - eps * 10 and abs(c) < 0.999:
            return weight, a, k, y


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(25):
        weight, a, k, y = sample_smooth_trial(rng)
        _, analytic = loss_and_gradient(weight, a, k, y)
        numeric = finite_difference_gradient(weight, a, k, y)
        scale = max(np.abs(analytic).max(), 1e-8)
        worst = max(worst, np.abs(analytic - numeric).max() / scale)
    assert worst < 1e-4


def test_gradient_zero_inside_clamp_region():
    # A perfectly aligned pair scores 1.0, past the upper clamp; the loss is
    # locally constant there so the gradient must vanish.
    a = np.array([1.0, 0.0])
    _, grad = loss_and_gradient(np.eye(2), a, a, 1.0)
    assert np.all(grad == 0.0)


def test_train_zero_learning_rate_returns_start_weights():
    rng = np.random.default_rng(0)
    pairs = [(rng.standard_normal(4), rng.standard_normal(4), float(rng.integers(0, 2))) for _ in range(8)]
    cfg = TrainConfig(epochs=3, batch_size=4, learning_rate=0.0, seed=9)
    head = train_projection(pairs, cfg)
    expected = np.eye(4) + 0.01 * np.random.default_rng(9).standard_normal((4, 4))
    assert np.allclose(head.weight, expected)


def test_train_reduces_loss_on_separable_pairs():
    rng = np.random.default_rng(3)
    base = rng.standard_normal((2, 8))
    pairs = []
    for _ in range(40):
        which = int(rng.integers(0, 2))
        a = base[which] + 0.2 * rng.standard_normal(8)
        k = base[which] + 0.2 * rng.standard_normal(8)
        pairs.append((a, k, 1.0))
        pairs.append((a, base[1 - which] + 0.2 * rng.standard_normal(8), 0.0))
    history = []
    cfg = TrainConfig(epochs=15, batch_size=16, learning_rate=1.0, seed=0)
    train_projection(pairs, cfg, on_epoch=lambda e, loss: history.append(loss))
    assert history[-1] < history[0]
    assert min(history) < 0.9 * history[0]


def test_train_returns_best_epoch_snapshot():
    rng = np.random.default_rng(11)
    pairs = [(rng.standard_normal(5), rng.standard_normal(5), float(rng.integers(0, 2))) for _ in range(24)]
    history = []
    cfg = TrainConfig(epochs=10, batch_size=8, learning_rate=5.0, seed=2)
    head = train_projection(pairs, cfg, on_epoch=lambda e, loss: history.append(loss))
    a = np.stack([p[0] for p in pairs])
    k = np.stack([p[1] for p in pairs])
    returned_loss = np.mean([
        reference_pair_loss(head.weight, a[i], k[i], pairs[i][2])[0] for i in range(len(pairs))
    ])
    assert returned_loss == pytest.approx(min(history), abs=1e-10)


def test_train_is_deterministic():
    rng = np.random.default_rng(4)
    pairs = [(rng.standard_normal(4), rng.standard_normal(4), float(rng.integers(0, 2))) for _ in range(12)]
    cfg = TrainConfig(epochs=4, batch_size=4, learning_rate=0.5, seed=7)
    first = train_projection(pairs, cfg)
    second = train_projection(pairs, cfg)
    assert np.array_equal(first.weight, second.weight)


def test_pair_inputs_contract():
    arg = Argument("a1", "Dogs reduce stress.", "Pets are good", Stance.PRO)
    kp = KeyPoint("k1", "Pets improve health", "Pets are good", Stance.PRO)
    left, right = pair_inputs(arg, kp)
    assert left == "Dogs reduce stress."
    assert right == "Pets are good Pets improve health"
    other = KeyPoint("k2", "text", "Different topic", Stance.PRO)
    with pytest.raises(ValueError):
        pair_inputs(arg, other)


def test_match_arguments_against_brute_force():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n_args = int(rng.integers(1, 6))
        n_kps = int(rng.integers(1, 5))
        scores = {}
        for i in range(n_args):
            for j in range(n_kps):
                # Coarse grid of score values makes ties frequent.
                scores[(f"a{i}", f"kp{j}")] = float(rng.integers(0, 4)) / 4.0
        best = match_arguments(scores)
        for i in range(n_args):
            arg_id = f"a{i}"
            top_score = max(scores[(arg_id, f"kp{j}")] for j in range(n_kps))
            tied = sorted(f"kp{j}" for j in range(n_kps) if scores[(arg_id, f"kp{j}")] == top_score)
            assert best[arg_id] == (tied[0], top_score)


def test_head_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    head = ProjectionHead(weight=rng.standard_normal((3, 3)), seed=6, fold=2)
    path = tmp_path / "head.json"
    save_head(head, path)
    loaded = load_head(path)
    assert np.array_equal(loaded.weight, head.weight)
    assert loaded.seed == 6 and loaded.fold == 2


def test_ensemble_save_load_and_mean_score(tmp_path):
    heads = [ProjectionHead.identity(3), ProjectionHead(weight=2.0 * np.eye(3), fold=1)]
    ensemble = Ensemble(members=heads)
    manifest = save_ensemble(ensemble, tmp_path / "models", metadata={"note": "fixture"})
    loaded, meta = load_ensemble(manifest)
    assert len(loaded.members) == 2
    assert meta["note"] == "fixture"
    a = np.array([1.0, 0.0, 0.5])
    k = np.array([0.2, 1.0, 0.0])
    expected = (score_pair(heads[0], a, k) + score_pair(heads[1], a, k)) / 2
    assert ensemble_score(loaded, a, k) == pytest.approx(expected, abs=1e-12)


def test_ensemble_rejects_mixed_dims():
    with pytest.raises(ValueError):
        Ensemble(members=[ProjectionHead.identity(2), ProjectionHead.identity(3)])


class _Item:
    def __init__(self, id, embedding):
        self.id = id
        self.embedding = embedding


def test_scorer_matrix_matches_pairwise_calls():
    rng = np.random.default_rng(10)
    head = ProjectionHead(weight=np.eye(4) + 0.05 * rng.standard_normal((4, 4)))
    scorer = EmbeddingPairScorer(head)
    items = [_Item(f"s{i}", rng.standard_normal(4)) for i in range(6)]
    matrix = scorer.matrix(items)
    for i in range(6):
        for j in range(6):
            assert matrix[i, j] == pytest.approx(scorer(items[i], items[j]), abs=1e-12)


def test_scorer_requires_embeddings():
    scorer = EmbeddingPairScorer(ProjectionHead.identity(2))
    with pytest.raises(ValueError, match="no embedding"):
        scorer(_Item("x", None), _Item("y", np.ones(2)))
