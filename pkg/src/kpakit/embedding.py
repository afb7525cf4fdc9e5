"""Embedding contract: lexical hashing encoder, pooling, cosine, exchange IO.

Two embedding sources plug into the rest of the pipeline:

* the built-in lexical encoder, a deterministic seeded character n-gram
  hashing scheme (useful for tests and as a no-dependency baseline), and
* precomputed vectors loaded from the JSONL exchange format, one record per
  line: ``{"id": "<str>", "dim": <int>, "values": [<float>, ...]}``.

Vectors are plain float64 numpy arrays throughout.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .textutil import tokenize

DEFAULT_LEXICAL_DIM = 256
DEFAULT_EXCHANGE_DIM = 768

_KINDS = ("lexical", "precomputed")


@dataclass(frozen=True)
class EncoderConfig:
    kind: str = "lexical"
    dim: int = DEFAULT_LEXICAL_DIM
    ngram_range: tuple[int, int] = (3, 5)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.dim <= 0:
            raise ValueError(f"encoder dim must be positive, got {self.dim}")
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError(f"bad ngram_range {self.ngram_range}")


def mean_pool(matrix: np.ndarray) -> np.ndarray:
    """Column-wise mean of a (tokens x dim) matrix -> a single dim vector."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("mean_pool expects a non-empty 2-D matrix")
    return matrix.mean(axis=0)


def _gram_vector(gram: str, dim: int, seed: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}:{gram}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    return rng.standard_normal(dim)


def _token_vector(token: str, cfg: EncoderConfig) -> np.ndarray:
    lo, hi = cfg.ngram_range
    wrapped = f"<{token}>"
    grams = [wrapped[i:i + n] for n in range(lo, hi + 1) for i in range(len(wrapped) - n + 1)]
    if not grams:
        grams = [wrapped]
    vec = np.zeros(cfg.dim)
    for gram in grams:
        vec += _gram_vector(gram, cfg.dim, cfg.seed)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError(f"token {token!r} hashed to a zero vector")
    return vec / norm


def lexical_encode(text: str, cfg: EncoderConfig | None = None) -> np.ndarray:
    """Encode text into a (tokens x dim) matrix of unit-norm token rows.

    Tokens are lowercased, whitespace-split, and stripped of enclosing
    punctuation; each token row is the L2-normalized sum of seeded-hash
    vectors of its character n-grams. Fully deterministic for a given config.
    """
    cfg = cfg or EncoderConfig()
    if cfg.kind != "lexical":
        raise ValueError(f"lexical_encode requires a lexical config, got {cfg.kind!r}")
    tokens = tokenize(text)
    if not tokens:
        raise ValueError("no tokens to encode (text empty after tokenization)")
    return np.stack([_token_vector(tok, cfg) for tok in tokens])


class LexicalEncoder:
    """Sentence-level convenience wrapper with a token vector cache."""

    def __init__(self, cfg: EncoderConfig | None = None) -> None:
        self.cfg = cfg or EncoderConfig()
        self._token_cache: dict[str, np.ndarray] = {}

    def encode_tokens(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise ValueError("no tokens to encode (text empty after tokenization)")
        rows = []
        for tok in tokens:
            vec = self._token_cache.get(tok)
            if vec is None:
                vec = _token_vector(tok, self.cfg)
                self._token_cache[tok] = vec
            rows.append(vec)
        return np.stack(rows)

    def encode(self, text: str) -> np.ndarray:
        """Mean-pooled sentence vector."""
        return mean_pool(self.encode_tokens(text))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1]; zero vectors are an error."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"cosine expects two equal-length vectors, got {a.shape} and {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    value = float(np.dot(a, b) / (norm_a * norm_b))
    return max(-1.0, min(1.0, value))


def load_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """Load exchange-format JSONL into an id -> vector map.

    Validates per record: id is a non-empty string, dim matches the values
    length and is consistent across the file, all values finite, ids unique.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    file_dim: int | None = None
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON ({exc})") from None
            if not isinstance(record, dict):
                raise ValueError(f"{path}:{line_no}: record is not an object")
            rec_id = record.get("id")
            if not isinstance(rec_id, str) or not rec_id:
                raise ValueError(f"{path}:{line_no}: missing or empty id")
            if rec_id in vectors:
                raise ValueError(f"{path}:{line_no}: duplicate id {rec_id!r}")
            dim = record.get("dim")
            values = record.get("values")
            if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0:
                raise ValueError(f"{path}:{line_no}: id {rec_id!r} has invalid dim {dim!r}")
            if not isinstance(values, list) or len(values) != dim:
                raise ValueError(
                    f"{path}:{line_no}: id {rec_id!r} has {len(values) if isinstance(values, list) else 'no'}"
                    f" values, expected dim={dim}"
                )
            if file_dim is None:
                file_dim = dim
            elif dim != file_dim:
                raise ValueError(f"{path}:{line_no}: id {rec_id!r} has dim {dim}, file uses {file_dim}")
            try:
                vec = np.asarray(values, dtype=float)
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{line_no}: id {rec_id!r} has non-numeric values") from None
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}:{line_no}: id {rec_id!r} contains non-finite values")
            vectors[rec_id] = vec
    return vectors


def save_embeddings(vectors: Mapping[str, np.ndarray], path: str | Path) -> None:
    """Write an id -> vector map in the exchange format.

    Values are serialized in scientific notation with 10 significant digits,
    comfortably above the format's 9-digit floor.
    """
    path = Path(path)
    dims = {np.asarray(v).shape for v in vectors.values()}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector shapes: {sorted(dims)}")
    with open(path, "w", encoding="utf-8") as handle:
        for rec_id, vec in vectors.items():
            arr = np.asarray(vec, dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"id {rec_id!r}: expected a 1-D vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"id {rec_id!r}: refusing to write non-finite values")
            body = ", ".join(format(v, ".9e") for v in arr)
            handle.write(f'{{"id": {json.dumps(rec_id)}, "dim": {arr.size}, "values": [{body}]}}\n')


def embeddings_dim(vectors: Mapping[str, np.ndarray]) -> int:
    if not vectors:
        raise ValueError("empty embedding map")
    return int(next(iter(vectors.values())).shape[0])
