"""Key point analysis toolkit: match arguments to key points and generate
key point sets from raw argument collections."""

from .corpus import (
    Argument,
    CorpusError,
    Dataset,
    KeyPoint,
    LabeledPair,
    MatchLabel,
    Split,
    Stance,
    StatisticsReport,
    dataset_stats,
    load_dataset,
    save_dataset,
    split_by_topics,
)
from .embedding import (
    EncoderConfig,
    LexicalEncoder,
    cosine,
    lexical_encode,
    load_embeddings,
    mean_pool,
    save_embeddings,
)
from .evalkit import (
    APResult,
    PredictionSet,
    RougeScore,
    average_precision,
    evaluate_generation,
    generation_rouge,
    group_average_precision,
    rouge_l,
    rouge_n,
    strict_relaxed_map,
)
from .kp_aspect import (
    AspectCluster,
    AspectPhrase,
    acquire_aspects,
    cluster_aspects,
    dedup,
    extract_aspect_phrases,
    greedy_select,
    map_candidates_to_clusters,
)
from .kp_graph import (
    GeneratedKeyPoint,
    KPGraph,
    RankParams,
    RankResult,
    SentenceCandidate,
    build_graph,
    generated_ids,
    rank,
    select_key_points,
    split_and_filter,
    write_key_points_csv,
)
from .matcher import (
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
from .textutil import split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "APResult",
    "Argument",
    "AspectCluster",
    "AspectPhrase",
    "CorpusError",
    "Dataset",
    "EmbeddingPairScorer",
    "EncoderConfig",
    "Ensemble",
    "GeneratedKeyPoint",
    "KPGraph",
    "KeyPoint",
    "LabeledPair",
    "LexicalEncoder",
    "MatchLabel",
    "PredictionSet",
    "ProjectionHead",
    "RankParams",
    "RankResult",
    "RougeScore",
    "SentenceCandidate",
    "Split",
    "Stance",
    "StatisticsReport",
    "TrainConfig",
    "acquire_aspects",
    "average_precision",
    "build_graph",
    "cluster_aspects",
    "contrastive_loss",
    "cosine",
    "dataset_stats",
    "dedup",
    "ensemble_score",
    "evaluate_generation",
    "extract_aspect_phrases",
    "generated_ids",
    "generation_rouge",
    "greedy_select",
    "group_average_precision",
    "lexical_encode",
    "load_dataset",
    "load_embeddings",
    "load_ensemble",
    "load_head",
    "loss_and_gradient",
    "map_candidates_to_clusters",
    "match_arguments",
    "mean_pool",
    "pair_inputs",
    "rank",
    "rouge_l",
    "rouge_n",
    "save_dataset",
    "save_embeddings",
    "save_ensemble",
    "save_head",
    "score_pair",
    "select_key_points",
    "split_and_filter",
    "split_by_topics",
    "split_sentences",
    "strict_relaxed_map",
    "tokenize",
    "train_projection",
    "write_key_points_csv",
]
