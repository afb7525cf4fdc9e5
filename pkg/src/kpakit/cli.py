"""Command line entry points: train, match, generate, evaluate.

All commands are deterministic given their inputs and ``--seed``. Outputs
embed the run configuration: generated CSVs carry ``#`` metadata header
lines, model manifests and evaluation reports embed a config block, and
prediction JSON (whose schema is fixed as a plain id->id->score map) gets a
``<out>.meta.json`` sidecar instead.

Relative input paths that do not exist are retried against the directory in
the ``KPAKIT_DATA_DIR`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import evalkit, kp_aspect, kp_graph, matcher
from .corpus import Argument, CorpusError, Dataset, KeyPoint, MatchLabel, Stance, load_dataset
from .embedding import EncoderConfig, LexicalEncoder, embeddings_dim, load_embeddings
from .kp_graph import GeneratedKeyPoint, RankParams, SentenceCandidate

logger = logging.getLogger(__name__)

ENV_DATA_DIR = "KPAKIT_DATA_DIR"
REFERENCE_STRICT_MAP = 0.789
REFERENCE_RELAXED_MAP = 0.927


def resolve_input(raw: str) -> Path:
    """Resolve an input path, falling back to $KPAKIT_DATA_DIR for relative ones."""
    path = Path(raw)
    if path.exists() or path.is_absolute():
        return path
    base = os.environ.get(ENV_DATA_DIR)
    if base:
        alt = Path(base) / path
        if alt.exists():
            return alt
    return path


@dataclass
class VectorSource:
    """Uniform access to sentence vectors: lexical encoder or precomputed file."""

    kind: str
    dim: int
    encoder: Optional[LexicalEncoder] = None
    table: Optional[dict[str, np.ndarray]] = None
    path: Optional[str] = None

    def by_text(self, text: str) -> np.ndarray:
        if self.encoder is None:
            raise ValueError("precomputed embeddings cannot encode new text; use the lexical encoder")
        return self.encoder.encode(text)

    def by_id(self, item_id: str, text: str) -> np.ndarray:
        if self.table is not None:
            vec = self.table.get(item_id)
            if vec is None:
                raise ValueError(f"no embedding for id {item_id!r} in {self.path}")
            return vec
        return self.by_text(text)

    def describe(self) -> dict:
        if self.table is not None:
            return {"kind": "precomputed", "dim": self.dim, "path": self.path}
        cfg = self.encoder.cfg
        return {"kind": "lexical", "dim": cfg.dim, "ngram_range": list(cfg.ngram_range), "seed": cfg.seed}


def make_vector_source(args: argparse.Namespace) -> VectorSource:
    if args.embeddings or args.encoder == "precomputed":
        if not args.embeddings:
            raise ValueError("--encoder precomputed requires --embeddings <jsonl>")
        path = resolve_input(args.embeddings)
        table = load_embeddings(path)
        return VectorSource(kind="precomputed", dim=embeddings_dim(table), table=table, path=str(path))
    cfg = EncoderConfig(kind="lexical", dim=args.dim, seed=args.encoder_seed)
    return VectorSource(kind="lexical", dim=cfg.dim, encoder=LexicalEncoder(cfg))


def load_scorer_heads(args: argparse.Namespace, dim: int) -> tuple[matcher.Ensemble, str]:
    if getattr(args, "model", None):
        ensemble, _ = matcher.load_ensemble(resolve_input(args.model))
        if ensemble.members[0].dim_in != dim:
            raise ValueError(
                f"model expects {ensemble.members[0].dim_in}-dim embeddings, source provides {dim}"
            )
        return ensemble, str(args.model)
    logger.info("no --model given; scoring with the identity projection")
    return matcher.Ensemble(members=[matcher.ProjectionHead.identity(dim)]), "identity"


def write_meta(out_path: Path, meta: dict) -> None:
    sidecar = out_path.with_name(out_path.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")


def kp_input_text(kp: KeyPoint) -> str:
    """Key point encoder input: topic, a space, then the key point text."""
    return f"{kp.topic} {kp.text}"


# ---------------------------------------------------------------------------
# train

def cmd_train(args: argparse.Namespace) -> int:
    data = load_dataset(
        resolve_input(args.arguments), resolve_input(args.key_points), resolve_input(args.labels)
    )
    if not data.pairs:
        raise ValueError("training requires a labels file with at least one pair")
    topics = sorted({a.topic for a in data.arguments})
    if args.folds < 1:
        raise ValueError("--folds must be >= 1")
    if args.folds > len(topics):
        raise ValueError(f"cannot build {args.folds} folds from {len(topics)} topic(s)")
    rng = np.random.default_rng(args.seed)
    shuffled = [topics[i] for i in rng.permutation(len(topics))]
    folds = [sorted(shuffled[i::args.folds]) for i in range(args.folds)]

    source = make_vector_source(args)
    args_by_id = data.argument_by_id()
    kps_by_id = data.key_point_by_id()
    arg_vecs = {a.id: source.by_id(a.id, a.text) for a in data.arguments}
    kp_vecs = {k.id: source.by_id(k.id, kp_input_text(k)) for k in data.key_points}

    heads: list[matcher.ProjectionHead] = []
    losses: dict[str, list[float]] = {}
    for fold_index, held_out in enumerate(folds):
        if args.folds == 1:
            train_topics = set(topics)
        else:
            train_topics = set(topics) - set(held_out)
        triples: list[matcher.TrainingPair] = []
        for pair in data.pairs:
            if pair.label is MatchLabel.AMBIGUOUS:
                continue
            if args_by_id[pair.argument_id].topic not in train_topics:
                continue
            label = 1.0 if pair.label is MatchLabel.MATCH else 0.0
            triples.append((arg_vecs[pair.argument_id], kp_vecs[pair.key_point_id], label))
        if not triples:
            raise ValueError(f"fold {fold_index}: no unambiguous training pairs outside held-out topics")
        history: list[float] = []
        cfg = matcher.TrainConfig(
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            seed=args.seed + fold_index,
        )
        head = matcher.train_projection(triples, cfg, on_epoch=lambda e, l, h=history: h.append(l))
        head.fold = fold_index
        heads.append(head)
        losses[f"fold{fold_index}"] = history
        logger.info(
            "[train] fold %d: %d pairs, loss %.6f -> %.6f",
            fold_index, len(triples), history[0], min(history),
        )

    out_dir = Path(args.out_dir)
    metadata = {
        "command": "train",
        "seed": args.seed,
        "folds": folds,
        "encoder": source.describe(),
        "train": {"epochs": args.epochs, "batch_size": args.batch_size, "learning_rate": args.learning_rate},
    }
    manifest_path = matcher.save_ensemble(matcher.Ensemble(members=heads), out_dir, metadata=metadata)
    (out_dir / "train_log.json").write_text(
        json.dumps({"epoch_mean_loss": losses}, indent=2, sort_keys=True), encoding="utf-8"
    )
    logger.info("[train] wrote %s", manifest_path)
    return 0


# ---------------------------------------------------------------------------
# match

def cmd_match(args: argparse.Namespace) -> int:
    data = load_dataset(resolve_input(args.arguments), resolve_input(args.key_points))
    source = make_vector_source(args)
    ensemble, model_name = load_scorer_heads(args, source.dim)

    kps_by_group: dict[tuple[str, Stance], list[KeyPoint]] = {}
    for kp in data.key_points:
        kps_by_group.setdefault((kp.topic, kp.stance), []).append(kp)
    kp_vecs = {k.id: source.by_id(k.id, kp_input_text(k)) for k in data.key_points}

    scores: dict[str, dict[str, float]] = {}
    for argument in data.arguments:
        candidates = kps_by_group.get((argument.topic, argument.stance), [])
        if not candidates:
            raise ValueError(
                f"argument {argument.id!r} has no key points for topic {argument.topic!r}"
                f" stance {argument.stance.value}"
            )
        arg_vec = source.by_id(argument.id, argument.text)
        scores[argument.id] = {
            kp.id: matcher.ensemble_score(ensemble, arg_vec, kp_vecs[kp.id]) for kp in candidates
        }

    out_path = Path(args.out)
    out_path.write_text(json.dumps(scores, indent=2), encoding="utf-8")
    write_meta(out_path, {
        "command": "match",
        "seed": args.seed,
        "model": model_name,
        "encoder": source.describe(),
        "arguments": str(args.arguments),
        "key_points": str(args.key_points),
    })
    logger.info("[match] scored %d arguments -> %s", len(scores), out_path)
    return 0


# ---------------------------------------------------------------------------
# generate

def _load_quality_sidecar(path: Path) -> dict[str, float]:
    import csv as _csv

    table: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = _csv.DictReader(handle)
        if not {"sentence_id", "quality"} <= set(reader.fieldnames or ()):
            raise CorpusError(f"{path}: expected columns sentence_id,quality")
        for row_no, row in enumerate(reader, start=2):
            sid = (row.get("sentence_id") or "").strip()
            raw = (row.get("quality") or "").strip()
            if not sid:
                raise CorpusError(f"{path}:{row_no}: empty sentence_id")
            if sid in table:
                raise CorpusError(f"{path}:{row_no}: duplicate sentence_id {sid!r}")
            try:
                value = float(raw)
            except ValueError:
                raise CorpusError(f"{path}:{row_no}: invalid quality {raw!r}") from None
            if not 0.0 <= value <= 1.0:
                raise CorpusError(f"{path}:{row_no}: quality {value} outside [0, 1]")
            table[sid] = value
    return table


def _apply_quality(candidates: list[SentenceCandidate], table: dict[str, float]) -> None:
    # Sidecar rows may key by candidate id or by exact sentence text.
    for candidate in candidates:
        value = table.get(candidate.id)
        if value is None:
            value = table.get(candidate.text)
        if value is not None:
            candidate.quality = value


def _attach_embeddings(candidates: list[SentenceCandidate], source: VectorSource) -> None:
    for candidate in candidates:
        candidate.embedding = source.by_id(candidate.id, candidate.text)


def _backfill(
    final: list[SentenceCandidate],
    pool: Sequence[SentenceCandidate],
    order_key,
    k_min: int,
) -> list[SentenceCandidate]:
    if len(final) >= k_min:
        return final
    chosen = {c.id for c in final}
    for candidate in sorted(pool, key=order_key):
        if len(final) >= k_min:
            break
        if candidate.id not in chosen:
            final.append(candidate)
            chosen.add(candidate.id)
    return final


def _generate_graph_group(
    candidates: list[SentenceCandidate],
    scorer: matcher.EmbeddingPairScorer,
    params: RankParams,
) -> list[tuple[SentenceCandidate, float]]:
    graph = kp_graph.build_graph(candidates, scorer, params)
    if not graph.nodes:
        raise ValueError("no candidates left after quality filtering")
    result = kp_graph.rank(graph, params)
    selected = kp_graph.select_key_points(result, graph, scorer, params)
    return [(c, result.scores[c.id]) for c in selected]


def _generate_aspect_group(
    candidates: list[SentenceCandidate],
    aspects: list[kp_aspect.AspectPhrase],
    scorer: matcher.EmbeddingPairScorer,
    source: VectorSource,
    params: RankParams,
    clusters_k: int,
    dedup_threshold: float,
    seed: int,
) -> list[tuple[SentenceCandidate, float]]:
    if aspects:
        for aspect in aspects:
            if aspect.embedding is None:
                aspect.embedding = source.by_id(aspect.text, aspect.text)
        clusters = kp_aspect.cluster_aspects(aspects, k=clusters_k, seed=seed)
        mapping = kp_aspect.map_candidates_to_clusters(candidates, clusters)
        picked = kp_aspect.greedy_select(candidates, clusters, mapping, k_max=params.k_max)
        deduped = kp_aspect.dedup(picked, scorer, dedup_threshold)
        total = max(1, len(clusters))
        coverage = {cid: len(mapping.get(cid, set())) for cid in (c.id for c in candidates)}
    else:
        logger.warning("[generate] no aspects in group; falling back to id-ordered candidates")
        mapping = {}
        deduped = []
        total = 1
        coverage = {c.id: 0 for c in candidates}
    final = list(deduped)[:params.k_max]
    final = _backfill(final, candidates, lambda c: (-coverage.get(c.id, 0), c.id), min(params.k_min, len(candidates)))
    return [(c, coverage.get(c.id, 0) / total) for c in final]


def cmd_generate(args: argparse.Namespace) -> int:
    arguments_path = resolve_input(args.arguments)
    from .corpus import load_arguments

    arguments = load_arguments(arguments_path)
    data = Dataset(arguments=arguments, key_points=(), pairs=())
    source = make_vector_source(args)
    ensemble, model_name = load_scorer_heads(args, source.dim)
    scorer = matcher.EmbeddingPairScorer(ensemble)
    params = RankParams(
        d=args.d,
        quality_threshold=args.quality_threshold,
        match_threshold=args.match_threshold,
        redundancy_threshold=args.redundancy_threshold,
        max_iters=args.max_iters,
        tol=args.tol,
        k_min=args.k_min,
        k_max=args.k_max,
    )
    quality_table = _load_quality_sidecar(resolve_input(args.quality_csv)) if args.quality_csv else {}
    all_aspects = (
        kp_aspect.acquire_aspects(data, resolve_input(args.aspects_csv) if args.aspects_csv else None)
        if args.generator == "aspect"
        else []
    )

    groups: dict[tuple[str, Stance], list[Argument]] = {}
    for argument in arguments:
        groups.setdefault((argument.topic, argument.stance), []).append(argument)
    group_keys = sorted(groups, key=lambda g: (g[0], g[1].value))

    def run_group(key: tuple[str, Stance]):
        topic, stance = key
        candidates = kp_graph.split_and_filter(groups[key])
        if not candidates:
            raise ValueError("no sentence candidates after filtering")
        if quality_table:
            _apply_quality(candidates, quality_table)
        _attach_embeddings(candidates, source)
        if args.generator == "graph":
            return _generate_graph_group(candidates, scorer, params)
        group_arg_ids = {a.id for a in groups[key]}
        aspects = [a for a in all_aspects if a.source_arg_id in group_arg_ids]
        return _generate_aspect_group(
            candidates, aspects, scorer, source, params, args.clusters, args.dedup_threshold, args.seed
        )

    results: dict[tuple[str, Stance], list[tuple[SentenceCandidate, float]]] = {}
    failures: dict[tuple[str, Stance], str] = {}
    max_workers = max(1, min(args.workers, len(group_keys)))
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {key: pool.submit(run_group, key) for key in group_keys}
        for key, future in futures.items():
            try:
                results[key] = future.result()
            except ValueError as exc:
                failures[key] = str(exc)
                logger.warning("[generate] group (%s, %s) failed: %s", key[0], key[1].value, exc)

    rows: list[GeneratedKeyPoint] = []
    for key in group_keys:
        if key not in results:
            continue
        topic, stance = key
        picked = results[key]
        ids = kp_graph.generated_ids(topic, stance, len(picked))
        for kp_id, (candidate, score) in zip(ids, picked):
            rows.append(GeneratedKeyPoint(id=kp_id, text=candidate.text, topic=topic, stance=stance, score=score))

    metadata: list[tuple[str, object]] = [
        ("command", "generate"),
        ("generator", args.generator),
        ("seed", args.seed),
        ("model", model_name),
        ("encoder", json.dumps(source.describe(), sort_keys=True)),
        ("d", params.d),
        ("quality_threshold", params.quality_threshold),
        ("match_threshold", params.match_threshold),
        ("redundancy_threshold", params.redundancy_threshold),
        ("clusters", args.clusters),
        ("dedup_threshold", args.dedup_threshold),
        ("k_min", params.k_min),
        ("k_max", params.k_max),
        ("group_failures", len(failures)),
    ]
    if args.generator == "aspect" and arguments:
        metadata.append(("aspects_per_argument", round(len(all_aspects) / len(arguments), 3)))
    for (topic, stance), reason in sorted(failures.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        metadata.append(("failed_group", f"{topic}/{stance.value}: {reason}"))
    kp_graph.write_key_points_csv(rows, args.out, metadata)
    logger.info(
        "[generate] wrote %d key points for %d group(s) (%d failed) -> %s",
        len(rows), len(results), len(failures), args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# evaluate

def _predictions_to_sets(
    raw: dict, gold: Dataset
) -> list[evalkit.PredictionSet]:
    if not isinstance(raw, dict) or not raw:
        raise ValueError("predictions file must map arg ids to {key point id: score}")
    args_by_id = gold.argument_by_id()
    flat: dict[tuple[str, str], float] = {}
    for arg_id, kp_scores in raw.items():
        if arg_id not in args_by_id:
            raise ValueError(f"prediction references unknown argument {arg_id!r}")
        if not isinstance(kp_scores, dict) or not kp_scores:
            raise ValueError(f"argument {arg_id!r} has no candidate scores")
        for kp_id, value in kp_scores.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"non-numeric score for pair ({arg_id!r}, {kp_id!r})")
            flat[(arg_id, kp_id)] = float(value)
    best = matcher.match_arguments(flat)
    by_group: dict[tuple[str, Stance], list[tuple[str, str, float]]] = {}
    for arg_id in sorted(best):
        kp_id, score = best[arg_id]
        argument = args_by_id[arg_id]
        by_group.setdefault((argument.topic, argument.stance), []).append((arg_id, kp_id, score))
    return [
        evalkit.PredictionSet(topic=topic, stance=stance, entries=tuple(entries))
        for (topic, stance), entries in sorted(by_group.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
    ]


def _group_key(topic: str, stance: Stance) -> str:
    return f"{topic}/{'pro' if stance is Stance.PRO else 'con'}"


def cmd_evaluate(args: argparse.Namespace) -> int:
    if not args.predictions and not args.generated:
        raise ValueError("nothing to evaluate: pass --predictions and/or --generated")
    gold = load_dataset(
        resolve_input(args.arguments), resolve_input(args.key_points), resolve_input(args.labels)
    )
    report: dict = {
        "config": {
            "command": "evaluate",
            "keep_fraction": args.keep_fraction,
            "tokenizer": "whitespace-punctuation-lower",
            "arguments": str(args.arguments),
            "key_points": str(args.key_points),
            "labels": str(args.labels),
            "predictions": str(args.predictions) if args.predictions else None,
            "generated": str(args.generated) if args.generated else None,
        }
    }
    if args.predictions:
        raw = json.loads(Path(resolve_input(args.predictions)).read_text(encoding="utf-8"))
        prediction_sets = _predictions_to_sets(raw, gold)
        aggregate = evalkit.strict_relaxed_map(prediction_sets, gold, args.keep_fraction)
        per_group = {}
        for pset in prediction_sets:
            result = evalkit.group_average_precision(pset, gold, args.keep_fraction)
            per_group[_group_key(pset.topic, pset.stance)] = {
                "strict_ap": result.strict,
                "relaxed_ap": result.relaxed,
                "kept": result.kept_count,
            }
        report["matching"] = {
            "strict_map": aggregate.strict,
            "relaxed_map": aggregate.relaxed,
            "kept_pairs": aggregate.kept_count,
            "per_group": per_group,
            "reference": {
                "strict_map": args.reference_strict_map,
                "relaxed_map": args.reference_relaxed_map,
                "strict_map_delta": aggregate.strict - args.reference_strict_map,
                "relaxed_map_delta": aggregate.relaxed - args.reference_relaxed_map,
            },
        }
    if args.generated:
        rows = evalkit.read_generated_csv(resolve_input(args.generated))
        grouped: dict[tuple[str, Stance], list[str]] = {}
        for row in rows:
            grouped.setdefault((row["topic"], row["stance"]), []).append(row["text"])
        aggregate_rouge, per_group_rouge = evalkit.generation_rouge(grouped, gold)
        report["generation"] = {
            "rouge1_f1": aggregate_rouge.rouge1,
            "rouge2_f1": aggregate_rouge.rouge2,
            "rougeL_f1": aggregate_rouge.rougeL,
            "per_group": {
                _group_key(topic, stance): {
                    "rouge1_f1": score.rouge1,
                    "rouge2_f1": score.rouge2,
                    "rougeL_f1": score.rougeL,
                }
                for (topic, stance), score in sorted(per_group_rouge.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
            },
        }
    out_path = Path(args.out)
    out_path.write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    if "matching" in report:
        m = report["matching"]
        logger.info(
            "[evaluate] strict mAP %.4f (reference %.3f, delta %+.4f), relaxed mAP %.4f",
            m["strict_map"], m["reference"]["strict_map"], m["reference"]["strict_map_delta"], m["relaxed_map"],
        )
    if "generation" in report:
        g = report["generation"]
        logger.info(
            "[evaluate] ROUGE-1 %.4f, ROUGE-2 %.4f, ROUGE-L %.4f",
            g["rouge1_f1"], g["rouge2_f1"], g["rougeL_f1"],
        )
    logger.info("[evaluate] wrote %s", out_path)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_corpus_flags(parser: argparse.ArgumentParser, labels: bool, key_points: bool = True) -> None:
    parser.add_argument("--arguments", required=True, help="arguments CSV (arg_id,argument,topic,stance[,quality])")
    if key_points:
        parser.add_argument("--key-points", required=True, help="key points CSV (key_point_id,key_point,topic,stance)")
    if labels:
        parser.add_argument("--labels", required=True, help="labels CSV (arg_id,key_point_id,label[,ambiguous])")


def _add_encoder_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--encoder", choices=("lexical", "precomputed"), default="lexical",
                        help="embedding source (default: lexical)")
    parser.add_argument("--dim", type=int, default=256, help="lexical encoder dimension (default: 256)")
    parser.add_argument("--encoder-seed", type=int, default=0, help="lexical encoder hashing seed (default: 0)")
    parser.add_argument("--embeddings", default=None,
                        help="precomputed embeddings JSONL; implies --encoder precomputed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpakit",
        description="Match arguments to key points and generate key points from argument collections.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a projection-head matcher ensemble")
    _add_corpus_flags(p_train, labels=True)
    _add_encoder_flags(p_train)
    p_train.add_argument("--folds", type=int, default=5, help="cross-validation folds over topics (default: 5)")
    p_train.add_argument("--epochs", type=int, default=10)
    p_train.add_argument("--batch-size", type=int, default=32)
    p_train.add_argument("--learning-rate", type=float, default=0.5)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out-dir", required=True, help="directory for model files and the ensemble manifest")
    p_train.set_defaults(func=cmd_train)

    p_match = sub.add_parser("match", help="score arguments against same-topic same-stance key points")
    _add_corpus_flags(p_match, labels=False)
    _add_encoder_flags(p_match)
    p_match.add_argument("--model", default=None, help="ensemble manifest from train (default: identity projection)")
    p_match.add_argument("--seed", type=int, default=0)
    p_match.add_argument("--out", required=True, help="output predictions JSON")
    p_match.set_defaults(func=cmd_match)

    p_gen = sub.add_parser("generate", help="generate key points per topic-stance group")
    p_gen.add_argument("--arguments", required=True)
    _add_encoder_flags(p_gen)
    p_gen.add_argument("--generator", choices=("graph", "aspect"), default="graph")
    p_gen.add_argument("--model", default=None, help="ensemble manifest for pair scoring (default: identity)")
    p_gen.add_argument("--d", type=float, default=0.2, help="quality-prior weight in the rank fixed point")
    p_gen.add_argument("--quality-threshold", type=float, default=0.8)
    p_gen.add_argument("--match-threshold", type=float, default=0.4)
    p_gen.add_argument("--redundancy-threshold", type=float, default=0.8)
    p_gen.add_argument("--clusters", type=int, default=15, help="aspect clusters per group (default: 15)")
    p_gen.add_argument("--dedup-threshold", type=float, default=0.65)
    p_gen.add_argument("--k-min", type=int, default=5)
    p_gen.add_argument("--k-max", type=int, default=10)
    p_gen.add_argument("--max-iters", type=int, default=100)
    p_gen.add_argument("--tol", type=float, default=1e-8)
    p_gen.add_argument("--quality-csv", default=None, help="sentence quality sidecar (sentence_id,quality)")
    p_gen.add_argument("--aspects-csv", default=None, help="aspect phrases CSV (arg_id,aspect)")
    p_gen.add_argument("--workers", type=int, default=4, help="worker threads across groups (default: 4)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output key points CSV")
    p_gen.set_defaults(func=cmd_generate)

    p_eval = sub.add_parser("evaluate", help="score predictions (mAP) and/or generated key points (ROUGE)")
    _add_corpus_flags(p_eval, labels=True)
    p_eval.add_argument("--predictions", default=None, help="predictions JSON from match")
    p_eval.add_argument("--generated", default=None, help="generated key points CSV from generate")
    p_eval.add_argument("--keep-fraction", type=float, default=evalkit.DEFAULT_KEEP_FRACTION)
    p_eval.add_argument("--reference-strict-map", type=float, default=REFERENCE_STRICT_MAP,
                        help="reference strict mAP to report a delta against")
    p_eval.add_argument("--reference-relaxed-map", type=float, default=REFERENCE_RELAXED_MAP,
                        help="reference relaxed mAP to report a delta against")
    p_eval.add_argument("--out", required=True, help="output report JSON")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except (CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
