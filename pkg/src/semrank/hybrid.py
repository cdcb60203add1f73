"""Blend direct vector similarity with graph diffusion mass into one ranking.

The blended score of an item ``v`` for query ``q`` is

    score(v) = (1 - beta) * cos(v, q) + beta * ppr_mass(v)

``beta = 0`` is plain similarity ranking, ``beta = 1`` ranks purely by
diffusion.  Scores of the two channels live on different scales (cosine in
[-1, 1], diffusion mass in [0, 1] summing to 1); they are blended raw by
default, with optional min-max rescaling of the graph channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .candidates import CandidatePool
from .geometry import EmbeddingVector, cosine_similarity
from .graph import PprConfig, SeedVector, SemanticGraph, normalize_adjacency, personalized_pagerank

METHOD_TAGS = ("topk_ann", "semantic_compression", "graph_ppr", "hybrid")


@dataclass(frozen=True)
class HybridConfig:
    """Blend weight, result size, and optional graph-score rescaling."""

    beta: float
    k: int
    rescale_graph: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            msg = f"beta must lie in [0, 1], got {self.beta}"
            raise ValueError(msg)
        if self.k < 1:
            msg = f"result size k must be >= 1, got {self.k}"
            raise ValueError(msg)


@dataclass(frozen=True)
class RetrievalResult:
    """One method's ranked output plus its evaluation metrics.

    ``items`` pairs item ids with the scores that ranked them; ids are
    distinct.  ``relevance`` and ``diversity`` are recomputable from the item
    list via :func:`relevance_metric` and :func:`diversity_metric`
    (``diversity`` is reported as 0 for single-item results, where the
    pairwise metric is undefined).
    """

    method: str
    items: tuple[tuple[str, float], ...]
    relevance: float
    diversity: float

    def __post_init__(self) -> None:
        if self.method not in METHOD_TAGS:
            msg = f"unknown method tag {self.method!r}"
            raise ValueError(msg)
        ids = [item_id for item_id, _ in self.items]
        if len(ids) != len(set(ids)):
            msg = "result items contain duplicate ids"
            raise ValueError(msg)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(item_id for item_id, _ in self.items)


def vec_score(vector: EmbeddingVector, query: EmbeddingVector) -> float:
    """Direct channel: cosine similarity to the query."""
    return cosine_similarity(vector, query)


def graph_score(ppr: Sequence[tuple[str, float]], item_id: str) -> float:
    """Diffusion channel: pagerank mass of ``item_id``, 0 when absent."""
    for node_id, score in ppr:
        if node_id == item_id:
            return float(score)
    return 0.0


def hybrid_score(
    item_id: str,
    query: EmbeddingVector,
    ppr: Sequence[tuple[str, float]],
    config: HybridConfig,
    embeddings: Mapping[str, EmbeddingVector],
) -> float:
    """Blend both channels for one item; the id must resolve to an embedding."""
    if item_id not in embeddings:
        msg = f"unknown item {item_id!r}"
        raise ValueError(msg)
    direct = vec_score(embeddings[item_id], query)
    diffusion = graph_score(ppr, item_id)
    return (1.0 - config.beta) * direct + config.beta * diffusion


def _method_tag(beta: float) -> str:
    if beta == 0.0:
        return "topk_ann"
    if beta == 1.0:
        return "graph_ppr"
    return "hybrid"


def rank_hybrid(
    pool: CandidatePool,
    graph: SemanticGraph,
    seed: SeedVector,
    ppr_config: PprConfig,
    config: HybridConfig,
) -> RetrievalResult:
    """Score the pool plus its graph out-neighbours and keep the top k.

    The graph must cover every pool node.  Neighbours outside the pool are
    scored from their stored embeddings, not defaulted, so a strong graph
    signal can promote an item the first stage missed.  Ordering is by
    descending blended score with exact ties broken by ascending id.
    """
    for item_id in pool.ids:
        if item_id not in graph.by_id:
            msg = f"pool item {item_id!r} is missing from the graph"
            raise ValueError(msg)
    scope = set(pool.ids)
    for item_id in pool.ids:
        scope.update(graph.out_neighbors(item_id))
    if config.k > len(scope):
        msg = f"result size {config.k} exceeds scored scope of {len(scope)} items"
        raise ValueError(msg)

    ppr = personalized_pagerank(normalize_adjacency(graph), seed, ppr_config)
    mass = dict(ppr)
    graph_raw = {item_id: mass.get(item_id, 0.0) for item_id in scope}
    if config.rescale_graph:
        low = min(graph_raw.values())
        high = max(graph_raw.values())
        span = high - low
        if span > 0.0:
            graph_raw = {item_id: (value - low) / span for item_id, value in graph_raw.items()}
        else:
            graph_raw = {item_id: 0.0 for item_id in graph_raw}

    embeddings: dict[str, EmbeddingVector] = dict(graph.by_id)
    for vector in pool.candidates:
        embeddings.setdefault(vector.id, vector)

    scored: list[tuple[str, float]] = []
    for item_id in scope:
        direct = vec_score(embeddings[item_id], pool.query)
        blended = (1.0 - config.beta) * direct + config.beta * graph_raw[item_id]
        scored.append((item_id, blended))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    top = tuple(scored[: config.k])
    return build_result(_method_tag(config.beta), top, embeddings, pool.query)


def relevance_metric(
    item_ids: Sequence[str],
    query: EmbeddingVector,
    embeddings: Mapping[str, EmbeddingVector],
) -> float:
    """Mean cosine similarity between the retrieved items and the query."""
    if not item_ids:
        msg = "relevance is undefined for an empty item list"
        raise ValueError(msg)
    total = 0.0
    for item_id in item_ids:
        if item_id not in embeddings:
            msg = f"unknown item {item_id!r}"
            raise ValueError(msg)
        total += cosine_similarity(embeddings[item_id], query)
    return total / len(item_ids)


def diversity_metric(item_ids: Sequence[str], embeddings: Mapping[str, EmbeddingVector]) -> float:
    """One minus the mean pairwise cosine over unordered distinct pairs.

    Needs at least two items; the value lies in [0, 2] (2 when every pair
    points in exactly opposite directions).
    """
    if len(item_ids) < 2:
        msg = f"diversity needs at least two items, got {len(item_ids)}"
        raise ValueError(msg)
    vectors = []
    for item_id in item_ids:
        if item_id not in embeddings:
            msg = f"unknown item {item_id!r}"
            raise ValueError(msg)
        vectors.append(embeddings[item_id])
    total = 0.0
    pairs = 0
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            total += cosine_similarity(vectors[i], vectors[j])
            pairs += 1
    return 1.0 - total / pairs


def build_result(
    method: str,
    items: Sequence[tuple[str, float]],
    embeddings: Mapping[str, EmbeddingVector],
    query: EmbeddingVector,
) -> RetrievalResult:
    """Assemble a :class:`RetrievalResult`, computing both metrics."""
    ids = [item_id for item_id, _ in items]
    relevance = relevance_metric(ids, query, embeddings)
    diversity = diversity_metric(ids, embeddings) if len(ids) >= 2 else 0.0
    return RetrievalResult(
        method=method,
        items=tuple((item_id, float(score)) for item_id, score in items),
        relevance=float(relevance),
        diversity=float(diversity),
    )
