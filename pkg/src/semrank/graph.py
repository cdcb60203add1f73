"""Similarity graphs over embeddings and diffusion-based ranking on them.

A graph has two edge kinds: ``knn`` edges, directed from each node to its k
most cosine-similar neighbours, and ``symbolic`` edges, added in both
directions between cluster heads (sparse mode) or between a head and any
sufficiently similar node of another cluster (dense mode).  Parallel edges
of different kinds are legal; adjacency normalisation sums them.

Ranking runs personalized pagerank

    r = alpha * s + (1 - alpha) * A^T r

over the row-stochastic adjacency ``A`` with restart distribution ``s``.
Rows without out-edges (dangling nodes) push their mass back into ``s`` on
every step, which keeps ``r`` a probability distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import EmbeddingVector, similarity_matrix

EDGE_KINDS = ("knn", "symbolic")

# Similarity-derived edge weights are floored here so rows stay strictly
# positive even for orthogonal or opposed neighbours.
EDGE_WEIGHT_FLOOR = 1e-9


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    weight: float
    kind: str


@dataclass(frozen=True, eq=False)
class SemanticGraph:
    """Immutable directed multigraph over embedded items.

    Invariants: unique node ids, edge endpoints known, weights finite and
    positive, no self-loops, and at most one edge per (source, target, kind).
    Augmentation helpers return new graphs rather than mutating.
    """

    nodes: tuple[EmbeddingVector, ...]
    edges: tuple[GraphEdge, ...]
    cluster_heads: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        ids = [node.id for node in self.nodes]
        known = set(ids)
        if len(known) != len(ids):
            msg = "graph nodes contain duplicate ids"
            raise ValueError(msg)
        seen: set[tuple[str, str, str]] = set()
        for edge in self.edges:
            if edge.kind not in EDGE_KINDS:
                msg = f"unknown edge kind {edge.kind!r}"
                raise ValueError(msg)
            if edge.source not in known or edge.target not in known:
                msg = f"edge {edge.source!r}->{edge.target!r} references unknown node"
                raise ValueError(msg)
            if edge.source == edge.target:
                msg = f"self-loop on {edge.source!r}"
                raise ValueError(msg)
            if not (np.isfinite(edge.weight) and edge.weight > 0.0):
                msg = f"edge {edge.source!r}->{edge.target!r} weight must be finite and > 0"
                raise ValueError(msg)
            key = (edge.source, edge.target, edge.kind)
            if key in seen:
                msg = f"duplicate edge {key}"
                raise ValueError(msg)
            seen.add(key)
        if self.cluster_heads is not None:
            for head in self.cluster_heads:
                if head not in known:
                    msg = f"cluster head {head!r} is not a graph node"
                    raise ValueError(msg)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(node.id for node in self.nodes)

    @cached_property
    def by_id(self) -> dict[str, EmbeddingVector]:
        return {node.id: node for node in self.nodes}

    def vector(self, node_id: str) -> EmbeddingVector:
        try:
            return self.by_id[node_id]
        except KeyError:
            msg = f"unknown graph node {node_id!r}"
            raise ValueError(msg) from None

    def out_neighbors(self, node_id: str) -> set[str]:
        self.vector(node_id)
        return {edge.target for edge in self.edges if edge.source == node_id}


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    """Row-stochastic adjacency; dangling rows stay all-zero."""

    order: tuple[str, ...]
    matrix: np.ndarray
    dangling: frozenset[str]

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        n = len(self.order)
        if matrix.shape != (n, n):
            msg = f"adjacency shape {matrix.shape} does not match {n} nodes"
            raise ValueError(msg)
        sums = matrix.sum(axis=1)
        for i, node_id in enumerate(self.order):
            expected = 0.0 if node_id in self.dangling else 1.0
            if abs(sums[i] - expected) > 1e-9:
                msg = f"row for {node_id!r} sums to {sums[i]}, expected {expected}"
                raise ValueError(msg)
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class PprConfig:
    """Restart weight and convergence budget for personalized pagerank."""

    alpha: float = 0.15
    tolerance: float = 1e-10
    max_iterations: int = 10_000

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            msg = f"alpha must lie strictly between 0 and 1, got {self.alpha}"
            raise ValueError(msg)
        if not self.tolerance > 0.0:
            msg = f"tolerance must be > 0, got {self.tolerance}"
            raise ValueError(msg)
        if self.max_iterations < 1:
            msg = f"max_iterations must be >= 1, got {self.max_iterations}"
            raise ValueError(msg)


@dataclass(frozen=True, eq=False)
class SeedVector:
    """Restart distribution aligned to an adjacency's node order."""

    order: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (len(self.order),):
            msg = "seed weights do not match node order"
            raise ValueError(msg)
        if weights.min(initial=0.0) < 0.0:
            msg = "seed weights must be non-negative"
            raise ValueError(msg)
        if not (weights > 0.0).any():
            msg = "seed needs at least one positive weight"
            raise ValueError(msg)
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            msg = f"seed weights sum to {weights.sum()}, expected 1"
            raise ValueError(msg)
        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def one_hot(cls, order: Sequence[str], node_id: str) -> "SeedVector":
        order = tuple(order)
        if node_id not in order:
            msg = f"seed node {node_id!r} is not in the graph"
            raise ValueError(msg)
        weights = np.zeros(len(order))
        weights[order.index(node_id)] = 1.0
        return cls(order=order, weights=weights)

    @classmethod
    def uniform(cls, order: Sequence[str], node_ids: Iterable[str]) -> "SeedVector":
        order = tuple(order)
        chosen = list(node_ids)
        if not chosen:
            msg = "uniform seed needs at least one node"
            raise ValueError(msg)
        positions = {node_id: i for i, node_id in enumerate(order)}
        weights = np.zeros(len(order))
        for node_id in chosen:
            if node_id not in positions:
                msg = f"seed node {node_id!r} is not in the graph"
                raise ValueError(msg)
            weights[positions[node_id]] += 1.0 / len(chosen)
        return cls(order=order, weights=weights)


class ConvergenceError(RuntimeError):
    """Raised when power iteration exhausts its budget; carries the residual."""

    def __init__(self, residual: float, iterations: int, tolerance: float) -> None:
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"no convergence after {iterations} iterations: "
            f"residual {residual:.3e} above tolerance {tolerance:.3e}"
        )


def build_knn_graph(nodes: Sequence[EmbeddingVector], k: int) -> SemanticGraph:
    """Directed graph with an edge from every node to its ``k`` nearest.

    Neighbours rank by cosine similarity, exact ties by ascending id, so the
    out-degree is exactly ``k`` everywhere.  Requires ``1 <= k < len(nodes)``.
    """
    if k < 1:
        msg = f"k must be >= 1, got {k}"
        raise ValueError(msg)
    if k >= len(nodes):
        msg = f"k={k} needs at least {k + 1} nodes, got {len(nodes)}"
        raise ValueError(msg)
    sims = similarity_matrix(nodes)
    ids = sims.order
    edges: list[GraphEdge] = []
    for i, source in enumerate(ids):
        others = [j for j in range(len(ids)) if j != i]
        others.sort(key=lambda j: (-sims.entries[i, j], ids[j]))
        for j in others[:k]:
            weight = max(float(sims.entries[i, j]), EDGE_WEIGHT_FLOOR)
            edges.append(GraphEdge(source=source, target=ids[j], weight=weight, kind="knn"))
    return SemanticGraph(nodes=tuple(nodes), edges=tuple(edges))


def elect_cluster_heads(nodes: Sequence[EmbeddingVector], labels: Mapping[str, int]) -> list[str]:
    """Pick one representative per cluster: the member most similar to the
    cluster's mean vector (cosine; ties to the lowest id).

    Returned heads are ordered by ascending cluster label.  Every node must
    carry a label.  A zero-norm cluster mean makes every member equally good,
    which collapses to the lowest-id member.
    """
    for node in nodes:
        if node.id not in labels:
            msg = f"node {node.id!r} has no cluster label"
            raise ValueError(msg)
    members: dict[int, list[EmbeddingVector]] = {}
    for node in nodes:
        members.setdefault(int(labels[node.id]), []).append(node)
    heads: list[str] = []
    for label in sorted(members):
        cluster = sorted(members[label], key=lambda node: node.id)
        mean = np.mean([node.values for node in cluster], axis=0)
        mean_norm = float(np.linalg.norm(mean))
        if mean_norm > 0.0:
            scored = []
            for node in cluster:
                norm = node.norm()
                if not norm > 0.0:
                    msg = f"cosine similarity undefined for zero-norm vector {node.id!r}"
                    raise ValueError(msg)
                scored.append((-float(np.dot(node.values, mean) / (norm * mean_norm)), node.id))
            heads.append(min(scored)[1])
        else:
            heads.append(cluster[0].id)
    return heads


def _merge_edges(existing: tuple[GraphEdge, ...], added: Iterable[GraphEdge]) -> tuple[GraphEdge, ...]:
    seen = {(edge.source, edge.target, edge.kind) for edge in existing}
    merged = list(existing)
    for edge in added:
        key = (edge.source, edge.target, edge.kind)
        if key not in seen:
            seen.add(key)
            merged.append(edge)
    return tuple(merged)


def _symbolic_pair(a: EmbeddingVector, b: EmbeddingVector, sim: float) -> list[GraphEdge]:
    weight = max(float(sim), EDGE_WEIGHT_FLOOR)
    return [
        GraphEdge(source=a.id, target=b.id, weight=weight, kind="symbolic"),
        GraphEdge(source=b.id, target=a.id, weight=weight, kind="symbolic"),
    ]


def add_symbolic_edges_sparse(graph: SemanticGraph, heads: Sequence[str], m: int) -> SemanticGraph:
    """Link every cluster head to its ``m`` most similar other heads, both
    directions.  Re-running is a no-op thanks to duplicate suppression.
    """
    if not heads:
        msg = "sparse symbolic augmentation needs at least one head"
        raise ValueError(msg)
    if m < 1:
        msg = f"m must be >= 1, got {m}"
        raise ValueError(msg)
    if m >= len(heads):
        msg = f"m={m} needs at least {m + 1} heads, got {len(heads)}"
        raise ValueError(msg)
    head_vectors = [graph.vector(head) for head in heads]
    sims = similarity_matrix(head_vectors)
    added: list[GraphEdge] = []
    for i, head in enumerate(sims.order):
        others = [j for j in range(len(sims.order)) if j != i]
        others.sort(key=lambda j: (-sims.entries[i, j], sims.order[j]))
        for j in others[:m]:
            added.extend(_symbolic_pair(head_vectors[i], head_vectors[j], sims.entries[i, j]))
    return replace(graph, edges=_merge_edges(graph.edges, added), cluster_heads=tuple(heads))


def add_symbolic_edges_dense(
    graph: SemanticGraph,
    heads: Sequence[str],
    threshold: float,
    labels: Mapping[str, int],
) -> SemanticGraph:
    """Link each head to every node of a *different* cluster whose cosine
    similarity exceeds ``threshold``, both directions.

    ``threshold`` must lie strictly inside (-1, 1) and every graph node must
    be labelled.  Idempotent for the same arguments.
    """
    if not heads:
        msg = "dense symbolic augmentation needs at least one head"
        raise ValueError(msg)
    if not -1.0 < threshold < 1.0:
        msg = f"threshold must lie strictly inside (-1, 1), got {threshold}"
        raise ValueError(msg)
    for node in graph.nodes:
        if node.id not in labels:
            msg = f"node {node.id!r} has no cluster label"
            raise ValueError(msg)
    added: list[GraphEdge] = []
    for head in heads:
        head_vector = graph.vector(head)
        head_label = int(labels[head])
        head_norm = head_vector.norm()
        if not head_norm > 0.0:
            msg = f"cosine similarity undefined for zero-norm vector {head!r}"
            raise ValueError(msg)
        for node in graph.nodes:
            if int(labels[node.id]) == head_label:
                continue
            norm = node.norm()
            if not norm > 0.0:
                msg = f"cosine similarity undefined for zero-norm vector {node.id!r}"
                raise ValueError(msg)
            sim = float(np.dot(head_vector.values, node.values) / (head_norm * norm))
            if sim > threshold:
                added.extend(_symbolic_pair(head_vector, node, sim))
    return replace(graph, edges=_merge_edges(graph.edges, added), cluster_heads=tuple(heads))


def normalize_adjacency(graph: SemanticGraph) -> NormalizedAdjacency:
    """Sum parallel edge weights, then normalise each row to sum to 1.

    Nodes without out-edges keep an all-zero row and are reported in
    ``dangling``.
    """
    order = graph.node_ids
    positions = {node_id: i for i, node_id in enumerate(order)}
    matrix = np.zeros((len(order), len(order)), dtype=np.float64)
    for edge in graph.edges:
        matrix[positions[edge.source], positions[edge.target]] += edge.weight
    sums = matrix.sum(axis=1)
    dangling = frozenset(order[i] for i in range(len(order)) if sums[i] == 0.0)
    nonzero = sums > 0.0
    matrix[nonzero] /= sums[nonzero, None]
    return NormalizedAdjacency(order=order, matrix=matrix, dangling=dangling)


def personalized_pagerank(
    adjacency: NormalizedAdjacency,
    seed: SeedVector,
    config: PprConfig | None = None,
) -> list[tuple[str, float]]:
    """Power-iterate ``r = alpha * s + (1 - alpha) * A^T r`` to a fixed point.

    Mass sitting on dangling nodes is re-injected through the seed each step,
    so the result is a probability distribution over nodes (returned in node
    order).  Raises :class:`ConvergenceError` if the L1 step change never
    drops below ``config.tolerance``; because the update is a contraction
    with factor ``1 - alpha``, a converged iterate also satisfies the fixed-
    point equation within the same tolerance.
    """
    config = config or PprConfig()
    if seed.order != adjacency.order:
        msg = "seed order does not match adjacency order"
        raise ValueError(msg)
    s = seed.weights
    transpose = adjacency.matrix.T.copy()
    dangling_idx = np.array(
        [i for i, node_id in enumerate(adjacency.order) if node_id in adjacency.dangling],
        dtype=np.intp,
    )
    r = s.copy()
    residual = np.inf
    for _ in range(config.max_iterations):
        dangling_mass = float(r[dangling_idx].sum()) if dangling_idx.size else 0.0
        r_next = config.alpha * s + (1.0 - config.alpha) * (transpose @ r + dangling_mass * s)
        residual = float(np.abs(r_next - r).sum())
        r = r_next
        if residual < config.tolerance:
            return [(node_id, float(score)) for node_id, score in zip(adjacency.order, r)]
    raise ConvergenceError(residual=residual, iterations=config.max_iterations, tolerance=config.tolerance)


def random_walk_expand(
    graph: SemanticGraph,
    seeds: Iterable[str],
    walk_length: int,
    num_walks: int,
    rng_seed: int,
) -> list[tuple[str, int]]:
    """Sample bounded random walks from each seed and count node visits.

    Walks step through the normalised adjacency (edge weights as transition
    probabilities) and stop early on dangling nodes, so the total visit count
    is at most ``num_walks * len(seeds) * walk_length`` with equality exactly
    when no walk hits a dangling node.  Output is ``(node id, visits)`` for
    visited nodes, most visited first, ties by ascending id; deterministic
    for a fixed ``rng_seed``.
    """
    seed_ids = sorted(set(seeds))
    if not seed_ids:
        msg = "random walk expansion needs at least one seed"
        raise ValueError(msg)
    for seed_id in seed_ids:
        graph.vector(seed_id)
    if walk_length < 1:
        msg = f"walk_length must be >= 1, got {walk_length}"
        raise ValueError(msg)
    if num_walks < 1:
        msg = f"num_walks must be >= 1, got {num_walks}"
        raise ValueError(msg)
    adjacency = normalize_adjacency(graph)
    positions = {node_id: i for i, node_id in enumerate(adjacency.order)}
    neighbors: list[np.ndarray] = []
    cumulative: list[np.ndarray] = []
    for i in range(len(adjacency.order)):
        row = adjacency.matrix[i]
        hit = np.flatnonzero(row)
        neighbors.append(hit)
        cumulative.append(np.cumsum(row[hit]))
    rng = np.random.default_rng(rng_seed)
    counts = np.zeros(len(adjacency.order), dtype=np.int64)
    for seed_id in seed_ids:
        start = positions[seed_id]
        for _ in range(num_walks):
            current = start
            for _ in range(walk_length):
                if neighbors[current].size == 0:
                    break
                draw = rng.random()
                step = int(np.searchsorted(cumulative[current], draw, side="right"))
                step = min(step, neighbors[current].size - 1)
                current = int(neighbors[current][step])
                counts[current] += 1
    visited = [(adjacency.order[i], int(counts[i])) for i in np.flatnonzero(counts)]
    visited.sort(key=lambda pair: (-pair[1], pair[0]))
    return visited
