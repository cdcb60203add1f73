"""First-stage pool construction: exact top-N scan and pool invariants."""

import numpy as np
import pytest

from semrank.candidates import CandidatePool, top_n_candidates
from semrank.geometry import EmbeddingVector, cosine_similarity, similarity_matrix


def _corpus(count=30, dim=5, seed=42):
    rng = np.random.default_rng(seed)
    return [EmbeddingVector(f"v{i:02d}", rng.normal(size=dim)) for i in range(count)]


class TestTopNCandidates:
    def test_hand_built_ordering_with_tie(self):
        """Colinear vectors tie on cosine, and ties resolve by ascending id."""
        query = EmbeddingVector("q", [1.0, 0.0])
        corpus = [
            EmbeddingVector("c", [0.0, 1.0]),     # sim 0
            EmbeddingVector("e", [2.0, 0.0]),     # sim 1 (tied with a)
            EmbeddingVector("a", [1.0, 0.0]),     # sim 1
            EmbeddingVector("d", [-1.0, 0.0]),    # sim -1
            EmbeddingVector("b", [1.0, 1.0]),     # sim 1/sqrt(2)
        ]
        pool = top_n_candidates(query, corpus, 3)
        assert pool.ids == ("a", "e", "b")
        np.testing.assert_allclose(pool.query_sims, [1.0, 1.0, 1.0 / np.sqrt(2.0)], rtol=0, atol=1e-15)

    def test_matches_exhaustive_sort_oracle(self):
        """The pool equals a from-scratch sort of every corpus similarity."""
        corpus = _corpus()
        query = EmbeddingVector("q", np.random.default_rng(7).normal(size=5))
        ranked = sorted(
            corpus, key=lambda v: (-cosine_similarity(query, v), v.id)
        )
        for n in (1, 7, len(corpus)):
            pool = top_n_candidates(query, corpus, n)
            assert pool.ids == tuple(v.id for v in ranked[:n])

    def test_pool_carries_consistent_artifacts(self):
        corpus = _corpus(count=12)
        query = EmbeddingVector("q", np.random.default_rng(3).normal(size=5))
        pool = top_n_candidates(query, corpus, 6)
        assert len(pool) == 6
        assert pool.query == query
        assert pool.pairwise.order == pool.ids
        for i, item_id in enumerate(pool.ids):
            np.testing.assert_allclose(
                pool.query_sims[i],
                cosine_similarity(query, pool.vector(item_id)),
                rtol=0,
                atol=1e-12,
            )
            np.testing.assert_allclose(
                pool.query_similarity(item_id), pool.query_sims[i], rtol=0, atol=0
            )

    def test_full_corpus_pool(self):
        corpus = _corpus(count=5)
        query = EmbeddingVector("q", np.random.default_rng(0).normal(size=5))
        pool = top_n_candidates(query, corpus, 5)
        assert sorted(pool.ids) == sorted(v.id for v in corpus)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="non-empty corpus"):
            top_n_candidates(EmbeddingVector("q", [1.0]), [], 1)

    def test_pool_size_bounds(self):
        corpus = _corpus(count=4)
        query = EmbeddingVector("q", np.random.default_rng(1).normal(size=5))
        with pytest.raises(ValueError, match="pool size must be >= 1"):
            top_n_candidates(query, corpus, 0)
        with pytest.raises(ValueError, match="pool size 5 exceeds corpus size 4"):
            top_n_candidates(query, corpus, 5)

    def test_duplicate_corpus_ids_rejected(self):
        corpus = [EmbeddingVector("dup", [1.0, 0.0]), EmbeddingVector("dup", [0.0, 1.0])]
        with pytest.raises(ValueError, match="duplicate item id 'dup'"):
            top_n_candidates(EmbeddingVector("q", [1.0, 0.0]), corpus, 1)


class TestCandidatePoolValidation:
    def _parts(self):
        query = EmbeddingVector("q", [1.0, 0.0])
        a = EmbeddingVector("a", [1.0, 0.0])
        b = EmbeddingVector("b", [1.0, 1.0])
        return query, (a, b), np.array([1.0, 1.0 / np.sqrt(2.0)]), similarity_matrix([a, b])

    def test_valid_pool_constructs(self):
        query, candidates, sims, pairwise = self._parts()
        pool = CandidatePool(query=query, candidates=candidates, query_sims=sims, pairwise=pairwise)
        assert pool.ids == ("a", "b")

    def test_unsorted_pool_rejected(self):
        query, candidates, sims, pairwise = self._parts()
        backwards = (candidates[1], candidates[0])
        with pytest.raises(ValueError, match="sorted by descending query similarity"):
            CandidatePool(
                query=query,
                candidates=backwards,
                query_sims=sims[::-1],
                pairwise=similarity_matrix(list(backwards)),
            )

    def test_size_mismatch_rejected(self):
        query, candidates, sims, pairwise = self._parts()
        with pytest.raises(ValueError, match="disagree in size"):
            CandidatePool(query=query, candidates=candidates, query_sims=sims[:1], pairwise=pairwise)

    def test_order_mismatch_rejected(self):
        query, candidates, sims, _ = self._parts()
        other = similarity_matrix([candidates[1], candidates[0]])
        with pytest.raises(ValueError, match="does not match pairwise matrix order"):
            CandidatePool(query=query, candidates=candidates, query_sims=sims, pairwise=other)

    def test_unknown_item_lookup_rejected(self):
        query, candidates, sims, pairwise = self._parts()
        pool = CandidatePool(query=query, candidates=candidates, query_sims=sims, pairwise=pairwise)
        with pytest.raises(ValueError, match="unknown pool item 'zzz'"):
            pool.vector("zzz")

    def test_query_sims_are_read_only(self):
        query, candidates, sims, pairwise = self._parts()
        pool = CandidatePool(query=query, candidates=candidates, query_sims=sims, pairwise=pairwise)
        with pytest.raises(ValueError):
            pool.query_sims[0] = 0.0
