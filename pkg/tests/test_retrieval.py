import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ragharness.dataset import Chunk
from ragharness.retrieval import (
    EmbeddingTable,
    RankedList,
    RetrievalError,
    RetrievalRegime,
    build_sparse_index,
    fuse_rrf,
    score_dense,
    score_sparse,
    select_context,
    tokenize,
)

VOCAB = ["pod", "node", "flag", "port", "service", "config", "label", "proxy"]


def make_corpus(rng, n_chunks):
    chunks = []
    for i in range(n_chunks):
        words = rng.choices(VOCAB, k=rng.randint(3, 12))
        chunks.append(Chunk(chunk_id=f"c{i:03d}", doc_id="d0", text=" ".join(words)))
    return chunks


def brute_force_bm25(chunks, query, k1=1.2, b=0.75):
    """Independent textbook recomputation, no inverted index."""
    docs = {c.chunk_id: tokenize(c.text) for c in chunks}
    n = len(docs)
    avgdl = sum(len(toks) for toks in docs.values()) / n
    scores = {}
    for cid, toks in docs.items():
        total = 0.0
        for term in tokenize(query):
            df = sum(1 for other in docs.values() if term in other)
            if df == 0:
                continue
            tf = toks.count(term)
            idf = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
            total += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(toks) / avgdl))
        if total != 0.0:
            scores[cid] = total
    return scores


def test_bm25_matches_brute_force_oracle():
    rng = random.Random(7)
    for trial in range(100):
        chunks = make_corpus(rng, rng.randint(2, 15))
        query = " ".join(rng.choices(VOCAB, k=rng.randint(1, 4)))
        index = build_sparse_index(chunks)
        got = score_sparse(index, query, limit=len(chunks))
        want = brute_force_bm25(chunks, query)
        assert set(got.ids()) == set(want)
        for cid, score in got.entries:
            assert score == pytest.approx(want[cid], abs=1e-12)
        # Ordering: descending score, ties by ascending chunk_id.
        resorted = sorted(want.items(), key=lambda kv: (-kv[1], kv[0]))
        assert got.entries == [(cid, pytest.approx(s)) for cid, s in resorted]


def test_bm25_single_chunk_positive_score():
    index = build_sparse_index([Chunk(chunk_id="only", doc_id="d", text="flag port")])
    result = score_sparse(index, "flag", limit=5)
    assert result.ids() == ["only"]
    assert result.entries[0][1] > 0


def test_bm25_no_matching_terms_is_empty():
    index = build_sparse_index(make_corpus(random.Random(1), 5))
    assert score_sparse(index, "zzz unknown", limit=5).ids() == []


def test_tokenize_keeps_flag_shape():
    assert tokenize("Use the --windows-line-endings flag.") == [
        "use",
        "the",
        "--windows-line-endings",
        "flag",
    ]


def test_dense_matches_numpy_oracle():
    rng = np.random.default_rng(11)
    vecs = {f"c{i}": rng.normal(size=6) for i in range(20)}
    table = EmbeddingTable(vectors=dict(vecs), dim=6)
    q = rng.normal(size=6)
    got = score_dense(table, q, limit=20)
    qn = q / np.linalg.norm(q)
    want = {
        cid: float(np.dot(qn, v / np.linalg.norm(v))) for cid, v in vecs.items()
    }
    for cid, score in got.entries:
        assert score == pytest.approx(want[cid], abs=1e-12)
    assert got.ids() == sorted(want, key=lambda c: (-want[c], c))


def test_dense_dimension_mismatch():
    table = EmbeddingTable(vectors={"c0": np.ones(4)}, dim=4)
    with pytest.raises(RetrievalError, match="dimension"):
        score_dense(table, np.ones(5), limit=1)


def ranked(ids):
    return RankedList(entries=[(cid, float(len(ids) - i)) for i, cid in enumerate(ids)])


def test_rrf_matches_brute_force_oracle():
    rng = random.Random(13)
    universe = [f"c{i}" for i in range(12)]
    for trial in range(120):
        n_lists = rng.randint(1, 4)
        lists = []
        for _ in range(n_lists):
            ids = rng.sample(universe, rng.randint(1, len(universe)))
            lists.append(ranked(ids))
        k_rrf = rng.choice([10.0, 60.0, 97.0])
        fused = fuse_rrf(lists, k_rrf=k_rrf)
        want = {}
        for rl in lists:
            for rank, (cid, _) in enumerate(rl.entries, start=1):
                want[cid] = want.get(cid, 0.0) + 1.0 / (k_rrf + rank)
        assert set(fused.ranked.ids()) == set(want)
        for cid, score in fused.ranked.entries:
            assert score == pytest.approx(want[cid], abs=1e-12)
            assert fused.recompute_score(cid) == pytest.approx(score, abs=1e-12)
        assert fused.ranked.ids() == sorted(want, key=lambda c: (-want[c], c))


def test_rrf_single_list_identity():
    rl = ranked(["a", "b", "c"])
    fused = fuse_rrf([rl])
    assert fused.ranked.ids() == ["a", "b", "c"]


def test_ranked_list_rejects_duplicates_and_increasing_scores():
    with pytest.raises(RetrievalError, match="duplicate"):
        RankedList(entries=[("a", 1.0), ("a", 0.5)])
    with pytest.raises(RetrievalError, match="non-increasing"):
        RankedList(entries=[("a", 0.5), ("b", 1.0)])


def test_regime_validation():
    with pytest.raises(RetrievalError):
        RetrievalRegime(retrieval_variant="bogus")
    with pytest.raises(RetrievalError):
        RetrievalRegime(retrieval_variant="base", eval_top_k=30, retrieve_top_n=20)


def test_select_context_channel_requirements():
    sparse = ranked(["a", "b", "c"])
    dense = ranked(["c", "b", "a"])
    base = RetrievalRegime(retrieval_variant="base", retrieve_top_n=3, eval_top_k=2)
    with pytest.raises(RetrievalError, match="at least one channel"):
        select_context(base)
    only = RetrievalRegime(retrieval_variant="dense_only", retrieve_top_n=3, eval_top_k=2)
    with pytest.raises(RetrievalError, match="dense"):
        select_context(only, sparse=sparse)


def test_select_context_regime_degeneracy():
    """With a single channel and no reranker, fused regimes reduce to that
    channel's order."""
    sparse = ranked(["a", "b", "c", "d"])
    for variant in ("base", "reranker_off", "hybrid_bm25"):
        regime = RetrievalRegime(
            retrieval_variant=variant, retrieve_top_n=4, eval_top_k=2
        )
        assert select_context(regime, sparse=sparse) == ["a", "b"]


def test_select_context_rerank_reorders():
    sparse = ranked(["a", "b", "c", "d"])
    regime = RetrievalRegime(retrieval_variant="base", retrieve_top_n=4, eval_top_k=2)
    picked = select_context(regime, sparse=sparse, rerank_scores={"d": 9.0, "b": 5.0})
    assert picked == ["d", "b"]
    # reranker_off ignores rerank scores entirely.
    off = RetrievalRegime(
        retrieval_variant="reranker_off", retrieve_top_n=4, eval_top_k=2
    )
    assert select_context(off, sparse=sparse, rerank_scores={"d": 9.0}) == ["a", "b"]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=10), st.integers(0, 2**32))
def test_bm25_deterministic(query_words, seed):
    chunks = make_corpus(random.Random(seed % 1000), 8)
    index = build_sparse_index(chunks)
    query = " ".join(query_words)
    first = score_sparse(index, query, limit=8)
    second = score_sparse(build_sparse_index(chunks), query, limit=8)
    assert first.entries == second.entries


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.lists(st.sampled_from([f"c{i}" for i in range(8)]), min_size=1, max_size=8, unique=True),
        min_size=1,
        max_size=4,
    )
)
def test_rrf_scores_bounded(id_lists):
    lists = [ranked(ids) for ids in id_lists]
    fused = fuse_rrf(lists)
    for _, score in fused.ranked.entries:
        assert 0 < score <= len(lists) / 61.0
