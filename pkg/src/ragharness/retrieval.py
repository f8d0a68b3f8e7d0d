"""Deterministic retrieval scoring: BM25 sparse channel, cosine dense channel,
reciprocal rank fusion, rerank-score application, and regime-specific context
selection.

All ties are broken by ascending chunk_id so that identical inputs always
yield identical outputs.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field

import numpy as np

from .dataset import Chunk

RETRIEVAL_VARIANTS = (
    "base",
    "reranker_off",
    "dense_only",
    "sparse_only",
    "hybrid_bm25",
)
PROMPT_MODES = ("neutral", "explicit_grounded")

DEFAULT_K_RRF = 60.0
DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


class RetrievalError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation off token edges.

    Internal ``- _ . / :`` survive, so documentation flags and paths keep
    their shape.
    """
    keep = "-_./:"
    edge = "".join(ch for ch in string.punctuation if ch not in keep)
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(edge).rstrip(keep)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass
class RankedList:
    """Ordered (chunk_id, score) entries; rank is the 1-based position."""

    entries: list[tuple[str, float]]

    def __post_init__(self):
        seen = set()
        prev = None
        for cid, score in self.entries:
            if cid in seen:
                raise RetrievalError(f"duplicate chunk_id in ranked list: {cid!r}")
            seen.add(cid)
            if prev is not None and score > prev:
                raise RetrievalError("ranked list scores must be non-increasing")
            prev = score

    def __len__(self):
        return len(self.entries)

    def ids(self) -> list[str]:
        return [cid for cid, _ in self.entries]

    def rank_of(self, chunk_id: str) -> int | None:
        for rank, (cid, _) in enumerate(self.entries, start=1):
            if cid == chunk_id:
                return rank
        return None


@dataclass
class FusedCandidates:
    """RRF result plus per-entry provenance (list index, rank in that list)."""

    ranked: RankedList
    provenance: dict  # chunk_id -> list[(list_index, rank)]
    k_rrf: float

    def recompute_score(self, chunk_id: str) -> float:
        return sum(1.0 / (self.k_rrf + rank) for _, rank in self.provenance[chunk_id])


@dataclass(frozen=True)
class RetrievalRegime:
    retrieval_variant: str
    prompt_mode: str = "neutral"  # metadata tag only
    retrieve_top_n: int = 20
    eval_top_k: int = 2

    def __post_init__(self):
        if self.retrieval_variant not in RETRIEVAL_VARIANTS:
            raise RetrievalError(f"unknown retrieval variant {self.retrieval_variant!r}")
        if self.prompt_mode not in PROMPT_MODES:
            raise RetrievalError(f"unknown prompt mode {self.prompt_mode!r}")
        if self.retrieve_top_n < 1 or self.eval_top_k < 1:
            raise RetrievalError("retrieve_top_n and eval_top_k must be positive")
        if self.eval_top_k > self.retrieve_top_n:
            raise RetrievalError("eval_top_k must not exceed retrieve_top_n")


@dataclass
class SparseIndex:
    """Inverted index with the statistics BM25 needs."""

    postings: dict  # term -> list[(chunk_id, tf)] sorted by chunk_id
    doc_len: dict  # chunk_id -> token count
    df: dict  # term -> document frequency
    n_docs: int
    avgdl: float
    k1: float
    b: float


def build_sparse_index(
    corpus: list[Chunk], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> SparseIndex:
    if not corpus:
        raise RetrievalError("cannot index an empty corpus")
    if k1 <= 0:
        raise RetrievalError(f"k1 must be positive, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise RetrievalError(f"b must be in [0, 1], got {b}")
    postings: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for chunk in corpus:
        tokens = tokenize(chunk.text)
        doc_len[chunk.chunk_id] = len(tokens)
        for tok in tokens:
            postings.setdefault(tok, {}).setdefault(chunk.chunk_id, 0)
            postings[tok][chunk.chunk_id] += 1
    sorted_postings = {
        term: sorted(by_doc.items()) for term, by_doc in postings.items()
    }
    df = {term: len(by_doc) for term, by_doc in sorted_postings.items()}
    n_docs = len(corpus)
    avgdl = sum(doc_len.values()) / n_docs
    return SparseIndex(
        postings=sorted_postings,
        doc_len=doc_len,
        df=df,
        n_docs=n_docs,
        avgdl=avgdl,
        k1=k1,
        b=b,
    )


def bm25_idf(index: SparseIndex, term: str) -> float:
    # +1 inside the log keeps IDF positive for very common terms, so a zero
    # score always means "no query term present".
    df = index.df.get(term, 0)
    return math.log((index.n_docs - df + 0.5) / (df + 0.5) + 1.0)


def score_sparse(index: SparseIndex, query: str, limit: int) -> RankedList:
    """Top `limit` chunks by Okapi BM25; zero-scoring chunks are omitted."""
    if limit < 1:
        raise RetrievalError("limit must be >= 1")
    scores: dict[str, float] = {}
    for term in tokenize(query):
        if term not in index.postings:
            continue
        idf = bm25_idf(index, term)
        for chunk_id, tf in index.postings[term]:
            dl = index.doc_len[chunk_id]
            denom = tf + index.k1 * (1.0 - index.b + index.b * dl / index.avgdl)
            scores[chunk_id] = scores.get(chunk_id, 0.0) + idf * tf * (
                index.k1 + 1.0
            ) / denom
    ordered = sorted(
        ((cid, s) for cid, s in scores.items() if s != 0.0),
        key=lambda item: (-item[1], item[0]),
    )
    return RankedList(entries=ordered[:limit])


@dataclass
class EmbeddingTable:
    """Chunk embeddings sharing one dimension; query vectors live elsewhere."""

    vectors: dict  # chunk_id -> np.ndarray
    dim: int

    def __post_init__(self):
        for cid, vec in self.vectors.items():
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.dim,):
                raise RetrievalError(
                    f"vector for {cid!r} has dimension {vec.shape}, expected ({self.dim},)"
                )
            if not np.all(np.isfinite(vec)):
                raise RetrievalError(f"vector for {cid!r} has non-finite values")
            self.vectors[cid] = vec


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def score_dense(table: EmbeddingTable, query_vector, limit: int) -> RankedList:
    """Top `limit` chunks by cosine similarity, ties by ascending chunk_id."""
    query_vector = np.asarray(query_vector, dtype=float)
    if query_vector.shape != (table.dim,):
        raise RetrievalError(
            f"query dimension {query_vector.shape} does not match table ({table.dim},)"
        )
    q = _unit(query_vector)
    scored = [
        (cid, float(np.dot(q, _unit(vec)))) for cid, vec in table.vectors.items()
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return RankedList(entries=scored[:limit])


def fuse_rrf(lists: list[RankedList], k_rrf: float = DEFAULT_K_RRF) -> FusedCandidates:
    """Merge ranked lists: fused score = sum over lists of 1/(k_rrf + rank)."""
    if not lists:
        raise RetrievalError("fuse_rrf requires at least one input list")
    if k_rrf <= 0:
        raise RetrievalError("k_rrf must be positive")
    provenance: dict[str, list[tuple[int, int]]] = {}
    for li, rl in enumerate(lists):
        for rank, (cid, _) in enumerate(rl.entries, start=1):
            provenance.setdefault(cid, []).append((li, rank))
    fused = {
        cid: sum(1.0 / (k_rrf + rank) for _, rank in contribs)
        for cid, contribs in provenance.items()
    }
    ordered = sorted(fused.items(), key=lambda item: (-item[1], item[0]))
    return FusedCandidates(
        ranked=RankedList(entries=ordered), provenance=provenance, k_rrf=k_rrf
    )


def _apply_rerank(
    candidates: list[str], rerank_scores: dict | None, eval_top_k: int
) -> list[str]:
    if rerank_scores is None:
        return candidates[:eval_top_k]
    reordered = sorted(
        candidates,
        key=lambda cid: (-rerank_scores.get(cid, float("-inf")), cid),
    )
    return reordered[:eval_top_k]


def select_context(
    regime: RetrievalRegime,
    dense: RankedList | None = None,
    sparse: RankedList | None = None,
    rerank_scores: dict | None = None,
) -> list[str]:
    """Pick the eval_top_k context chunk ids for one question under a regime."""
    variant = regime.retrieval_variant
    if variant == "dense_only":
        if dense is None:
            raise RetrievalError("dense_only regime requires the dense channel")
        candidates = dense.ids()[: regime.retrieve_top_n]
        return _apply_rerank(candidates, rerank_scores, regime.eval_top_k)
    if variant == "sparse_only":
        if sparse is None:
            raise RetrievalError("sparse_only regime requires the sparse channel")
        candidates = sparse.ids()[: regime.retrieve_top_n]
        return _apply_rerank(candidates, rerank_scores, regime.eval_top_k)
    # Fused regimes accept whichever channels are present; at least one is
    # required. With a single channel they degrade to that channel's order.
    lists = [rl for rl in (dense, sparse) if rl is not None]
    if not lists:
        raise RetrievalError(f"{variant} regime requires at least one channel")
    fused = fuse_rrf(lists)
    candidates = fused.ranked.ids()[: regime.retrieve_top_n]
    if variant == "reranker_off":
        return candidates[: regime.eval_top_k]
    return _apply_rerank(candidates, rerank_scores, regime.eval_top_k)
