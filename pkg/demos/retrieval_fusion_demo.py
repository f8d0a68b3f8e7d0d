"""Walk through the deterministic retrieval contour on a tiny corpus:
BM25 sparse scoring, cosine dense scoring, RRF fusion, and regime-specific
context selection.

Run: python3 demos/retrieval_fusion_demo.py
"""

import numpy as np

from ragharness.dataset import Chunk
from ragharness.retrieval import (
    EmbeddingTable,
    RetrievalRegime,
    build_sparse_index,
    fuse_rrf,
    score_dense,
    score_sparse,
    select_context,
)

CORPUS = [
    Chunk("c0", "doc0", "The --enable-tracing flag turns on request tracing."),
    Chunk("c1", "doc0", "Set tracing.port to 8080 in the service config."),
    Chunk("c2", "doc1", "Restart the service with svctl apply after editing."),
    Chunk("c3", "doc1", "The tracing exporter batches spans before sending."),
]

QUERY = "Which flag turns on tracing?"


def main():
    index = build_sparse_index(CORPUS)
    sparse = score_sparse(index, QUERY, limit=4)
    print("BM25 ranking:")
    for cid, score in sparse.entries:
        print(f"  {cid}  {score:.4f}")

    rng = np.random.default_rng(0)
    vectors = {c.chunk_id: rng.normal(size=8) for c in CORPUS}
    # Nudge c0 toward the query vector so the dense channel agrees.
    query_vec = vectors["c0"] + 0.1 * rng.normal(size=8)
    table = EmbeddingTable(vectors=vectors, dim=8)
    dense = score_dense(table, query_vec, limit=4)
    print("\nCosine ranking:")
    for cid, score in dense.entries:
        print(f"  {cid}  {score:.4f}")

    fused = fuse_rrf([dense, sparse])
    print("\nRRF fusion (k=60):")
    for cid, score in fused.ranked.entries:
        contribs = fused.provenance[cid]
        print(f"  {cid}  {score:.6f}  from lists {contribs}")

    regime = RetrievalRegime(retrieval_variant="base", retrieve_top_n=4, eval_top_k=2)
    context = select_context(
        regime, dense=dense, sparse=sparse, rerank_scores={"c0": 0.99, "c1": 0.42}
    )
    print(f"\nSelected context under the base regime: {context}")

    off = RetrievalRegime(
        retrieval_variant="reranker_off", retrieve_top_n=4, eval_top_k=2
    )
    print(f"Without the reranker: {select_context(off, dense=dense, sparse=sparse)}")


if __name__ == "__main__":
    main()
