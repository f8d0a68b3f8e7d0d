"""Multi-objective evaluation harness for documentation-grounded RAG experiments.

The harness scores retrieval deterministically (BM25, cosine, reciprocal rank
fusion, externally supplied rerank scores), computes token-level F1 and judge
pass-rate metrics with bootstrap confidence intervals, extracts Pareto fronts
over quality/cost vectors, and rebuilds the grid, ablation, param-matched,
top-k, and error-taxonomy analyses from ingested run artifacts.
"""

__version__ = "0.1.0"
