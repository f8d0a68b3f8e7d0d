"""Regenerate the bundled synthetic smoke workspace used by the end-to-end
tests (tests/data/smoke_workspace). Fully deterministic; safe to re-run.

Usage: python3 scripts/make_smoke_workspace.py
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "tests" / "data" / "smoke_workspace"
N_CHUNKS = 20
N_QUESTIONS = 30
DIM = 8
SEED = 20240817

CONFIGS = [
    ("3B baseline", 0.45, 0.61),
    ("3B r4 full_attention", 0.62, 0.74),
    ("3B r8 qv_only", 0.68, 0.63),
    ("8B r64 qv_only", 0.82, 0.66),
]
REGIME = "01_base__neutral"

FEATURES = [
    "compression", "telemetry", "caching", "mirroring", "throttling",
    "auditing", "batching", "sharding", "retries", "tracing",
    "paging", "signing", "quotas", "draining", "probing",
    "pinning", "fencing", "warmup", "rollout", "cleanup",
]


def jsonl(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def main() -> None:
    rng = np.random.default_rng(SEED)
    ROOT.mkdir(parents=True, exist_ok=True)

    chunks = []
    for i, feat in enumerate(FEATURES[:N_CHUNKS]):
        text = (
            f"The --enable-{feat} flag turns on {feat} for the service. "
            f"Set {feat}.port to {8000 + i} in service.conf and restart "
            f"with svctl apply --profile {feat}."
        )
        chunks.append(
            {
                "chunk_id": f"chunk{i:03d}",
                "doc_id": f"doc{i // 4:02d}",
                "text": text,
                "token_count": len(text.split()),
            }
        )
    jsonl(ROOT / "corpus.jsonl", chunks)

    qa = []
    for q in range(N_QUESTIONS):
        i = q % N_CHUNKS
        feat = FEATURES[i]
        if q < N_CHUNKS:
            question = f"Which flag turns on {feat} for the service?"
            gold = f"--enable-{feat}"
            answer_type = "exact"
        else:
            question = f"What port should {feat} use in service.conf?"
            gold = f"{feat}.port is set to {8000 + i}"
            answer_type = "normal"
        qa.append(
            {
                "qa_id": f"qa{q:03d}",
                "question": question,
                "gold_answer": gold,
                "answer_type": answer_type,
                "split": "test",
                "supporting_chunk_ids": [f"chunk{i:03d}"],
            }
        )
    jsonl(ROOT / "qa.jsonl", qa)

    # Chunk embeddings are random unit vectors; each query sits near its
    # supporting chunk so the dense channel is informative.
    chunk_vecs = {}
    for c in chunks:
        v = rng.normal(size=DIM)
        chunk_vecs[c["chunk_id"]] = (v / np.linalg.norm(v)).round(6).tolist()
    query_vecs = {}
    for pair in qa:
        base = np.asarray(chunk_vecs[pair["supporting_chunk_ids"][0]])
        v = base + 0.15 * rng.normal(size=DIM)
        query_vecs[pair["qa_id"]] = (v / np.linalg.norm(v)).round(6).tolist()
    with open(ROOT / "embeddings.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {"dim": DIM, "chunks": chunk_vecs, "queries": query_vecs},
            fh, indent=1, sort_keys=True,
        )
        fh.write("\n")

    rerank = {
        pair["qa_id"]: {pair["supporting_chunk_ids"][0]: 0.95}
        for pair in qa
    }
    with open(ROOT / "rerank.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(rerank, fh, indent=1, sort_keys=True)
        fh.write("\n")

    runs_dir = ROOT / "runs"
    runs_dir.mkdir(exist_ok=True)
    files = []
    for config, accuracy, base_lat in CONFIGS:
        records = []
        for qi, pair in enumerate(qa):
            # Deterministic per-(config, question) correctness draw.
            h = hashlib.sha256(f"{config}|{pair['qa_id']}".encode()).digest()
            roll = h[0] / 255.0
            if roll < accuracy:
                answer = pair["gold_answer"]
            elif roll < accuracy + 0.2:
                answer = pair["gold_answer"].rsplit(" ", 1)[0] or "unknown"
            else:
                answer = f"the {FEATURES[(qi + 3) % N_CHUNKS]} setting"
            latency = round(base_lat + (h[1] / 255.0) * 0.1, 4)
            records.append(
                {
                    "config": config,
                    "regime": REGIME,
                    "qa_id": pair["qa_id"],
                    "answer": answer,
                    "latency_s": latency,
                    "context_ids": pair["supporting_chunk_ids"],
                    "top_k": 2,
                }
            )
        fname = f"{config.replace(' ', '_')}__{REGIME}.jsonl"
        jsonl(runs_dir / fname, records)
        files.append({"path": fname, "sha256": sha256(runs_dir / fname)})
    manifest = {
        "dataset": {"corpus_sha256": sha256(ROOT / "corpus.jsonl"),
                    "qa_sha256": sha256(ROOT / "qa.jsonl")},
        "regimes": [REGIME],
        "seed": SEED,
        "files": files,
    }
    with open(runs_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")

    judge = []
    runs_by_key = {}
    for config, _, _ in CONFIGS:
        fname = f"{config.replace(' ', '_')}__{REGIME}.jsonl"
        for line in (runs_dir / fname).read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            runs_by_key[(rec["config"], rec["qa_id"])] = rec
    gold = {pair["qa_id"]: pair["gold_answer"] for pair in qa}
    for (config, qa_id), rec in sorted(runs_by_key.items()):
        exactly = rec["answer"] == gold[qa_id]
        h = hashlib.sha256(f"judge|{config}|{qa_id}".encode()).digest()
        corr = 5 if exactly else (4 if h[0] % 3 == 0 else 2)
        grnd = 5 if exactly else (4 if h[1] % 2 == 0 else 3)
        judge.append(
            {
                "config": config,
                "regime": REGIME,
                "qa_id": qa_id,
                "correctness": corr,
                "groundedness": grnd,
            }
        )
    jsonl(ROOT / "judge.jsonl", judge)

    costs = []
    for config, _, _ in CONFIGS:
        row = {"config": config, "inf_vram_gb": round(12.0 + 2.5 * len(config) % 9, 3)}
        if "baseline" not in config:
            row["train_min"] = round(50.0 + 3.0 * (len(config) % 5), 2)
            row["train_vram_gb"] = round(19.0 + 0.1 * (len(config) % 7), 3)
        costs.append(row)
    jsonl(ROOT / "costs.jsonl", costs)

    workspace = {
        "corpus": "corpus.jsonl",
        "qa": "qa.jsonl",
        "embeddings": "embeddings.json",
        "rerank_scores": "rerank.json",
        "runs": "runs",
        "judge_scores": "judge.jsonl",
        "costs": "costs.jsonl",
        "out": "out",
        "regimes": [{"id": REGIME, "variant": "base", "prompt_mode": "neutral"}],
        "retrieve_top_n": 10,
        "eval_top_k": 2,
        "k_rrf": 60,
        "resamples": 1000,
        "level": 0.95,
        "pass_threshold": 4,
        "seed": 7,
    }
    with open(ROOT / "workspace.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(workspace, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"smoke workspace written to {ROOT}")


if __name__ == "__main__":
    main()
