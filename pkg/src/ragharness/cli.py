"""Command-line surface orchestrating the harness over a workspace directory.

Subcommands: validate, retrieve, score, stats, pareto, report, grid. The
workspace root comes from --workspace, the RAGHARNESS_WORKSPACE environment
variable, or the current directory, and holds a ``workspace.json`` config.
All outputs are deterministic for a fixed seed: re-running a subcommand with
unchanged inputs rewrites byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dataset, ingest, lora_grid, report, retrieval
from .pareto import COST_AXES, CostVector, ParetoPoint, pareto_front
from .stats import ResamplePlan, paired_bootstrap_delta, pooled_pair_delta

DEFAULT_REGIME = {"id": "01_base__neutral", "variant": "base", "prompt_mode": "neutral"}


class WorkspaceError(ValueError):
    pass


@dataclass
class WorkspaceConfig:
    root: Path
    corpus: Path
    qa: Path
    out: Path
    embeddings: Path | None = None
    rerank_scores: Path | None = None
    runs: Path | None = None
    judge_scores: Path | None = None
    costs: Path | None = None
    labels: Path | None = None
    regimes: list = None
    retrieve_top_n: int = 20
    eval_top_k: int = 2
    k_rrf: float = 60.0
    resamples: int = 1000
    level: float = 0.95
    pass_threshold: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.eval_top_k > self.retrieve_top_n:
            raise WorkspaceError("eval_top_k must not exceed retrieve_top_n")
        if not 0.0 < self.level < 1.0:
            raise WorkspaceError("level must be in (0, 1)")
        if self.regimes is None:
            self.regimes = [dict(DEFAULT_REGIME)]

    def plan(self) -> ResamplePlan:
        return ResamplePlan(
            n_resamples=self.resamples, level=self.level, master_seed=self.seed
        )


def load_workspace(root) -> WorkspaceConfig:
    root = Path(root)
    config_path = root / "workspace.json"
    if not config_path.exists():
        raise WorkspaceError(f"workspace config not found: {config_path}")
    raw = json.loads(config_path.read_text(encoding="utf-8"))

    def path_of(key, default=None):
        value = raw.get(key, default)
        return root / value if value is not None else None

    return WorkspaceConfig(
        root=root,
        corpus=path_of("corpus", "corpus.jsonl"),
        qa=path_of("qa", "qa.jsonl"),
        out=path_of("out", "out"),
        embeddings=path_of("embeddings"),
        rerank_scores=path_of("rerank_scores"),
        runs=path_of("runs"),
        judge_scores=path_of("judge_scores"),
        costs=path_of("costs"),
        labels=path_of("labels"),
        regimes=raw.get("regimes"),
        retrieve_top_n=int(raw.get("retrieve_top_n", 20)),
        eval_top_k=int(raw.get("eval_top_k", 2)),
        k_rrf=float(raw.get("k_rrf", 60)),
        resamples=int(raw.get("resamples", 1000)),
        level=float(raw.get("level", 0.95)),
        pass_threshold=int(raw.get("pass_threshold", 4)),
        seed=int(raw.get("seed", 0)),
    )


def _load_dataset(ws: WorkspaceConfig):
    chunks = dataset.load_corpus(ws.corpus)
    pairs, census = dataset.load_qa(ws.qa)
    return chunks, pairs, census


def _load_runs(ws: WorkspaceConfig, qa_ids):
    if ws.runs is None:
        raise WorkspaceError("workspace defines no run-set directory")
    run_set = ingest.load_runs(ws.runs, qa_ids=qa_ids)
    if ws.judge_scores is not None and ws.judge_scores.exists():
        run_set = ingest.attach_judge_scores(run_set, ws.judge_scores)
    return run_set


def _load_costs(ws: WorkspaceConfig) -> dict:
    if ws.costs is not None and ws.costs.exists():
        return ingest.load_cost_profile(ws.costs)
    return {}


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(value, digits=6):
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def _regime_table_rows(ws: WorkspaceConfig, run_set, pairs):
    gold = {p.qa_id: p.gold_answer for p in pairs}
    costs = _load_costs(ws)
    tables = {}
    for regime_id in run_set.regimes():
        tables[regime_id] = report.regime_table(
            run_set, regime_id, gold, costs, ws.plan(), ws.pass_threshold
        )
    return tables


def _write_regime_csv(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "config", "n", "f1", "f1_lo", "f1_hi", "em",
                "grnd_pass", "grnd_lo", "grnd_hi",
                "corr_pass", "corr_lo", "corr_hi",
                "latency", "inference_vram",
            ]
        )
        for r in rows:
            writer.writerow(
                [
                    r.config_id,
                    r.n,
                    _fmt(r.f1),
                    _fmt(r.f1_interval.lo if r.f1_interval else None),
                    _fmt(r.f1_interval.hi if r.f1_interval else None),
                    _fmt(r.em_rate),
                    _fmt(r.grnd_pass),
                    _fmt(r.grnd_interval.lo if r.grnd_interval else None),
                    _fmt(r.grnd_interval.hi if r.grnd_interval else None),
                    _fmt(r.corr_pass),
                    _fmt(r.corr_interval.lo if r.corr_interval else None),
                    _fmt(r.corr_interval.hi if r.corr_interval else None),
                    _fmt(r.latency),
                    _fmt(r.inference_vram),
                ]
            )


def cmd_validate(ws: WorkspaceConfig, args) -> int:
    problems = []
    chunks = pairs = None
    for label, path in (("corpus", ws.corpus), ("qa", ws.qa)):
        if path is None or not path.exists():
            problems.append(f"missing {label} file: {path}")
    if not problems:
        try:
            chunks, pairs, census = _load_dataset(ws)
        except dataset.DatasetError as exc:
            problems.append(str(exc))
    if chunks is not None and pairs is not None:
        bad = dataset.check_supporting_ids(pairs, chunks)
        if bad:
            problems.append(f"unresolved supporting_chunk_ids for: {bad[:5]}")
        if ws.runs is not None and ws.runs.exists():
            try:
                _load_runs(ws, {p.qa_id for p in pairs})
            except ingest.IngestError as exc:
                problems.append(str(exc))
    if problems:
        for p in problems:
            print(f"validate: {p}", file=sys.stderr)
        return 1
    print(
        f"validate: ok ({len(chunks)} chunks, {census.total_rows} QA rows, "
        f"test={census.rows('test')})"
    )
    return 0


def _load_embeddings(ws: WorkspaceConfig):
    if ws.embeddings is None or not ws.embeddings.exists():
        return None, {}
    raw = json.loads(ws.embeddings.read_text(encoding="utf-8"))
    dim = int(raw["dim"])
    table = retrieval.EmbeddingTable(
        vectors={cid: np.asarray(v, dtype=float) for cid, v in raw["chunks"].items()},
        dim=dim,
    )
    queries = {qid: np.asarray(v, dtype=float) for qid, v in raw["queries"].items()}
    return table, queries


def cmd_retrieve(ws: WorkspaceConfig, args) -> int:
    chunks, pairs, _ = _load_dataset(ws)
    index = retrieval.build_sparse_index(chunks)
    table, queries = _load_embeddings(ws)
    rerank = {}
    if ws.rerank_scores is not None and ws.rerank_scores.exists():
        rerank = json.loads(ws.rerank_scores.read_text(encoding="utf-8"))
    test_pairs = [p for p in pairs if p.split == "test"]
    ws.out.mkdir(parents=True, exist_ok=True)
    for spec in ws.regimes:
        regime = retrieval.RetrievalRegime(
            retrieval_variant=spec["variant"],
            prompt_mode=spec.get("prompt_mode", "neutral"),
            retrieve_top_n=ws.retrieve_top_n,
            eval_top_k=ws.eval_top_k,
        )
        out_path = ws.out / f"contexts_{spec['id']}.jsonl"
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            for pair in test_pairs:
                sparse = retrieval.score_sparse(index, pair.question, ws.retrieve_top_n)
                dense = None
                if table is not None and pair.qa_id in queries:
                    dense = retrieval.score_dense(
                        table, queries[pair.qa_id], ws.retrieve_top_n
                    )
                context = retrieval.select_context(
                    regime,
                    dense=dense,
                    sparse=sparse,
                    rerank_scores=rerank.get(pair.qa_id),
                )
                fh.write(
                    json.dumps(
                        {
                            "qa_id": pair.qa_id,
                            "regime": spec["id"],
                            "context_ids": context,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        print(f"retrieve: wrote {out_path}")
    return 0


def cmd_score(ws: WorkspaceConfig, args) -> int:
    _, pairs, _ = _load_dataset(ws)
    gold = {p.qa_id: p.gold_answer for p in pairs}
    run_set = _load_runs(ws, set(gold))
    from .metrics import exact_match, token_f1

    ws.out.mkdir(parents=True, exist_ok=True)
    out_path = ws.out / "scores.jsonl"
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in sorted(
            run_set.records, key=lambda r: (r.regime_id, r.config_id, r.qa_id)
        ):
            fh.write(
                json.dumps(
                    {
                        "config": rec.config_id,
                        "regime": rec.regime_id,
                        "qa_id": rec.qa_id,
                        "f1": round(token_f1(rec.predicted_answer, gold[rec.qa_id]), 6),
                        "em": int(exact_match(rec.predicted_answer, gold[rec.qa_id])),
                        "latency_s": rec.latency,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"score: wrote {out_path} ({len(run_set.records)} records)")
    return 0


def cmd_stats(ws: WorkspaceConfig, args) -> int:
    _, pairs, _ = _load_dataset(ws)
    run_set = _load_runs(ws, {p.qa_id for p in pairs})
    tables = _regime_table_rows(ws, run_set, pairs)
    for regime_id, rows in tables.items():
        _write_regime_csv(ws.out / f"stats_{regime_id}.csv", rows)
    _write_param_matched_deltas(ws, run_set, pairs)
    print(f"stats: wrote {len(tables)} regime tables under {ws.out}")
    return 0


def _write_param_matched_deltas(ws: WorkspaceConfig, run_set, pairs) -> None:
    """Paired bootstrap deltas for every param-matched (qv, full) pair found
    in the run set, plus the pooled family-level delta per regime."""
    from .metrics import token_f1

    gold = {p.qa_id: p.gold_answer for p in pairs}
    grouped = run_set.by_config_regime()
    config_ids = {cid for cid, _ in grouped}
    grid_configs = [
        c
        for c in lora_grid.enumerate_grid(("3B", "8B"), (4, 8, 16, 32, 64))
        if c.display_id in config_ids
    ]
    matched = lora_grid.param_matched_pairs(grid_configs)
    if not matched:
        return
    out_path = ws.out / "param_matched.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["regime", "budget", "qv_config", "full_config",
             "delta_f1", "lo", "hi", "significant"]
        )
        for regime_id in run_set.regimes():
            vectors = {}
            for pair in matched:
                for cfg in (pair.qv_config, pair.full_config):
                    recs = grouped.get((cfg.display_id, regime_id))
                    if recs:
                        ordered = sorted(recs, key=lambda r: r.qa_id)
                        vectors[cfg.display_id] = [
                            token_f1(r.predicted_answer, gold[r.qa_id]) for r in ordered
                        ]
            pooled_inputs = []
            for pair in matched:
                a = vectors.get(pair.qv_config.display_id)
                b = vectors.get(pair.full_config.display_id)
                if a is None or b is None:
                    continue
                est = paired_bootstrap_delta(a, b, ws.plan())
                pooled_inputs.append((a, b))
                writer.writerow(
                    [
                        regime_id,
                        pair.budget_label,
                        pair.qv_config.display_id,
                        pair.full_config.display_id,
                        _fmt(est.delta),
                        _fmt(est.interval.lo),
                        _fmt(est.interval.hi),
                        int(est.significant),
                    ]
                )
            if len(pooled_inputs) > 1:
                est = pooled_pair_delta(pooled_inputs, ws.plan())
                writer.writerow(
                    [
                        regime_id, "pooled", "", "",
                        _fmt(est.delta), _fmt(est.interval.lo),
                        _fmt(est.interval.hi), int(est.significant),
                    ]
                )


def cmd_pareto(ws: WorkspaceConfig, args) -> int:
    _, pairs, _ = _load_dataset(ws)
    run_set = _load_runs(ws, {p.qa_id for p in pairs})
    axes = tuple(args.axes.split(","))
    for axis in axes:
        if axis not in COST_AXES:
            print(f"pareto: unknown cost axis {axis!r}", file=sys.stderr)
            return 1
    regimes = [args.regime] if args.regime else run_set.regimes()
    tables = _regime_table_rows(ws, run_set, pairs)
    costs = _load_costs(ws)
    for regime_id in regimes:
        rows = tables.get(regime_id)
        if rows is None:
            print(f"pareto: regime {regime_id!r} not in run set", file=sys.stderr)
            return 1
        points = []
        for r in rows:
            profile = costs.get(r.config_id)
            points.append(
                ParetoPoint(
                    config_id=r.config_id,
                    quality=r.f1,
                    costs=CostVector(
                        latency=r.latency,
                        inference_vram=r.inference_vram,
                        training_time=profile.training_time if profile else None,
                        training_vram=profile.training_vram if profile else None,
                    ),
                    regime_id=regime_id,
                )
            )
        front = pareto_front(points, axes)
        out_path = ws.out / f"front_{regime_id}_{'_'.join(axes)}.csv"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        report.emit_front_data(points, front, out_path, axes)
        print(f"pareto: wrote {out_path} ({len(front)} on front)")
    return 0


def cmd_report(ws: WorkspaceConfig, args) -> int:
    _, pairs, _ = _load_dataset(ws)
    run_set = _load_runs(ws, {p.qa_id for p in pairs})
    tables = _regime_table_rows(ws, run_set, pairs)
    ws.out.mkdir(parents=True, exist_ok=True)
    for regime_id, rows in tables.items():
        _write_regime_csv(ws.out / f"regime_{regime_id}.csv", rows)
        text = report.format_regime_table(rows)
        (ws.out / f"regime_{regime_id}.txt").write_text(text, encoding="utf-8")
    summary = report.ablation_summary(tables)
    with open(ws.out / "ablation_summary.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["regime", "best_f1_config", "best_f1",
             "best_grnd_config", "best_grnd", "same_point"]
        )
        for row in summary:
            writer.writerow(
                [
                    row.regime_id,
                    row.best_f1_config,
                    _fmt(row.best_f1_row.f1),
                    row.best_grnd_config or "",
                    _fmt(row.best_grnd_row.grnd_pass if row.best_grnd_row else None),
                    int(row.same_point),
                ]
            )
    _write_json(ws.out / "scheme_wins.json", report.scheme_wins(summary))
    by_k = {}
    for (config_id, regime_id), recs in run_set.by_config_regime().items():
        k = recs[0].eval_top_k
        by_k.setdefault(k, set()).add(regime_id)
    if len(by_k) >= 2:
        k_tables = {
            k: [row for rid in regimes for row in tables[rid]]
            for k, regimes in by_k.items()
        }
        rows = report.topk_summary(k_tables)
        with open(ws.out / "topk_summary.csv", "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "best_config", "best_f1", "latency", "front"])
            for r in rows:
                writer.writerow(
                    [r.eval_top_k, r.best_config, _fmt(r.best_f1),
                     _fmt(r.best_latency), ";".join(r.front_configs)]
                )
    if ws.labels is not None and ws.labels.exists():
        labels = []
        for lineno, rec in ingest._read_jsonl(ws.labels):
            labels.append(
                report.ErrorLabel(
                    qa_id=str(rec["qa_id"]),
                    config_id=str(rec["config"]),
                    error_class=str(rec["class"]),
                )
            )
        _write_json(ws.out / "error_counts.json", report.error_counts(labels))
    print(f"report: wrote tables for {len(tables)} regimes under {ws.out}")
    return 0


def cmd_grid(ws, args) -> int:
    bases = tuple(args.bases.split(","))
    ranks = tuple(int(r) for r in args.ranks.split(","))
    grid = lora_grid.enumerate_grid(bases, ranks)
    print(f"{'base':<6}{'scheme':<16}{'rank':<6}{'alpha':<6}config")
    for cfg in grid:
        rank = "" if cfg.rank is None else cfg.rank
        alpha = "" if cfg.lora_alpha is None else cfg.lora_alpha
        print(f"{cfg.base_model:<6}{cfg.scheme:<16}{rank!s:<6}{alpha!s:<6}{cfg.display_id}")
    pairs = lora_grid.param_matched_pairs(grid)
    print(f"\nparam-matched pairs ({len(pairs)}):")
    for pair in pairs:
        print(
            f"  {pair.budget_label:<6}{pair.qv_config.display_id}  <->  "
            f"{pair.full_config.display_id}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ragharness",
        description="Multi-objective evaluation harness for documentation-grounded RAG runs.",
    )
    parser.add_argument(
        "--workspace",
        default=None,
        help="workspace root (default: $RAGHARNESS_WORKSPACE or the current directory)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", help="check dataset and run-set schemas")
    sub.add_parser("retrieve", help="materialize contexts per regime")
    sub.add_parser("score", help="compute per-example metrics")
    sub.add_parser("stats", help="compute intervals and param-matched deltas")
    p_pareto = sub.add_parser("pareto", help="emit Pareto fronts")
    p_pareto.add_argument("--regime", default=None)
    p_pareto.add_argument("--axes", default="latency", help="comma-separated cost axes")
    sub.add_parser("report", help="emit all report tables")
    p_grid = sub.add_parser("grid", help="print the configuration grid and pairs")
    p_grid.add_argument("--ranks", default="4,8,16,32,64")
    p_grid.add_argument("--bases", default="3B,8B")
    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "retrieve": cmd_retrieve,
    "score": cmd_score,
    "stats": cmd_stats,
    "pareto": cmd_pareto,
    "report": cmd_report,
    "grid": cmd_grid,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "grid":
        return cmd_grid(None, args)
    root = args.workspace or os.environ.get("RAGHARNESS_WORKSPACE") or "."
    try:
        ws = load_workspace(root)
        return _COMMANDS[args.command](ws, args)
    except (
        WorkspaceError,
        dataset.DatasetError,
        ingest.IngestError,
        report.ReportError,
        retrieval.RetrievalError,
    ) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
