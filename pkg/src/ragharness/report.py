"""Analytical artifacts: per-regime metric tables, ablation summaries,
scheme-win counts, top-k sensitivity rows, error-taxonomy counts, and
plot-ready front data."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .ingest import RunSet
from .metrics import ExampleScore, exact_match, token_f1
from .pareto import CostVector, ParetoPoint, pareto_front
from .stats import Interval, ResamplePlan, bootstrap_ci

ERROR_CLASSES = (
    "retrieval_miss",
    "overclaiming",
    "incomplete_answer",
    "exact_precision_failure",
)


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class RegimeRow:
    config_id: str
    f1: float
    latency: float
    f1_interval: Interval | None = None
    grnd_pass: float | None = None
    grnd_interval: Interval | None = None
    corr_pass: float | None = None
    corr_interval: Interval | None = None
    inference_vram: float | None = None
    em_rate: float | None = None
    n: int = 0


@dataclass(frozen=True)
class AblationSummaryRow:
    regime_id: str
    best_f1_config: str
    best_f1_row: RegimeRow
    best_grnd_config: str | None
    best_grnd_row: RegimeRow | None
    same_point: bool


@dataclass(frozen=True)
class ErrorLabel:
    qa_id: str
    config_id: str
    error_class: str

    def __post_init__(self):
        if self.error_class not in ERROR_CLASSES:
            raise ReportError(f"unknown error class {self.error_class!r}")


def config_scheme(config_id: str) -> str:
    """Recover the adaptation scheme from a canonical display id like
    "8B r64 qv_only" or "3B baseline"."""
    tail = config_id.split()[-1]
    if tail in ("baseline", "qv_only", "full_attention"):
        return tail
    raise ReportError(f"cannot parse scheme from config id {config_id!r}")


def regime_table(
    run_set: RunSet,
    regime_id: str,
    gold_answers: dict,
    cost_profiles: dict,
    plan: ResamplePlan,
    pass_threshold: int = 4,
) -> list[RegimeRow]:
    """One row per config present in the regime, sorted by config id."""
    grouped = {
        key: recs
        for key, recs in run_set.by_config_regime().items()
        if key[1] == regime_id
    }
    if not grouped:
        raise ReportError(f"regime {regime_id!r} absent from run set")
    rows: list[RegimeRow] = []
    for (config_id, _), recs in sorted(grouped.items()):
        scores = []
        for rec in recs:
            gold = gold_answers.get(rec.qa_id)
            if gold is None:
                raise ReportError(f"no gold answer for qa_id {rec.qa_id!r}")
            scores.append(
                ExampleScore(
                    qa_id=rec.qa_id,
                    f1=token_f1(rec.predicted_answer, gold),
                    exact_match=exact_match(rec.predicted_answer, gold),
                    correctness=rec.correctness,
                    groundedness=rec.groundedness,
                )
            )
        f1s = [s.f1 for s in scores]
        f1_mean = sum(f1s) / len(f1s)
        em_rate = sum(1 for s in scores if s.exact_match) / len(scores)
        latency = sum(r.latency for r in recs) / len(recs)
        judged = [s for s in scores if s.groundedness is not None]
        grnd_pass = grnd_interval = corr_pass = corr_interval = None
        if judged:
            grnd_flags = [
                1.0 if s.groundedness >= pass_threshold else 0.0 for s in judged
            ]
            corr_flags = [
                1.0 if s.correctness >= pass_threshold else 0.0 for s in judged
            ]
            grnd_pass = sum(grnd_flags) / len(grnd_flags)
            corr_pass = sum(corr_flags) / len(corr_flags)
            grnd_interval = bootstrap_ci(grnd_flags, plan)
            corr_interval = bootstrap_ci(corr_flags, plan)
        profile = cost_profiles.get(config_id)
        vram = profile.inference_vram_for(regime_id) if profile else None
        rows.append(
            RegimeRow(
                config_id=config_id,
                f1=f1_mean,
                latency=latency,
                f1_interval=bootstrap_ci(f1s, plan),
                grnd_pass=grnd_pass,
                grnd_interval=grnd_interval,
                corr_pass=corr_pass,
                corr_interval=corr_interval,
                inference_vram=vram,
                em_rate=em_rate,
                n=len(recs),
            )
        )
    return rows


def _best(rows: list[RegimeRow], key) -> RegimeRow:
    # Point-estimate winner; ties broken by ascending config id.
    return min(rows, key=lambda r: (-key(r), r.config_id))


def ablation_summary(tables: dict) -> list[AblationSummaryRow]:
    """Per regime: best-F1 and best-groundedness configs by point estimate.
    `tables` maps regime id -> list of RegimeRow. Row order within a table
    does not matter."""
    if not tables:
        raise ReportError("at least one regime table is required")
    summary: list[AblationSummaryRow] = []
    for regime_id in sorted(tables):
        rows = tables[regime_id]
        if not rows:
            raise ReportError(f"regime table {regime_id!r} is empty")
        best_f1 = _best(rows, lambda r: r.f1)
        judged = [r for r in rows if r.grnd_pass is not None]
        if judged:
            best_grnd = _best(judged, lambda r: r.grnd_pass)
            same = best_f1.config_id == best_grnd.config_id
            summary.append(
                AblationSummaryRow(
                    regime_id=regime_id,
                    best_f1_config=best_f1.config_id,
                    best_f1_row=best_f1,
                    best_grnd_config=best_grnd.config_id,
                    best_grnd_row=best_grnd,
                    same_point=same,
                )
            )
        else:
            summary.append(
                AblationSummaryRow(
                    regime_id=regime_id,
                    best_f1_config=best_f1.config_id,
                    best_f1_row=best_f1,
                    best_grnd_config=None,
                    best_grnd_row=None,
                    same_point=False,
                )
            )
    return summary


def scheme_wins(summary: list[AblationSummaryRow]) -> dict:
    """Counts of regimes won by each scheme, per criterion. The grnd column
    is absent (None) when no regime had judge scores."""
    if not summary:
        raise ReportError("summary must be nonempty")
    f1_wins: Counter = Counter()
    grnd_wins: Counter = Counter()
    any_grnd = False
    for row in summary:
        f1_wins[config_scheme(row.best_f1_config)] += 1
        if row.best_grnd_config is not None:
            any_grnd = True
            grnd_wins[config_scheme(row.best_grnd_config)] += 1
    return {"f1": dict(f1_wins), "grnd": dict(grnd_wins) if any_grnd else None}


@dataclass(frozen=True)
class TopKRow:
    eval_top_k: int
    best_config: str
    best_f1: float
    best_f1_interval: Interval | None
    best_latency: float
    front_configs: tuple[str, ...]


def topk_summary(tables_by_k: dict) -> list[TopKRow]:
    """Sensitivity to the context budget k. `tables_by_k` maps eval_top_k ->
    list of RegimeRow; the runtime front is (F1, latency)."""
    if len(tables_by_k) < 2:
        raise ReportError("need tables for at least two k values")
    rows: list[TopKRow] = []
    for k in sorted(tables_by_k):
        table = tables_by_k[k]
        if not table:
            raise ReportError(f"table for k={k} is empty")
        best = _best(table, lambda r: r.f1)
        points = [
            ParetoPoint(
                config_id=r.config_id,
                quality=r.f1,
                costs=CostVector(latency=r.latency),
            )
            for r in table
        ]
        front = pareto_front(points, axes=("latency",))
        rows.append(
            TopKRow(
                eval_top_k=k,
                best_config=best.config_id,
                best_f1=best.f1,
                best_f1_interval=best.f1_interval,
                best_latency=best.latency,
                front_configs=tuple(sorted(p.config_id for p in front)),
            )
        )
    return rows


def error_counts(labels: list[ErrorLabel]) -> dict:
    """Counts per (config, class) plus totals, with percentages of each
    column's n (one decimal)."""
    if not labels:
        raise ReportError("labels must be nonempty")
    per_config: dict[str, Counter] = {}
    totals: Counter = Counter()
    for label in labels:
        per_config.setdefault(label.config_id, Counter())[label.error_class] += 1
        totals[label.error_class] += 1

    def column(counter: Counter) -> dict:
        n = sum(counter.values())
        return {
            cls: {
                "count": counter.get(cls, 0),
                "pct": round(100.0 * counter.get(cls, 0) / n, 1),
            }
            for cls in ERROR_CLASSES
        }

    return {
        "per_config": {cid: column(cnt) for cid, cnt in sorted(per_config.items())},
        "total": column(totals),
        "n": len(labels),
    }


def emit_front_data(points: list[ParetoPoint], front: list[ParetoPoint], destination, axes) -> None:
    """Write plot-ready comma-separated rows {config, regime, quality, active
    cost axes, on_front}. Rows sorted by config id; column order fixed."""
    axes = tuple(axes)
    on_front = {(p.config_id, p.regime_id) for p in front}
    path = Path(destination)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config", "regime", "quality", *axes, "on_front"])
        for p in sorted(points, key=lambda p: (p.config_id, p.regime_id)):
            writer.writerow(
                [
                    p.config_id,
                    p.regime_id,
                    f"{p.quality:.6g}",
                    *(f"{p.costs.get(ax):.6g}" for ax in axes),
                    int((p.config_id, p.regime_id) in on_front),
                ]
            )


def format_regime_table(rows: list[RegimeRow]) -> str:
    """Human-readable aligned text form of a regime table."""

    def fmt_iv(iv: Interval | None) -> str:
        if iv is None:
            return "-"
        return f"[{iv.lo:.3f}, {iv.hi:.3f}]"

    header = ["config", "F1", "F1 95% CI", "grnd@4", "corr@4", "lat (s)", "VRAM (GB)"]
    body = []
    for r in rows:
        body.append(
            [
                r.config_id,
                f"{r.f1:.3f}",
                fmt_iv(r.f1_interval),
                "-" if r.grnd_pass is None else f"{r.grnd_pass:.3f}",
                "-" if r.corr_pass is None else f"{r.corr_pass:.3f}",
                f"{r.latency:.3f}",
                "-" if r.inference_vram is None else f"{r.inference_vram:.3f}",
            ]
        )
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in [header, *body]]
    return "\n".join(lines) + "\n"
