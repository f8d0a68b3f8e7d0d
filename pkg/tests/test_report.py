import csv
import random
from collections import Counter

import pytest

from ragharness.ingest import RunRecord, RunSet
from ragharness.pareto import CostVector, ParetoPoint, pareto_front
from ragharness.report import (
    ERROR_CLASSES,
    ErrorLabel,
    RegimeRow,
    ReportError,
    ablation_summary,
    config_scheme,
    emit_front_data,
    error_counts,
    format_regime_table,
    regime_table,
    scheme_wins,
    topk_summary,
)
from ragharness.stats import ResamplePlan


def test_config_scheme_parsing():
    assert config_scheme("8B r64 qv_only") == "qv_only"
    assert config_scheme("3B r4 full_attention") == "full_attention"
    assert config_scheme("3B baseline") == "baseline"
    with pytest.raises(ReportError):
        config_scheme("8B r64 mystery")


def make_run_set():
    gold = {"q0": "port 6443", "q1": "use --force", "q2": "the node drains"}
    answers = {
        "cfgA": {"q0": "port 6443", "q1": "use --force", "q2": "node"},
        "cfgB": {"q0": "port 6444", "q1": "unknown", "q2": "it restarts"},
    }
    records = []
    for config, by_qa in answers.items():
        for i, (qa_id, answer) in enumerate(sorted(by_qa.items())):
            records.append(
                RunRecord(
                    config_id=config,
                    regime_id="01",
                    qa_id=qa_id,
                    predicted_answer=answer,
                    latency=0.5 + 0.1 * i,
                    correctness=5 if config == "cfgA" else 2,
                    groundedness=4 if config == "cfgA" else 3,
                )
            )
    return RunSet(records=records, manifest={}), gold


def test_regime_table_means_match_direct_recomputation():
    run_set, gold = make_run_set()
    rows = regime_table(run_set, "01", gold, {}, ResamplePlan(n_resamples=50))
    assert [r.config_id for r in rows] == ["cfgA", "cfgB"]
    cfg_a = rows[0]
    from ragharness.metrics import token_f1

    expected = sum(
        token_f1(rec.predicted_answer, gold[rec.qa_id])
        for rec in run_set.records
        if rec.config_id == "cfgA"
    ) / 3
    assert cfg_a.f1 == pytest.approx(expected)
    assert cfg_a.em_rate == pytest.approx(2 / 3)
    assert cfg_a.latency == pytest.approx(0.6)
    assert cfg_a.grnd_pass == 1.0
    assert rows[1].grnd_pass == 0.0


def test_regime_table_absent_regime():
    run_set, gold = make_run_set()
    with pytest.raises(ReportError, match="absent"):
        regime_table(run_set, "99", gold, {}, ResamplePlan(n_resamples=10))


def test_ablation_summary_published_fixture(regime_tables):
    summary = ablation_summary(regime_tables)
    assert len(summary) == 10
    assert all(s.best_f1_config == "8B r64 qv_only" for s in summary)
    assert all(not s.same_point for s in summary)
    wins = scheme_wins(summary)
    assert wins["f1"] == {"qv_only": 10}
    assert wins["grnd"] == {"qv_only": 8, "full_attention": 2}
    grnd_full = [
        s.regime_id for s in summary if config_scheme(s.best_grnd_config) == "full_attention"
    ]
    assert grnd_full == [
        "07_sparse_only__neutral",
        "08_sparse_only__explicit_grounded",
    ]


def test_ablation_summary_reorder_invariance(regime_tables):
    rng = random.Random(4)
    shuffled = {
        rid: rng.sample(rows, len(rows)) for rid, rows in regime_tables.items()
    }
    assert ablation_summary(shuffled) == ablation_summary(regime_tables)


def test_ablation_summary_singleton():
    row = RegimeRow(config_id="only", f1=0.5, latency=0.6, grnd_pass=0.7)
    (summary,) = ablation_summary({"r": [row]})
    assert summary.best_f1_config == summary.best_grnd_config == "only"
    assert summary.same_point


def test_scheme_wins_without_judge_scores():
    row = RegimeRow(config_id="3B r4 qv_only", f1=0.5, latency=0.6)
    wins = scheme_wins(ablation_summary({"r": [row]}))
    assert wins["f1"] == {"qv_only": 1}
    assert wins["grnd"] is None


def test_scheme_wins_sums_equal_regime_count(regime_tables):
    wins = scheme_wins(ablation_summary(regime_tables))
    assert sum(wins["f1"].values()) == 10
    assert sum(wins["grnd"].values()) == 10


def test_topk_summary_published_fixture(topk_tables):
    rows = topk_summary(topk_tables)
    assert [r.eval_top_k for r in rows] == [1, 2, 4]
    assert all(r.best_config == "8B r64 qv_only" for r in rows)
    assert [r.best_f1 for r in rows] == [0.600, 0.617, 0.632]
    assert [r.best_latency for r in rows] == [0.604, 0.655, 0.719]
    assert rows[0].front_configs == ("8B r64 qv_only",)
    assert rows[1].front_configs == ("3B r64 qv_only", "8B r64 qv_only")
    assert rows[2].front_configs == ("3B r64 qv_only", "8B r64 qv_only")


def test_topk_summary_identical_tables(topk_tables):
    table = topk_tables[2]
    rows = topk_summary({1: table, 2: table})
    assert rows[0].best_f1 == rows[1].best_f1
    assert rows[0].front_configs == rows[1].front_configs
    with pytest.raises(ReportError):
        topk_summary({2: table})


def test_error_counts_published_fixture(error_label_records):
    labels = [
        ErrorLabel(qa_id=r["qa_id"], config_id=r["config"], error_class=r["class"])
        for r in error_label_records
    ]
    counts = error_counts(labels)
    assert counts["n"] == 100
    total = counts["total"]
    assert total["exact_precision_failure"] == {"count": 53, "pct": 53.0}
    assert total["incomplete_answer"] == {"count": 24, "pct": 24.0}
    assert total["retrieval_miss"] == {"count": 19, "pct": 19.0}
    assert total["overclaiming"] == {"count": 4, "pct": 4.0}
    per = counts["per_config"]
    assert per["3B r64 qv_only"]["exact_precision_failure"] == {"count": 20, "pct": 40.0}
    assert per["8B r64 qv_only"]["exact_precision_failure"] == {"count": 33, "pct": 66.0}
    assert per["3B r64 qv_only"]["incomplete_answer"]["pct"] == 34.0


def test_error_counts_random_oracle():
    rng = random.Random(17)
    labels = [
        ErrorLabel(
            qa_id=f"q{i}",
            config_id=rng.choice(["3B baseline", "8B baseline"]),
            error_class=rng.choice(ERROR_CLASSES),
        )
        for i in range(200)
    ]
    counts = error_counts(labels)
    oracle = Counter((l.config_id, l.error_class) for l in labels)
    for cid, column in counts["per_config"].items():
        for cls in ERROR_CLASSES:
            assert column[cls]["count"] == oracle.get((cid, cls), 0)
    # Percentages sum to 100 per column within rounding.
    for column in counts["per_config"].values():
        assert sum(cell["pct"] for cell in column.values()) == pytest.approx(100.0, abs=0.3)


def test_error_label_enum_closed():
    with pytest.raises(ReportError):
        ErrorLabel(qa_id="q", config_id="c", error_class="hallucination")


def test_emit_front_data_roundtrip(tmp_path, regime_tables):
    rows = regime_tables["01_base__neutral"]
    points = [
        ParetoPoint(r.config_id, r.f1, CostVector(latency=r.latency), "01_base__neutral")
        for r in rows
    ]
    front = pareto_front(points, ("latency",))
    dest = tmp_path / "front.csv"
    emit_front_data(points, front, dest, ("latency",))
    with open(dest, encoding="utf-8") as fh:
        table = list(csv.DictReader(fh))
    assert len(table) == 22
    flagged = sorted(r["config"] for r in table if r["on_front"] == "1")
    assert flagged == ["3B r64 qv_only", "8B r64 qv_only"]
    # Re-emitting yields identical bytes.
    first = dest.read_bytes()
    emit_front_data(points, front, dest, ("latency",))
    assert dest.read_bytes() == first


def test_emit_front_data_empty(tmp_path):
    dest = tmp_path / "front.csv"
    emit_front_data([], [], dest, ("latency",))
    assert dest.read_text(encoding="utf-8") == "config,regime,quality,latency,on_front\n"


def test_format_regime_table_alignment(regime_tables):
    text = format_regime_table(regime_tables["01_base__neutral"])
    lines = text.splitlines()
    assert len(lines) == 23
    assert lines[0].startswith("config")
    assert "0.617" in text
