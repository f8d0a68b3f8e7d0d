import json
from pathlib import Path

import pytest

from ragharness.report import RegimeRow
from ragharness.stats import Interval

FIXTURES = Path(__file__).parent / "fixtures"
SMOKE_WORKSPACE = Path(__file__).parent / "data" / "smoke_workspace"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def to_regime_row(rec) -> RegimeRow:
    return RegimeRow(
        config_id=rec["config"],
        f1=rec["f1"],
        latency=rec["lat"],
        f1_interval=Interval(lo=rec["f1_lo"], hi=rec["f1_hi"]),
        grnd_pass=rec.get("grnd"),
        grnd_interval=(
            Interval(lo=rec["grnd_lo"], hi=rec["grnd_hi"]) if "grnd" in rec else None
        ),
        corr_pass=rec.get("corr"),
        corr_interval=(
            Interval(lo=rec["corr_lo"], hi=rec["corr_hi"]) if "corr" in rec else None
        ),
        inference_vram=rec.get("vram"),
    )


@pytest.fixture(scope="session")
def regime_tables():
    raw = load_fixture("regime_tables.json")
    return {rid: [to_regime_row(r) for r in rows] for rid, rows in raw.items()}


@pytest.fixture(scope="session")
def training_front_rows():
    return load_fixture("training_front.json")


@pytest.fixture(scope="session")
def topk_tables():
    raw = load_fixture("topk_tables.json")
    return {int(k): [to_regime_row(r) for r in rows] for k, rows in raw.items()}


@pytest.fixture(scope="session")
def error_label_records():
    return load_fixture("error_labels.json")
