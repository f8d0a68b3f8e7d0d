"""Loading and validation of the documentation corpus and the QA benchmark.

Both files are UTF-8 JSON-lines: one record per line. Unknown extra fields
are kept on the record but otherwise ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

ANSWER_TYPES = ("exact", "normal")
SPLITS = ("train", "eval", "test")


class DatasetError(ValueError):
    """Raised on schema violations while loading corpus or QA files."""


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    text: str
    token_count: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.chunk_id:
            raise DatasetError("chunk_id must be nonempty")
        if not self.text.strip():
            raise DatasetError(f"chunk {self.chunk_id!r}: text is empty")
        if self.token_count < 0:
            raise DatasetError(f"chunk {self.chunk_id!r}: negative token_count")


@dataclass(frozen=True)
class QaPair:
    qa_id: str
    question: str
    gold_answer: str
    answer_type: str
    split: str
    supporting_chunk_ids: tuple[str, ...] | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.qa_id:
            raise DatasetError("qa_id must be nonempty")
        if not self.question.strip():
            raise DatasetError(f"qa {self.qa_id!r}: question is empty")
        if not self.gold_answer.strip():
            raise DatasetError(f"qa {self.qa_id!r}: gold_answer is empty")
        if self.answer_type not in ANSWER_TYPES:
            raise DatasetError(
                f"qa {self.qa_id!r}: unknown answer_type {self.answer_type!r}"
            )
        if self.split not in SPLITS:
            raise DatasetError(f"qa {self.qa_id!r}: unknown split {self.split!r}")


@dataclass(frozen=True)
class SplitCensus:
    """Row and answer-type counts per split."""

    per_split: dict  # split -> {"rows": int, "exact": int, "normal": int}

    @property
    def total_rows(self) -> int:
        return sum(v["rows"] for v in self.per_split.values())

    def rows(self, split: str) -> int:
        return self.per_split.get(split, {"rows": 0})["rows"]

    def count(self, split: str, answer_type: str) -> int:
        return self.per_split.get(split, {}).get(answer_type, 0)


def _iter_records(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: malformed record: {exc}") from exc
            if not isinstance(record, dict):
                raise DatasetError(f"{path}:{lineno}: record is not an object")
            yield lineno, record


def load_corpus(path) -> list[Chunk]:
    """Load a corpus file, preserving record order and rejecting duplicates."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"corpus file not found: {path}")
    chunks: list[Chunk] = []
    seen: set[str] = set()
    for lineno, rec in _iter_records(path):
        known = {"chunk_id", "doc_id", "text", "token_count"}
        try:
            chunk = Chunk(
                chunk_id=str(rec["chunk_id"]),
                doc_id=str(rec.get("doc_id", "")),
                text=str(rec["text"]),
                token_count=int(rec.get("token_count", 0)),
                extra={k: v for k, v in rec.items() if k not in known},
            )
        except KeyError as exc:
            raise DatasetError(f"{path}:{lineno}: missing field {exc}") from exc
        if chunk.chunk_id in seen:
            raise DatasetError(
                f"{path}:{lineno}: duplicate chunk_id {chunk.chunk_id!r}"
            )
        seen.add(chunk.chunk_id)
        chunks.append(chunk)
    return chunks


def load_qa(path) -> tuple[list[QaPair], SplitCensus]:
    """Load a QA file and compute its split census."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"QA file not found: {path}")
    pairs: list[QaPair] = []
    seen: set[str] = set()
    census: dict[str, dict[str, int]] = {}
    known = {
        "qa_id",
        "question",
        "gold_answer",
        "answer_type",
        "split",
        "supporting_chunk_ids",
    }
    for lineno, rec in _iter_records(path):
        support = rec.get("supporting_chunk_ids")
        try:
            pair = QaPair(
                qa_id=str(rec["qa_id"]),
                question=str(rec["question"]),
                gold_answer=str(rec["gold_answer"]),
                answer_type=str(rec["answer_type"]),
                split=str(rec["split"]),
                supporting_chunk_ids=tuple(support) if support is not None else None,
                extra={k: v for k, v in rec.items() if k not in known},
            )
        except KeyError as exc:
            raise DatasetError(f"{path}:{lineno}: missing field {exc}") from exc
        except DatasetError as exc:
            raise DatasetError(f"{path}:{lineno}: {exc}") from exc
        if pair.qa_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate qa_id {pair.qa_id!r}")
        seen.add(pair.qa_id)
        pairs.append(pair)
        bucket = census.setdefault(pair.split, {"rows": 0, "exact": 0, "normal": 0})
        bucket["rows"] += 1
        bucket[pair.answer_type] += 1
    return pairs, SplitCensus(per_split=census)


def check_supporting_ids(pairs: list[QaPair], chunks: list[Chunk]) -> list[str]:
    """Return qa_ids whose supporting_chunk_ids reference missing chunks."""
    ids = {c.chunk_id for c in chunks}
    bad = []
    for pair in pairs:
        if pair.supporting_chunk_ids and any(
            cid not in ids for cid in pair.supporting_chunk_ids
        ):
            bad.append(pair.qa_id)
    return bad
