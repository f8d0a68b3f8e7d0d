import json

import pytest

from ragharness.dataset import (
    DatasetError,
    check_supporting_ids,
    load_corpus,
    load_qa,
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


CHUNKS = [
    {"chunk_id": "c1", "doc_id": "d1", "text": "alpha beta", "token_count": 2},
    {"chunk_id": "c2", "doc_id": "d1", "text": "gamma delta", "token_count": 2},
]
QA = [
    {
        "qa_id": "q1",
        "question": "What is alpha?",
        "gold_answer": "beta",
        "answer_type": "exact",
        "split": "test",
        "supporting_chunk_ids": ["c1"],
    },
    {
        "qa_id": "q2",
        "question": "What is gamma?",
        "gold_answer": "delta",
        "answer_type": "normal",
        "split": "train",
    },
]


def test_load_corpus_roundtrip(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_jsonl(path, CHUNKS)
    chunks = load_corpus(path)
    assert [c.chunk_id for c in chunks] == ["c1", "c2"]
    assert chunks[0].text == "alpha beta"


def test_load_corpus_duplicate_id(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_jsonl(path, CHUNKS + [CHUNKS[0]])
    with pytest.raises(DatasetError, match="duplicate chunk_id"):
        load_corpus(path)


def test_load_corpus_malformed_line_reports_lineno(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text('{"chunk_id": "c1", "text": "x"}\nnot json\n', encoding="utf-8")
    with pytest.raises(DatasetError, match=":2"):
        load_corpus(path)


def test_load_corpus_extra_fields_preserved(tmp_path):
    path = tmp_path / "corpus.jsonl"
    rec = dict(CHUNKS[0], source_url="https://example.org")
    write_jsonl(path, [rec])
    (chunk,) = load_corpus(path)
    assert chunk.extra == {"source_url": "https://example.org"}


def test_load_qa_census(tmp_path):
    path = tmp_path / "qa.jsonl"
    write_jsonl(path, QA)
    pairs, census = load_qa(path)
    assert len(pairs) == 2
    assert census.rows("test") == 1
    assert census.count("test", "exact") == 1
    assert census.count("train", "normal") == 1
    assert census.total_rows == 2


def test_load_qa_rejects_bad_answer_type(tmp_path):
    path = tmp_path / "qa.jsonl"
    write_jsonl(path, [dict(QA[0], answer_type="fuzzy")])
    with pytest.raises(DatasetError, match="answer_type"):
        load_qa(path)


def test_load_qa_rejects_duplicate_qa_id(tmp_path):
    path = tmp_path / "qa.jsonl"
    write_jsonl(path, [QA[0], QA[0]])
    with pytest.raises(DatasetError, match="duplicate qa_id"):
        load_qa(path)


def test_check_supporting_ids(tmp_path):
    corpus_path = tmp_path / "corpus.jsonl"
    qa_path = tmp_path / "qa.jsonl"
    write_jsonl(corpus_path, CHUNKS[:1])
    bad_qa = dict(QA[0], qa_id="q3", supporting_chunk_ids=["missing"])
    write_jsonl(qa_path, [QA[0], bad_qa])
    chunks = load_corpus(corpus_path)
    pairs, _ = load_qa(qa_path)
    assert check_supporting_ids(pairs, chunks) == ["q3"]


def test_missing_file():
    with pytest.raises(DatasetError, match="not found"):
        load_corpus("/nonexistent/corpus.jsonl")
