import json
import random

import pytest

from quote_first_pipeline.dataset import (
    ParagraphedContext,
    RawSample,
    flatten_context,
    load_corpus,
    load_split,
    save_split,
    split_dataset,
)
from quote_first_pipeline.errors import CorpusFormatError, DuplicateIdError, SplitRangeError


def _synthetic(n):
    return [RawSample(f"s{i}", f"question {i}?", f"context {i}.", f"answer {i}") for i in range(n)]


def test_load_flat_rugao_line(tmp_path):
    row = {
        "id": "x1",
        "question": "Unlike Xuzhou, where is Rugao under the adminstration of?",
        "context": "Rugao () is a county-level city under the administration of Nantong.",
        "answer": "Nantong",
    }
    path = tmp_path / "corpus.jsonl"
    path.write_text(json.dumps(row) + "\n", encoding="utf-8")
    samples = load_corpus(path)
    assert samples == [RawSample(**row)]


def test_load_empty_files(tmp_path):
    flat = tmp_path / "empty.jsonl"
    flat.write_text("", encoding="utf-8")
    nested = tmp_path / "empty.json"
    nested.write_text("", encoding="utf-8")
    assert load_corpus(flat) == []
    assert load_corpus(nested, "nested-json") == []


def test_load_nested_matches_hand_flattening(tmp_path):
    rng = random.Random(3)
    records, expected = [], []
    for i in range(10):
        paragraphs = [
            [f"Title {i}.{p}", [f"Sentence {i}.{p}.{k}." for k in range(rng.randint(1, 3))]]
            for p in range(rng.randint(1, 4))
        ]
        records.append({"_id": f"n{i}", "question": f"q{i}?", "answer": f"a{i}", "context": paragraphs})
        expected.append("\n\n".join(title + "\n" + " ".join(sents) for title, sents in paragraphs))
    path = tmp_path / "nested.json"
    path.write_text(json.dumps(records), encoding="utf-8")

    samples = load_corpus(path, "nested-json")
    assert [s.id for s in samples] == [f"n{i}" for i in range(10)]
    assert [s.context for s in samples] == expected


def test_load_nested_columnar_context(tmp_path):
    record = {
        "id": "c1",
        "question": "q?",
        "answer": "a",
        "context": {"title": ["T1", "T2"], "sentences": [["a."], ["b.", "c."]]},
    }
    path = tmp_path / "hf.json"
    path.write_text(json.dumps([record]), encoding="utf-8")
    assert load_corpus(path, "nested-json")[0].context == "T1\na.\n\nT2\nb. c."


def test_malformed_record_names_index_and_field(tmp_path):
    path = tmp_path / "bad.jsonl"
    good = {"id": "a", "question": "q", "context": "c", "answer": "x"}
    bad = {"id": "b", "question": "q", "context": "c", "answer": "  "}
    path.write_text(json.dumps(good) + "\n\n" + json.dumps(bad) + "\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError) as err:
        load_corpus(path)
    assert err.value.index == 1
    assert err.value.field == "answer"


def test_duplicate_ids_are_listed(tmp_path):
    path = tmp_path / "dup.jsonl"
    rows = [{"id": i, "question": "q", "context": "c", "answer": "a"} for i in ("b", "a", "b", "a", "c")]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    with pytest.raises(DuplicateIdError) as err:
        load_corpus(path)
    assert err.value.ids == ["a", "b"]


@pytest.mark.parametrize(
    "pairs, expected",
    [
        ([("T", ["a.", "b."])], "T\na. b."),
        ([("T1", ["a."]), ("T2", ["b."])], "T1\na.\n\nT2\nb."),
    ],
)
def test_flatten_context(pairs, expected):
    assert flatten_context(ParagraphedContext.from_pairs(pairs)) == expected


def test_flatten_preserves_paragraph_count():
    rng = random.Random(11)
    for _ in range(50):
        pairs = [(f"T{p}", [f"w{rng.randint(0, 99)}." for _ in range(rng.randint(1, 4))]) for p in range(5)]
        assert len(flatten_context(ParagraphedContext.from_pairs(pairs)).split("\n\n")) == 5


def test_paragraphed_context_rejects_empty_paragraph():
    with pytest.raises(ValueError):
        ParagraphedContext.from_pairs([("T", [])])


def test_split_full_corpus_scale():
    samples = _synthetic(15000)
    split = split_dataset(samples, 600, seed=42)
    assert len(split.train) == 14400
    assert len(split.test) == 600
    train_ids = {s.id for s in split.train}
    test_ids = {s.id for s in split.test}
    assert not train_ids & test_ids
    assert train_ids | test_ids == {s.id for s in samples}


def test_split_is_deterministic():
    samples = _synthetic(200)
    first = split_dataset(samples, 30, seed=7)
    second = split_dataset(samples, 30, seed=7)
    assert [s.id for s in first.test] == [s.id for s in second.test]
    assert [s.id for s in first.train] == [s.id for s in second.train]
    assert [s.id for s in split_dataset(samples, 30, seed=8).test] != [s.id for s in first.test]


def test_split_zero_and_range():
    samples = _synthetic(5)
    split = split_dataset(samples, 0, seed=1)
    assert split.test == []
    assert split.train == samples
    with pytest.raises(SplitRangeError):
        split_dataset(samples, 6, seed=1)


def test_saved_splits_are_byte_identical(tmp_path):
    samples = _synthetic(50)
    save_split(split_dataset(samples, 10, seed=5), tmp_path / "a")
    save_split(split_dataset(list(samples), 10, seed=5), tmp_path / "b")
    for name in ("train.jsonl", "test.jsonl", "split_manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    loaded = load_split(tmp_path / "a")
    assert [s.id for s in loaded.test] == [s.id for s in split_dataset(samples, 10, seed=5).test]
    assert load_split(tmp_path / "missing") is None
