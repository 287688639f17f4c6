"""Load QA corpora into RawSample lists.

Two layouts are supported:

* ``flat-jsonl``: one ``{id, question, context, answer}`` object per line.
* ``nested-json``: a JSON array of multi-hop records with ``_id`` and a
  ``context`` made of titled sentence lists. Both the positional
  ``[[title, [sentence, ...]], ...]`` form and the columnar
  ``{"title": [...], "sentences": [[...], ...]}`` form are accepted.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, Iterable, List, Tuple

from ..errors import CorpusFormatError, DataError, DuplicateIdError
from ..storage import canonical_json, text_digest
from .records import ParagraphedContext, RawSample

logger = logging.getLogger(__name__)

_FIELDS = ("id", "question", "context", "answer")


def flatten_context(pc: ParagraphedContext) -> str:
    """Title on its own line, sentences joined by a space, blank line between paragraphs."""
    blocks = [f"{title}\n{' '.join(sentences)}" for title, sentences in pc.paragraphs]
    return "\n\n".join(blocks)


def corpus_digest(samples: Iterable[RawSample]) -> str:
    return text_digest("\n".join(canonical_json(s.to_dict()) for s in samples))


def _require_text(record: Dict[str, Any], key: str, index: int, field_name: str) -> str:
    value = record.get(key)
    if not isinstance(value, str) or not value.strip():
        raise CorpusFormatError(index, field_name)
    return value


def _paragraphs(raw_context: Any, index: int) -> ParagraphedContext:
    if isinstance(raw_context, dict):
        titles = raw_context.get("title")
        sentences = raw_context.get("sentences")
        if not isinstance(titles, list) or not isinstance(sentences, list) or len(titles) != len(sentences):
            raise CorpusFormatError(index, "context", "has mismatched title/sentences columns")
        pairs: List[Tuple[str, List[str]]] = list(zip(titles, sentences))
    elif isinstance(raw_context, list):
        pairs = []
        for entry in raw_context:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise CorpusFormatError(index, "context", "entry is not a [title, sentences] pair")
            pairs.append((entry[0], entry[1]))
    else:
        raise CorpusFormatError(index, "context")

    for title, sents in pairs:
        if not isinstance(title, str) or not isinstance(sents, list) or not all(isinstance(s, str) for s in sents):
            raise CorpusFormatError(index, "context", "paragraph is not a title with a sentence list")
    try:
        return ParagraphedContext.from_pairs(pairs)
    except ValueError as exc:
        raise CorpusFormatError(index, "context", str(exc)) from exc


def _load_flat(path: Path) -> List[RawSample]:
    samples = []
    with path.open("r", encoding="utf-8") as f:
        index = -1
        for line in f:
            if not line.strip():
                continue
            index += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(index, "<line>", f"is not valid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusFormatError(index, "<line>", "is not a JSON object")
            values = [_require_text(record, key, index, key) for key in _FIELDS]
            samples.append(RawSample(*values))
    return samples


def _load_nested(path: Path) -> List[RawSample]:
    with path.open("r", encoding="utf-8") as f:
        text = f.read()
    if not text.strip():
        return []
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise DataError(f"{path}: nested-json corpus must be a JSON array.")

    samples = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise CorpusFormatError(index, "<record>", "is not a JSON object")
        id_key = "_id" if "_id" in record else "id"
        sample_id = _require_text(record, id_key, index, "_id")
        question = _require_text(record, "question", index, "question")
        answer = _require_text(record, "answer", index, "answer")
        if "context" not in record:
            raise CorpusFormatError(index, "context")
        context = flatten_context(_paragraphs(record["context"], index))
        samples.append(RawSample(sample_id, question, context, answer))
    return samples


def load_corpus(path: Path, format: str = "flat-jsonl") -> List[RawSample]:
    """Read a corpus file, preserving its order and rejecting duplicate ids."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Corpus file not found: {path}")
    if format == "flat-jsonl":
        samples = _load_flat(path)
    elif format == "nested-json":
        samples = _load_nested(path)
    else:
        raise DataError(f"Unknown corpus format '{format}'")

    counts = Counter(s.id for s in samples)
    duplicates = [sample_id for sample_id, n in counts.items() if n > 1]
    if duplicates:
        raise DuplicateIdError(duplicates)
    logger.info("Loaded %d samples from %s (%s)", len(samples), path, format)
    return samples
