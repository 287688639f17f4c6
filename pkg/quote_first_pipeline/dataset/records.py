"""Data model for corpus records and splits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple


@dataclass(frozen=True)
class RawSample:
    id: str
    question: str
    context: str
    answer: str

    def __post_init__(self) -> None:
        for name in ("id", "question", "context", "answer"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"RawSample.{name} must be a non-empty string.")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "question": self.question,
            "context": self.context,
            "answer": self.answer,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RawSample":
        return cls(
            id=data["id"],
            question=data["question"],
            context=data["context"],
            answer=data["answer"],
        )


@dataclass(frozen=True)
class ParagraphedContext:
    """Titled paragraphs of sentences, the nested layout of multi-hop corpora."""

    paragraphs: Tuple[Tuple[str, Tuple[str, ...]], ...]

    def __post_init__(self) -> None:
        if not self.paragraphs:
            raise ValueError("ParagraphedContext needs at least one paragraph.")
        for title, sentences in self.paragraphs:
            if not sentences:
                raise ValueError(f"Paragraph '{title}' has no sentences.")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[str, Sequence[str]]]) -> "ParagraphedContext":
        return cls(tuple((title, tuple(sentences)) for title, sentences in pairs))


@dataclass
class DatasetSplit:
    train: List[RawSample]
    test: List[RawSample]
    seed: int
    source_digest: str

    def manifest(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "source_digest": self.source_digest,
            "sizes": {"train": len(self.train), "test": len(self.test)},
        }
