"""Quote and QuoteSet value types."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, List, Optional, Tuple

_WHITESPACE_RUN = re.compile(r"\s+")


def collapse_whitespace(text: str) -> str:
    return _WHITESPACE_RUN.sub(" ", text).strip()


@dataclass(frozen=True)
class Quote:
    text: str
    match: Optional[Tuple[int, int]] = None
    normalized: bool = False

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("Quote text must not be empty.")
        object.__setattr__(self, "text", self.text.strip())

    @property
    def key(self) -> str:
        return collapse_whitespace(self.text)

    def with_match(self, start: int, end: int, normalized: bool) -> "Quote":
        return replace(self, match=(start, end), normalized=normalized)


class QuoteSet:
    """Ordered, deduplicated quotes. Equality compares quote texts in order."""

    def __init__(self, quotes: Iterable[Quote] = ()):
        self._quotes: List[Quote] = []
        seen = set()
        for quote in quotes:
            if quote.key in seen:
                continue
            seen.add(quote.key)
            self._quotes.append(quote)

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "QuoteSet":
        return cls(Quote(t) for t in texts)

    @property
    def quotes(self) -> Tuple[Quote, ...]:
        return tuple(self._quotes)

    @property
    def is_empty(self) -> bool:
        return not self._quotes

    def texts(self) -> List[str]:
        return [q.text for q in self._quotes]

    def __iter__(self) -> Iterator[Quote]:
        return iter(self._quotes)

    def __len__(self) -> int:
        return len(self._quotes)

    def __getitem__(self, index: int) -> Quote:
        return self._quotes[index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuoteSet):
            return NotImplemented
        return self.texts() == other.texts()

    def __repr__(self) -> str:
        return f"QuoteSet({self.texts()!r})"
