"""Render and parse the ``##begin_quote## ... ##end_quote##`` markup."""
from __future__ import annotations

import re
from typing import List

from ..errors import QuoteContractError, QuoteFormatError, QuoteParseError
from .quote_set import Quote, QuoteSet

BEGIN_MARKER = "##begin_quote##"
END_MARKER = "##end_quote##"

_MARKER = re.compile(re.escape(BEGIN_MARKER) + "|" + re.escape(END_MARKER))
PARSE_MODES = ("strict", "lenient")


def _byte_offset(raw: str, index: int) -> int:
    return len(raw[:index].encode("utf-8"))


def render_quote_block(qs: QuoteSet) -> str:
    if qs.is_empty:
        raise QuoteFormatError("Cannot render an empty quote set.")
    lines = []
    for quote in qs:
        if BEGIN_MARKER in quote.text or END_MARKER in quote.text:
            raise QuoteFormatError(f"Quote contains a marker token: '{quote.text[:40]}'")
        lines.append(f"{BEGIN_MARKER} {quote.text} {END_MARKER}")
    return "\n".join(lines)


def parse_quote_block(raw: str, mode: str = "lenient") -> QuoteSet:
    """Extract quotes between balanced markers.

    An empty QuoteSet is returned when no quotes are present. Unbalanced
    markers raise QuoteParseError in either mode; text outside markers
    raises QuoteContractError only in strict mode.
    """
    if mode not in PARSE_MODES:
        raise ValueError(f"mode must be one of {PARSE_MODES}")

    quotes: List[Quote] = []
    open_at = None
    cursor = 0
    for token in _MARKER.finditer(raw):
        if token.group() == BEGIN_MARKER:
            if open_at is not None:
                raise QuoteParseError("Nested begin marker", _byte_offset(raw, token.start()))
            _check_stray(raw, cursor, token.start(), mode)
            open_at = token.end()
        else:
            if open_at is None:
                raise QuoteParseError("End marker without begin marker", _byte_offset(raw, token.start()))
            text = raw[open_at:token.start()].strip()
            if text:
                quotes.append(Quote(text))
            elif mode == "strict":
                raise QuoteContractError("Empty quote", _byte_offset(raw, open_at))
            open_at = None
            cursor = token.end()

    if open_at is not None:
        raise QuoteParseError("Begin marker never closed", _byte_offset(raw, open_at - len(BEGIN_MARKER)))
    _check_stray(raw, cursor, len(raw), mode)
    return QuoteSet(quotes)


def _check_stray(raw: str, start: int, end: int, mode: str) -> None:
    if mode != "strict":
        return
    segment = raw[start:end]
    if segment.strip():
        first = start + (len(segment) - len(segment.lstrip()))
        raise QuoteContractError("Text outside quote markers", _byte_offset(raw, first))
