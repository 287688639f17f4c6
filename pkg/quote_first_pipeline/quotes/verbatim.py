"""Check that quotes occur verbatim in their context."""
from __future__ import annotations

import logging
from typing import List, Optional, Tuple

from ..errors import NonVerbatimError
from .quote_set import Quote, QuoteSet

logger = logging.getLogger(__name__)


def _collapse_with_offsets(text: str) -> Tuple[str, List[int]]:
    """Collapse whitespace runs to one space, remembering each char's original index."""
    chars: List[str] = []
    offsets: List[int] = []
    in_space = False
    for i, ch in enumerate(text):
        if ch.isspace():
            if not in_space:
                chars.append(" ")
                offsets.append(i)
            in_space = True
        else:
            chars.append(ch)
            offsets.append(i)
            in_space = False
    return "".join(chars), offsets


def _closest_prefix(needle: str, haystack: str) -> Tuple[str, Optional[int]]:
    # find() success is monotone in prefix length, so binary search works.
    lo, hi = 0, len(needle)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if haystack.find(needle[:mid]) >= 0:
            lo = mid
        else:
            hi = mid - 1
    if lo == 0:
        return "", None
    return needle[:lo], haystack.find(needle[:lo])


def verify_verbatim(q: Quote, context: str) -> Quote:
    """Locate ``q`` in ``context`` exactly, then with whitespace collapsed.

    Returns a copy of the quote with ``match`` set to the span in the
    original context.
    """
    start = context.find(q.text)
    if start >= 0:
        return q.with_match(start, start + len(q.text), normalized=False)

    collapsed_context, offsets = _collapse_with_offsets(context)
    needle = " ".join(q.text.split())
    position = collapsed_context.find(needle) if needle else -1
    if position >= 0:
        end_index = position + len(needle) - 1
        return q.with_match(offsets[position], offsets[end_index] + 1, normalized=True)

    prefix, where = _closest_prefix(needle, collapsed_context)
    raise NonVerbatimError(q.text, prefix, offsets[where] if where is not None else None)


def verify_quote_set(qs: QuoteSet, context: str, sample_id: str = "") -> Tuple[QuoteSet, List[Quote]]:
    """Verify every quote; return the surviving set and the dropped quotes."""
    kept: List[Quote] = []
    dropped: List[Quote] = []
    for quote in qs:
        try:
            kept.append(verify_verbatim(quote, context))
        except NonVerbatimError as exc:
            logger.warning("Dropping non-verbatim quote for sample '%s': %s", sample_id, exc)
            dropped.append(quote)
    return QuoteSet(kept), dropped
